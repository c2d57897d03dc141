#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "speclab/lattice.hpp"
#include "speclab/tails.hpp"

namespace speclab {

/// One realization of the decaying potential V(n) = omega_n / <n>^alpha.
struct PotentialSample {
  BoxSpec box;
  double alpha = 0.0;
  std::vector<double> omegas;  ///< raw omega_n by site ordinal
  std::vector<double> values;  ///< V(n) by site ordinal
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

/// Draws omega_n from derive_stream(seed, trial, site_key(n)); the same site
/// gets the same omega in every box of the trial.
PotentialSample sample_potential(const BoxSpec& box, const TailLaw& law, double alpha,
                                 std::uint64_t master_seed, std::uint64_t trial_index);

/// Potential from explicitly supplied omegas (ordered by site ordinal).
PotentialSample potential_from_omegas(const BoxSpec& box, std::vector<double> omegas,
                                      double alpha);

enum class OperatorKind { full, diagonal, free };

std::string to_string(OperatorKind kind);

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Matrix-free H_L = 1_L (H_0 + V) 1_L with Dirichlet truncation at the box
/// boundary. Depending on `kind` either part may be switched off.
class LatticeOperator {
 public:
  LatticeOperator(BoxSpec box, std::vector<double> diagonal, OperatorKind kind);

  const BoxSpec& box() const { return box_; }
  OperatorKind kind() const { return kind_; }
  std::size_t size() const { return diagonal_.size(); }
  std::span<const double> diagonal() const { return diagonal_; }
  bool has_hopping() const { return kind_ != OperatorKind::diagonal; }

  /// out = H u. O(d |Lambda_L|).
  void apply(std::span<const double> u, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> u) const;

  /// 2d (if hopping) + max |V|; an upper bound on the spectral radius.
  double norm_bound() const;

  /// Nonzeros ordered by (row, col).
  std::vector<Triplet> triplets() const;

  /// Row-major dense matrix; throws CapacityError above `cap` sites.
  std::vector<double> dense(std::size_t cap) const;

 private:
  BoxSpec box_;
  std::vector<double> diagonal_;
  OperatorKind kind_;
  std::vector<std::size_t> strides_;
};

LatticeOperator build_hamiltonian(const BoxSpec& box, const PotentialSample& potential,
                                  OperatorKind kind);
LatticeOperator free_operator(const BoxSpec& box);

/// Dirichlet spectrum of H_0 on the box: sums of 2 cos(j pi / (2L+2)), ascending.
std::vector<double> free_laplacian_eigs(int d, int L, std::uint64_t cap = kDefaultSiteCap);

/// Potential values sorted descending (the spectrum of V).
std::vector<double> v_spectrum(const PotentialSample& potential);

/// "row col value" per line, 17 significant digits.
void write_triplets(std::ostream& out, const std::vector<Triplet>& triplets);

}  // namespace speclab
