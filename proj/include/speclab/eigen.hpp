#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "speclab/operator.hpp"
#include "speclab/rng.hpp"

namespace speclab {

enum class SpectrumMethod { dense, lanczos };

std::string to_string(SpectrumMethod method);

struct Spectrum {
  std::vector<double> values;     ///< ascending
  SpectrumMethod method = SpectrumMethod::dense;
  std::vector<double> residuals;  ///< ||Hv - lambda v|| per value (lanczos only)
  bool converged = true;
  std::size_t matvecs = 0;
};

inline constexpr std::size_t kDefaultDenseCap = 4096;
/// d = 1 operators are tridiagonal and bypass the Householder step, so they
/// are allowed far beyond the dense cap.
inline constexpr std::size_t kTridiagonalCap = std::size_t{1} << 22;

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal (off.size() == diag.size() - 1), by implicit-shift
/// QL. Throws ConvergenceError after 30 n sweeps.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> off);

/// Eigenvalues (ascending) of a dense symmetric row-major n x n matrix:
/// Householder reduction to tridiagonal form, then QL.
std::vector<double> symmetric_eigenvalues(std::vector<double> matrix, std::size_t n);

/// Full eigen-decomposition of a small symmetric matrix (cyclic Jacobi).
/// vectors[i * n + j] is component i of eigenvector j; values ascending.
struct SmallEigen {
  std::vector<double> values;
  std::vector<double> vectors;
};
SmallEigen jacobi_eigen(std::vector<double> matrix, std::size_t n);

/// All eigenvalues of the operator. d = 1 goes through the tridiagonal path
/// (cap kTridiagonalCap); otherwise the matrix is materialized (cap `dense_cap`).
Spectrum dense_spectrum(const LatticeOperator& op, std::size_t dense_cap = kDefaultDenseCap);

struct LanczosOptions {
  std::size_t count = 1;          ///< number of largest eigenvalues wanted
  double tol = 1e-10;             ///< residual tolerance relative to op.norm_bound()
  std::size_t max_matvecs = 20000;
  std::size_t max_basis = 0;      ///< 0 picks max(2 count + 20, 40), capped at n
};

/// The `count` algebraically largest eigenvalues by Lanczos with full
/// reorthogonalization and thick restart, followed by deflated passes from
/// fresh start vectors until no eigenvalue above the count-th one is missing
/// (this catches repeated eigenvalues). Start vectors come from `start`.
/// max_matvecs bounds the iterations; the final residual check costs `count`
/// more. On hitting the budget the best current values are returned with
/// converged = false.
Spectrum extremal_topk(const LatticeOperator& op, const LanczosOptions& options,
                       CounterStream& start);

}  // namespace speclab
