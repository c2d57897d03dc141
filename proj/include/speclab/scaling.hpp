#pragma once

#include <cstdint>
#include <string>

#include "speclab/lattice.hpp"
#include "speclab/tails.hpp"

namespace speclab {

enum class ScalingMode { theorem3_case1, theorem3_case2, flat_alpha0, empirical };

std::string to_string(ScalingMode mode);
ScalingMode parse_scaling_mode(const std::string& name);

/// Tolerance on alpha*p - d when deciding the regime.
inline constexpr double kRegimeTolerance = 1e-12;

/// |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2).
double surface_const(int d);

/// gamma_{p,k} L^{d - alpha p} for alpha p < d.
double gamma_theorem3_case1(int d, double alpha, double p, int k, double L);
/// C_{d-1}/(d - alpha p) * (d/(d - alpha p))^k.
double gamma_pk(int d, double alpha, double p, int k);

/// h_k(x) = x (log x)^k on x > 1.
double h_eval(int k, double x);
/// Inverse of h_k: x > 1 with h_k(x) = y, for any y > 0 (k = 0 is the identity).
double h_inv(int k, double y, double rtol = 1e-12);

/// h_k^{-1}(gamma_k (log L)^{k+1}) for alpha p = d.
double gamma_theorem3_case2(int d, double alpha, double p, int k, double L);
/// C_{d-1}/(k+1) * p^k.
double gamma_k(int d, double p, int k);

/// |Lambda_L| = (2L+1)^d.
double gamma_flat(const BoxSpec& spec);

struct Assumption2Profile {
  double sum = 0.0;          ///< sum_n p_n(x)
  double max_term = 0.0;     ///< max_n p_n(x)
  double sum_squares = 0.0;  ///< sum_n p_n(x)^2
};

struct SumOptions {
  unsigned workers = 1;
  std::uint64_t site_cap = kDefaultSiteCap;
};

/// Exact deterministic sum over the whole box; bitwise identical for any
/// worker count.
Assumption2Profile assumption2_profile(const BoxSpec& spec, const TailLaw& law, double alpha,
                                       double gamma, double x, const SumOptions& options = {});

double assumption2_sum(const BoxSpec& spec, const TailLaw& law, double alpha, double gamma,
                       double x, const SumOptions& options = {});

/// Gamma with assumption2_sum(gamma, target_x) = 1/target_x (rtol 1e-9).
double gamma_empirical(const BoxSpec& spec, const TailLaw& law, double alpha, double target_x,
                       const SumOptions& options = {});

struct ScalingPlan {
  ScalingMode mode = ScalingMode::flat_alpha0;
  double gamma_L = 0.0;
  double surface = 0.0;         ///< C_{d-1}
  double regime_constant = 0.0;  ///< gamma_{p,k} or gamma_k; 0 when unused
};

/// Throws RegimeError when the parameters do not fit the mode.
void validate_scaling(ScalingMode mode, int d, const TailLaw& law, double alpha);

ScalingPlan resolve_scaling(ScalingMode mode, const BoxSpec& spec, const TailLaw& law,
                            double alpha, double target_x = 1.0, const SumOptions& options = {});

}  // namespace speclab
