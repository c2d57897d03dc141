#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "speclab/lattice.hpp"
#include "speclab/tails.hpp"

namespace speclab {

enum class PointSource { H, V };

std::string to_string(PointSource source);

/// Rescaled extremal points f(E_j)/gamma, descending.
struct RescaledPointSet {
  std::vector<double> points;
  PointSource source = PointSource::H;
  std::size_t dropped_below_threshold = 0;
};

/// Rescales the eigenvalues (descending) that lie at or above the clamp point
/// of `law`; the rest are counted as dropped.
RescaledPointSet rescale(std::span<const double> descending, const TailLaw& law, double gamma,
                         PointSource source = PointSource::H);

/// Two-sample Kolmogorov-Smirnov statistic sup_t |F_a(t) - F_b(t)|, exact.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Levy distance between the empirical laws of two samples, bisection to 1e-6
/// on epsilon with exact step-function checks. Never exceeds ks_distance.
double levy_distance(std::span<const double> a, std::span<const double> b, double tol = 1e-6);

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// Throws ConfigError unless every interval satisfies 0 < lo < hi and the
/// intervals are pairwise disjoint.
void validate_intervals(std::span<const Interval> intervals);

/// nu([lo, hi)) = 1/lo - 1/hi for nu[x, inf) = 1/x.
double poisson_intensity(const Interval& interval);

/// Counts of points in each half-open interval; points are descending.
std::vector<std::int64_t> count_in_intervals(std::span<const double> descending,
                                             std::span<const Interval> intervals);

struct PoissonCell {
  std::int64_t k_lo = 0;
  std::int64_t k_hi = 0;  ///< -1 means "and above"
  double expected = 0.0;
  std::int64_t observed = 0;
};

struct PoissonReport {
  Interval interval;
  std::size_t n_trials = 0;
  double expected_mean = 0.0;
  double empirical_mean = 0.0;
  double standard_error = 0.0;
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::vector<PoissonCell> cells;
};

inline constexpr std::size_t kMinGofTrials = 100;

/// Chi-square test of per-trial counts against Poisson(nu(interval)); cells are
/// pooled so every expected count is at least 5.
PoissonReport poisson_gof(std::span<const std::int64_t> per_trial_counts, const Interval& interval);

/// Limiting max law F(x) = exp(-1/x) (0 for x <= 0).
double frechet_cdf(double x);

/// Asymptotic Kolmogorov survival P(K > lambda).
double kolmogorov_survival(double lambda);

struct MaxLawReport {
  std::size_t n_trials = 0;
  double ks_statistic = 0.0;
  double p_value = 1.0;
  double critical_95 = 0.0;  ///< 1.358 / sqrt(n)
  std::vector<double> x_grid;
  std::vector<double> empirical_cdf;
  std::vector<double> limit_cdf;
};

/// One-sample KS of the per-trial largest rescaled points against exp(-1/x).
MaxLawReport max_law_test(std::span<const double> max_points, std::span<const double> x_grid = {});

struct MaxCdfOptions {
  unsigned workers = 1;
  std::uint64_t site_cap = kDefaultSiteCap;
};

/// A_L(x) = P(max_n V(n) <= x) = prod_n (1 - tail_prob(<n>^alpha x)), in log space.
double exact_max_cdf_V(const BoxSpec& spec, const TailLaw& law, double alpha, double x,
                       const MaxCdfOptions& options = {});

/// lim_{L -> inf} A_L(x), by doubling L until successive log values agree to `tol`.
double exact_max_cdf_V_limit(int d, NormKind norm, const TailLaw& law, double alpha, double x,
                             double tol = 1e-15);

struct Theorem4Envelope {
  double lower = 0.0;
  double upper = 0.0;
  double D = 1.0;
};

/// D = max{1, 2^{alpha delta - 1}}.
double envelope_constant_D(double alpha, double delta);

/// lower = 1 - C1 exp(-x^delta), upper = exp(-C2 x^{-d/alpha} exp(-2 D x^delta)).
Theorem4Envelope theorem4_envelope(double x, int d, double alpha, double delta, double C1,
                                   double C2);

struct TailConstantFit {
  double C1 = 0.0;
  double slope = 0.0;  ///< fitted coefficient of -x^delta (1 if the envelope shape is exact)
  std::size_t points = 0;
};

/// Least squares of log(1 - A(x)) = log C1 + slope * (-x^delta) over the grid;
/// grid points with A(x) >= 1 in floating point are skipped.
TailConstantFit fit_tail_constant(std::span<const double> x_grid, std::span<const double> limit_cdf,
                                  double delta);

}  // namespace speclab
