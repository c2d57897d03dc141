#pragma once

#include <string>

namespace speclab {

enum class TailFamily { power_log, stretched_exp };

/// Upper-tail law mu[x, inf) = 1/f(x) of the single-site variable omega.
///
/// Two families are supported:
///   power_log(p, k):    f(x) = x^p (log x)^{-k}, p > 0, k >= 0 integer
///   stretched_exp(d):   f(x) = exp(x^d),          0 < d <= 1
///
/// Below the clamp point c (the smallest x >= max(R, 1) with f(x) >= 1, R the
/// start of strict monotonicity) the law is not specified by its tail; all of
/// that mass sits in an atom at c.
class TailLaw {
 public:
  static TailLaw power_log(double p, int k);
  static TailLaw stretched_exp(double delta);

  TailFamily family() const { return family_; }
  double p() const { return p_; }
  int k() const { return k_; }
  double delta() const { return delta_; }

  /// R: f is strictly increasing on [R, inf).
  double monotone_from() const { return monotone_from_; }
  double clamp_point() const { return clamp_point_; }

  /// log f(x); callers guarantee x lies in the domain of f.
  double log_f(double x) const;
  /// d/dx log f(x) = f'(x)/f(x).
  double log_f_slope(double x) const;
  /// Lower end of the open domain of f (1 for power_log with k >= 1, else 0).
  double domain_floor() const;

  std::string describe() const;

  bool operator==(const TailLaw&) const = default;

 private:
  TailLaw() = default;
  void resolve_clamp();

  TailFamily family_ = TailFamily::power_log;
  double p_ = 1.0;
  int k_ = 0;
  double delta_ = 1.0;
  double monotone_from_ = 0.0;
  double clamp_point_ = 1.0;
};

inline constexpr double kDefaultInverseRtol = 1e-12;

double f_eval(const TailLaw& law, double x);

/// x >= clamp_point with f(x) = y to relative tolerance rtol.
double f_inv(const TailLaw& law, double y, double rtol = kDefaultInverseRtol);

/// Same as f_inv but takes log y, so huge arguments (e.g. e^1000) stay finite.
double f_inv_log(const TailLaw& law, double log_y, double rtol = kDefaultInverseRtol);

/// mu[x, inf): 1 below the clamp point, min(1, 1/f(x)) above it.
double tail_prob(const TailLaw& law, double x);

/// Inverse-transform sample from a uniform u in (0, 1).
double sample_omega(const TailLaw& law, double u);

/// P(f(V(n)) / gamma >= x) for a site with weight <n>^alpha.
double p_n(const TailLaw& law, double site_weight_value, double gamma, double x);

}  // namespace speclab
