#include "speclab/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "speclab/errors.hpp"

namespace speclab {
namespace {

constexpr int kMaxInverseIterations = 200;

}  // namespace

TailLaw TailLaw::power_log(double p, int k) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("power_log requires p > 0");
  if (k < 0) throw ConfigError("power_log requires integer k >= 0");
  TailLaw law;
  law.family_ = TailFamily::power_log;
  law.p_ = p;
  law.k_ = k;
  law.monotone_from_ = k == 0 ? 0.0 : std::exp(static_cast<double>(k) / p);
  law.resolve_clamp();
  return law;
}

TailLaw TailLaw::stretched_exp(double delta) {
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("stretched_exp requires 0 < delta <= 1");
  TailLaw law;
  law.family_ = TailFamily::stretched_exp;
  law.delta_ = delta;
  law.monotone_from_ = 0.0;
  law.resolve_clamp();
  return law;
}

void TailLaw::resolve_clamp() {
  const double start = std::max(monotone_from_, 1.0);
  if (log_f(start) >= 0.0) {
    clamp_point_ = start;
    return;
  }
  // log f is increasing on [start, inf) and diverges; bisect for log f = 0.
  double lo = start;
  double hi = 2.0 * start;
  while (log_f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_f(mid) >= 0.0 ? hi : lo) = mid;
  }
  clamp_point_ = hi;
}

double TailLaw::log_f(double x) const {
  if (family_ == TailFamily::stretched_exp) return std::pow(x, delta_);
  if (k_ == 0) return p_ * std::log(x);
  return p_ * std::log(x) - static_cast<double>(k_) * std::log(std::log(x));
}

double TailLaw::log_f_slope(double x) const {
  if (family_ == TailFamily::stretched_exp) return delta_ * std::pow(x, delta_ - 1.0);
  if (k_ == 0) return p_ / x;
  return p_ / x - static_cast<double>(k_) / (x * std::log(x));
}

double TailLaw::domain_floor() const {
  return family_ == TailFamily::power_log && k_ > 0 ? 1.0 : 0.0;
}

std::string TailLaw::describe() const {
  std::ostringstream out;
  if (family_ == TailFamily::power_log) {
    out << "power_log(p=" << p_ << ",k=" << k_ << ")";
  } else {
    out << "stretched_exp(delta=" << delta_ << ")";
  }
  return out.str();
}

double f_eval(const TailLaw& law, double x) {
  if (!(x > law.domain_floor())) {
    throw DomainError("f_eval: x=" + std::to_string(x) + " outside the domain of " +
                      law.describe());
  }
  if (law.family() == TailFamily::stretched_exp) return std::exp(std::pow(x, law.delta()));
  if (law.k() == 0) return std::pow(x, law.p());
  return std::pow(x, law.p()) / std::pow(std::log(x), law.k());
}

double f_inv_log(const TailLaw& law, double log_y, double rtol) {
  const double c = law.clamp_point();
  const double log_fc = law.log_f(c);
  // Slack of a few ulps so f_inv(f(c)) is accepted.
  if (log_y < log_fc - 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(log_fc))) {
    throw DomainError("f_inv: argument below f(clamp_point) for " + law.describe());
  }
  if (log_y <= log_fc) return c;

  // Work with g(x) = log f(x) - log y, increasing on [c, inf).
  auto g = [&](double x) { return law.log_f(x) - log_y; };
  double lo = c;
  double hi = std::max(2.0 * c, c + 1.0);
  int expansions = 0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 2000 || !std::isfinite(hi)) {
      throw ConvergenceError("f_inv: could not bracket the root");
    }
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < kMaxInverseIterations; ++iter) {
    const double gx = g(x);
    if (std::abs(gx) <= rtol) return x;
    (gx < 0.0 ? lo : hi) = x;
    const double slope = law.log_f_slope(x);
    double next = slope > 0.0 ? x - gx / slope : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) return x;
    x = next;
  }
  throw ConvergenceError("f_inv: no convergence for " + law.describe());
}

double f_inv(const TailLaw& law, double y, double rtol) {
  if (!(y > 0.0)) throw DomainError("f_inv: argument must be positive");
  return f_inv_log(law, std::log(y), rtol);
}

double tail_prob(const TailLaw& law, double x) {
  if (x < law.clamp_point()) return 1.0;
  return std::min(1.0, std::exp(-law.log_f(x)));
}

double sample_omega(const TailLaw& law, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("sample_omega: u must lie in (0, 1)");
  const double log_y = std::max(-std::log(u), law.log_f(law.clamp_point()));
  return f_inv_log(law, log_y);
}

double p_n(const TailLaw& law, double site_weight_value, double gamma, double x) {
  if (site_weight_value == 1.0) return std::min(1.0, 1.0 / (gamma * x));
  // Below f(c) every threshold collapses to the clamp point.
  const double log_y = std::max(std::log(gamma) + std::log(x), law.log_f(law.clamp_point()));
  return tail_prob(law, site_weight_value * f_inv_log(law, log_y));
}

}  // namespace speclab
