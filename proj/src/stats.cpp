#include "speclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "speclab/errors.hpp"
#include "speclab/parallel.hpp"

namespace speclab {
namespace {

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

// F(t) = #{v <= t} / n for an ascending sample.
double ecdf(const std::vector<double>& sorted, double t) {
  const auto count = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
  return static_cast<double>(count) / static_cast<double>(sorted.size());
}

double poisson_pmf(std::int64_t k, double mean) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

// P(X >= k)
double poisson_upper(std::int64_t k, double mean) {
  if (k <= 0) return 1.0;
  if (mean == 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(k), mean);
}

}  // namespace

std::string to_string(PointSource source) { return source == PointSource::H ? "H" : "V"; }

RescaledPointSet rescale(std::span<const double> descending, const TailLaw& law, double gamma,
                         PointSource source) {
  if (!(gamma > 0.0)) throw DomainError("rescale requires gamma > 0");
  RescaledPointSet set;
  set.source = source;
  const double c = law.clamp_point();
  for (double e : descending) {
    if (e >= c && e > 0.0) {
      set.points.push_back(f_eval(law, e) / gamma);
    } else {
      ++set.dropped_below_threshold;
    }
  }
  return set;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ConfigError("ks_distance needs nonempty samples");
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double t;
    if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
      t = sa[i];
    } else {
      t = sb[j];
    }
    while (i < sa.size() && sa[i] == t) ++i;
    while (j < sb.size() && sb[j] == t) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return worst;
}

double levy_distance(std::span<const double> a, std::span<const double> b, double tol) {
  const double ks = ks_distance(a, b);
  if (ks == 0.0) return 0.0;
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  // Both suprema are attained right at a jump of the left-hand CDF.
  auto admissible = [&](double eps) {
    for (double t : sb) {
      if (ecdf(sb, t) > ecdf(sa, t + eps) + eps) return false;
    }
    for (double s : sa) {
      if (ecdf(sa, s) - eps > ecdf(sb, s + eps)) return false;
    }
    return true;
  };
  double lo = 0.0, hi = ks;
  if (!admissible(hi)) return ks;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (admissible(mid) ? hi : lo) = mid;
  }
  return hi;
}

void validate_intervals(std::span<const Interval> intervals) {
  std::vector<Interval> sorted(intervals.begin(), intervals.end());
  for (const auto& iv : sorted) {
    if (!(iv.lo > 0.0) || !(iv.hi > iv.lo)) {
      throw ConfigError("intervals must satisfy 0 < lo < hi");
    }
  }
  std::sort(sorted.begin(), sorted.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].lo < sorted[i - 1].hi) throw ConfigError("intervals overlap");
  }
}

double poisson_intensity(const Interval& interval) {
  return 1.0 / interval.lo - (std::isinf(interval.hi) ? 0.0 : 1.0 / interval.hi);
}

std::vector<std::int64_t> count_in_intervals(std::span<const double> descending,
                                             std::span<const Interval> intervals) {
  validate_intervals(intervals);
  // #{p >= x} for a descending sequence
  auto at_least = [&](double x) {
    return std::partition_point(descending.begin(), descending.end(),
                                [x](double p) { return p >= x; }) -
           descending.begin();
  };
  std::vector<std::int64_t> counts;
  counts.reserve(intervals.size());
  for (const auto& iv : intervals) {
    const auto upper = std::isinf(iv.hi) ? 0 : at_least(iv.hi);
    counts.push_back(static_cast<std::int64_t>(at_least(iv.lo) - upper));
  }
  return counts;
}

PoissonReport poisson_gof(std::span<const std::int64_t> per_trial_counts, const Interval& interval) {
  if (per_trial_counts.size() < kMinGofTrials) {
    throw ConfigError("poisson_gof needs at least " + std::to_string(kMinGofTrials) + " trials");
  }
  validate_intervals(std::span<const Interval>(&interval, 1));
  PoissonReport report;
  report.interval = interval;
  report.n_trials = per_trial_counts.size();
  const double n = static_cast<double>(report.n_trials);
  const double mean = poisson_intensity(interval);
  report.expected_mean = mean;

  double sum = 0.0, sum_sq = 0.0;
  for (auto c : per_trial_counts) {
    sum += static_cast<double>(c);
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
  }
  report.empirical_mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * report.empirical_mean * report.empirical_mean) / (n - 1.0));
  report.standard_error = std::sqrt(var / n);

  // Pool consecutive counts until each cell expects >= 5; the last cell is a tail.
  constexpr double kMinExpected = 5.0;
  std::int64_t start = 0;
  for (;;) {
    double expected = 0.0;
    std::int64_t k = start;
    while (expected < kMinExpected && n * poisson_upper(k, mean) >= kMinExpected * 1e-12) {
      expected += n * poisson_pmf(k, mean);
      ++k;
    }
    if (expected >= kMinExpected && n * poisson_upper(k, mean) >= kMinExpected) {
      report.cells.push_back({start, k - 1, expected, 0});
      start = k;
    } else {
      report.cells.push_back({start, -1, n * poisson_upper(start, mean), 0});
      break;
    }
  }
  for (auto c : per_trial_counts) {
    for (auto& cell : report.cells) {
      if (c >= cell.k_lo && (cell.k_hi < 0 || c <= cell.k_hi)) {
        ++cell.observed;
        break;
      }
    }
  }
  for (const auto& cell : report.cells) {
    const double diff = static_cast<double>(cell.observed) - cell.expected;
    report.chi_square += diff * diff / cell.expected;
  }
  report.dof = static_cast<int>(report.cells.size()) - 1;
  report.p_value = report.dof > 0
                       ? boost::math::gamma_q(0.5 * report.dof, 0.5 * report.chi_square)
                       : 1.0;
  return report;
}

double frechet_cdf(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

MaxLawReport max_law_test(std::span<const double> max_points, std::span<const double> x_grid) {
  if (max_points.empty()) throw ConfigError("max_law_test needs a nonempty sample");
  MaxLawReport report;
  const auto sorted = sorted_copy(max_points);
  const double n = static_cast<double>(sorted.size());
  report.n_trials = sorted.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = frechet_cdf(sorted[i]);
    worst = std::max({worst, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  report.ks_statistic = worst;
  const double root = std::sqrt(n);
  report.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * worst);
  report.critical_95 = 1.358 / root;
  for (double x : x_grid) {
    report.x_grid.push_back(x);
    report.empirical_cdf.push_back(ecdf(sorted, x));
    report.limit_cdf.push_back(frechet_cdf(x));
  }
  return report;
}

double exact_max_cdf_V(const BoxSpec& spec, const TailLaw& law, double alpha, double x,
                       const MaxCdfOptions& options) {
  const std::size_t count = spec.site_count(options.site_cap);
  constexpr std::size_t kChunk = std::size_t{1} << 16;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<double> logs(chunks, 0.0);
  std::vector<char> zero(chunks, 0);
  run_indexed(chunks, options.workers, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kChunk;
    const std::size_t end = std::min(count, begin + kChunk);
    double acc = 0.0;
    for_each_site(spec, begin, end, [&](std::span<const int> site, std::size_t) {
      const double tail = tail_prob(law, site_weight(site, alpha, spec.norm_kind) * x);
      if (tail >= 1.0) {
        zero[chunk] = 1;
      } else {
        acc += std::log1p(-tail);
      }
    });
    logs[chunk] = acc;
  });
  if (std::any_of(zero.begin(), zero.end(), [](char z) { return z != 0; })) return 0.0;
  return std::exp(pairwise_sum(logs));
}

double exact_max_cdf_V_limit(int d, NormKind norm, const TailLaw& law, double alpha, double x,
                             double tol) {
  if (!(alpha > 0.0)) throw DomainError("the L -> infinity limit needs alpha > 0");
  int L = 1;
  double previous = exact_max_cdf_V(BoxSpec{d, L, norm}, law, alpha, x);
  for (int step = 0; step < 24; ++step) {
    L *= 2;
    const double current = exact_max_cdf_V(BoxSpec{d, L, norm}, law, alpha, x);
    if (std::abs(current - previous) <= tol) return current;
    previous = current;
  }
  throw ConvergenceError("A_L(x) did not settle as L grew");
}

double envelope_constant_D(double alpha, double delta) {
  return std::max(1.0, std::pow(2.0, alpha * delta - 1.0));
}

Theorem4Envelope theorem4_envelope(double x, int d, double alpha, double delta, double C1,
                                   double C2) {
  if (!(alpha > 0.0)) throw DomainError("theorem4_envelope requires alpha > 0");
  if (!(delta > 0.0) || delta > 1.0) throw DomainError("theorem4_envelope requires 0 < delta <= 1");
  Theorem4Envelope env;
  env.D = envelope_constant_D(alpha, delta);
  const double xd = std::pow(x, delta);
  env.lower = 1.0 - C1 * std::exp(-xd);
  env.upper = std::exp(-C2 * std::pow(x, -d / alpha) * std::exp(-2.0 * env.D * xd));
  return env;
}

TailConstantFit fit_tail_constant(std::span<const double> x_grid, std::span<const double> limit_cdf,
                                  double delta) {
  if (x_grid.size() != limit_cdf.size()) throw ConfigError("fit_tail_constant: size mismatch");
  std::vector<double> u, y;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double miss = 1.0 - limit_cdf[i];
    if (!(miss > 0.0)) continue;
    u.push_back(-std::pow(x_grid[i], delta));
    y.push_back(std::log(miss));
  }
  TailConstantFit fit;
  fit.points = u.size();
  if (u.size() < 2) throw ConfigError("fit_tail_constant needs two usable grid points");
  const double m = static_cast<double>(u.size());
  double su = 0, sy = 0, suu = 0, suy = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    su += u[i];
    sy += y[i];
    suu += u[i] * u[i];
    suy += u[i] * y[i];
  }
  fit.slope = (m * suy - su * sy) / (m * suu - su * su);
  fit.C1 = std::exp((sy - fit.slope * su) / m);
  return fit;
}

}  // namespace speclab
