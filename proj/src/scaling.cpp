#include "speclab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "speclab/errors.hpp"
#include "speclab/parallel.hpp"

namespace speclab {
namespace {

constexpr std::size_t kSumChunk = std::size_t{1} << 16;

void require_power_log(const TailLaw& law, const char* what) {
  if (law.family() != TailFamily::power_log) {
    throw RegimeError(std::string(what) + " requires a power_log tail law");
  }
}

struct Partial {
  double sum = 0.0;
  double max_term = 0.0;
  double sum_squares = 0.0;
};

}  // namespace

std::string to_string(ScalingMode mode) {
  switch (mode) {
    case ScalingMode::theorem3_case1: return "theorem3_case1";
    case ScalingMode::theorem3_case2: return "theorem3_case2";
    case ScalingMode::flat_alpha0: return "flat_alpha0";
    case ScalingMode::empirical: return "empirical";
  }
  return "?";
}

ScalingMode parse_scaling_mode(const std::string& name) {
  for (auto mode : {ScalingMode::theorem3_case1, ScalingMode::theorem3_case2,
                    ScalingMode::flat_alpha0, ScalingMode::empirical}) {
    if (to_string(mode) == name) return mode;
  }
  throw ConfigError("unknown scaling mode '" + name + "'");
}

double surface_const(int d) {
  if (d < 1) throw DomainError("surface_const requires d >= 1");
  const double half = 0.5 * d;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double gamma_pk(int d, double alpha, double p, int k) {
  const double gap = d - alpha * p;
  if (!(gap > kRegimeTolerance)) throw RegimeError("theorem3_case1 requires alpha p < d");
  return surface_const(d) / gap * std::pow(d / gap, k);
}

double gamma_theorem3_case1(int d, double alpha, double p, int k, double L) {
  if (L < 2) throw DomainError("theorem3_case1 requires L >= 2");
  return gamma_pk(d, alpha, p, k) * std::pow(L, d - alpha * p);
}

double h_eval(int k, double x) {
  if (!(x > 1.0)) throw DomainError("h_eval requires x > 1");
  return x * std::pow(std::log(x), k);
}

double h_inv(int k, double y, double rtol) {
  if (!(y > 0.0)) throw DomainError("h_inv requires y > 0");
  if (k == 0) return y;
  // log h(x) = log x + k log log x is increasing on (1, inf); solve in log space.
  const double log_y = std::log(y);
  auto g = [&](double x) { return std::log(x) + k * std::log(std::log(x)) - log_y; };
  auto slope = [&](double x) { return 1.0 / x + k / (x * std::log(x)); };
  double lo = 1.0;
  double hi = std::max(2.0, y + std::exp(1.0));
  while (g(hi) < 0.0) hi *= 2.0;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double gx = g(x);
    if (std::abs(gx) <= rtol) return x;
    (gx < 0.0 ? lo : hi) = x;
    double next = x - gx / slope(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) return x;
    x = next;
  }
  throw ConvergenceError("h_inv: no convergence");
}

double gamma_k(int d, double p, int k) {
  return surface_const(d) / (k + 1) * std::pow(p, k);
}

double gamma_theorem3_case2(int d, double alpha, double p, int k, double L) {
  if (std::abs(alpha * p - d) > kRegimeTolerance) {
    throw RegimeError("theorem3_case2 requires alpha p = d");
  }
  if (L < 3) throw DomainError("theorem3_case2 requires L >= 3");
  return h_inv(k, gamma_k(d, p, k) * std::pow(std::log(L), k + 1));
}

double gamma_flat(const BoxSpec& spec) {
  return static_cast<double>(spec.site_count());
}

Assumption2Profile assumption2_profile(const BoxSpec& spec, const TailLaw& law, double alpha,
                                       double gamma, double x, const SumOptions& options) {
  if (!(gamma > 0.0) || !(x > 0.0)) throw DomainError("assumption2_sum requires gamma, x > 0");
  const std::size_t count = spec.site_count(options.site_cap);
  const double threshold = f_inv(law, gamma * x);
  const double flat_term = std::min(1.0, 1.0 / (gamma * x));
  auto term = [&](double weight) {
    return weight == 1.0 ? flat_term : tail_prob(law, weight * threshold);
  };

  // d = 1 uses the n <-> -n symmetry: p_0 + 2 sum_{n=1}^{L} p_n.
  const bool mirrored = spec.dimension == 1;
  const std::size_t items = mirrored ? static_cast<std::size_t>(spec.radius) : count;
  const std::size_t chunks = (items + kSumChunk - 1) / kSumChunk;
  std::vector<Partial> partials(chunks);

  run_indexed(chunks, options.workers, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kSumChunk;
    const std::size_t end = std::min(items, begin + kSumChunk);
    Partial part;
    auto accumulate = [&](double t) {
      part.sum += t;
      part.sum_squares += t * t;
      part.max_term = std::max(part.max_term, t);
    };
    if (mirrored) {
      for (std::size_t i = begin; i < end; ++i) {
        const int n = static_cast<int>(i) + 1;
        accumulate(term(site_weight(std::span<const int>(&n, 1), alpha, spec.norm_kind)));
      }
    } else {
      for_each_site(spec, begin, end, [&](std::span<const int> site, std::size_t) {
        accumulate(term(site_weight(site, alpha, spec.norm_kind)));
      });
    }
    partials[chunk] = part;
  });

  std::vector<double> sums(chunks), squares(chunks);
  Assumption2Profile profile;
  for (std::size_t c = 0; c < chunks; ++c) {
    sums[c] = partials[c].sum;
    squares[c] = partials[c].sum_squares;
    profile.max_term = std::max(profile.max_term, partials[c].max_term);
  }
  profile.sum = pairwise_sum(sums);
  profile.sum_squares = pairwise_sum(squares);
  if (mirrored) {
    const int origin = 0;
    const double t0 = term(site_weight(std::span<const int>(&origin, 1), alpha, spec.norm_kind));
    profile.sum = t0 + 2.0 * profile.sum;
    profile.sum_squares = t0 * t0 + 2.0 * profile.sum_squares;
    profile.max_term = std::max(profile.max_term, t0);
  }
  return profile;
}

double assumption2_sum(const BoxSpec& spec, const TailLaw& law, double alpha, double gamma,
                       double x, const SumOptions& options) {
  return assumption2_profile(spec, law, alpha, gamma, x, options).sum;
}

double gamma_empirical(const BoxSpec& spec, const TailLaw& law, double alpha, double target_x,
                       const SumOptions& options) {
  if (!(target_x > 0.0)) throw DomainError("gamma_empirical requires target_x > 0");
  if (alpha == 0.0) return gamma_flat(spec);
  const double target = 1.0 / target_x;
  auto excess = [&](double gamma) {
    return assumption2_sum(spec, law, alpha, gamma, target_x, options) - target;
  };
  // Smallest admissible gamma keeps gamma * x inside the domain of f_inv.
  const double floor_gamma = std::exp(law.log_f(law.clamp_point())) / target_x;
  double lo = std::max(floor_gamma, 1e-300);
  double hi = std::max(lo * 2.0, gamma_flat(spec));
  if (excess(lo) <= 0.0) throw ConvergenceError("gamma_empirical: lower bracket fails");
  int expansions = 0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 4.0;
    if (++expansions > 200) throw ConvergenceError("gamma_empirical: upper bracket fails");
  }
  // Bisection in log gamma.
  for (int iter = 0; iter < 200; ++iter) {
    if (hi - lo <= 1e-10 * hi) break;
    const double mid = std::sqrt(lo * hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void validate_scaling(ScalingMode mode, int d, const TailLaw& law, double alpha) {
  switch (mode) {
    case ScalingMode::theorem3_case1:
      require_power_log(law, "theorem3_case1");
      if (!(alpha * law.p() < d - kRegimeTolerance)) {
        throw RegimeError("theorem3_case1 requires alpha p < d");
      }
      break;
    case ScalingMode::theorem3_case2:
      require_power_log(law, "theorem3_case2");
      if (std::abs(alpha * law.p() - d) > kRegimeTolerance) {
        throw RegimeError("theorem3_case2 requires alpha p = d");
      }
      break;
    case ScalingMode::flat_alpha0:
      if (alpha != 0.0) throw RegimeError("flat_alpha0 requires alpha = 0");
      break;
    case ScalingMode::empirical:
      if (law.family() == TailFamily::power_log && alpha * law.p() > d + kRegimeTolerance) {
        throw RegimeError("alpha p > d is outside every scaling regime");
      }
      break;
  }
}

ScalingPlan resolve_scaling(ScalingMode mode, const BoxSpec& spec, const TailLaw& law,
                            double alpha, double target_x, const SumOptions& options) {
  validate_scaling(mode, spec.dimension, law, alpha);
  ScalingPlan plan;
  plan.mode = mode;
  plan.surface = surface_const(spec.dimension);
  const double L = spec.radius;
  switch (mode) {
    case ScalingMode::theorem3_case1:
      plan.regime_constant = gamma_pk(spec.dimension, alpha, law.p(), law.k());
      plan.gamma_L = gamma_theorem3_case1(spec.dimension, alpha, law.p(), law.k(), L);
      break;
    case ScalingMode::theorem3_case2:
      plan.regime_constant = gamma_k(spec.dimension, law.p(), law.k());
      plan.gamma_L = gamma_theorem3_case2(spec.dimension, alpha, law.p(), law.k(), L);
      break;
    case ScalingMode::flat_alpha0:
      plan.gamma_L = gamma_flat(spec);
      break;
    case ScalingMode::empirical:
      plan.gamma_L = gamma_empirical(spec, law, alpha, target_x, options);
      break;
  }
  return plan;
}

}  // namespace speclab
