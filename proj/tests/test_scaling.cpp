#include <cmath>
#include <numbers>

#include "doctest.h"
#include "speclab/errors.hpp"
#include "speclab/scaling.hpp"

using namespace speclab;

namespace {

// Direct double loop over a d=2 box, long double accumulation.
long double brute_sum_2d(int L, double alpha, double p, double gamma, double x) {
  long double total = 0.0L;
  for (int a = -L; a <= L; ++a) {
    for (int b = -L; b <= L; ++b) {
      const double w = std::pow(1.0 + std::hypot(double(a), double(b)), alpha);
      const double omega = w * std::pow(gamma * x, 1.0 / p);
      total += omega <= 1.0 ? 1.0L : std::min(1.0L, 1.0L / std::pow((long double)omega, (long double)p));
    }
  }
  return total;
}

// d=1, f(x) = x: the sum is sum_n 1 / (<n>^alpha gamma x) once every term is below 1.
long double brute_sum_1d_identity(int L, double alpha, double gamma, double x) {
  long double total = 1.0L / (gamma * x);
  for (int n = L; n >= 1; --n) total += 2.0L / (std::pow((long double)(1 + n), (long double)alpha) * gamma * x);
  return total;
}

}  // namespace

TEST_CASE("surface constants") {
  CHECK(surface_const(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(surface_const(2) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
  CHECK(surface_const(3) == doctest::Approx(4 * std::numbers::pi).epsilon(1e-15));
  CHECK(surface_const(4) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("power-law regime normalization") {
  CHECK(gamma_theorem3_case1(1, 0.5, 1, 0, 1e4) == doctest::Approx(400.0).epsilon(1e-14));
  CHECK(gamma_theorem3_case1(1, 0.0, 2, 0, 1000) == doctest::Approx(2000.0).epsilon(1e-14));
  CHECK(gamma_pk(2, 0.5, 2, 1) == doctest::Approx(4 * std::numbers::pi).epsilon(1e-14));
  CHECK(gamma_theorem3_case1(2, 0.5, 2, 1, 100) == doctest::Approx(400 * std::numbers::pi).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_theorem3_case1(1, 1.0, 1, 0, 100), RegimeError);
}

TEST_CASE("logarithmic regime normalization") {
  CHECK(gamma_k(2, 2, 0) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
  CHECK(gamma_theorem3_case2(2, 1.0, 2, 0, 1000) ==
        doctest::Approx(2 * std::numbers::pi * std::log(1000.0)).epsilon(1e-13));
  CHECK(gamma_theorem3_case2(2, 1.0, 2, 0, 1000) == doctest::Approx(43.40).epsilon(1e-3));
  CHECK(gamma_theorem3_case2(1, 1.0, 1, 0, 1e6) == doctest::Approx(2 * std::log(1e6)).epsilon(1e-13));
  // k = 2: h_2(Gamma) = gamma_k (log L)^3
  const double g = gamma_theorem3_case2(1, 0.5, 2, 2, 1e5);
  CHECK(h_eval(2, g) == doctest::Approx(gamma_k(1, 2, 2) * std::pow(std::log(1e5), 3)).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_theorem3_case2(1, 0.5, 1, 0, 100), RegimeError);
}

TEST_CASE("h_k inverse") {
  const double x = h_inv(2, 1e6);
  CHECK(x * std::log(x) * std::log(x) == doctest::Approx(1e6).epsilon(1e-12));
  CHECK(h_inv(0, 7.5) == 7.5);
  for (int k = 1; k <= 4; ++k) {
    for (double y : {1e-3, 0.5, 3.0, 1e3, 1e12}) {
      const double xi = h_inv(k, y);
      CHECK(xi > 1.0);
      CHECK(h_eval(k, xi) == doctest::Approx(y).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(h_eval(1, 1.0), DomainError);
}

TEST_CASE("flat normalization") {
  CHECK(gamma_flat(BoxSpec{1, 1000}) == 2001.0);
  CHECK(gamma_flat(BoxSpec{2, 50}) == 10201.0);
  CHECK(gamma_flat(BoxSpec{3, 10}) == 9261.0);
}

TEST_CASE("tail sums are exactly 1/x with the flat normalization") {
  for (int d : {1, 2}) {
    for (int L : {10, 100}) {
      const BoxSpec box{d, L};
      for (const auto& law : {TailLaw::power_log(2, 0), TailLaw::power_log(1, 3), TailLaw::stretched_exp(0.5)}) {
        for (double x : {0.5, 1.0, 2.0, 4.0}) {
          const double s = assumption2_sum(box, law, 0.0, gamma_flat(box), x);
          CHECK(s * x == doctest::Approx(1.0).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("tail sums agree with brute force") {
  SUBCASE("d=1 identity tail") {
    for (int L : {1000, 100000}) {
      const double gamma = 4.0 * std::sqrt(double(L));
      const double s = assumption2_sum(BoxSpec{1, L}, TailLaw::power_log(1, 0), 0.5, gamma, 1.0);
      CHECK(s == doctest::Approx(double(brute_sum_1d_identity(L, 0.5, gamma, 1.0))).epsilon(1e-12));
    }
  }
  SUBCASE("d=2 quadratic tail") {
    const BoxSpec box{2, 30};
    for (double x : {0.5, 2.0}) {
      const double gamma = 123.0;
      const double s = assumption2_sum(box, TailLaw::power_log(2, 0), 0.5, gamma, x);
      CHECK(s == doctest::Approx(double(brute_sum_2d(30, 0.5, 2, gamma, x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("tail sums are bitwise independent of the worker count") {
  const BoxSpec box{1, 300000};
  SumOptions one, many;
  many.workers = 4;
  const auto law = TailLaw::power_log(1, 1);
  const double a = assumption2_sum(box, law, 0.5, 2000.0, 1.0, one);
  const double b = assumption2_sum(box, law, 0.5, 2000.0, 1.0, many);
  CHECK(a == b);
  const BoxSpec box2{2, 200};
  CHECK(assumption2_sum(box2, law, 0.3, 900.0, 2.0, one) == assumption2_sum(box2, law, 0.3, 900.0, 2.0, many));
}

TEST_CASE("tail-sum profile bounds") {
  const BoxSpec box{1, 100000};
  const double gamma = gamma_theorem3_case1(1, 0.5, 1, 0, box.radius);
  for (double x : {0.5, 1.0, 2.0}) {
    const auto profile = assumption2_profile(box, TailLaw::power_log(1, 0), 0.5, gamma, x);
    CHECK(profile.max_term <= 1.0 / (gamma * x) * (1 + 1e-14));
    CHECK(profile.sum_squares <= profile.max_term * profile.sum * (1 + 1e-14));
  }
}

TEST_CASE("power-law normalization error shrinks along the ladder") {
  double last = INFINITY;
  for (int L : {10000, 100000, 1000000}) {
    const BoxSpec box{1, L};
    const double gamma = gamma_theorem3_case1(1, 0.5, 1, 0, L);
    const double err = std::abs(assumption2_sum(box, TailLaw::power_log(1, 0), 0.5, gamma, 1.0) - 1.0);
    CHECK(err < last);
    last = err;
  }
  CHECK(last <= 0.005);
}

TEST_CASE("empirical normalization") {
  const BoxSpec flat{2, 20};
  CHECK(gamma_empirical(flat, TailLaw::power_log(2, 0), 0.0, 1.0) == gamma_flat(flat));

  const BoxSpec box{1, 1000000};
  const auto law = TailLaw::power_log(1, 0);
  const double g = gamma_empirical(box, law, 0.5, 1.0);
  CHECK(g == doctest::Approx(4000.0).epsilon(0.01));
  CHECK(assumption2_sum(box, law, 0.5, g, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("regime validation") {
  const auto law = TailLaw::power_log(2, 0);
  CHECK_NOTHROW(validate_scaling(ScalingMode::theorem3_case1, 2, law, 0.5));
  CHECK_THROWS_AS(validate_scaling(ScalingMode::theorem3_case1, 2, law, 1.0), RegimeError);
  CHECK_NOTHROW(validate_scaling(ScalingMode::theorem3_case2, 2, law, 1.0));
  CHECK_THROWS_AS(validate_scaling(ScalingMode::theorem3_case2, 2, law, 0.5), RegimeError);
  CHECK_THROWS_AS(validate_scaling(ScalingMode::flat_alpha0, 2, law, 0.5), RegimeError);
  CHECK_THROWS_AS(validate_scaling(ScalingMode::theorem3_case1, 1, TailLaw::stretched_exp(0.5), 0.5), RegimeError);
  CHECK(parse_scaling_mode("empirical") == ScalingMode::empirical);
  CHECK_THROWS_AS(parse_scaling_mode("bogus"), ConfigError);
}
