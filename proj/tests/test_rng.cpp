#include <algorithm>
#include <array>
#include <boost/math/special_functions/gamma.hpp>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "speclab/rng.hpp"

using namespace speclab;

TEST_CASE("philox4x32-10 known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("splitmix64 reference outputs") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafull);
  CHECK(splitmix64(1) == 0x910a2dec89025cc1ull);
}

TEST_CASE("derived streams match recorded golden words") {
  struct Golden {
    std::uint64_t seed, trial, site;
    StreamPurpose purpose;
    std::array<std::uint64_t, 4> words;
  };
  const Golden table[] = {
      {42, 0, 0, StreamPurpose::potential,
       {0x3a2c37b6eb815c43ull, 0x94509a5d12b44d2full, 0x42901527b4a75b81ull, 0x6860eefc961086b6ull}},
      {42, 1, 0, StreamPurpose::potential,
       {0x150ac27277f04063ull, 0x2b7b88593a387a45ull, 0x3b22686c0cdfb471ull, 0x650b0ba42fcdfa65ull}},
      {42, 0, 0, StreamPurpose::start_vector,
       {0x508a466e8b966f41ull, 0x5e111b38cc72d917ull, 0x6d62dc54500825ddull, 0x789892b8b4a4bac1ull}},
      {7, 3, 12345, StreamPurpose::potential,
       {0x3504a18fdb911f6dull, 0xdb312646a833a29cull, 0xd24eca714273f14bull, 0xb1eef14a20b693d6ull}},
  };
  for (const auto& g : table) {
    auto stream = derive_stream(g.seed, g.trial, g.site, g.purpose);
    for (auto w : g.words) CHECK(stream.next_u64() == w);
  }
}

TEST_CASE("streams are reproducible and separated") {
  auto a = derive_stream(5, 2, 17);
  auto b = derive_stream(5, 2, 17);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(derive_stream(5, 0, 0).next_u64() != derive_stream(5, 1, 0).next_u64());
  CHECK(derive_stream(5, 0, 0).next_u64() != derive_stream(6, 0, 0).next_u64());
  CHECK(derive_stream(5, 0, 0).next_u64() != derive_stream(5, 0, 1).next_u64());
}

TEST_CASE("uniforms lie in (0,1) and pass a 100-bin chi-square") {
  auto stream = derive_stream(2024, 0, 0);
  const std::size_t n = 1000000, bins = 100;
  std::vector<std::size_t> counts(bins, 0);
  double lo = 1.0, hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = stream.next_uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    ++counts[static_cast<std::size_t>(u * bins)];
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  const double expected = double(n) / bins;
  double chi2 = 0.0;
  for (auto c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double p = boost::math::gamma_q((bins - 1) / 2.0, chi2 / 2.0);
  CAPTURE(chi2);
  CHECK(p > 1e-4);
}

TEST_CASE("counter stream works as a standard URBG") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto g1 = derive_stream(1, 1, 1);
  auto g2 = derive_stream(1, 1, 1);
  auto w = v;
  std::shuffle(v.begin(), v.end(), g1);
  std::shuffle(w.begin(), w.end(), g2);
  CHECK(v == w);
  CHECK(!std::is_sorted(v.begin(), v.end()));
}
