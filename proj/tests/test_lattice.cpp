#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "speclab/errors.hpp"
#include "speclab/lattice.hpp"

using namespace speclab;

TEST_CASE("box site counts") {
  CHECK(BoxSpec{1, 1}.site_count() == 3);
  CHECK(BoxSpec{2, 1}.site_count() == 9);
  CHECK(BoxSpec{3, 2}.site_count() == 125);
  CHECK(BoxSpec{2, 50}.site_count() == 10201);
  CHECK(BoxSpec{3, 10}.site_count() == 9261);
  CHECK_THROWS_AS((BoxSpec{3, 1000}.site_count()), CapacityError);
  CHECK_THROWS_AS((BoxSpec{2, 1}.site_count(8)), CapacityError);
}

TEST_CASE("enumeration is lexicographic and matches the ordinal maps") {
  const auto one = enumerate_box(BoxSpec{1, 1});
  REQUIRE(one.size() == 3);
  CHECK(one[0].site == std::vector<int>{-1});
  CHECK(one[1].site == std::vector<int>{0});
  CHECK(one[2].site == std::vector<int>{1});

  for (const BoxSpec spec : {BoxSpec{2, 2}, BoxSpec{3, 1}, BoxSpec{1, 7}}) {
    const auto sites = enumerate_box(spec);
    REQUIRE(sites.size() == spec.site_count());
    for (std::size_t i = 0; i < sites.size(); ++i) {
      CHECK(sites[i].ordinal == i);
      CHECK(ordinal_of(spec, sites[i].site) == i);
      CHECK(site_of(spec, i) == sites[i].site);
      if (i > 0) CHECK(std::lexicographical_compare(sites[i - 1].site.begin(), sites[i - 1].site.end(),
                                                     sites[i].site.begin(), sites[i].site.end()));
    }
  }
}

TEST_CASE("for_each_site streams a window of the enumeration") {
  const BoxSpec spec{3, 2};
  const auto sites = enumerate_box(spec);
  std::size_t visited = 0;
  for_each_site(spec, 17, 60, [&](std::span<const int> site, std::size_t ordinal) {
    CHECK(std::vector<int>(site.begin(), site.end()) == sites[ordinal].site);
    CHECK(ordinal == 17 + visited);
    ++visited;
  });
  CHECK(visited == 43);
}

TEST_CASE("site weights") {
  const std::vector<int> n34{3, 4};
  CHECK(site_weight(n34, 1.0, NormKind::euclidean) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(site_weight(n34, 1.0, NormKind::sup) == doctest::Approx(5.0).epsilon(1e-15));
  for (int d = 1; d <= 4; ++d) {
    const std::vector<int> origin(d, 0);
    CHECK(site_weight(origin, 2.0, NormKind::euclidean) == 1.0);
    CHECK(site_weight(origin, 2.0, NormKind::sup) == 1.0);
  }
  CHECK(site_weight(n34, 0.0, NormKind::euclidean) == 1.0);
}

TEST_CASE("norm comparison holds on every site of a few boxes") {
  for (int d = 1; d <= 3; ++d) {
    const BoxSpec spec{d, 4};
    for_each_site(spec, 0, spec.site_count(), [&](std::span<const int> site, std::size_t) {
      const double sup = site_weight(site, 1.0, NormKind::sup);
      const double euc = site_weight(site, 1.0, NormKind::euclidean);
      CHECK(sup <= euc + 1e-12);
      CHECK(euc <= 1.0 + std::sqrt(double(d)) * (sup - 1.0) + 1e-12);
    });
  }
}

TEST_CASE("site keys are box independent and injective") {
  std::set<std::uint64_t> keys;
  const BoxSpec spec{2, 6};
  for (const auto& s : enumerate_box(spec)) keys.insert(site_key(s.site));
  CHECK(keys.size() == spec.site_count());

  const std::vector<int> site{-2, 3};
  const auto small = enumerate_box(BoxSpec{2, 3});
  const auto big = enumerate_box(BoxSpec{2, 9});
  CHECK(site_key(small[ordinal_of(BoxSpec{2, 3}, site)].site) ==
        site_key(big[ordinal_of(BoxSpec{2, 9}, site)].site));
  CHECK(site_key(std::vector<int>{0}) == 0);
  CHECK(site_key(std::vector<int>{-1}) == 1);
  CHECK(site_key(std::vector<int>{1}) == 2);
}

TEST_CASE("norm kind parsing") {
  CHECK(parse_norm_kind("sup") == NormKind::sup);
  CHECK(parse_norm_kind("euclidean") == NormKind::euclidean);
  CHECK(to_string(NormKind::sup) == "sup");
  CHECK_THROWS_AS(parse_norm_kind("taxicab"), ConfigError);
}
