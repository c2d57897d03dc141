#include <cmath>
#include <sstream>

#include "doctest.h"
#include "speclab/config.hpp"
#include "speclab/errors.hpp"

using namespace speclab;

namespace {

ExperimentConfig from_text(const std::string& text) {
  std::istringstream in(text);
  ExperimentConfig config;
  apply_config(config, read_config_map(in));
  return config;
}

}  // namespace

TEST_CASE("flat config parsing") {
  const auto c = from_text(R"(
# comment line
experiment = extremal
dimension = 2
L = 10, 20
norm_kind = sup
family = stretched_exp
delta = 0.5       # trailing comment
alpha = 0.25
scaling = empirical
trials = 40
master_seed = 99
intervals = 1:2, 2:inf
x_grid = 0.5,1
source = V
solver = lanczos
workers = 3
)");
  CHECK(c.experiment == Experiment::extremal);
  CHECK(c.dimension == 2);
  CHECK(c.radius == std::vector<int>{10, 20});
  CHECK(c.norm_kind == NormKind::sup);
  CHECK(c.law == TailLaw::stretched_exp(0.5));
  CHECK(c.alpha == 0.25);
  CHECK(c.scaling == std::vector<ScalingMode>{ScalingMode::empirical});
  CHECK(c.trials == 40);
  CHECK(c.master_seed == 99);
  REQUIRE(c.intervals.size() == 2);
  CHECK(std::isinf(c.intervals[1].hi));
  CHECK(c.x_grid == std::vector<double>{0.5, 1.0});
  CHECK_FALSE(c.source_H);
  CHECK(c.source_V);
  CHECK(c.solver == SolverChoice::lanczos);
  CHECK(c.workers == 3);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("canonical dump round-trips") {
  auto c = from_text("experiment = theorem4\nL = 10,20\nfamily = stretched_exp\ndelta = 1\nalpha = 1\n"
                     "norm_kind = sup\nx_grid = 6,8.25\ntol = 1e-11\n");
  const auto map = to_config_map(c);
  ExperimentConfig back;
  apply_config(back, map);
  CHECK(to_config_map(back) == map);
  CHECK(back.law == c.law);
  CHECK(back.x_grid == c.x_grid);
  CHECK(back.tol == 1e-11);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(from_text("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(from_text("dimension 2\n"), ConfigError);
  CHECK_THROWS_AS(from_text("trials = many\n"), ConfigError);
  CHECK_THROWS_AS(from_text("intervals = 1-2\n"), ConfigError);
  CHECK_THROWS_AS(from_text("family = cauchy\n"), ConfigError);
  CHECK_THROWS_AS(from_text("L = 20,10\n").validate(), ConfigError);
  CHECK_THROWS_AS(read_config_file("/nonexistent/speclab.conf"), ConfigError);
}

TEST_CASE("experiment-specific validation") {
  CHECK_THROWS_AS(from_text("experiment = maxlaw\nfamily = stretched_exp\ndelta = 1\n").validate(), RegimeError);
  CHECK_THROWS_AS(from_text("experiment = extremal\n").validate(), ConfigError);
  CHECK_THROWS_AS(from_text("experiment = maxlaw\nalpha = 0.5\n").validate(), RegimeError);
  CHECK_NOTHROW(from_text("experiment = maxlaw\nalpha = 0.25\nscaling = theorem3_case1\n").validate());
  CHECK_THROWS_AS(from_text("experiment = theorem4\nalpha = 1\nx_grid = 6\n").validate(), RegimeError);
  CHECK_THROWS_AS(
      from_text("experiment = theorem4\nfamily = stretched_exp\ndelta = 1\nalpha = 1\nx_grid = 2.5\n").validate(),
      ConfigError);
  CHECK_THROWS_AS(from_text("experiment = ids\n").validate(), RegimeError);
  CHECK_THROWS_AS(from_text("experiment = assumption2\n").validate(), ConfigError);
  CHECK_NOTHROW(from_text("experiment = sample\nalpha = 0.5\n").validate());
}

TEST_CASE("automatic top_m") {
  ExperimentConfig c;
  CHECK(c.resolved_top_m() == 8);
  c.intervals = parse_intervals("0.25:0.5,1:inf");
  CHECK(c.resolved_top_m() == 16);
  c.top_m = 3;
  CHECK(c.resolved_top_m() == 3);
}
