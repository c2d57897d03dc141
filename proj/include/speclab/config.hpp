#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "speclab/lattice.hpp"
#include "speclab/scaling.hpp"
#include "speclab/stats.hpp"
#include "speclab/tails.hpp"

namespace speclab {

enum class Experiment { ids, extremal, assumption2, maxlaw, theorem4, sample };
enum class SolverChoice { automatic, dense, lanczos };

std::string to_string(Experiment experiment);
Experiment parse_experiment(const std::string& name);
std::string to_string(SolverChoice solver);

/// Everything a run needs. Keys of the flat config file match the field
/// names (see README for the full list).
struct ExperimentConfig {
  Experiment experiment = Experiment::maxlaw;
  int dimension = 1;
  std::vector<int> radius{100};  ///< L ladder, strictly increasing
  NormKind norm_kind = NormKind::euclidean;
  TailLaw law = TailLaw::power_log(2.0, 0);
  double alpha = 0.0;
  std::vector<ScalingMode> scaling{ScalingMode::flat_alpha0};
  double target_x = 1.0;  ///< calibration point for empirical scaling
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  std::vector<Interval> intervals;
  std::vector<double> x_grid;
  std::size_t top_m = 0;  ///< 0: max(8, ceil(4 / x_min))
  bool source_H = true;
  bool source_V = true;
  SolverChoice solver = SolverChoice::automatic;
  double tol = 1e-10;
  std::size_t max_matvecs = 20000;
  std::size_t dense_cap = 4096;
  unsigned workers = 1;
  std::size_t sample_trial = 0;
  std::string out = "out";

  // thresholds used by --assert
  double ks_threshold = 0.07;
  double gof_alpha = 0.01;
  double assumption2_tol = 0.02;
  double ids_threshold = 0.05;

  /// Throws ConfigError / RegimeError on any inconsistency.
  void validate() const;

  std::size_t resolved_top_m() const;
};

using ConfigMap = std::map<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment.
ConfigMap read_config_map(std::istream& in);
ConfigMap read_config_file(const std::string& path);

/// Applies the entries of `map` on top of `config`.
void apply_config(ExperimentConfig& config, const ConfigMap& map);

/// Canonical key-value dump that read_config_map/apply_config reproduce.
ConfigMap to_config_map(const ExperimentConfig& config);

std::vector<Interval> parse_intervals(const std::string& text);

}  // namespace speclab
