#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "speclab/config.hpp"
#include "speclab/eigen.hpp"
#include "speclab/operator.hpp"
#include "speclab/stats.hpp"

namespace speclab {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAssertion = 2;
inline constexpr int kExitSolverFailure = 3;

/// Largest `m` eigenvalues of `op` (ascending) with the solver the config asks
/// for. The Lanczos start vector is drawn from the trial's start_vector stream.
Spectrum solve_top(const LatticeOperator& op, std::size_t m, const ExperimentConfig& config,
                   std::uint64_t trial_index);

/// Outcome of one Monte Carlo trial of the extremal pipeline at one L.
struct TrialResult {
  std::size_t trial_index = 0;
  int L = 0;
  double gamma = 0.0;
  double e1_H = std::numeric_limits<double>::quiet_NaN();
  double e1_V = std::numeric_limits<double>::quiet_NaN();
  RescaledPointSet rescaled_H;
  RescaledPointSet rescaled_V;
  std::vector<std::int64_t> counts_H;
  std::vector<std::int64_t> counts_V;
  double max_residual = 0.0;
  std::size_t matvecs = 0;
  bool converged = true;
  bool undercount_risk = false;  ///< m-th rescaled point still above x_min
};

/// sample -> build -> solve -> rescale -> count, for one trial.
TrialResult run_extremal_trial(const ExperimentConfig& config, const BoxSpec& box, double gamma,
                               std::size_t trial_index);

/// Trials [0, config.trials) at one L, in trial order for any worker count.
std::vector<TrialResult> run_extremal_trials(const ExperimentConfig& config, const BoxSpec& box,
                                             double gamma);

struct SandwichPoint {
  int L = 0;
  double x = 0.0;
  double estimate = 0.0;        ///< Monte Carlo P(E_1^H(L) <= x)
  double standard_error = 0.0;
  double lower_bracket = 0.0;   ///< A_L(x - 2d)
  double upper_bracket = 0.0;   ///< A_L(x + 2d)
  bool inside = false;          ///< within [lower - 3 SE, upper + 3 SE]
  std::size_t inclusion_violations = 0;  ///< realization-wise Weyl sandwich failures
};

struct Theorem4Report {
  std::vector<SandwichPoint> points;
  std::vector<std::vector<double>> e1_H;  ///< [ladder index][trial]
  std::vector<std::vector<double>> e1_V;
  std::vector<std::vector<double>> max_residual;
  bool exact_monotone = true;   ///< A_L nonincreasing in L, nondecreasing in x
  bool estimate_monotone = true;  ///< MC estimate nonincreasing in L for every x
  std::size_t nesting_violations = 0;  ///< trials where E_1^H(L) decreased as L grew
  std::size_t flagged = 0;
  TailConstantFit c1_fit;
  bool c1_fitted = false;
};

/// Monte Carlo P(E_1^H(L) <= x) along the ladder with omega shared across L,
/// against the exact brackets A_L(x -/+ 2d).
Theorem4Report theorem4_sandwich(const ExperimentConfig& config);

struct RunOptions {
  bool assert_mode = false;
  std::ostream* log = nullptr;
};

struct RunOutcome {
  int exit_code = kExitSuccess;
  bool assertions_passed = true;
  std::vector<std::string> failures;
  std::size_t flagged = 0;
  std::size_t total_trials = 0;
  nlohmann::json summary;
  std::vector<std::string> files;
};

/// Runs the configured experiment and writes
///   <out>/<experiment>_L<L>.csv, <out>/<experiment>_summary.json, <out>/manifest.json.
RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

nlohmann::json to_json(const Spectrum& spectrum);
nlohmann::json to_json(const PoissonReport& report);
nlohmann::json to_json(const MaxLawReport& report);

inline constexpr const char* kVersion = "speclab 1.0.0";

}  // namespace speclab
