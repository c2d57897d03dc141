// speclab command line: runs one experiment from a flat config file.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "speclab/config.hpp"
#include "speclab/errors.hpp"
#include "speclab/harness.hpp"

int main(int argc, char** argv) {
  using namespace speclab;

  CLI::App app{"Extremal spectra of random Schrodinger operators with decaying heavy-tailed potentials"};
  app.set_version_flag("--version", kVersion);

  std::string experiment;
  std::string config_path;
  std::vector<int> radii;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool assert_mode = false;
  std::string out;

  app.add_option("experiment", experiment, "ids | extremal | assumption2 | maxlaw | theorem4 | sample")
      ->required();
  app.add_option("--config", config_path, "flat key = value config file")->required()->check(CLI::ExistingFile);
  app.add_option("--L", radii, "L ladder (overrides radius)");
  auto* trials_opt = app.add_option("--trials", trials, "number of Monte Carlo trials");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--assert", assert_mode, "exit 2 when a statistical check fails");
  app.add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    ExperimentConfig config;
    apply_config(config, read_config_file(config_path));
    config.experiment = parse_experiment(experiment);
    if (!radii.empty()) config.radius = radii;
    if (*trials_opt) config.trials = trials;
    if (*seed_opt) config.master_seed = seed;
    if (*workers_opt) config.workers = workers;
    if (!out.empty()) config.out = out;

    RunOptions options;
    options.assert_mode = assert_mode;
    options.log = &std::cerr;
    const auto outcome = run_experiment(config, options);
    std::cout << outcome.summary.dump(2) << '\n';
    if (outcome.exit_code == kExitSolverFailure) {
      std::cerr << "solver failed on " << outcome.flagged << " of " << outcome.total_trials << " trials\n";
    }
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << '\n';
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  return kExitUsage;
}
