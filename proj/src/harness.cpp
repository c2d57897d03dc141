#include "speclab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "speclab/errors.hpp"
#include "speclab/format.hpp"
#include "speclab/parallel.hpp"
#include "speclab/scaling.hpp"

namespace speclab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

std::string interval_label(const Interval& iv) {
  return format_shortest(iv.lo) + "_" + (std::isinf(iv.hi) ? std::string("inf") : format_shortest(iv.hi));
}

void write_json(const fs::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << value.dump(2) << '\n';
}

void note(const RunOptions& options, const std::string& message) {
  if (options.log) *options.log << message << '\n';
}

double first_gamma(const ExperimentConfig& config, const BoxSpec& box) {
  SumOptions sum_options;
  sum_options.workers = config.workers;
  return resolve_scaling(config.scaling.front(), box, config.law, config.alpha, config.target_x,
                         sum_options)
      .gamma_L;
}

BoxSpec box_at(const ExperimentConfig& config, int L) {
  return BoxSpec{config.dimension, L, config.norm_kind};
}

double max_of(std::span<const double> values) {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : values) best = std::max(best, v);
  return best;
}

}  // namespace

json to_json(const Spectrum& spectrum) {
  return json{{"method", to_string(spectrum.method)},
              {"values", spectrum.values},
              {"residuals", spectrum.residuals},
              {"converged", spectrum.converged},
              {"matvecs", spectrum.matvecs}};
}

json to_json(const PoissonReport& report) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    cells.push_back({{"k_lo", cell.k_lo},
                     {"k_hi", cell.k_hi < 0 ? json("inf") : json(cell.k_hi)},
                     {"expected", cell.expected},
                     {"observed", cell.observed}});
  }
  return json{{"test", "poisson_gof"},
              {"interval", {report.interval.lo, std::isinf(report.interval.hi) ? json("inf") : json(report.interval.hi)}},
              {"statistic", report.chi_square},
              {"dof", report.dof},
              {"p_value", report.p_value},
              {"expected", report.expected_mean},
              {"observed", report.empirical_mean},
              {"standard_error", report.standard_error},
              {"n_trials", report.n_trials},
              {"cells", cells}};
}

json to_json(const MaxLawReport& report) {
  return json{{"test", "max_law_ks"},
              {"statistic", report.ks_statistic},
              {"p_value", report.p_value},
              {"critical_95", report.critical_95},
              {"expected", report.limit_cdf},
              {"observed", report.empirical_cdf},
              {"x_grid", report.x_grid},
              {"n_trials", report.n_trials}};
}

Spectrum solve_top(const LatticeOperator& op, std::size_t m, const ExperimentConfig& config,
                   std::uint64_t trial_index) {
  m = std::min(m, op.size());
  const bool dense = config.solver == SolverChoice::dense ||
                     (config.solver == SolverChoice::automatic &&
                      (op.box().dimension == 1 || op.size() <= config.dense_cap) &&
                      op.size() <= kTridiagonalCap);
  if (dense || !op.has_hopping()) {
    auto full = dense_spectrum(op, config.dense_cap);
    full.values.erase(full.values.begin(), full.values.end() - static_cast<std::ptrdiff_t>(m));
    return full;
  }
  auto stream = derive_stream(config.master_seed, trial_index,
                              static_cast<std::uint64_t>(op.box().radius), StreamPurpose::start_vector);
  LanczosOptions lanczos;
  lanczos.count = m;
  lanczos.tol = config.tol;
  lanczos.max_matvecs = config.max_matvecs;
  return extremal_topk(op, lanczos, stream);
}

TrialResult run_extremal_trial(const ExperimentConfig& config, const BoxSpec& box, double gamma,
                               std::size_t trial_index) {
  TrialResult result;
  result.trial_index = trial_index;
  result.L = box.radius;
  result.gamma = gamma;
  const std::size_t m = config.resolved_top_m();
  const auto potential = sample_potential(box, config.law, config.alpha, config.master_seed, trial_index);

  double x_min = std::numeric_limits<double>::infinity();
  for (const auto& iv : config.intervals) x_min = std::min(x_min, iv.lo);

  if (config.source_V) {
    auto values = v_spectrum(potential);
    values.resize(std::min(values.size(), m));
    result.e1_V = values.front();
    result.rescaled_V = rescale(values, config.law, gamma, PointSource::V);
    result.counts_V = count_in_intervals(result.rescaled_V.points, config.intervals);
  }
  if (config.source_H) {
    const auto op = build_hamiltonian(box, potential, OperatorKind::full);
    const auto spectrum = solve_top(op, m, config, trial_index);
    std::vector<double> descending(spectrum.values.rbegin(), spectrum.values.rend());
    result.e1_H = descending.front();
    result.converged = spectrum.converged;
    result.matvecs = spectrum.matvecs;
    for (double r : spectrum.residuals) result.max_residual = std::max(result.max_residual, r);
    result.rescaled_H = rescale(descending, config.law, gamma, PointSource::H);
    result.counts_H = count_in_intervals(result.rescaled_H.points, config.intervals);
    const auto& pts = result.rescaled_H.points;
    result.undercount_risk = pts.size() == m && pts.back() > x_min;
  } else if (config.source_V) {
    const auto& pts = result.rescaled_V.points;
    result.undercount_risk = pts.size() == m && pts.back() > x_min;
  }
  return result;
}

std::vector<TrialResult> run_extremal_trials(const ExperimentConfig& config, const BoxSpec& box,
                                             double gamma) {
  std::vector<TrialResult> results(config.trials);
  run_indexed(config.trials, config.workers, [&](std::size_t t) {
    results[t] = run_extremal_trial(config, box, gamma, t);
  });
  return results;
}

Theorem4Report theorem4_sandwich(const ExperimentConfig& config) {
  config.validate();
  const auto& ladder = config.radius;
  const std::size_t trials = config.trials;
  const double shift = 2.0 * config.dimension;
  Theorem4Report report;
  report.e1_H.assign(ladder.size(), std::vector<double>(trials));
  report.e1_V.assign(ladder.size(), std::vector<double>(trials));
  report.max_residual.assign(ladder.size(), std::vector<double>(trials, 0.0));
  std::vector<std::vector<char>> converged(ladder.size(), std::vector<char>(trials, 1));

  run_indexed(trials, config.workers, [&](std::size_t t) {
    for (std::size_t li = 0; li < ladder.size(); ++li) {
      const auto box = box_at(config, ladder[li]);
      const auto potential = sample_potential(box, config.law, config.alpha, config.master_seed, t);
      const auto op = build_hamiltonian(box, potential, OperatorKind::full);
      const auto spectrum = solve_top(op, 1, config, t);
      report.e1_H[li][t] = spectrum.values.back();
      report.e1_V[li][t] = max_of(potential.values);
      converged[li][t] = spectrum.converged ? 1 : 0;
      for (double r : spectrum.residuals) report.max_residual[li][t] = std::max(report.max_residual[li][t], r);
    }
  });

  std::vector<char> usable(trials, 1);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t li = 0; li < ladder.size(); ++li) {
      if (!converged[li][t]) usable[t] = 0;
    }
    if (!usable[t]) ++report.flagged;
    for (std::size_t li = 1; li < ladder.size(); ++li) {
      // H_L is a principal submatrix of H_{L'} for L < L', so E_1^H cannot drop.
      if (usable[t] && report.e1_H[li][t] < report.e1_H[li - 1][t] - 1e-9 * (1.0 + std::abs(report.e1_H[li][t]))) {
        ++report.nesting_violations;
      }
    }
  }
  const double n_used = static_cast<double>(std::count(usable.begin(), usable.end(), 1));

  MaxCdfOptions cdf_options;
  cdf_options.workers = config.workers;
  std::vector<std::vector<double>> previous_exact;
  std::vector<double> previous_estimate;
  for (std::size_t li = 0; li < ladder.size(); ++li) {
    const auto box = box_at(config, ladder[li]);
    std::vector<double> exact_row;
    std::vector<double> estimate_row;
    double last_exact = -1.0;
    for (double x : config.x_grid) {
      SandwichPoint point;
      point.L = ladder[li];
      point.x = x;
      std::size_t below = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        if (!usable[t]) continue;
        const double eh = report.e1_H[li][t];
        const double ev = report.e1_V[li][t];
        if (eh <= x) ++below;
        if ((ev <= x - shift && eh > x) || (eh <= x && ev > x + shift)) ++point.inclusion_violations;
      }
      point.estimate = n_used > 0 ? static_cast<double>(below) / n_used : 0.0;
      point.standard_error = n_used > 0 ? std::sqrt(point.estimate * (1.0 - point.estimate) / n_used) : 0.0;
      point.lower_bracket = exact_max_cdf_V(box, config.law, config.alpha, x - shift, cdf_options);
      point.upper_bracket = exact_max_cdf_V(box, config.law, config.alpha, x + shift, cdf_options);
      // The plug-in SE vanishes when every trial lands on one side, so each
      // edge also admits the binomial SE evaluated at that edge.
      auto edge_se = [&](double q) {
        return n_used > 0 ? std::max(point.standard_error, std::sqrt(q * (1.0 - q) / n_used)) : 0.0;
      };
      point.inside = point.estimate >= point.lower_bracket - 3.0 * edge_se(point.lower_bracket) &&
                     point.estimate <= point.upper_bracket + 3.0 * edge_se(point.upper_bracket);
      report.points.push_back(point);

      // Exact monotonicity on the grid x - 2d, x, x + 2d.
      const double at_x = exact_max_cdf_V(box, config.law, config.alpha, x, cdf_options);
      if (!(point.lower_bracket <= at_x && at_x <= point.upper_bracket)) report.exact_monotone = false;
      if (at_x < last_exact) report.exact_monotone = false;
      last_exact = at_x;
      exact_row.push_back(at_x);
      exact_row.push_back(point.lower_bracket);
      exact_row.push_back(point.upper_bracket);
      estimate_row.push_back(point.estimate);
    }
    if (!previous_exact.empty()) {
      for (std::size_t i = 0; i < exact_row.size(); ++i) {
        if (exact_row[i] > previous_exact.back()[i]) report.exact_monotone = false;
      }
      for (std::size_t i = 0; i < estimate_row.size(); ++i) {
        if (estimate_row[i] > previous_estimate[i]) report.estimate_monotone = false;
      }
    }
    previous_exact.push_back(exact_row);
    previous_estimate = estimate_row;
  }

  std::vector<double> limits;
  for (double x : config.x_grid) {
    limits.push_back(exact_max_cdf_V_limit(config.dimension, config.norm_kind, config.law, config.alpha, x));
  }
  try {
    report.c1_fit = fit_tail_constant(config.x_grid, limits, config.law.delta());
    report.c1_fitted = true;
  } catch (const ConfigError&) {
    report.c1_fitted = false;
  }
  return report;
}

namespace {

void run_assumption2(const ExperimentConfig& config, const fs::path& out, RunOutcome& outcome) {
  json levels = json::array();
  SumOptions sum_options;
  sum_options.workers = config.workers;
  for (std::size_t li = 0; li < config.radius.size(); ++li) {
    const int L = config.radius[li];
    const auto box = box_at(config, L);
    const auto path = out / ("assumption2_L" + std::to_string(L) + ".csv");
    CsvWriter csv(path, {"L", "x", "gamma_mode", "gamma", "sum", "abs_err_vs_inv_x"});
    outcome.files.push_back(path.string());
    json level{{"L", L}, {"rows", json::array()}};
    double theorem_gamma = 0.0, empirical_gamma = 0.0;
    for (auto mode : config.scaling) {
      const auto plan = resolve_scaling(mode, box, config.law, config.alpha, config.target_x, sum_options);
      if (mode == ScalingMode::empirical) {
        empirical_gamma = plan.gamma_L;
      } else if (theorem_gamma == 0.0) {
        theorem_gamma = plan.gamma_L;
      }
      for (double x : config.x_grid) {
        const auto profile = assumption2_profile(box, config.law, config.alpha, plan.gamma_L, x, sum_options);
        const double err = std::abs(profile.sum - 1.0 / x);
        csv.row({std::to_string(L), fmt(x), to_string(mode), fmt(plan.gamma_L), fmt(profile.sum), fmt(err)});
        level["rows"].push_back({{"test", "assumption2"},
                                 {"gamma_mode", to_string(mode)},
                                 {"x", x},
                                 {"gamma", plan.gamma_L},
                                 {"regime_constant", plan.regime_constant},
                                 {"statistic", profile.sum * x - 1.0},
                                 {"p_value", nullptr},
                                 {"expected", 1.0 / x},
                                 {"observed", profile.sum},
                                 {"n_trials", 0},
                                 {"max_p_n", profile.max_term},
                                 {"max_p_n_bound", 1.0 / (plan.gamma_L * x)},
                                 {"sum_p_n_squared", profile.sum_squares}});
        const bool last = li + 1 == config.radius.size();
        if (last && mode != ScalingMode::empirical && std::abs(profile.sum * x - 1.0) > config.assumption2_tol) {
          outcome.failures.push_back("assumption2: L=" + std::to_string(L) + " x=" + format_shortest(x) +
                                     " mode=" + to_string(mode) + " relative error " +
                                     format_shortest(std::abs(profile.sum * x - 1.0)));
        }
      }
    }
    if (theorem_gamma > 0.0 && empirical_gamma > 0.0) {
      level["gamma_ratio_empirical_over_theorem"] = empirical_gamma / theorem_gamma;
    }
    levels.push_back(level);
  }
  outcome.summary["levels"] = levels;
}

void run_extremal(const ExperimentConfig& config, const fs::path& out, RunOutcome& outcome,
                  const RunOptions& options) {
  json levels = json::array();
  const auto& intervals = config.intervals;
  for (int L : config.radius) {
    const auto box = box_at(config, L);
    const double gamma = first_gamma(config, box);
    const auto results = run_extremal_trials(config, box, gamma);

    std::vector<std::string> header{"trial", "L", "gamma", "e1_H", "e1_V", "max_rescaled_H", "max_rescaled_V"};
    for (const auto& iv : intervals) header.push_back("count_H_" + interval_label(iv));
    for (const auto& iv : intervals) header.push_back("count_V_" + interval_label(iv));
    for (const auto* h : {"n_rescaled_H", "dropped_H", "max_residual", "matvecs", "converged"}) header.push_back(h);
    const auto path = out / (to_string(config.experiment) + "_L" + std::to_string(L) + ".csv");
    CsvWriter csv(path, header);
    outcome.files.push_back(path.string());

    std::size_t flagged = 0, undercount = 0;
    std::vector<double> max_H, max_V;
    std::vector<std::vector<std::int64_t>> counts_H(intervals.size()), counts_V(intervals.size());
    double worst_residual = 0.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : results) {
      const double top_H = r.rescaled_H.points.empty() ? 0.0 : r.rescaled_H.points.front();
      const double top_V = r.rescaled_V.points.empty() ? 0.0 : r.rescaled_V.points.front();
      std::vector<std::string> row{fmt(r.trial_index), std::to_string(L), fmt(gamma), fmt(r.e1_H), fmt(r.e1_V),
                                   config.source_H ? fmt(top_H) : fmt(nan), config.source_V ? fmt(top_V) : fmt(nan)};
      for (std::size_t i = 0; i < intervals.size(); ++i) row.push_back(config.source_H ? fmt(r.counts_H[i]) : "nan");
      for (std::size_t i = 0; i < intervals.size(); ++i) row.push_back(config.source_V ? fmt(r.counts_V[i]) : "nan");
      row.push_back(fmt(r.rescaled_H.points.size()));
      row.push_back(fmt(r.rescaled_H.dropped_below_threshold));
      row.push_back(fmt(r.max_residual));
      row.push_back(fmt(r.matvecs));
      row.push_back(r.converged ? "1" : "0");
      csv.row(row);

      if (r.undercount_risk) ++undercount;
      if (!r.converged) {
        ++flagged;
        continue;
      }
      worst_residual = std::max(worst_residual, r.max_residual);
      if (config.source_H) max_H.push_back(top_H);
      if (config.source_V) max_V.push_back(top_V);
      for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (config.source_H) counts_H[i].push_back(r.counts_H[i]);
        if (config.source_V) counts_V[i].push_back(r.counts_V[i]);
      }
    }
    outcome.flagged += flagged;
    outcome.total_trials += results.size();
    if (undercount > 0) {
      note(options, "warning: L=" + std::to_string(L) + ": " + std::to_string(undercount) +
                        " trials kept top_m points all above x_min; counts may be truncated");
    }

    json level{{"L", L},
               {"gamma", gamma},
               {"scaling", to_string(config.scaling.front())},
               {"n_trials", results.size()},
               {"flagged", flagged},
               {"top_m", config.resolved_top_m()},
               {"undercount_warnings", undercount},
               {"max_residual", worst_residual},
               {"reports", json::array()}};
    const bool last = L == config.radius.back();
    auto add_reports = [&](const std::vector<double>& maxima,
                           const std::vector<std::vector<std::int64_t>>& counts, const std::string& source) {
      if (maxima.empty()) return;
      auto max_report = max_law_test(maxima, config.x_grid);
      json j = to_json(max_report);
      j["source"] = source;
      level["reports"].push_back(j);
      if (last && max_report.ks_statistic > config.ks_threshold) {
        outcome.failures.push_back("max law KS (" + source + ") " + format_shortest(max_report.ks_statistic) +
                                   " > " + format_shortest(config.ks_threshold));
      }
      if (config.experiment != Experiment::extremal) return;
      for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (counts[i].size() < kMinGofTrials) continue;
        auto gof = poisson_gof(counts[i], intervals[i]);
        json g = to_json(gof);
        g["source"] = source;
        level["reports"].push_back(g);
        if (last && gof.p_value < config.gof_alpha) {
          outcome.failures.push_back("poisson gof (" + source + ") on " + interval_label(intervals[i]) +
                                     " p=" + format_shortest(gof.p_value));
        }
      }
    };
    add_reports(max_H, counts_H, "H");
    add_reports(max_V, counts_V, "V");
    levels.push_back(level);
  }
  outcome.summary["levels"] = levels;
}

void run_ids(const ExperimentConfig& config, const fs::path& out, RunOutcome& outcome) {
  json levels = json::array();
  std::vector<double> means;
  for (int L : config.radius) {
    const auto box = box_at(config, L);
    const auto free = free_laplacian_eigs(config.dimension, L);
    std::vector<double> ks(config.trials), levy(config.trials);
    run_indexed(config.trials, config.workers, [&](std::size_t t) {
      const auto potential = sample_potential(box, config.law, config.alpha, config.master_seed, t);
      const auto spectrum = dense_spectrum(build_hamiltonian(box, potential, OperatorKind::full), config.dense_cap);
      ks[t] = ks_distance(spectrum.values, free);
      levy[t] = levy_distance(spectrum.values, free);
    });
    const auto path = out / ("ids_L" + std::to_string(L) + ".csv");
    CsvWriter csv(path, {"trial", "L", "n_sites", "ks", "levy"});
    outcome.files.push_back(path.string());
    double ks_sum = 0.0, levy_sum = 0.0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      csv.row({fmt(t), std::to_string(L), fmt(box.site_count()), fmt(ks[t]), fmt(levy[t])});
      ks_sum += ks[t];
      levy_sum += levy[t];
    }
    const double n = static_cast<double>(config.trials);
    means.push_back(ks_sum / n);
    outcome.total_trials += config.trials;
    levels.push_back({{"L", L},
                      {"test", "ids_ks"},
                      {"statistic", ks_sum / n},
                      {"p_value", nullptr},
                      {"expected", 0.0},
                      {"observed", ks_sum / n},
                      {"mean_levy", levy_sum / n},
                      {"n_trials", config.trials}});
  }
  outcome.summary["levels"] = levels;
  if (means.back() > config.ids_threshold) {
    outcome.failures.push_back("ids: mean KS " + format_shortest(means.back()) + " > " +
                               format_shortest(config.ids_threshold));
  }
  for (std::size_t i = 1; i < means.size(); ++i) {
    if (!(means[i] < means[i - 1])) outcome.failures.push_back("ids: mean KS not decreasing along the ladder");
  }
}

void run_theorem4(const ExperimentConfig& config, const fs::path& out, RunOutcome& outcome) {
  const auto report = theorem4_sandwich(config);
  for (std::size_t li = 0; li < config.radius.size(); ++li) {
    const int L = config.radius[li];
    const auto path = out / ("theorem4_L" + std::to_string(L) + ".csv");
    CsvWriter csv(path, {"trial", "L", "e1_H", "e1_V", "max_residual"});
    outcome.files.push_back(path.string());
    for (std::size_t t = 0; t < config.trials; ++t) {
      csv.row({fmt(t), std::to_string(L), fmt(report.e1_H[li][t]), fmt(report.e1_V[li][t]),
               fmt(report.max_residual[li][t])});
    }
  }
  outcome.flagged = report.flagged;
  outcome.total_trials = config.trials;
  json points = json::array();
  for (const auto& p : report.points) {
    points.push_back({{"test", "theorem4_sandwich"},
                      {"L", p.L},
                      {"x", p.x},
                      {"statistic", p.estimate},
                      {"p_value", nullptr},
                      {"expected", {p.lower_bracket, p.upper_bracket}},
                      {"observed", p.estimate},
                      {"standard_error", p.standard_error},
                      {"inside", p.inside},
                      {"inclusion_violations", p.inclusion_violations},
                      {"n_trials", config.trials - report.flagged}});
    if (!p.inside) {
      outcome.failures.push_back("theorem4: L=" + std::to_string(p.L) + " x=" + format_shortest(p.x) +
                                 " estimate outside the exact bracket");
    }
    if (p.inclusion_violations > 0) outcome.failures.push_back("theorem4: realization-wise sandwich violated");
  }
  if (!report.exact_monotone) outcome.failures.push_back("theorem4: exact A_L not monotone on the grid");
  if (report.nesting_violations > 0) outcome.failures.push_back("theorem4: E_1^H decreased on nested boxes");
  json summary{{"points", points},
               {"exact_monotone", report.exact_monotone},
               {"estimate_monotone", report.estimate_monotone},
               {"nesting_violations", report.nesting_violations},
               {"D", envelope_constant_D(config.alpha, config.law.delta())}};
  if (report.c1_fitted) {
    json envelopes = json::array();
    for (double x : config.x_grid) {
      const auto env = theorem4_envelope(x, config.dimension, config.alpha, config.law.delta(), report.c1_fit.C1, 1.0);
      envelopes.push_back({{"x", x}, {"lower", env.lower}, {"upper_with_C2_1", env.upper}});
    }
    summary["c1_fit"] = {{"C1", report.c1_fit.C1}, {"slope", report.c1_fit.slope}, {"points", report.c1_fit.points}};
    summary["envelopes"] = envelopes;
  }
  outcome.summary["theorem4"] = summary;
}

void run_sample(const ExperimentConfig& config, const fs::path& out, RunOutcome& outcome) {
  json levels = json::array();
  for (int L : config.radius) {
    const auto box = box_at(config, L);
    const auto potential = sample_potential(box, config.law, config.alpha, config.master_seed, config.sample_trial);
    std::vector<std::string> header{"ordinal"};
    for (int i = 0; i < config.dimension; ++i) header.push_back("n" + std::to_string(i + 1));
    header.push_back("omega");
    header.push_back("value");
    const auto path = out / ("sample_L" + std::to_string(L) + ".csv");
    CsvWriter csv(path, header);
    outcome.files.push_back(path.string());
    for_each_site(box, 0, box.site_count(), [&](std::span<const int> site, std::size_t ordinal) {
      std::vector<std::string> row{fmt(ordinal)};
      for (int c : site) row.push_back(std::to_string(c));
      row.push_back(fmt(potential.omegas[ordinal]));
      row.push_back(fmt(potential.values[ordinal]));
      csv.row(row);
    });
    const auto matrix_path = out / ("sample_L" + std::to_string(L) + "_matrix.txt");
    std::ofstream matrix(matrix_path);
    write_triplets(matrix, build_hamiltonian(box, potential, OperatorKind::full).triplets());
    outcome.files.push_back(matrix_path.string());
    levels.push_back({{"L", L}, {"trial", config.sample_trial}, {"sites", box.site_count()},
                      {"max_value", max_of(potential.values)}});
  }
  outcome.summary["levels"] = levels;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const fs::path out(config.out);
  fs::create_directories(out);
  RunOutcome outcome;
  outcome.summary = json{{"experiment", to_string(config.experiment)},
                         {"law", config.law.describe()},
                         {"alpha", config.alpha},
                         {"dimension", config.dimension},
                         {"norm_kind", to_string(config.norm_kind)},
                         {"master_seed", config.master_seed}};

  switch (config.experiment) {
    case Experiment::assumption2: run_assumption2(config, out, outcome); break;
    case Experiment::extremal:
    case Experiment::maxlaw: run_extremal(config, out, outcome, options); break;
    case Experiment::ids: run_ids(config, out, outcome); break;
    case Experiment::theorem4: run_theorem4(config, out, outcome); break;
    case Experiment::sample: run_sample(config, out, outcome); break;
  }

  outcome.assertions_passed = outcome.failures.empty();
  outcome.summary["assertions"] = {{"passed", outcome.assertions_passed}, {"failures", outcome.failures}};
  outcome.summary["flagged"] = outcome.flagged;
  const auto summary_path = out / (to_string(config.experiment) + "_summary.json");
  write_json(summary_path, outcome.summary);
  outcome.files.push_back(summary_path.string());

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json config_echo = json::object();
  for (const auto& [key, value] : to_config_map(config)) config_echo[key] = value;
  const auto manifest_path = out / "manifest.json";
  write_json(manifest_path, json{{"version", kVersion},
                                 {"config", config_echo},
                                 {"master_seed", config.master_seed},
                                 {"trial_indices", {0, config.trials == 0 ? 0 : config.trials - 1}},
                                 {"generator", "philox4x32-10 keyed by splitmix64(master_seed ^ splitmix64(trial))"},
                                 {"files", outcome.files},
                                 {"wall_seconds", seconds}});
  outcome.files.push_back(manifest_path.string());

  for (const auto& failure : outcome.failures) note(options, "assertion: " + failure);
  if (outcome.total_trials > 0 &&
      static_cast<double>(outcome.flagged) > 0.01 * static_cast<double>(outcome.total_trials)) {
    outcome.exit_code = kExitSolverFailure;
  } else if (options.assert_mode && !outcome.assertions_passed) {
    outcome.exit_code = kExitAssertion;
  }
  return outcome;
}

}  // namespace speclab
