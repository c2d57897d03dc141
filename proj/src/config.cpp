#include "speclab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "speclab/errors.hpp"
#include "speclab/format.hpp"

namespace speclab {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  if (value == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + value + "'");
  }
  return v;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_shortest(values[i]);
  }
  return out;
}

}  // namespace

std::string to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::ids: return "ids";
    case Experiment::extremal: return "extremal";
    case Experiment::assumption2: return "assumption2";
    case Experiment::maxlaw: return "maxlaw";
    case Experiment::theorem4: return "theorem4";
    case Experiment::sample: return "sample";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (auto e : {Experiment::ids, Experiment::extremal, Experiment::assumption2,
                 Experiment::maxlaw, Experiment::theorem4, Experiment::sample}) {
    if (to_string(e) == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(SolverChoice solver) {
  switch (solver) {
    case SolverChoice::automatic: return "auto";
    case SolverChoice::dense: return "dense";
    case SolverChoice::lanczos: return "lanczos";
  }
  return "?";
}

std::vector<Interval> parse_intervals(const std::string& text) {
  std::vector<Interval> out;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("interval '" + item + "' must be lo:hi");
    out.push_back({to_double("intervals", trim(item.substr(0, colon))),
                   to_double("intervals", trim(item.substr(colon + 1)))});
  }
  return out;
}

ConfigMap read_config_map(std::istream& in) {
  ConfigMap map;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    map[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return map;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return read_config_map(in);
}

void apply_config(ExperimentConfig& config, const ConfigMap& map) {
  // The law is assembled from family/p/k/delta after the loop.
  std::string family = config.law.family() == TailFamily::power_log ? "power_log" : "stretched_exp";
  double p = config.law.p();
  int k = config.law.k();
  double delta = config.law.delta();

  for (const auto& [key, value] : map) {
    if (key == "experiment") {
      config.experiment = parse_experiment(value);
    } else if (key == "dimension") {
      config.dimension = static_cast<int>(to_u64(key, value));
    } else if (key == "radius" || key == "L") {
      config.radius.clear();
      for (const auto& item : split(value, ',')) {
        config.radius.push_back(static_cast<int>(to_u64(key, item)));
      }
    } else if (key == "norm_kind") {
      config.norm_kind = parse_norm_kind(value);
    } else if (key == "family") {
      family = value;
    } else if (key == "p") {
      p = to_double(key, value);
    } else if (key == "k") {
      k = static_cast<int>(to_u64(key, value));
    } else if (key == "delta") {
      delta = to_double(key, value);
    } else if (key == "alpha") {
      config.alpha = to_double(key, value);
    } else if (key == "scaling") {
      config.scaling.clear();
      for (const auto& item : split(value, ',')) config.scaling.push_back(parse_scaling_mode(item));
    } else if (key == "target_x") {
      config.target_x = to_double(key, value);
    } else if (key == "trials") {
      config.trials = to_u64(key, value);
    } else if (key == "master_seed") {
      config.master_seed = to_u64(key, value);
    } else if (key == "intervals") {
      config.intervals = parse_intervals(value);
    } else if (key == "x_grid") {
      config.x_grid.clear();
      for (const auto& item : split(value, ',')) config.x_grid.push_back(to_double(key, item));
    } else if (key == "top_m") {
      config.top_m = to_u64(key, value);
    } else if (key == "source") {
      config.source_H = config.source_V = false;
      for (const auto& item : split(value, ',')) {
        if (item == "H") {
          config.source_H = true;
        } else if (item == "V") {
          config.source_V = true;
        } else {
          throw ConfigError("source must list H and/or V");
        }
      }
    } else if (key == "solver") {
      if (value == "auto") {
        config.solver = SolverChoice::automatic;
      } else if (value == "dense") {
        config.solver = SolverChoice::dense;
      } else if (value == "lanczos") {
        config.solver = SolverChoice::lanczos;
      } else {
        throw ConfigError("solver must be auto, dense or lanczos");
      }
    } else if (key == "tol") {
      config.tol = to_double(key, value);
    } else if (key == "max_matvecs") {
      config.max_matvecs = to_u64(key, value);
    } else if (key == "dense_cap") {
      config.dense_cap = to_u64(key, value);
    } else if (key == "workers") {
      config.workers = static_cast<unsigned>(to_u64(key, value));
    } else if (key == "sample_trial") {
      config.sample_trial = to_u64(key, value);
    } else if (key == "out") {
      config.out = value;
    } else if (key == "ks_threshold") {
      config.ks_threshold = to_double(key, value);
    } else if (key == "gof_alpha") {
      config.gof_alpha = to_double(key, value);
    } else if (key == "assumption2_tol") {
      config.assumption2_tol = to_double(key, value);
    } else if (key == "ids_threshold") {
      config.ids_threshold = to_double(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  if (family == "power_log") {
    config.law = TailLaw::power_log(p, k);
  } else if (family == "stretched_exp") {
    config.law = TailLaw::stretched_exp(delta);
  } else {
    throw ConfigError("family must be power_log or stretched_exp");
  }
}

ConfigMap to_config_map(const ExperimentConfig& c) {
  ConfigMap map;
  map["experiment"] = to_string(c.experiment);
  map["dimension"] = std::to_string(c.dimension);
  std::string radius;
  for (std::size_t i = 0; i < c.radius.size(); ++i) {
    radius += (i ? "," : "") + std::to_string(c.radius[i]);
  }
  map["radius"] = radius;
  map["norm_kind"] = to_string(c.norm_kind);
  if (c.law.family() == TailFamily::power_log) {
    map["family"] = "power_log";
    map["p"] = format_shortest(c.law.p());
    map["k"] = std::to_string(c.law.k());
  } else {
    map["family"] = "stretched_exp";
    map["delta"] = format_shortest(c.law.delta());
  }
  map["alpha"] = format_shortest(c.alpha);
  std::string scaling;
  for (std::size_t i = 0; i < c.scaling.size(); ++i) {
    scaling += (i ? "," : "") + to_string(c.scaling[i]);
  }
  map["scaling"] = scaling;
  map["target_x"] = format_shortest(c.target_x);
  map["trials"] = std::to_string(c.trials);
  map["master_seed"] = std::to_string(c.master_seed);
  std::string intervals;
  for (std::size_t i = 0; i < c.intervals.size(); ++i) {
    intervals += (i ? "," : "") + format_shortest(c.intervals[i].lo) + ":" +
                 (std::isinf(c.intervals[i].hi) ? std::string("inf") : format_shortest(c.intervals[i].hi));
  }
  map["intervals"] = intervals;
  map["x_grid"] = join_doubles(c.x_grid);
  map["top_m"] = std::to_string(c.top_m);
  map["source"] = std::string(c.source_H ? "H" : "") + (c.source_H && c.source_V ? "," : "") +
                  (c.source_V ? "V" : "");
  map["solver"] = to_string(c.solver);
  map["tol"] = format_shortest(c.tol);
  map["max_matvecs"] = std::to_string(c.max_matvecs);
  map["dense_cap"] = std::to_string(c.dense_cap);
  map["workers"] = std::to_string(c.workers);
  map["sample_trial"] = std::to_string(c.sample_trial);
  map["out"] = c.out;
  map["ks_threshold"] = format_shortest(c.ks_threshold);
  map["gof_alpha"] = format_shortest(c.gof_alpha);
  map["assumption2_tol"] = format_shortest(c.assumption2_tol);
  map["ids_threshold"] = format_shortest(c.ids_threshold);
  return map;
}

void ExperimentConfig::validate() const {
  if (dimension < 1) throw ConfigError("dimension must be >= 1");
  if (radius.empty()) throw ConfigError("radius ladder is empty");
  for (std::size_t i = 0; i < radius.size(); ++i) {
    if (radius[i] < 1) throw ConfigError("every radius must be >= 1");
    if (i > 0 && radius[i] <= radius[i - 1]) throw ConfigError("radius ladder must be strictly increasing");
  }
  if (alpha < 0.0 || !std::isfinite(alpha)) throw ConfigError("alpha must be >= 0");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (scaling.empty()) throw ConfigError("scaling must name at least one mode");
  validate_intervals(intervals);
  for (double x : x_grid) {
    if (!(x > 0.0)) throw ConfigError("x_grid values must be positive");
  }

  switch (experiment) {
    case Experiment::extremal:
    case Experiment::maxlaw:
      if (!source_H && !source_V) throw ConfigError("source must include H or V");
      if (law.family() == TailFamily::stretched_exp && law.delta() >= 1.0) {
        throw RegimeError("Poisson-limit experiments need delta < 1 (f'/f does not vanish at delta = 1)");
      }
      if (experiment == Experiment::extremal && intervals.empty()) {
        throw ConfigError("extremal needs at least one interval");
      }
      for (auto mode : scaling) validate_scaling(mode, dimension, law, alpha);
      break;
    case Experiment::assumption2:
      if (x_grid.empty()) throw ConfigError("assumption2 needs an x_grid");
      for (auto mode : scaling) validate_scaling(mode, dimension, law, alpha);
      break;
    case Experiment::theorem4:
      if (law.family() != TailFamily::stretched_exp) throw RegimeError("theorem4 needs a stretched_exp law");
      if (!(alpha > 0.0)) throw RegimeError("theorem4 needs alpha > 0");
      if (x_grid.empty()) throw ConfigError("theorem4 needs an x_grid");
      for (double x : x_grid) {
        if (x - 2.0 * dimension < law.clamp_point()) {
          throw ConfigError("theorem4 needs x - 2d >= clamp_point for every x");
        }
      }
      break;
    case Experiment::ids:
      if (!(alpha > 0.0)) throw RegimeError("ids compares against the free spectrum and needs alpha > 0");
      break;
    case Experiment::sample:
      break;
  }
}

std::size_t ExperimentConfig::resolved_top_m() const {
  if (top_m > 0) return top_m;
  double x_min = std::numeric_limits<double>::infinity();
  for (const auto& iv : intervals) x_min = std::min(x_min, iv.lo);
  if (!std::isfinite(x_min)) return 8;
  return std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(4.0 / x_min)));
}

}  // namespace speclab
