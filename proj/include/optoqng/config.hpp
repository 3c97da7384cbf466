#ifndef OPTOQNG_CONFIG_HPP
#define OPTOQNG_CONFIG_HPP

// Experiment configuration: a small TOML subset (tables, strings, numbers,
// booleans, single-line arrays) mapped onto ExperimentConfig. Unknown tables
// and keys are rejected.

#include "optoqng/errors.hpp"
#include "optoqng/gaussian_dynamics.hpp"
#include "optoqng/heralding.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace optoqng {

class ConfigError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

using ConfigArray = std::vector<std::variant<double, std::string>>;
using ConfigValue = std::variant<double, bool, std::string, ConfigArray>;

/// Parsed document: "table.key" -> value (top-level keys have no prefix).
using ConfigDocument = std::map<std::string, ConfigValue>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline bool parse_number(const std::string& text, double& out) {
  std::string t;
  for (char c : text)
    if (c != '_') t.push_back(c);
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

inline std::variant<double, std::string> parse_scalar(const std::string& text, int line) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') return text.substr(1, text.size() - 2);
  double v;
  if (parse_number(text, v)) return v;
  throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" + text + "'");
}

inline ConfigValue parse_value(const std::string& text, int line) {
  if (text == "true") return true;
  if (text == "false") return false;
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated array");
    ConfigArray arr;
    std::string inner = text.substr(1, text.size() - 2);
    std::string item;
    bool quoted = false;
    auto flush = [&] {
      const auto t = trim(item);
      if (!t.empty()) arr.push_back(parse_scalar(t, line));
      item.clear();
    };
    for (char c : inner) {
      if (c == '"') quoted = !quoted;
      if (c == ',' && !quoted)
        flush();
      else
        item.push_back(c);
    }
    flush();
    return arr;
  }
  auto s = parse_scalar(text, line);
  if (auto* d = std::get_if<double>(&s)) return *d;
  return std::get<std::string>(s);
}

}  // namespace detail

inline ConfigDocument parse_config(std::istream& in) {
  ConfigDocument doc;
  std::string table;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = detail::trim(detail::strip_comment(raw));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3)
        throw ConfigError("line " + std::to_string(line) + ": malformed table header");
      table = detail::trim(text.substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const auto key = detail::trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
    const auto full = table.empty() ? key : table + "." + key;
    if (doc.count(full)) throw ConfigError("line " + std::to_string(line) + ": duplicate key " + full);
    doc[full] = detail::parse_value(detail::trim(text.substr(eq + 1)), line);
  }
  return doc;
}

inline ConfigDocument parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

inline const std::set<std::string>& experiment_names() {
  static const std::set<std::string> names{"herald", "thresholds", "readout", "bunching", "sensing", "depth"};
  return names;
}

inline const std::set<std::string>& plan_names() {
  static const std::set<std::string> names{"blue_apd", "blue_hbt", "blue_apd_x2", "red_apd"};
  return names;
}

/// Every knob of a run; defaults reproduce the superfluid-helium setting.
struct ExperimentConfig {
  std::string experiment;
  std::filesystem::path out = "out";
  std::string preset = "superfluid";
  SystemParams params = SystemParams::superfluid();

  // [protocol]
  std::string plan = "blue_apd";
  double delay = plans::default_inter_pulse_delay;
  std::optional<double> zeta_db;
  FilterKind filter = FilterKind::optimal;
  int filter_cells = default_filter_cells;
  double readout_duration = SystemParams::readout_duration;
  double readout_coupling = SystemParams::readout_coupling;

  // [thresholds]
  int k_max = 10;
  int cutoff = -1;
  std::string order = "ds";

  // [wigner]
  double r_max = 8.0;
  double r_step = 0.02;

  // [readout]
  double tau_min = 5.5e-6;
  double tau_max = 9.5e-6;
  int tau_points = 9;

  // [bunching]
  int copies = 10;
  int bunching_cutoff = 15;
  double bunching_r_max = 10.0;

  // [sensing]
  int mcopies = 500;
  std::vector<std::string> probes{"fock:0", "fock:1", "fock:2",
                                  "plan:blue_apd:0", "plan:blue_hbt:0",
                                  "plan:blue_apd:0.05", "plan:blue_hbt:0.05", "thermal:0.05"};
  int sensing_points = 40;
  double nc_min = 1e-3;
  double nc_max = 1.0;
  int resolution = -1;

  /// Loss of the optional readout stage, zeta = 10^{-dB/10}.
  std::optional<double> zeta() const {
    if (!zeta_db) return std::nullopt;
    return std::pow(10.0, -*zeta_db / 10.0);
  }

  void validate() const {
    if (!experiment_names().count(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
    if (!plan_names().count(plan)) throw ConfigError("unknown plan '" + plan + "'");
    if (order != "ds" && order != "sd") throw ConfigError("thresholds.order must be \"ds\" or \"sd\"");
    if (zeta_db && *zeta_db < 0.0) throw ConfigError("zeta_db must be >= 0 (zeta = 10^{-dB/10} <= 1)");
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    if (copies < 1 || mcopies < 1) throw ConfigError("copies must be >= 1");
    if (bunching_cutoff < 1) throw ConfigError("bunching cutoff must be >= 1");
    if (!(bunching_r_max > 0.0)) throw ConfigError("bunching.r_max must be positive");
    if (!(r_max > 0.0 && r_step > 0.0)) throw ConfigError("wigner grid must have positive r_max and r_step");
    if (!(tau_min > 0.0 && tau_max >= tau_min) || tau_points < 1) throw ConfigError("bad readout sweep");
    if (!(nc_min > 0.0 && nc_max > nc_min) || sensing_points < 10) throw ConfigError("bad sensing grid");
    if (delay < 0.0) throw ConfigError("delay must be >= 0");
    try {
      params.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
};

namespace detail {

inline double as_number(const ConfigValue& v, const std::string& key) {
  if (auto* d = std::get_if<double>(&v)) return *d;
  throw ConfigError(key + " must be a number");
}

inline int as_integer(const ConfigValue& v, const std::string& key) {
  const double d = as_number(v, key);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(key + " must be an integer");
  return static_cast<int>(d);
}

inline std::string as_string(const ConfigValue& v, const std::string& key) {
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError(key + " must be a string");
}

inline std::vector<std::string> as_string_list(const ConfigValue& v, const std::string& key) {
  const auto* arr = std::get_if<ConfigArray>(&v);
  if (!arr) throw ConfigError(key + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : *arr) {
    const auto* s = std::get_if<std::string>(&item);
    if (!s) throw ConfigError(key + " must be an array of strings");
    out.push_back(*s);
  }
  return out;
}

}  // namespace detail

/// Applies a parsed document on top of the defaults.
inline ExperimentConfig make_config(const ConfigDocument& doc) {
  ExperimentConfig cfg;
  if (auto it = doc.find("system.preset"); it != doc.end()) {
    cfg.preset = detail::as_string(it->second, it->first);
    if (cfg.preset == "superfluid")
      cfg.params = SystemParams::superfluid();
    else if (cfg.preset == "angular_damping")
      cfg.params = SystemParams::angular_damping();
    else
      throw ConfigError("unknown system.preset '" + cfg.preset + "'");
  }
  for (const auto& [key, value] : doc) {
    using namespace detail;
    auto num = [&] { return as_number(value, key); };
    auto integer = [&] { return as_integer(value, key); };
    auto str = [&] { return as_string(value, key); };
    if (key == "experiment") cfg.experiment = str();
    else if (key == "out") cfg.out = str();
    else if (key == "system.preset") continue;
    else if (key == "system.omega_m") cfg.params.omega_m = num();
    else if (key == "system.gamma") cfg.params.gamma = num();
    else if (key == "system.kappa") cfg.params.kappa = num();
    else if (key == "system.g") cfg.params.g = num();
    else if (key == "system.n0") cfg.params.n0 = num();
    else if (key == "system.n_th") cfg.params.n_th = num();
    else if (key == "system.pulse_duration") cfg.params.pulse_duration = num();
    else if (key == "protocol.plan") cfg.plan = str();
    else if (key == "protocol.delay") cfg.delay = num();
    else if (key == "protocol.zeta_db") cfg.zeta_db = num();
    else if (key == "protocol.filter") {
      const auto f = str();
      if (f == "optimal") cfg.filter = FilterKind::optimal;
      else if (f == "flat") cfg.filter = FilterKind::flat;
      else throw ConfigError("protocol.filter must be \"optimal\" or \"flat\"");
    }
    else if (key == "protocol.filter_cells") cfg.filter_cells = integer();
    else if (key == "protocol.readout_duration") cfg.readout_duration = num();
    else if (key == "protocol.readout_coupling") cfg.readout_coupling = num();
    else if (key == "thresholds.k_max") cfg.k_max = integer();
    else if (key == "thresholds.cutoff") cfg.cutoff = integer();
    else if (key == "thresholds.order") cfg.order = str();
    else if (key == "wigner.r_max") cfg.r_max = num();
    else if (key == "wigner.r_step") cfg.r_step = num();
    else if (key == "readout.tau_min") cfg.tau_min = num();
    else if (key == "readout.tau_max") cfg.tau_max = num();
    else if (key == "readout.points") cfg.tau_points = integer();
    else if (key == "bunching.copies") cfg.copies = integer();
    else if (key == "bunching.cutoff") cfg.bunching_cutoff = integer();
    else if (key == "bunching.r_max") cfg.bunching_r_max = num();
    else if (key == "sensing.copies") cfg.mcopies = integer();
    else if (key == "sensing.probes") cfg.probes = as_string_list(value, key);
    else if (key == "sensing.points") cfg.sensing_points = integer();
    else if (key == "sensing.nc_min") cfg.nc_min = num();
    else if (key == "sensing.nc_max") cfg.nc_max = num();
    else if (key == "sensing.resolution") cfg.resolution = integer();
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return cfg;
}

/// Plan by name, using the configured delay, filter and optional lossy readout.
inline HeraldingPlan build_plan(const ExperimentConfig& cfg, const SystemParams& params,
                                const std::string& name) {
  HeraldingPlan plan;
  if (name == "blue_apd") plan = plans::blue_apd(params);
  else if (name == "blue_hbt") plan = plans::blue_hbt(params);
  else if (name == "blue_apd_x2") plan = plans::blue_apd_twice(params, cfg.delay);
  else if (name == "red_apd") plan = plans::red_apd(params);
  else throw ConfigError("unknown plan '" + name + "'");
  plan.filter = cfg.filter;
  plan.filter_cells = cfg.filter_cells;
  if (auto z = cfg.zeta()) plan.readout = ReadoutStage{cfg.readout_duration, *z, cfg.readout_coupling};
  return plan;
}

inline HeraldingPlan build_plan(const ExperimentConfig& cfg, const SystemParams& params) {
  return build_plan(cfg, params, cfg.plan);
}

}  // namespace optoqng

#endif  // OPTOQNG_CONFIG_HPP
