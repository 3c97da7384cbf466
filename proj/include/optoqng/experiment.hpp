#ifndef OPTOQNG_EXPERIMENT_HPP
#define OPTOQNG_EXPERIMENT_HPP

// Named pipelines behind the command-line front-end. Each run writes CSV
// tables plus a manifest.json holding every input and derived quantity.

#include "optoqng/bunching.hpp"
#include "optoqng/config.hpp"
#include "optoqng/errors.hpp"
#include "optoqng/heralding.hpp"
#include "optoqng/qng.hpp"
#include "optoqng/sensing.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace optoqng {

inline constexpr const char* tool_version = "1.0.0";

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal representation.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class CsvTable {
public:
  CsvTable(std::string comment, std::vector<std::string> columns)
      : comment_(std::move(comment)), columns_(std::move(columns)) {}

  CsvTable& row(std::vector<std::string> cells) {
    detail::require(cells.size() == columns_.size(), "csv: row width mismatch");
    rows_.push_back(std::move(cells));
    return *this;
  }

  CsvTable& row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_number(v));
    return row(std::move(cells));
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "# " << comment_ << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << '\n';
    }
  }

private:
  std::string comment_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  Json manifest;
};

namespace detail {

inline Json params_json(const SystemParams& p) {
  return Json{{"omega_m", p.omega_m}, {"gamma", p.gamma},   {"kappa", p.kappa},
              {"g", p.g},             {"n0", p.n0},         {"n_th", p.n_th},
              {"pulse_duration", p.pulse_duration}};
}

inline Json config_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = c.experiment;
  j["preset"] = c.preset;
  j["system"] = params_json(c.params);
  j["protocol"] = Json{{"plan", c.plan},
                       {"delay", c.delay},
                       {"zeta_db", c.zeta_db ? Json(*c.zeta_db) : Json(nullptr)},
                       {"zeta", c.zeta() ? Json(*c.zeta()) : Json(nullptr)},
                       {"filter", c.filter == FilterKind::optimal ? "optimal" : "flat"},
                       {"filter_cells", c.filter_cells},
                       {"readout_duration", c.readout_duration},
                       {"readout_coupling", c.readout_coupling}};
  j["thresholds"] = Json{{"k_max", c.k_max}, {"cutoff", c.cutoff}, {"order", c.order}};
  j["wigner"] = Json{{"r_max", c.r_max}, {"r_step", c.r_step}};
  j["readout"] = Json{{"tau_min", c.tau_min}, {"tau_max", c.tau_max}, {"points", c.tau_points}};
  j["bunching"] = Json{{"copies", c.copies}, {"cutoff", c.bunching_cutoff}, {"r_max", c.bunching_r_max}};
  j["sensing"] = Json{{"copies", c.mcopies},         {"probes", c.probes},
                      {"points", c.sensing_points},  {"nc_min", c.nc_min},
                      {"nc_max", c.nc_max},          {"resolution", c.resolution}};
  return j;
}

inline Json mixture_json(const SignedThermalMixture& s) {
  Json arr = Json::array();
  for (const auto& c : s.components()) arr.push_back(Json{{"weight", c.weight}, {"occupation", c.occupation}});
  return arr;
}

class Writer {
public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const CsvTable& table) {
    const auto path = dir_ / name;
    table.write(path);
    outcome.files.push_back(path);
    outcome.manifest["files"].push_back(name);
  }

  void finish() {
    const auto path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << outcome.manifest.dump(2) << '\n';
    outcome.files.push_back(path);
  }

  RunOutcome outcome;

private:
  std::filesystem::path dir_;
};

inline CsvTable fock_table(const FockDistribution& p, const std::string& comment) {
  CsvTable t(comment, {"k", "p_k"});
  for (std::size_t k = 0; k < p.size(); ++k) t.row({static_cast<double>(k), p[k]});
  return t;
}

inline CsvTable wigner_table(const WignerCut& cut, const std::string& comment) {
  CsvTable t(comment, {"r", "W"});
  for (std::size_t i = 0; i < cut.r.size(); ++i) t.row({cut.r[i], cut.w[i]});
  return t;
}

inline Json negativity_json(const NegativityDepth& n) {
  return Json{{"zeta_crit", n.zeta_crit}, {"decibels", n.decibels()}};
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline double probe_number(const std::string& text, const std::string& spec) {
  double v;
  if (!parse_number(text, v)) throw ConfigError("bad number in probe '" + spec + "'");
  return v;
}

// fock:m | thermal:n | added:n0:j | subtracted:n0 | plan:NAME[:n0]
inline ProbeState make_probe(const std::string& spec, const ExperimentConfig& cfg) {
  const auto parts = split(spec, ':');
  const auto& kind = parts[0];
  constexpr int k_max = 80;
  auto integer = [&](const std::string& t) {
    const double v = probe_number(t, spec);
    if (v < 0 || v != std::floor(v)) throw ConfigError("probe '" + spec + "' needs a non-negative integer");
    return static_cast<int>(v);
  };
  if (kind == "fock" && parts.size() == 2) {
    const int m = integer(parts[1]);
    return ProbeState(FockDistribution::fock_state(m, m), spec);
  }
  if (kind == "thermal" && parts.size() == 2)
    return ProbeState(FockDistribution::thermal(probe_number(parts[1], spec), k_max).normalized(), spec);
  if (kind == "added" && parts.size() == 3)
    return ProbeState(FockDistribution::phonon_added_thermal(probe_number(parts[1], spec), integer(parts[2]), k_max)
                          .normalized(),
                      spec);
  if (kind == "subtracted" && parts.size() == 2)
    return ProbeState(FockDistribution::phonon_subtracted_thermal(probe_number(parts[1], spec), k_max).normalized(),
                      spec);
  if (kind == "plan" && (parts.size() == 2 || parts.size() == 3)) {
    if (!plan_names().count(parts[1])) throw ConfigError("unknown plan in probe '" + spec + "'");
    SystemParams p = cfg.params;
    if (parts.size() == 3) p.n0 = probe_number(parts[2], spec);
    ExperimentConfig local = cfg;
    local.zeta_db.reset();
    const auto result = run_protocol(build_plan(local, p, parts[1]), p);
    return ProbeState::from_mixture(result.state, spec, k_max);
  }
  throw ConfigError("unknown probe '" + spec + "'");
}

inline void run_thresholds(const ExperimentConfig& cfg, Writer& w) {
  const auto order = cfg.order == "ds" ? OperatorOrder::displace_squeeze : OperatorOrder::squeeze_displace;
  const auto table = threshold_table(cfg.k_max, cfg.cutoff, order);
  CsvTable t("absolute k-phonon QNG thresholds p_k^G with the maximizing displacement alpha and squeezing r",
             {"k", "p_k_G", "alpha", "r"});
  Json rows = Json::array();
  for (const auto& r : table.rows()) {
    t.row({static_cast<double>(r.k), r.probability, r.alpha, r.r});
    rows.push_back(Json{{"k", r.k}, {"p_k_G", r.probability}, {"alpha", r.alpha}, {"r", r.r},
                        {"agreeing_starts", r.agreeing_starts}});
  }
  w.write("thresholds.csv", t);

  CsvTable edge("edge of the Gaussian region on the (p0, p1) plane parametrized by r", {"r", "p0", "p1"});
  for (int i = 0; i <= 300; ++i) {
    const double r = 0.01 * i;
    edge.row({r, gaussian_edge_p0(r), gaussian_edge_p1(r)});
  }
  w.write("gaussian_edge.csv", edge);
  const auto peak = gaussian_boundary_peak();
  w.outcome.manifest["derived"] = Json{
      {"thresholds", rows},
      {"cutoff", cfg.cutoff < 0 ? default_threshold_cutoff(cfg.k_max) : cfg.cutoff},
      {"gaussian_edge_peak", Json{{"r", peak.r}, {"p0", peak.p0}, {"p1", peak.p1}}}};
}

inline void run_herald(const ExperimentConfig& cfg, Writer& w) {
  const auto plan = build_plan(cfg, cfg.params);
  const auto result = run_protocol(plan, cfg.params);
  const int k_out = std::max(cfg.k_max, 10);
  const auto fock = result.state.fock(k_out);
  const auto grid = radial_grid(cfg.r_max, cfg.r_step);
  w.write("fock.csv", fock_table(fock, "phonon-number distribution of the heralded mechanical state"));
  w.write("wigner.csv", wigner_table(wigner_cut(result.state, grid), "radial Wigner cut of the heralded state"));

  const int k_qng = std::min(cfg.k_max, 3);
  const auto thresholds = threshold_table(k_qng);
  Json qng = Json::array();
  for (int k = 1; k <= k_qng; ++k) {
    const auto d = qng_depth(result.state, k, cfg.params, thresholds);
    qng.push_back(Json{{"k", k}, {"p_k", fock[static_cast<std::size_t>(k)]}, {"p_k_G", thresholds[k]},
                       {"tau", d.tau}, {"n_depth", d.n_depth}});
  }
  Json derived{{"step_probabilities", result.step_probabilities},
               {"success_probability", result.success_probability()},
               {"components", mixture_json(result.state)},
               {"mean_occupation", result.state.mean_occupation()},
               {"negativity", negativity_json(negativity_depth(result.state))},
               {"qng", qng}};
  if (result.readout_state) {
    const auto& ro = *result.readout_state;
    w.write("readout_fock.csv", fock_table(ro.fock(k_out), "photon-number distribution of the lossy readout mode"));
    w.write("readout_wigner.csv", wigner_table(wigner_cut(ro, grid), "radial Wigner cut of the lossy readout mode"));
    derived["readout"] = Json{{"transmittance", *result.readout_transmittance},
                              {"zeta", *cfg.zeta()},
                              {"components", mixture_json(ro)},
                              {"negativity", negativity_json(negativity_depth(ro))}};
  }
  w.outcome.manifest["derived"] = derived;
}

inline void run_readout(const ExperimentConfig& cfg, Writer& w) {
  const SystemParams red = cfg.params.with(Detuning::red, cfg.readout_coupling);
  CsvTable t("readout transmittance of a red-detuned pulse versus its duration", {"tau", "kappa_tau", "T"});
  Json rows = Json::array();
  for (int i = 0; i < cfg.tau_points; ++i) {
    const double tau = cfg.tau_points == 1
                           ? cfg.tau_min
                           : cfg.tau_min + (cfg.tau_max - cfg.tau_min) * i / (cfg.tau_points - 1);
    const double tr = readout_transmittance(red, make_filter(cfg.filter, red, tau, cfg.filter_cells));
    t.row({tau, red.kappa * tau, tr});
    rows.push_back(Json{{"tau", tau}, {"T", tr}});
  }
  w.write("readout.csv", t);
  w.outcome.manifest["derived"] = Json{{"transmittance", rows}};
}

inline void run_bunching(const ExperimentConfig& cfg, Writer& w) {
  const auto result = run_protocol(build_plan(cfg, cfg.params), cfg.params);
  const auto input = result.state.fock(cfg.bunching_cutoff).normalized();
  BunchingSpec spec{cfg.copies, input, radial_grid(cfg.bunching_r_max, cfg.r_step)};
  const auto bunched = bunched_distribution(spec);
  const auto cut = wigner_cut(bunched, spec.r_grid);
  const auto in_cut = wigner_cut(input, spec.r_grid);
  const auto ref = wigner_cut(FockDistribution::fock_state(cfg.copies, cfg.copies), spec.r_grid);
  CsvTable t("radial Wigner cuts: single input copy, bunched output port, Fock reference |N>",
             {"r", "W_input", "W_bunched", "W_fock_N"});
  for (std::size_t i = 0; i < cut.r.size(); ++i) t.row({cut.r[i], in_cut.w[i], cut.w[i], ref.w[i]});
  w.write("bunching.csv", t);
  w.write("bunched_fock.csv", fock_table(bunched, "phonon-number distribution of the bunched output port"));
  std::vector<double> input_p(input.values().begin(), input.values().end());
  w.outcome.manifest["derived"] = Json{
      {"input_fock", input_p},
      {"sign_changes", sign_changes(cut, 1e-12).size()},
      {"normalization", cut.normalization()},
      {"overlap_with_fock_N", rotational_overlap(cut, ref)},
      {"purity", rotational_overlap(cut, cut)}};
}

inline void run_sensing(const ExperimentConfig& cfg, Writer& w) {
  const auto grid = default_sensing_grid(cfg.sensing_points, cfg.nc_min, cfg.nc_max);
  CsvTable curves("Fisher information and Cramer-Rao error per probe; scaled_error = 1e4 * delta2 / N_c",
                  {"probe", "N_c", "fisher", "delta2", "scaled_error"});
  CsvTable fits("slope of the least-squares line through (N_c, 1e4 * delta2) for N_c <= 0.3",
                {"probe", "coefficient"});
  Json probes = Json::array();
  for (const auto& spec : cfg.probes) {
    const auto probe = make_probe(spec, cfg);
    const auto rep = sensing_report(probe, cfg.mcopies, grid, cfg.resolution);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      curves.row({spec, format_number(grid[i]), format_number(rep.fisher[i]), format_number(rep.delta2[i]),
                  format_number(rep.scaled_error(i))});
    }
    fits.row({spec, format_number(rep.fit_coefficient)});
    std::vector<double> p(probe.distribution.values().begin(), probe.distribution.values().end());
    probes.push_back(Json{{"probe", spec}, {"coefficient", rep.fit_coefficient}, {"fock", p}});
  }
  w.write("fisher.csv", curves);
  w.write("fits.csv", fits);
  w.outcome.manifest["derived"] = Json{{"probes", probes}};
}

inline void run_depth(const ExperimentConfig& cfg, Writer& w) {
  const PreparedProtocol protocol(build_plan(cfg, cfg.params), cfg.params);
  const auto state = protocol.run().state;
  const auto table = threshold_table(cfg.k_max);
  const auto fock = state.fock(cfg.k_max);
  CsvTable t("QNG depth of the heralded state: thermal noise (phonons) that brings p_k down to p_k^G",
             {"k", "p_k", "p_k_G", "tau", "n_depth", "n0_boundary"});
  Json rows = Json::array();
  for (int k = 1; k <= cfg.k_max; ++k) {
    const auto d = qng_depth(state, k, cfg.params, table);
    const double n0c = qng_boundary_occupation(protocol, k, table[k]);
    t.row({static_cast<double>(k), fock[static_cast<std::size_t>(k)], table[k], d.tau, d.n_depth, n0c});
    rows.push_back(Json{{"k", k}, {"p_k", fock[static_cast<std::size_t>(k)]}, {"p_k_G", table[k]},
                        {"tau", d.tau}, {"n_depth", d.n_depth}, {"n0_boundary", n0c}});
  }
  w.write("depth.csv", t);
  w.outcome.manifest["derived"] = Json{{"components", mixture_json(state)},
                                       {"depth", rows},
                                       {"negativity", negativity_json(negativity_depth(state))}};
}

}  // namespace detail

/// Runs one experiment; throws on configuration or numerical failure.
inline RunOutcome execute(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Writer w(cfg.out);
  w.outcome.manifest["tool"] = "optoqng";
  w.outcome.manifest["version"] = tool_version;
  w.outcome.manifest["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                "." + std::to_string(EIGEN_MINOR_VERSION);
  w.outcome.manifest["inputs"] = detail::config_json(cfg);
  w.outcome.manifest["files"] = Json::array();
  if (cfg.experiment == "thresholds") detail::run_thresholds(cfg, w);
  else if (cfg.experiment == "herald") detail::run_herald(cfg, w);
  else if (cfg.experiment == "readout") detail::run_readout(cfg, w);
  else if (cfg.experiment == "bunching") detail::run_bunching(cfg, w);
  else if (cfg.experiment == "sensing") detail::run_sensing(cfg, w);
  else if (cfg.experiment == "depth") detail::run_depth(cfg, w);
  w.finish();
  return std::move(w.outcome);
}

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2 };

/// Runs one experiment and maps failures to exit codes, reporting them on `err`.
inline int run(const ExperimentConfig& cfg, std::ostream& err = std::cerr) {
  try {
    execute(cfg);
    return exit_ok;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const NumericalError& e) {
    err << "numerical failure in " << cfg.experiment << ": " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "error in " << cfg.experiment << ": " << e.what() << '\n';
    return exit_numerical;
  }
}

}  // namespace optoqng

#endif  // OPTOQNG_EXPERIMENT_HPP
