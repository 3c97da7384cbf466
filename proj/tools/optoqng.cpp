// Command-line front-end: optoqng <experiment> [--config FILE] [overrides...]

#include "optoqng/config.hpp"
#include "optoqng/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> kmax;
  std::optional<double> n0;
  std::optional<double> nth;
  std::optional<double> zeta_db;
  std::optional<int> copies;
  std::optional<int> mcopies;
  std::optional<std::string> plan;
};

void add_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "TOML experiment file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--kmax", o.kmax, "largest phonon number k");
  cmd->add_option("--n0", o.n0, "initial mechanical occupation");
  cmd->add_option("--nth", o.nth, "bath occupation");
  cmd->add_option("--zeta-db", o.zeta_db, "readout loss in -10 log10(zeta) dB");
  cmd->add_option("--copies", o.copies, "bunched copies N");
  cmd->add_option("--mcopies", o.mcopies, "probe copies M for the Cramer-Rao bound");
  cmd->add_option("--plan", o.plan, "blue_apd | blue_hbt | blue_apd_x2 | red_apd");
}

optoqng::ExperimentConfig resolve(const std::string& experiment, const Overrides& o) {
  using namespace optoqng;
  ConfigDocument doc;
  if (!o.config.empty()) doc = parse_config_file(o.config);
  auto cfg = make_config(doc);
  if (!cfg.experiment.empty() && cfg.experiment != experiment)
    throw ConfigError("config file is for experiment '" + cfg.experiment + "', not '" + experiment + "'");
  cfg.experiment = experiment;
  if (o.out) cfg.out = *o.out;
  if (o.kmax) cfg.k_max = *o.kmax;
  if (o.n0) cfg.params.n0 = *o.n0;
  if (o.nth) cfg.params.n_th = *o.nth;
  if (o.zeta_db) cfg.zeta_db = *o.zeta_db;
  if (o.copies) cfg.copies = *o.copies;
  if (o.mcopies) cfg.mcopies = *o.mcopies;
  if (o.plan) cfg.plan = *o.plan;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded phonon addition and subtraction: simulation, QNG certification, sensing", "optoqng"};
  app.set_version_flag("--version", std::string("optoqng ") + optoqng::tool_version);
  Overrides o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"thresholds", "absolute k-phonon QNG thresholds and the Gaussian p0-p1 edge"},
      {"herald", "run a heralding plan; Fock bars, Wigner cut, depths"},
      {"readout", "readout transmittance versus red-pulse duration"},
      {"bunching", "Wigner cut after bunching N heralded copies"},
      {"sensing", "Fisher information and Cramer-Rao errors for displacement sensing"},
      {"depth", "QNG depth and initial-occupation boundary of a heralded state"}};
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), o);
  app.require_subcommand(0, 1);

  if (argc <= 1) {
    std::cerr << app.help();
    return optoqng::exit_config;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? optoqng::exit_ok : optoqng::exit_config;
  }
  const auto chosen = app.get_subcommands();
  if (chosen.empty()) {
    std::cerr << app.help();
    return optoqng::exit_config;
  }
  optoqng::ExperimentConfig cfg;
  try {
    cfg = resolve(chosen.front()->get_name(), o);
  } catch (const optoqng::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return optoqng::exit_config;
  }
  const int code = optoqng::run(cfg, std::cerr);
  if (code == optoqng::exit_ok) std::cout << "wrote " << cfg.out.string() << '\n';
  return code;
}
