// Command-line front end: one subcommand per pipeline plus the figure scenarios.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "chaowork/config.hpp"
#include "chaowork/errors.hpp"
#include "chaowork/io.hpp"
#include "chaowork/scenarios.hpp"

namespace {

using namespace chaowork;

struct Options {
  std::string config_path;
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

RunConfig load(const Options& o, const std::string& scenario) {
  std::string text;
  if (!o.config_path.empty()) {
    std::ifstream is(o.config_path);
    if (!is) throw Error(ErrorKind::IoError, "cannot read config " + o.config_path);
    std::stringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }
  RunConfig cfg = parse_config(text);
  apply_environment(cfg);
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "--set expects key=value, got '" + s + "'");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1), "--set");
  }
  if (o.seed) apply_setting(cfg, "seed", std::to_string(*o.seed), "--seed");
  if (o.workers) apply_setting(cfg, "workers", std::to_string(*o.workers), "--workers");
  if (o.out) apply_setting(cfg, "out", *o.out, "--out");
  if (!scenario.empty()) apply_setting(cfg, "scenario", scenario, "command line");
  apply_scenario_defaults(cfg);
  validate(cfg);
  return cfg;
}

int fail(const nlohmann::json& body, int code) {
  std::cout << body.dump(2) << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Work statistics of a quenched chaotic billiard"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "key = value configuration file");
  app.add_option("--set", o.settings, "override one key (key=value), repeatable")
      ->allow_extra_args(false);
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--workers", o.workers, "worker threads (0 = all)");
  app.add_option("--out", o.out, "output directory");

  auto* semi = app.add_subcommand("semiclassical", "semiclassical G(u) and P(W) per beta and hbar");
  bool dump_ensemble = false;
  semi->add_flag("--dump-ensemble", dump_ensemble, "also write the sampled phase points");
  auto* classical = app.add_subcommand("classical", "classical P(W) and the quadrature free energy");
  auto* quantum = app.add_subcommand("quantum", "finite-difference quantum reference");
  auto* jarz = app.add_subcommand("jarzynski", "free-energy estimates across betas");
  auto* compare = app.add_subcommand("compare", "L1 distance between two histogram CSVs");
  std::string file_a, file_b;
  compare->add_option("a", file_a, "first histogram CSV")->required();
  compare->add_option("b", file_b, "second histogram CSV")->required();
  auto* scenario = app.add_subcommand("scenario", "figure experiments");
  std::string scenario_name;
  scenario->add_option("name", scenario_name, "fig2, fig3 or fig4")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (compare->parsed()) {
      const auto report = run_compare(file_a, file_b);
      std::cout << report.dump(2) << std::endl;
      return 0;
    }
    const RunConfig cfg = load(o, scenario->parsed() ? scenario_name : "");
    nlohmann::json report;
    std::string command;
    if (semi->parsed()) {
      command = "semiclassical";
      report = run_semiclassical(cfg, dump_ensemble);
    } else if (classical->parsed()) {
      command = "classical";
      report = run_classical(cfg);
    } else if (quantum->parsed()) {
      command = "quantum";
      report = run_quantum(cfg);
    } else if (jarz->parsed()) {
      command = "jarzynski";
      report = run_jarzynski(cfg);
    } else {
      command = "scenario " + scenario_name;
      report = run_scenario(cfg);
    }
    write_manifest(cfg, command, report);
    std::cout << report.dump(2) << std::endl;
    return 0;
  } catch (const Error& e) {
    const int code = (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::RangeError) ? 2 : 1;
    return fail(error_json(e), code);
  } catch (const std::exception& e) {
    return fail({{"error", "Internal"}, {"message", e.what()}}, 1);
  }
}
