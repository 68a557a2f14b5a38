#include "chaowork/scenarios.hpp"

#include <cmath>
#include <cstdio>

#include "chaowork/analysis.hpp"
#include "chaowork/classical.hpp"
#include "chaowork/io.hpp"
#include "chaowork/quantum.hpp"
#include "chaowork/rng.hpp"
#include "chaowork/sampler.hpp"
#include "chaowork/spectra.hpp"

namespace chaowork {

namespace {

using nlohmann::json;

constexpr std::uint64_t kPilotTag = 0x70696c6f74ULL;  // "pilot"
constexpr std::uint64_t kShellTag = 0x7368656c6cULL;  // "shell"

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.out) / name;
}

EstimatorOptions estimator_options(const RunConfig& cfg) {
  EstimatorOptions o;
  o.workers = cfg.workers;
  o.batches = cfg.batches;
  o.propagation = cfg.propagation;
  return o;
}

json grid_json(const FourierGrid& g, double broadening) {
  return {{"n", g.n},       {"du", g.du},         {"u_max", g.u_max()},
          {"dw", g.dw()},   {"w_origin", g.w_origin}, {"broadening", broadening}};
}

CharacteristicGrid semiclassical_grid(const RunConfig& cfg, const FourierGrid& grid, double beta,
                                      double hbar) {
  const EstimatorOptions opts = estimator_options(cfg);
  if (!cfg.shell_estimator) {
    const ThermalEnsemble ens =
        sample_ensemble(cfg.geometry, beta, cfg.n_semiclassical, cfg.seed, cfg.workers);
    return estimate_gsc(ens, grid, hbar, cfg.geometry, cfg.potential, opts);
  }
  // Evenly spaced shells over the Boltzmann support up to beta E = 12.
  std::vector<double> energies(cfg.shell_count);
  for (std::size_t m = 0; m < energies.size(); ++m)
    energies[m] = (static_cast<double>(m) + 0.5) / static_cast<double>(energies.size()) * 12.0 / beta;
  return estimate_gsc_shell(beta, grid, hbar, cfg.geometry, cfg.potential, energies,
                            cfg.samples_per_shell, derive_seed(cfg.seed, kShellTag), opts);
}

WorkHistogram classical_histogram(const RunConfig& cfg, const FourierGrid& grid, double beta,
                                  double eps, ClassicalWorkSample* keep = nullptr) {
  ClassicalWorkSample sample =
      sample_classical_work(cfg.geometry, cfg.potential, beta, cfg.n_classical, cfg.seed, cfg.workers);
  const CharacteristicGrid g = classical_characteristic(sample, grid, cfg.batches, cfg.workers);
  WorkHistogram h = invert(g, eps);
  if (keep) *keep = std::move(sample);
  return h;
}

std::string tag(double beta, double hbar) {
  return "beta" + param_label(beta) + "_hbar" + param_label(hbar);
}

// A histogram summary that fits in a report.
json histogram_json(const WorkHistogram& h) {
  return {{"total_mass", h.total_mass}, {"mean", h.mean()}, {"imag_residue", h.imag_residue},
          {"nonnegative_within_noise", h.nonnegative_within_noise()}};
}

}  // namespace

FourierGrid plan_grid(const RunConfig& cfg) {
  // W = (xi_f - xi_0) V(q0) does not depend on beta; any beta gives the same sample.
  const ClassicalWorkSample pilot = sample_classical_work(
      cfg.geometry, cfg.potential, 1.0, cfg.pilot_samples, derive_seed(cfg.seed, kPilotTag), cfg.workers);
  return plan_fourier_grid(pilot.values, cfg.grid_points, cfg.grid_padding);
}

double resolved_broadening(const RunConfig& cfg, const FourierGrid& grid) {
  return cfg.broadening < 0.0 ? default_broadening(grid) : cfg.broadening;
}

std::string param_label(double v) {
  int e = 0;
  const double m = std::frexp(v, &e);
  if (m == 0.5) return "2^" + std::to_string(e - 1);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json run_semiclassical(const RunConfig& cfg, bool dump_ensemble) {
  const std::string manifest = manifest_hash(cfg);
  const FourierGrid grid = plan_grid(cfg);
  const double eps = resolved_broadening(cfg, grid);
  json runs = json::array();
  for (double beta : cfg.betas) {
    if (dump_ensemble) {
      const ThermalEnsemble ens =
          sample_ensemble(cfg.geometry, beta, cfg.n_semiclassical, cfg.seed, cfg.workers);
      write_ensemble_csv(out_path(cfg, "ensemble_beta" + param_label(beta) + ".csv"), ens, manifest);
    }
    for (double hbar : cfg.hbars) {
      const CharacteristicGrid g = semiclassical_grid(cfg, grid, beta, hbar);
      const WorkHistogram h = invert(g, eps);
      const std::string t = tag(beta, hbar);
      write_characteristic_csv(out_path(cfg, "gsc_" + t + ".csv"), g, manifest);
      write_histogram_csv(out_path(cfg, "psc_" + t + ".csv"), h, manifest);
      json r = histogram_json(h);
      r["beta"] = beta;
      r["hbar"] = hbar;
      r["n_samples"] = g.n_samples;
      r["n_failed"] = g.n_failed;
      r["files"] = {"gsc_" + t + ".csv", "psc_" + t + ".csv"};
      runs.push_back(r);
    }
  }
  return {{"grid", grid_json(grid, eps)}, {"runs", runs}};
}

json run_classical(const RunConfig& cfg) {
  const std::string manifest = manifest_hash(cfg);
  const FourierGrid grid = plan_grid(cfg);
  const double eps = resolved_broadening(cfg, grid);
  json runs = json::array();
  CsvTable table;
  table.manifest = manifest;
  table.columns = {"beta", "delta_f_quadrature", "partition_ratio"};
  for (double beta : cfg.betas) {
    const WorkHistogram h = classical_histogram(cfg, grid, beta, eps);
    const std::string name = "pc_beta" + param_label(beta) + ".csv";
    write_histogram_csv(out_path(cfg, name), h, manifest);
    const double ratio = partition_ratio(cfg.geometry, cfg.potential, beta);
    table.rows.push_back({beta, -std::log(ratio) / beta, ratio});
    json r = histogram_json(h);
    r["beta"] = beta;
    r["delta_f_quadrature"] = -std::log(ratio) / beta;
    r["files"] = {name};
    runs.push_back(r);
  }
  write_csv(out_path(cfg, "classical_free_energy.csv"), table);
  const WorkSupport support = work_support(cfg.geometry, cfg.potential);
  return {{"grid", grid_json(grid, eps)},
          {"work_support", {support.min, support.max}},
          {"runs", runs},
          {"files", {"classical_free_energy.csv"}}};
}

json run_quantum(const RunConfig& cfg) {
  const std::string manifest = manifest_hash(cfg);
  const FourierGrid grid = plan_grid(cfg);
  const double eps = resolved_broadening(cfg, grid);
  double beta_min = cfg.betas.front();
  for (double b : cfg.betas) beta_min = std::min(beta_min, b);
  const WorkSupport support = work_support(cfg.geometry, cfg.potential);

  QuantumPlanOptions popts;
  popts.min_basis = cfg.quantum_min_basis;
  popts.max_basis = cfg.quantum_max_basis;
  const QuantumPlan plan = plan_quantum(cfg.geometry, cfg.quantum_hbar, beta_min, support.max, popts);
  const double h = cfg.quantum_h > 0.0 ? cfg.quantum_h : plan.h;
  if (plan.capped)
    warn_once("quantum-basis-capped", "quantum basis capped at quantum_max_basis; the hottest "
                                      "temperatures will report TruncationDominates");

  const QuenchHamiltonians ham = build_hamiltonians(cfg.geometry, cfg.potential, cfg.quantum_hbar, h);
  EigensolveOptions eopts;
  eopts.seed = cfg.seed;
  const std::size_t n_basis = std::min(plan.n_basis, ham.grid.size());
  const QuenchSpectra spectra = solve_quench(ham, std::min(plan.n_states, n_basis), n_basis, eopts);
  save_spectra(spectra, out_path(cfg, "spectra.bin"));
  write_levels_csv(out_path(cfg, "levels.csv"), spectra, manifest);

  json runs = json::array();
  for (double beta : cfg.betas) {
    json r;
    r["beta"] = beta;
    r["top_decile_weight"] = top_decile_weight(spectra, beta);
    r["truncation_loss"] = truncation_loss(spectra, beta);
    try {
      check_truncation(spectra, beta);
      r["truncation"] = "ok";
    } catch (const Error& e) {
      r["truncation"] = error_json(e);
    }
    const WorkHistogram hq = quantum_work_distribution(spectra, beta, grid, eps);
    const CharacteristicGrid gq = quantum_characteristic(spectra, beta, grid);
    const std::string t = "beta" + param_label(beta) + "_hbar" + param_label(cfg.quantum_hbar);
    write_histogram_csv(out_path(cfg, "pq_" + t + ".csv"), hq, manifest);
    write_characteristic_csv(out_path(cfg, "gq_" + t + ".csv"), gq, manifest);
    const JarzynskiIdentity jz = quantum_jarzynski(spectra, beta);
    r["jarzynski_lhs"] = jz.lhs;
    r["jarzynski_rhs"] = jz.rhs;
    r["delta_f_quantum"] = -std::log(jz.rhs) / beta;
    r["histogram"] = histogram_json(hq);
    r["files"] = {"pq_" + t + ".csv", "gq_" + t + ".csv"};
    runs.push_back(r);
  }
  return {{"grid", grid_json(grid, eps)},
          {"plan",
           {{"n_states", spectra.n_states},
            {"n_basis", spectra.n_basis},
            {"n_sites", spectra.n_sites},
            {"h", h},
            {"keep_energy", plan.keep_energy},
            {"basis_energy", plan.basis_energy},
            {"capped", plan.capped}}},
          {"runs", runs},
          {"files", {"spectra.bin", "levels.csv"}}};
}

json run_jarzynski(const RunConfig& cfg) {
  const std::string manifest = manifest_hash(cfg);
  const FourierGrid grid = plan_grid(cfg);
  const double eps = resolved_broadening(cfg, grid);
  const double hbar = cfg.hbars.front();
  CsvTable table;
  table.manifest = manifest;
  table.meta = {{"hbar", format_double(hbar)}};
  table.columns = {"beta",       "inv_beta",           "delta_f_quadrature",     "delta_f_classical",
                   "classical_stderr", "delta_f_semiclassical", "semiclassical_stderr"};
  json reports = json::array();
  for (double beta : cfg.betas) {
    const double reference = classical_free_energy_difference(cfg.geometry, cfg.potential, beta);
    const ClassicalWorkSample sample =
        sample_classical_work(cfg.geometry, cfg.potential, beta, cfg.n_classical, cfg.seed, cfg.workers);
    const Estimate classical = jarzynski_from_samples(sample.values, beta);
    const CharacteristicGrid g = semiclassical_grid(cfg, grid, beta, hbar);
    const Estimate semi = jarzynski_from_characteristic(g, beta, eps);
    table.rows.push_back({beta, 1.0 / beta, reference, classical.value, classical.stderr, semi.value,
                          semi.stderr});
    for (const auto& [method, est] :
         {std::pair{JarzynskiMethod::classical_mc, classical},
          std::pair{JarzynskiMethod::semiclassical, semi}}) {
      reports.push_back({{"beta", beta},
                         {"method", to_string(method)},
                         {"delta_f_estimate", est.value},
                         {"delta_f_reference", reference},
                         {"stderr", est.stderr}});
    }
  }
  write_csv(out_path(cfg, "jarzynski.csv"), table);
  return {{"grid", grid_json(grid, eps)}, {"hbar", hbar}, {"reports", reports}, {"files", {"jarzynski.csv"}}};
}

json run_compare(const std::filesystem::path& a, const std::filesystem::path& b) {
  const WorkHistogram ha = read_histogram_csv(a);
  const WorkHistogram hb = read_histogram_csv(b);
  return {{"a", a.string()},
          {"b", b.string()},
          {"manifest_a", read_csv(a).manifest},
          {"manifest_b", read_csv(b).manifest},
          {"l1_distance", l1_distance(ha, hb)},
          {"mean_a", ha.mean()},
          {"mean_b", hb.mean()}};
}

namespace {

json scenario_fig4(const RunConfig& cfg) {
  const std::string manifest = manifest_hash(cfg);
  const FourierGrid grid = plan_grid(cfg);
  const double eps = resolved_broadening(cfg, grid);
  const double beta = cfg.betas.front();
  const WorkHistogram pc = classical_histogram(cfg, grid, beta, eps);
  const std::string pc_name = "pc_beta" + param_label(beta) + ".csv";
  write_histogram_csv(out_path(cfg, pc_name), pc, manifest);
  json rows = json::array();
  json files = {pc_name};
  for (double hbar : cfg.hbars) {
    const CharacteristicGrid g = semiclassical_grid(cfg, grid, beta, hbar);
    const WorkHistogram psc = invert(g, eps);
    const std::string t = tag(beta, hbar);
    write_characteristic_csv(out_path(cfg, "gsc_" + t + ".csv"), g, manifest);
    write_histogram_csv(out_path(cfg, "psc_" + t + ".csv"), psc, manifest);
    files.push_back("gsc_" + t + ".csv");
    files.push_back("psc_" + t + ".csv");
    const Estimate d = l1_distance_with_error(psc, pc);
    rows.push_back({{"hbar", hbar}, {"l1_distance", d.value}, {"stderr", d.stderr}});
  }
  const json report = {{"beta", beta}, {"grid", grid_json(grid, eps)}, {"distances", rows}};
  write_json(out_path(cfg, "compare_fig4.json"), report);
  files.push_back("compare_fig4.json");
  json out = report;
  out["files"] = files;
  return out;
}

json scenario_fig2(const RunConfig& cfg) {
  const std::string manifest = manifest_hash(cfg);
  const FourierGrid grid = plan_grid(cfg);
  const double eps = resolved_broadening(cfg, grid);
  const double hbar = cfg.hbars.front();
  RunConfig qcfg = cfg;
  qcfg.quantum_hbar = hbar;
  const json quantum = run_quantum(qcfg);
  const QuenchSpectra spectra = load_spectra(out_path(cfg, "spectra.bin"));
  json rows = json::array();
  json warnings = json::array();
  for (double beta : cfg.betas) {
    const CharacteristicGrid g = semiclassical_grid(cfg, grid, beta, hbar);
    const WorkHistogram psc = invert(g, eps);
    const std::string t = tag(beta, hbar);
    write_characteristic_csv(out_path(cfg, "gsc_" + t + ".csv"), g, manifest);
    write_histogram_csv(out_path(cfg, "psc_" + t + ".csv"), psc, manifest);
    const WorkHistogram pq = quantum_work_distribution(spectra, beta, grid, eps);
    json row = {{"beta", beta}, {"l1_distance", l1_distance(pq, psc)},
                {"top_decile_weight", top_decile_weight(spectra, beta)}};
    try {
      check_truncation(spectra, beta);
    } catch (const Error& e) {
      row["warning"] = error_json(e);
      warnings.push_back(
          {{"beta", beta},
           {"error", std::string(to_string(e.kind()))},
           {"message", e.what()},
           {"caveat",
            "The quantum reference keeps a finite block of low-lying states. At high temperature "
            "the Boltzmann weight spreads over far more states than the block holds, so the "
            "quantum curve is only meaningful at the coldest temperatures, where a handful of "
            "levels carry the weight."}});
    }
    rows.push_back(row);
  }
  const json report = {{"hbar", hbar}, {"grid", grid_json(grid, eps)}, {"distances", rows},
                       {"warnings", warnings}, {"quantum", quantum}};
  write_json(out_path(cfg, "compare_fig2.json"), report);
  return report;
}

}  // namespace

json run_scenario(const RunConfig& cfg) {
  if (cfg.scenario == "fig2") return scenario_fig2(cfg);
  if (cfg.scenario == "fig3") return run_jarzynski(cfg);
  if (cfg.scenario == "fig4") return scenario_fig4(cfg);
  throw Error(ErrorKind::RangeError, "scenario must be one of fig2, fig3, fig4");
}

void write_manifest(const RunConfig& cfg, const std::string& command, const json& report) {
  json seeds = {{"seed", cfg.seed},
                {"pilot", derive_seed(cfg.seed, kPilotTag)},
                {"shell", derive_seed(cfg.seed, kShellTag)}};
  const json manifest = {{"version", kVersion},
                         {"command", command},
                         {"manifest_hash", manifest_hash(cfg)},
                         {"config", canonical_text(cfg)},
                         {"seeds", seeds},
                         {"compiler", __VERSION__},
                         {"report", report}};
  write_json(out_path(cfg, "manifest.json"), manifest);
}

}  // namespace chaowork
