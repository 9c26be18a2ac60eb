// vvlab: command line face of the vanishing-viscosity harness.
//
// exit codes: 0 all checks pass, 2 an energy / measure-valued invariant
// failed, 1 operational error (bad config, IO, ...).

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "vvl/errors.hpp"
#include "vvl/harness.hpp"
#include "vvl/snapshot_io.hpp"

namespace {

using nlohmann::json;
using namespace vvl;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common(CLI::App* app, Common& c, bool need_out = true) {
  app->add_option("--config", c.config, "INI configuration file")->required()->check(CLI::ExistingFile);
  app->add_option("--set", c.overrides, "override a config key, section.key=value (repeatable)");
  if (need_out) app->add_option("--out", c.out, "output directory (default: [sweep] output_dir)");
}

std::filesystem::path out_dir(const Common& c, const SweepConfig& cfg) {
  return c.out.empty() ? cfg.output_dir : std::filesystem::path(c.out);
}

void print_warnings(const SweepConfig& cfg) {
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
}

json finite(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

void write_json(const std::filesystem::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write '" + p.string() + "'");
  os << j.dump(2) << "\n";
}

// initial data exactly as the sweep builds them
ConservedState sweep_initial(const SweepConfig& cfg) {
  const Grid coarse = study_grid(cfg);
  if (cfg.reference.kind == StrongKind::fine_grid_reference)
    return restrict_to(build_initial_state(cfg, refine(coarse, cfg.reference.refine)), coarse);
  return build_initial_state(cfg, coarse);
}

int cmd_run(const Common& c, double eps, const std::string& backend) {
  SweepConfig cfg = load_config(c.config, c.overrides);
  print_warnings(cfg);
  PhysParams p = cfg.physics;
  p.epsilon = eps;
  const ConservedState init = sweep_initial(cfg);
  RunOptions opts;
  opts.backend = backend == "serial" ? Backend::serial : Backend::parallel;
  const Trajectory tr = run(init, p, cfg.scheme, cfg.t_end, cfg.snapshot_every, opts);
  const auto dir = out_dir(c, cfg);
  std::filesystem::create_directories(dir);
  write_series_csv(dir / "series.csv", tr.series);
  write_snapshot(dir / "final.vlfs", tr.snapshots.back(), p.eos, p.a);
  double maxres = -INFINITY;
  for (double r : energy_budget_residual(tr, p)) maxres = std::max(maxres, r);
  const double E0 = tr.series.energy.front();
  const bool energy_ok = maxres <= 1e-10 * std::abs(E0);
  const bool diss_ok = tr.min_dissipation_density >= 0.0;
  json j = {{"epsilon", eps},
            {"steps", tr.steps},
            {"failed", tr.failed},
            {"failure", tr.failure},
            {"final_time", tr.snapshots.back().time},
            {"initial_energy", E0},
            {"final_energy", tr.series.energy.back()},
            {"max_budget_residual", finite(maxres)},
            {"min_dissipation_density", tr.min_dissipation_density},
            {"viscous_kernel_calls", tr.viscous_kernel_calls},
            {"checks", {{"energy_inequality", energy_ok}, {"dissipation_nonnegative", diss_ok}}},
            {"config", config_to_json(cfg)}};
  write_json(dir / "summary.json", j);
  std::cout << "eps " << format_double(eps) << ": " << tr.steps << " steps to t = " << tr.snapshots.back().time
            << ", E " << E0 << " -> " << tr.series.energy.back() << ", budget residual " << maxres << "\n";
  if (tr.failed) std::cout << "failed: " << tr.failure << "\n";
  return (tr.failed || !energy_ok || !diss_ok) ? 2 : 0;
}

int cmd_sweep(const Common& c, const std::string& ladder, const std::string& seed, const std::string& workers) {
  std::vector<std::string> ov = c.overrides;
  if (!ladder.empty()) ov.push_back("sweep.epsilon_ladder=" + ladder);
  if (!seed.empty()) ov.push_back("sweep.seed=" + seed);
  if (!workers.empty()) ov.push_back("sweep.workers=" + workers);
  const SweepConfig cfg = load_config(c.config, ov);
  print_warnings(cfg);
  const SweepResult r = run_sweep(cfg);
  const auto dir = out_dir(c, cfg);
  emit_report(r, dir);
  std::cout << format_table(r) << "report written to " << dir.string() << "\n";
  return exit_code(r);
}

int cmd_reference(const Common& c) {
  const SweepConfig cfg = load_config(c.config, c.overrides);
  print_warnings(cfg);
  if (cfg.reference.kind != StrongKind::fine_grid_reference)
    throw ConfigError("reference subcommand needs reference.kind = fine_grid_reference");
  const Grid fine = refine(study_grid(cfg), cfg.reference.refine);
  const StrongSolution ref = run_reference(build_initial_state(cfg, fine), cfg.physics.eos, cfg.physics.a, cfg.scheme,
                                           cfg.t_end, cfg.snapshot_every, cfg.reference.thresholds);
  const auto dir = out_dir(c, cfg);
  std::filesystem::create_directories(dir / "snapshots");
  for (std::size_t n = 0; n < ref.reference.snapshots.size(); ++n)
    write_snapshot(dir / "snapshots" / ("reference_snap_" + std::to_string(n) + ".vlfs"), ref.reference.snapshots[n],
                   cfg.physics.eos, cfg.physics.a);
  json j = {{"t_end", cfg.t_end},
            {"lifespan", ref.lifespan},
            {"blew_up", ref.blew_up},
            {"stop_reason", ref.stop_reason},
            {"max_growth", ref.max_growth},
            {"refinement", ref.refinement},
            {"steps", ref.reference.steps},
            {"times", ref.gradients.times},
            {"grad_u", ref.gradients.grad_u},
            {"grad_enthalpy", ref.gradients.grad_enthalpy},
            {"thresholds",
             {{"blowup", cfg.reference.thresholds.blowup},
              {"vacuum", cfg.reference.thresholds.vacuum_fraction},
              {"resolution", cfg.reference.thresholds.resolution}}}};
  write_json(dir / "reference.json", j);
  std::cout << "lifespan " << ref.lifespan << (ref.blew_up ? " (" + ref.stop_reason + ")" : "") << ", max growth "
            << ref.max_growth << ", sup|grad u| " << ref.gradients.sup_grad_u() << "\n";
  return 0;
}

int cmd_defects(const std::string& report, const std::string& out) {
  DominationResult dom;
  const DefectEstimate d = defects_from_report(report, &dom);
  const std::filesystem::path target = out.empty() ? std::filesystem::path(report) / "defects.json" : std::filesystem::path(out);
  write_json(target, defects_to_json(d, dom));
  std::cout << "levels " << d.levels << ", fitted C " << dom.fitted_C << ", max D " << d.max_D() << ", clamp "
            << d.clamp_magnitude << "\n";
  return dom.pass ? 0 : 2;
}

int cmd_report(const std::string& report) {
  const SweepResult r = read_report(report);
  std::cout << format_table(r);
  return exit_code(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vanishing-viscosity limit laboratory"};
  app.require_subcommand(1);

  Common run_c, sweep_c, ref_c;
  double eps = 0.01;
  std::string backend = "parallel";
  auto* run_cmd = app.add_subcommand("run", "single epsilon run");
  add_common(run_cmd, run_c);
  run_cmd->add_option("--epsilon", eps, "viscosity scale")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--backend", backend, "kernel backend")->check(CLI::IsMember({"serial", "parallel"}));

  std::string ladder, seed, workers;
  auto* sweep_cmd = app.add_subcommand("sweep", "full ladder, reference, defects and report");
  add_common(sweep_cmd, sweep_c);
  sweep_cmd->add_option("--epsilon-ladder", ladder, "comma separated, strictly decreasing");
  sweep_cmd->add_option("--seed", seed, "seed for random initial data");
  sweep_cmd->add_option("--workers", workers, "levels run concurrently");

  auto* ref_cmd = app.add_subcommand("reference", "inviscid fine-grid reference and its lifespan");
  add_common(ref_cmd, ref_c);

  std::string report_dir, defects_out;
  auto* def_cmd = app.add_subcommand("defects", "recompute defect measures from a sweep report");
  def_cmd->add_option("--report", report_dir, "report directory")->required()->check(CLI::ExistingDirectory);
  def_cmd->add_option("--out", defects_out, "output JSON (default: <report>/defects.json)");

  auto* rep_cmd = app.add_subcommand("report", "print the table of a sweep report");
  rep_cmd->add_option("--report", report_dir, "report directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return cmd_run(run_c, eps, backend);
    if (*sweep_cmd) return cmd_sweep(sweep_c, ladder, seed, workers);
    if (*ref_cmd) return cmd_reference(ref_c);
    if (*def_cmd) return cmd_defects(report_dir, defects_out);
    if (*rep_cmd) return cmd_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
