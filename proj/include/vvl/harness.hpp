#pragma once
// Sweep configuration, orchestration over the epsilon ladder, rate
// fitting and report persistence.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "vvl/euler_reference.hpp"
#include "vvl/functionals.hpp"
#include "vvl/grid.hpp"
#include "vvl/ns_solver.hpp"
#include "vvl/young_measure.hpp"

namespace vvl {

struct InitialDataSpec {
  std::string kind = "vortex";  // vortex, uniform, rest, acoustic, compression, random_smooth
  double amplitude = 2.0;       // vortex: peak-ish swirl scale U0; acoustic/compression/random: relative size
  std::array<double, 3> velocity{0.0, 0.0, 0.0};  // uniform
  std::array<double, 3> center{0.5, 0.5, 0.5};    // vortex
  double radius = 0.4;                            // vortex support radius
  int wavenumber = 1;                             // acoustic / compression: periods across the box
  int modes = 3;                                  // random_smooth: modes per axis
};

struct ReferenceSpec {
  StrongKind kind = StrongKind::fine_grid_reference;
  int refine = 4;
  ReferenceThresholds thresholds;
};

struct SweepConfig {
  DomainSpec domain;
  PhysParams physics;  // epsilon is taken from the ladder
  SchemeConfig scheme;
  std::vector<double> epsilon_ladder{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  double t_end = 0.5;
  double snapshot_every = 0.05;
  InitialDataSpec initial;
  ReferenceSpec reference;
  std::filesystem::path output_dir = "vvl_out";
  std::uint64_t seed = 0;
  int workers = 1;
  double gronwall_kappa = 4.0;
  std::string write_snapshots = "all";  // all, final, none
  std::vector<std::string> warnings;

  // Throws ConfigError naming the violated invariant; fills `warnings`.
  void validate();
};

// Parses INI text. `source` names the input in error messages. Overrides
// are "section.key=value" strings applied before validation.
SweepConfig parse_config(const std::string& text, const std::string& source = "<config>",
                         const std::vector<std::string>& overrides = {});
SweepConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

// Every key with its effective value (defaults included).
nlohmann::json config_to_json(const SweepConfig& cfg);
// Same content as INI text; parse_config(config_to_ini(c)) reproduces c.
std::string config_to_ini(const SweepConfig& cfg);

Grid study_grid(const SweepConfig& cfg);
// Point values of the configured initial data at the cell centres of `grid`.
ConservedState build_initial_state(const SweepConfig& cfg, const Grid& grid);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t used = 0;
  std::vector<double> excluded;  // epsilons dropped for E <= 0
};

// Least squares of log E against log eps. Needs >= 2 pairs with E > 0.
RateFit fit_rate(const std::vector<std::pair<double, double>>& eps_energy);

struct LevelResult {
  double epsilon = 0.0;
  FunctionalSeries series;  // relative_energy filled against the reference
  bool failed = false;
  std::string failure;
  std::size_t steps = 0;
  std::size_t viscous_kernel_calls = 0;
  double initial_energy = 0.0;
  double rel_energy_T = 0.0;
  double max_budget_residual = 0.0;  // max over snapshots of E + integrals - E(0)
  double min_dissipation_density = 0.0;
  double mass_drift = 0.0;           // max |M(t) - M(0)| / max(|M(0)|, total mass)
  double posthoc_viscous = 0.0;      // post-hoc quadrature of the viscous integral at T
  double consistency = 0.0;          // 1/2 eps int int S(grad U):grad U of the reference
  GronwallCertificate gronwall;
};

struct WeakStrongSummary {
  std::size_t upper_levels = 0, lower_levels = 0;
  double variance_upper = 0.0, variance_lower = 0.0;  // max over tau of the cell-mean atom variance
  double max_D_upper = 0.0, max_D_lower = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<LevelResult> levels;
  double t_compare = 0.0;  // last comparison instant (<= lifespan)
  double lifespan = 0.0;
  bool reference_blew_up = false;
  std::string reference_stop;
  double reference_grad_u = 0.0;
  double reference_grad_enthalpy = 0.0;
  double reference_max_growth = 1.0;
  RateFit rate;
  bool rate_ok = false;
  DefectEstimate defects;
  DominationResult domination;
  WeakStrongSummary weak_strong;
  std::map<std::string, bool> checks;
  double wall_clock_seconds = 0.0;  // metadata only, not part of the numeric payload

  // Trajectories kept for persistence (not read back by read_report).
  std::vector<std::vector<ConservedState>> coarse_snapshots;  // [level][snapshot]
  std::vector<ConservedState> reference_snapshots;            // restricted to the study grid

  bool all_checks_pass() const;
};

struct SweepOptions {
  bool keep_snapshots = true;
};

SweepResult run_sweep(const SweepConfig& cfg, const SweepOptions& options = {});

// The deterministic numeric content (everything but wall-clock metadata).
nlohmann::json numeric_payload(const SweepResult& result);

// summary.json, series_<i>.csv, defects.json, table.txt and VLFS1 snapshots
// under `dir`.
void emit_report(const SweepResult& result, const std::filesystem::path& dir);
SweepResult read_report(const std::filesystem::path& dir);

std::string format_table(const SweepResult& result);

// Exit code convention of the CLI: 0 all checks pass, 2 an invariant failed.
int exit_code(const SweepResult& result);

// Defects recomputed from the snapshots a sweep wrote (write_snapshots = all).
DefectEstimate defects_from_report(const std::filesystem::path& dir, DominationResult* domination = nullptr);

nlohmann::json defects_to_json(const DefectEstimate& d, const DominationResult& dom);

}  // namespace vvl
