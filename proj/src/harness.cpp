#include "vvl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <omp.h>

#include "vvl/errors.hpp"
#include "vvl/snapshot_io.hpp"
#include "vvl/summation.hpp"

namespace vvl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// deterministic uniform double in [0, 1) from the top 53 bits
double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

double total_mass(const ConservedState& s) { return s.grid.cell_volume() * pairwise_sum(s.rho); }

}  // namespace

Grid study_grid(const SweepConfig& cfg) { return make_grid(cfg.domain); }

ConservedState build_initial_state(const SweepConfig& cfg, const Grid& g) {
  const EosParams& eos = cfg.physics.eos;
  const InitialDataSpec& in = cfg.initial;
  const int dim = g.dim;
  const double rb = eos.rho_bar;
  ConservedState s(g, rb);
  const double c_bar = rb > 0.0 ? sound_speed(rb, eos) : 1.0;
  auto phase = [&](const std::array<double, 3>& x, int d) {
    return 2.0 * std::numbers::pi * in.wavenumber * (x[d] - g.origin[d]) / g.extent[d];
  };

  if (in.kind == "rest") return s;
  if (in.kind == "uniform") {
    for (std::size_t c = 0; c < s.size(); ++c)
      for (int d = 0; d < dim; ++d) s.mom[d][c] = rb * in.velocity[d];
    return s;
  }
  if (in.kind == "vortex") {
    // compactly supported swirl in hydrostatic balance with the enthalpy deficit
    const double U0 = in.amplitude, R0 = in.radius;
    const double g1 = eos.gamma - 1.0;
    const double h_bar = eos.gamma * eos.A / g1 * std::pow(rb, g1);
    for (std::size_t c = 0; c < s.size(); ++c) {
      const auto x = g.center(c);
      const double dx = x[0] - in.center[0], dy = x[1] - in.center[1];
      const double r = std::hypot(dx, dy), q = r / R0;
      if (q >= 1.0 || r == 0.0) continue;
      const double w = 1.0 - q * q;
      const double ut = U0 * q * std::pow(w, 3);
      const double h = h_bar - U0 * U0 * std::pow(w, 7) / 14.0;
      if (!(h > 0.0)) throw ConfigError("vortex amplitude empties the core (enthalpy <= 0)");
      const double rho = std::pow(g1 * h / (eos.gamma * eos.A), 1.0 / g1);
      s.rho[c] = rho;
      s.mom[0][c] = -rho * ut * dy / r;
      s.mom[1][c] = rho * ut * dx / r;
    }
    return s;
  }
  if (in.kind == "acoustic") {
    // right-running simple wave to first order
    for (std::size_t c = 0; c < s.size(); ++c) {
      const double sn = std::sin(phase(g.center(c), 0));
      s.rho[c] = rb * (1.0 + in.amplitude * sn);
      s.mom[0][c] = s.rho[c] * c_bar * in.amplitude * sn;
    }
    return s;
  }
  if (in.kind == "compression") {
    for (std::size_t c = 0; c < s.size(); ++c)
      s.mom[0][c] = -rb * in.amplitude * c_bar * std::sin(phase(g.center(c), 0));
    return s;
  }
  if (in.kind == "random_smooth") {
    // a few random sine modes per axis and field, scaled so |drho| <= amplitude rho_bar
    std::mt19937_64 gen(cfg.seed);
    const int nf = 1 + dim;
    struct Mode {
      int field, axis, k;
      double coef, shift;
    };
    std::vector<Mode> modes;
    double bound = 0.0;
    for (int fld = 0; fld < nf; ++fld)
      for (int d = 0; d < dim; ++d)
        for (int k = 1; k <= in.modes; ++k) {
          const double coef = (2.0 * unit(gen) - 1.0) / (k * k);
          const double shift = 2.0 * std::numbers::pi * unit(gen);
          modes.push_back({fld, d, k, coef, shift});
          if (fld == 0) bound += 1.0 / (k * k);
        }
    for (std::size_t c = 0; c < s.size(); ++c) {
      const auto x = g.center(c);
      std::array<double, 4> q{0.0, 0.0, 0.0, 0.0};
      for (const Mode& m : modes)
        q[m.field] += m.coef * std::sin(2.0 * std::numbers::pi * m.k * (x[m.axis] - g.origin[m.axis]) / g.extent[m.axis] + m.shift);
      s.rho[c] = rb * (1.0 + in.amplitude * q[0] / bound);
      for (int d = 0; d < dim; ++d) s.mom[d][c] = s.rho[c] * c_bar * in.amplitude * q[1 + d] / bound;
    }
    return s;
  }
  throw ConfigError("unknown initial data kind '" + in.kind + "'");
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
  RateFit fit;
  std::vector<double> x, y;
  for (const auto& [eps, E] : pairs) {
    if (E > 0.0 && eps > 0.0 && std::isfinite(E)) {
      x.push_back(std::log(eps));
      y.push_back(std::log(E));
    } else {
      fit.excluded.push_back(eps);
    }
  }
  if (x.size() < 2) throw ConfigError("fit_rate: fewer than 2 pairs with E > 0");
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit_rate: all epsilons coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.used = x.size();
  return fit;
}

bool SweepResult::all_checks_pass() const {
  if (checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return kv.second; });
}

int exit_code(const SweepResult& result) { return result.all_checks_pass() ? 0 : 2; }

// --- sweep ------------------------------------------------------------------

namespace {

struct Shared {
  const SweepConfig* cfg;
  const ConservedState* init;
  const std::vector<ConservedState>* ref_states;  // on the study grid at the comparison instants
  double t_compare;
  double grad_u, grad_h;
};

LevelResult run_level(const Shared& sh, double eps, std::vector<ConservedState>* keep) {
  const SweepConfig& cfg = *sh.cfg;
  PhysParams p = cfg.physics;
  p.epsilon = eps;
  LevelResult lr;
  lr.epsilon = eps;
  lr.initial_energy = total_energy(*sh.init, p.eos);
  Trajectory tr = run(*sh.init, p, cfg.scheme, sh.t_compare, cfg.snapshot_every);
  lr.failed = tr.failed;
  lr.failure = tr.failure;
  lr.steps = tr.steps;
  lr.viscous_kernel_calls = tr.viscous_kernel_calls;
  lr.min_dissipation_density = tr.min_dissipation_density;
  lr.series = tr.series;
  const auto& refs = *sh.ref_states;
  lr.series.relative_energy.clear();
  for (std::size_t n = 0; n < tr.snapshots.size(); ++n)
    lr.series.relative_energy.push_back(relative_energy(tr.snapshots[n], refs[n], p.eos));
  lr.rel_energy_T = lr.failed ? kNaN : lr.series.relative_energy.back();
  double maxres = -std::numeric_limits<double>::infinity();
  for (double r : energy_budget_residual(tr, p)) maxres = std::max(maxres, r);
  lr.max_budget_residual = maxres;
  const double m0 = total_mass_deviation(tr.snapshots.front(), p.eos);
  const double scale = std::max(std::abs(m0), total_mass(tr.snapshots.front()));
  for (const auto& s : tr.snapshots)
    lr.mass_drift = std::max(lr.mass_drift, std::abs(total_mass_deviation(s, p.eos) - m0) / scale);
  lr.posthoc_viscous = posthoc_viscous_integral(tr, p).back();

  Trajectory rt;
  rt.snapshots.assign(refs.begin(), refs.begin() + static_cast<std::ptrdiff_t>(tr.snapshots.size()));
  lr.consistency = 0.5 * posthoc_viscous_integral(rt, p).back();
  if (!lr.failed) {
    double delta = lr.consistency + std::max(0.0, lr.max_budget_residual);
    lr.gronwall = gronwall_certificate(lr.series.times, lr.series.relative_energy, sh.grad_u, sh.grad_h, p.a, delta,
                                       cfg.gronwall_kappa);
  } else {
    lr.gronwall.kappa = cfg.gronwall_kappa;
    lr.gronwall.pass = false;
    lr.gronwall.min_slack = kNaN;
  }
  if (keep) *keep = std::move(tr.snapshots);
  return lr;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config, const SweepOptions& options) {
  const auto wall0 = std::chrono::steady_clock::now();
  SweepResult res;
  res.config = config;
  res.config.validate();
  const SweepConfig& cfg = res.config;
  const Grid coarse = study_grid(cfg);
  const EosParams& eos = cfg.physics.eos;

  // reference first: its lifespan bounds every comparison
  StrongSolution ref;
  ConservedState init;
  switch (cfg.reference.kind) {
    case StrongKind::exact_uniform_damped:
      ref = make_exact_uniform_damped(coarse, eos, cfg.initial.velocity, cfg.physics.a, cfg.t_end);
      init = ref.state_at(0.0, coarse);
      break;
    case StrongKind::exact_rest:
      ref = make_exact_rest(coarse, eos, cfg.physics.a, cfg.t_end);
      init = ref.state_at(0.0, coarse);
      break;
    case StrongKind::fine_grid_reference: {
      const Grid fine = refine(coarse, cfg.reference.refine);
      const ConservedState init_fine = build_initial_state(cfg, fine);
      ref = run_reference(init_fine, eos, cfg.physics.a, cfg.scheme, cfg.t_end, cfg.snapshot_every,
                          cfg.reference.thresholds);
      ref.refinement = static_cast<std::size_t>(cfg.reference.refine);
      init = restrict_to(init_fine, coarse);
      break;
    }
  }
  res.lifespan = ref.lifespan;
  res.reference_blew_up = ref.blew_up;
  res.reference_stop = ref.stop_reason;
  res.reference_max_growth = ref.max_growth;
  res.reference_grad_u = ref.gradients.sup_grad_u();
  res.reference_grad_enthalpy = ref.gradients.sup_grad_enthalpy();
  const std::vector<double> ref_times = ref.snapshot_times();
  res.t_compare = cfg.reference.kind == StrongKind::fine_grid_reference ? ref_times.back() : cfg.t_end;
  if (!(res.t_compare > 0.0))
    throw ConfigError("reference lifespan " + format_double(ref.lifespan) + " is shorter than one snapshot interval");

  std::vector<ConservedState> ref_states;
  for (double t : snapshot_schedule(res.t_compare, cfg.snapshot_every)) ref_states.push_back(ref.state_at(t, coarse));
  if (options.keep_snapshots) res.reference_snapshots = ref_states;

  const std::size_t K = cfg.epsilon_ladder.size();
  res.levels.resize(K);
  std::vector<std::vector<ConservedState>> snaps(K);
  Shared sh{&cfg, &init, &ref_states, res.t_compare, res.reference_grad_u, res.reference_grad_enthalpy};

  // levels are independent; each worker owns whole levels and writes only its slots
  const int workers = std::min<int>(cfg.workers, static_cast<int>(K));
  const int omp_threads = std::max(1, omp_get_max_threads() / std::max(1, workers));
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(K);
  auto work = [&] {
    omp_set_num_threads(omp_threads);
    for (std::size_t i = next++; i < K; i = next++) {
      try {
        res.levels[i] = run_level(sh, cfg.epsilon_ladder[i], &snaps[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < K; ++i)
    if (!errors[i].empty()) throw std::runtime_error("level eps=" + format_double(cfg.epsilon_ladder[i]) + ": " + errors[i]);

  std::vector<std::pair<double, double>> pairs;
  for (const auto& lr : res.levels)
    if (!lr.failed) pairs.emplace_back(lr.epsilon, lr.rel_energy_T);
  try {
    res.rate = fit_rate(pairs);
    res.rate_ok = res.rate.slope > 0.0;
  } catch (const ConfigError&) {
    res.rate = RateFit{};
    for (const auto& pr : pairs) res.rate.excluded.push_back(pr.first);
    res.rate_ok = false;
  }

  Family family;
  for (std::size_t i = 0; i < K; ++i)
    if (!res.levels[i].failed) family.push_back(snaps[i]);
  if (family.size() >= 3) {
    res.defects = estimate_defects(family, eos, cfg.physics.a);
    res.domination = check_domination(res.defects);
    res.checks["domination"] = res.domination.pass;
  }
  if (family.size() >= 2) {
    const std::size_t half = (family.size() + 1) / 2;
    const Family upper(family.begin(), family.begin() + static_cast<std::ptrdiff_t>(half));
    const Family lower(family.end() - static_cast<std::ptrdiff_t>(half), family.end());
    WeakStrongSummary& ws = res.weak_strong;
    ws.upper_levels = upper.size();
    ws.lower_levels = lower.size();
    if (half >= 2) {
      ws.variance_upper = max_of(atom_variance_series(upper, eos.rho_bar));
      ws.variance_lower = max_of(atom_variance_series(lower, eos.rho_bar));
    } else {
      ws.variance_upper = ws.variance_lower = kNaN;
    }
    if (half >= 3) {
      ws.max_D_upper = estimate_defects(upper, eos, cfg.physics.a).max_D();
      ws.max_D_lower = estimate_defects(lower, eos, cfg.physics.a).max_D();
    } else {
      ws.max_D_upper = ws.max_D_lower = kNaN;
    }
  }

  bool completed = true, energy = true, diss = true, gron = true, uniform = true;
  const double E0 = res.levels.front().initial_energy;
  for (const auto& lr : res.levels) {
    completed = completed && !lr.failed;
    energy = energy && lr.max_budget_residual <= 1e-10 * std::abs(lr.initial_energy);
    diss = diss && lr.min_dissipation_density >= 0.0;
    gron = gron && lr.gronwall.pass;
    uniform = uniform && std::abs(lr.initial_energy - E0) <= 1e-14 * std::abs(E0);
  }
  res.checks["levels_completed"] = completed;
  res.checks["energy_inequality"] = energy;
  res.checks["dissipation_nonnegative"] = diss;
  res.checks["initial_energy_uniform"] = uniform;
  res.checks["gronwall"] = gron;

  if (options.keep_snapshots) res.coarse_snapshots = std::move(snaps);
  res.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return res;
}

// --- persistence ------------------------------------------------------------

namespace {

using nlohmann::json;

// JSON has no non-finite numbers; they travel as strings
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return kNaN;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw IoError("report: expected a number, got " + j.dump());
}

std::vector<double> get_nums(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(get_num(x));
  return v;
}

json series_json(const FunctionalSeries& s) {
  return {{"times", nums(s.times)},
          {"energy", nums(s.energy)},
          {"damping_integral", nums(s.damping_integral)},
          {"viscous_integral", nums(s.viscous_integral)},
          {"relative_energy", nums(s.relative_energy)}};
}

FunctionalSeries series_from(const json& j) {
  FunctionalSeries s;
  s.times = get_nums(j.at("times"));
  s.energy = get_nums(j.at("energy"));
  s.damping_integral = get_nums(j.at("damping_integral"));
  s.viscous_integral = get_nums(j.at("viscous_integral"));
  s.relative_energy = get_nums(j.at("relative_energy"));
  return s;
}

json defects_summary(const DefectEstimate& d) {
  return {{"times", nums(d.times)},
          {"mu_m_mass", nums(d.mu_m_mass)},
          {"mu_c_mass", nums(d.mu_c_mass)},
          {"energy_defect", nums(d.energy_defect)},
          {"sigma_defect", nums(d.sigma_defect)},
          {"d_raw", nums(d.D_raw)},
          {"d", nums(d.D)},
          {"clamp_magnitude", num(d.clamp_magnitude)},
          {"min_sigma", num(d.min_sigma)},
          {"levels", d.levels}};
}

DefectEstimate defects_from(const json& j) {
  DefectEstimate d;
  d.times = get_nums(j.at("times"));
  d.mu_m_mass = get_nums(j.at("mu_m_mass"));
  d.mu_c_mass = get_nums(j.at("mu_c_mass"));
  d.energy_defect = get_nums(j.at("energy_defect"));
  d.sigma_defect = get_nums(j.at("sigma_defect"));
  d.D_raw = get_nums(j.at("d_raw"));
  d.D = get_nums(j.at("d"));
  d.clamp_magnitude = get_num(j.at("clamp_magnitude"));
  d.min_sigma = get_num(j.at("min_sigma"));
  d.levels = j.at("levels").get<std::size_t>();
  return d;
}

std::filesystem::path snapshot_path(const std::filesystem::path& dir, std::size_t level, std::size_t n) {
  return dir / "snapshots" / ("level_" + std::to_string(level) + "_snap_" + std::to_string(n) + ".vlfs");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  os << text;
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace

json numeric_payload(const SweepResult& r) {
  json j;
  j["config"] = config_to_json(r.config);
  // how the levels were scheduled does not change the numbers
  j["config"]["sweep"].erase("workers");
  j["t_compare"] = num(r.t_compare);
  j["reference"] = {{"lifespan", num(r.lifespan)},
                    {"blew_up", r.reference_blew_up},
                    {"stop_reason", r.reference_stop},
                    {"sup_grad_u", num(r.reference_grad_u)},
                    {"sup_grad_enthalpy", num(r.reference_grad_enthalpy)},
                    {"max_growth", num(r.reference_max_growth)}};
  json levels = json::array();
  for (const auto& lr : r.levels) {
    const auto& g = lr.gronwall;
    levels.push_back({{"epsilon", num(lr.epsilon)},
                      {"failed", lr.failed},
                      {"failure", lr.failure},
                      {"steps", lr.steps},
                      {"viscous_kernel_calls", lr.viscous_kernel_calls},
                      {"initial_energy", num(lr.initial_energy)},
                      {"rel_energy_t", num(lr.rel_energy_T)},
                      {"max_budget_residual", num(lr.max_budget_residual)},
                      {"min_dissipation_density", num(lr.min_dissipation_density)},
                      {"mass_drift", num(lr.mass_drift)},
                      {"posthoc_viscous", num(lr.posthoc_viscous)},
                      {"consistency", num(lr.consistency)},
                      {"gronwall",
                       {{"kappa", num(g.kappa)},
                        {"rate", num(g.rate)},
                        {"delta_scheme", num(g.delta_scheme)},
                        {"min_slack", num(g.min_slack)},
                        {"worst_sample", g.worst_sample},
                        {"pass", g.pass}}},
                      {"series", series_json(lr.series)}});
  }
  j["levels"] = levels;
  j["rate"] = {{"slope", num(r.rate.slope)},
               {"intercept", num(r.rate.intercept)},
               {"used", r.rate.used},
               {"excluded", nums(r.rate.excluded)},
               {"ok", r.rate_ok}};
  j["defects"] = defects_summary(r.defects);
  j["domination"] = {{"fitted_c", num(r.domination.fitted_C)},
                     {"pass", r.domination.pass},
                     {"ratio", nums(r.domination.ratio)}};
  const auto& ws = r.weak_strong;
  j["weak_strong"] = {{"upper_levels", ws.upper_levels},       {"lower_levels", ws.lower_levels},
                      {"variance_upper", num(ws.variance_upper)}, {"variance_lower", num(ws.variance_lower)},
                      {"max_d_upper", num(ws.max_D_upper)},     {"max_d_lower", num(ws.max_D_lower)}};
  j["checks"] = r.checks;
  return j;
}

json defects_to_json(const DefectEstimate& d, const DominationResult& dom) {
  const auto mass = d.cumulative_mass();
  const auto D = d.cumulative_D();
  json entries = json::array();
  double running = 0.0;
  for (std::size_t n = 0; n < d.times.size(); ++n) {
    const double ratio = n < dom.ratio.size() ? dom.ratio[n] : kNaN;
    if (!std::isnan(ratio)) running = std::max(running, ratio);
    entries.push_back({{"tau", num(d.times[n])},
                       {"mu_m_mass", num(d.mu_m_mass[n])},
                       {"mu_c_mass", num(d.mu_c_mass[n])},
                       {"energy_defect", num(d.energy_defect[n])},
                       {"sigma_defect", num(d.sigma_defect[n])},
                       {"d_raw", num(d.D_raw[n])},
                       {"d", num(d.D[n])},
                       {"mass_cumulative", num(mass[n])},
                       {"d_cumulative", num(D[n])},
                       {"ratio", num(ratio)},
                       {"fitted_c", num(running)}});
  }
  return {{"levels", d.levels},
          {"clamp_magnitude", num(d.clamp_magnitude)},
          {"min_sigma", num(d.min_sigma)},
          {"fitted_c", num(dom.fitted_C)},
          {"pass", dom.pass},
          {"entries", entries}};
}

std::string format_table(const SweepResult& r) {
  std::ostringstream os;
  os << "t_compare " << format_double(r.t_compare) << "  lifespan " << format_double(r.lifespan)
     << (r.reference_blew_up ? " (" + r.reference_stop + ")" : std::string()) << "\n";
  os << std::left << std::setw(10) << "epsilon" << std::right << std::setw(8) << "steps" << std::setw(14) << "E(0)"
     << std::setw(14) << "rel_E(T)" << std::setw(14) << "budget_res" << std::setw(14) << "min_diss" << std::setw(12)
     << "mass_drift" << std::setw(14) << "gronwall" << "  status\n";
  os << std::scientific << std::setprecision(4);
  for (const auto& lr : r.levels) {
    os << std::left << std::setw(10) << format_double(lr.epsilon) << std::right << std::setw(8) << lr.steps
       << std::setw(14) << lr.initial_energy << std::setw(14) << lr.rel_energy_T << std::setw(14)
       << lr.max_budget_residual << std::setw(14) << lr.min_dissipation_density << std::setw(12)
       << std::setprecision(2) << lr.mass_drift << std::setprecision(4) << std::setw(14) << lr.gronwall.min_slack
       << "  " << (lr.failed ? "failed: " + lr.failure : std::string("ok")) << "\n";
  }
  os << "rate slope " << r.rate.slope << " (" << r.rate.used << " points)"
     << "  fitted C " << r.domination.fitted_C << "\n";
  const auto& ws = r.weak_strong;
  os << "variance upper/lower " << ws.variance_upper << " / " << ws.variance_lower << "  max D upper/lower "
     << ws.max_D_upper << " / " << ws.max_D_lower << "\n";
  for (const auto& [name, ok] : r.checks) os << (ok ? "PASS " : "FAIL ") << name << "\n";
  return os.str();
}

void emit_report(const SweepResult& r, const std::filesystem::path& dir) {
  if (r.levels.empty()) throw ConfigError("nothing to report");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  json meta;
  meta["wall_clock_seconds"] = r.wall_clock_seconds;
  meta["config_ini"] = config_to_ini(r.config);
  meta["warnings"] = r.config.warnings;
  meta["format_version"] = 1;
  meta["notes"] = {
      "the comparison grid is fixed across the ladder; epsilon is varied alone while the domain size stays fixed",
      "the weak limit in the defect estimates is stood in for by the smallest-epsilon level"};
  json summary = {{"payload", numeric_payload(r)}, {"metadata", meta}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  for (std::size_t i = 0; i < r.levels.size(); ++i)
    write_series_csv(dir / ("series_" + std::to_string(i) + ".csv"), r.levels[i].series);
  write_text(dir / "defects.json", defects_to_json(r.defects, r.domination).dump(2) + "\n");
  write_text(dir / "table.txt", format_table(r));

  const std::string& mode = r.config.write_snapshots;
  if (mode == "none") return;
  std::filesystem::create_directories(dir / "snapshots", ec);
  if (ec) throw IoError("cannot create '" + (dir / "snapshots").string() + "': " + ec.message());
  const EosParams& eos = r.config.physics.eos;
  const double a = r.config.physics.a;
  for (std::size_t i = 0; i < r.coarse_snapshots.size(); ++i) {
    const auto& snaps = r.coarse_snapshots[i];
    for (std::size_t n = 0; n < snaps.size(); ++n)
      if (mode == "all" || n + 1 == snaps.size()) write_snapshot(snapshot_path(dir, i, n), snaps[n], eos, a);
  }
  for (std::size_t n = 0; n < r.reference_snapshots.size(); ++n)
    if (mode == "all" || n + 1 == r.reference_snapshots.size())
      write_snapshot(dir / "snapshots" / ("reference_snap_" + std::to_string(n) + ".vlfs"), r.reference_snapshots[n],
                     eos, a);
}

SweepResult read_report(const std::filesystem::path& dir) {
  const json summary = read_json(dir / "summary.json");
  SweepResult r;
  try {
    const json& meta = summary.at("metadata");
    const json& p = summary.at("payload");
    r.config = parse_config(meta.at("config_ini").get<std::string>(), (dir / "summary.json").string());
    r.wall_clock_seconds = meta.at("wall_clock_seconds").get<double>();
    r.t_compare = get_num(p.at("t_compare"));
    const json& ref = p.at("reference");
    r.lifespan = get_num(ref.at("lifespan"));
    r.reference_blew_up = ref.at("blew_up").get<bool>();
    r.reference_stop = ref.at("stop_reason").get<std::string>();
    r.reference_grad_u = get_num(ref.at("sup_grad_u"));
    r.reference_grad_enthalpy = get_num(ref.at("sup_grad_enthalpy"));
    r.reference_max_growth = get_num(ref.at("max_growth"));
    for (const json& l : p.at("levels")) {
      LevelResult lr;
      lr.epsilon = get_num(l.at("epsilon"));
      lr.failed = l.at("failed").get<bool>();
      lr.failure = l.at("failure").get<std::string>();
      lr.steps = l.at("steps").get<std::size_t>();
      lr.viscous_kernel_calls = l.at("viscous_kernel_calls").get<std::size_t>();
      lr.initial_energy = get_num(l.at("initial_energy"));
      lr.rel_energy_T = get_num(l.at("rel_energy_t"));
      lr.max_budget_residual = get_num(l.at("max_budget_residual"));
      lr.min_dissipation_density = get_num(l.at("min_dissipation_density"));
      lr.mass_drift = get_num(l.at("mass_drift"));
      lr.posthoc_viscous = get_num(l.at("posthoc_viscous"));
      lr.consistency = get_num(l.at("consistency"));
      const json& g = l.at("gronwall");
      lr.gronwall.kappa = get_num(g.at("kappa"));
      lr.gronwall.rate = get_num(g.at("rate"));
      lr.gronwall.delta_scheme = get_num(g.at("delta_scheme"));
      lr.gronwall.min_slack = get_num(g.at("min_slack"));
      lr.gronwall.worst_sample = g.at("worst_sample").get<std::size_t>();
      lr.gronwall.pass = g.at("pass").get<bool>();
      lr.series = series_from(l.at("series"));
      r.levels.push_back(std::move(lr));
    }
    const json& rate = p.at("rate");
    r.rate.slope = get_num(rate.at("slope"));
    r.rate.intercept = get_num(rate.at("intercept"));
    r.rate.used = rate.at("used").get<std::size_t>();
    r.rate.excluded = get_nums(rate.at("excluded"));
    r.rate_ok = rate.at("ok").get<bool>();
    r.defects = defects_from(p.at("defects"));
    const json& dom = p.at("domination");
    r.domination.fitted_C = get_num(dom.at("fitted_c"));
    r.domination.pass = dom.at("pass").get<bool>();
    r.domination.ratio = get_nums(dom.at("ratio"));
    const json& ws = p.at("weak_strong");
    r.weak_strong.upper_levels = ws.at("upper_levels").get<std::size_t>();
    r.weak_strong.lower_levels = ws.at("lower_levels").get<std::size_t>();
    r.weak_strong.variance_upper = get_num(ws.at("variance_upper"));
    r.weak_strong.variance_lower = get_num(ws.at("variance_lower"));
    r.weak_strong.max_D_upper = get_num(ws.at("max_d_upper"));
    r.weak_strong.max_D_lower = get_num(ws.at("max_d_lower"));
    r.checks = p.at("checks").get<std::map<std::string, bool>>();
  } catch (const json::exception& e) {
    throw IoError("'" + (dir / "summary.json").string() + "': " + e.what());
  }
  return r;
}

DefectEstimate defects_from_report(const std::filesystem::path& dir, DominationResult* domination) {
  const SweepResult r = read_report(dir);
  if (r.config.write_snapshots != "all")
    throw ConfigError("'" + dir.string() + "' was written with write_snapshots = " + r.config.write_snapshots +
                      "; defects need every snapshot");
  const Grid g = study_grid(r.config);
  Family family;
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    if (r.levels[i].failed) continue;
    std::vector<ConservedState> level;
    for (std::size_t n = 0; n < r.levels[i].series.size(); ++n) level.push_back(read_snapshot(snapshot_path(dir, i, n), &g).state);
    family.push_back(std::move(level));
  }
  DefectEstimate d = estimate_defects(family, r.config.physics.eos, r.config.physics.a);
  if (domination) *domination = check_domination(d);
  return d;
}

}  // namespace vvl
