#include "vvl/euler_reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vvl/errors.hpp"
#include "vvl/kernels.hpp"

namespace vvl {

std::string to_string(StrongKind kind) {
  switch (kind) {
    case StrongKind::exact_uniform_damped: return "exact_uniform_damped";
    case StrongKind::exact_rest: return "exact_rest";
    case StrongKind::fine_grid_reference: return "fine_grid_reference";
  }
  return "?";
}

StrongKind strong_kind_from_string(const std::string& s) {
  if (s == "exact_uniform_damped") return StrongKind::exact_uniform_damped;
  if (s == "exact_rest") return StrongKind::exact_rest;
  if (s == "fine_grid_reference") return StrongKind::fine_grid_reference;
  throw ConfigError("unknown reference kind '" + s + "'");
}

double GradientRecord::sup_grad_u() const {
  double m = 0.0;
  for (double v : grad_u) m = std::max(m, v);
  return m;
}

double GradientRecord::sup_grad_enthalpy() const {
  double m = 0.0;
  for (double v : grad_enthalpy) m = std::max(m, v);
  return m;
}

ConservedState exact_uniform_damped(const Grid& grid, double rho_bar, const std::array<double, 3>& u0, double a,
                                    double t) {
  if (!grid.all_periodic()) throw ConfigError("exact_uniform_damped: needs a periodic grid");
  const double f = std::exp(-a * t);
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (int d = 0; d < grid.dim; ++d) m[d] = rho_bar * u0[d] * f;
  ConservedState s(grid, rho_bar, m);
  s.time = t;
  return s;
}

ConservedState exact_uniform_damped_rate(const Grid& grid, double rho_bar, const std::array<double, 3>& u0, double a,
                                         double t) {
  if (!grid.all_periodic()) throw ConfigError("exact_uniform_damped: needs a periodic grid");
  const double f = std::exp(-a * t);
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (int d = 0; d < grid.dim; ++d) m[d] = -a * rho_bar * u0[d] * f;
  ConservedState s(grid, 0.0, m);
  s.time = t;
  return s;
}

namespace {

kernels::PaddedFields padded(const ConservedState& s, double rho_bar) {
  kernels::PaddedFields f{kernels::PaddedLayout(s.grid)};
  kernels::load_interior(s, f);
  kernels::fill_ghosts(f, s.grid, rho_bar);
  return f;
}

}  // namespace

double euler_residual(const ConservedState& s, const ConservedState& rate, const EosParams& eos, double a) {
  if (!s.grid.same_layout(rate.grid)) throw ConfigError("euler_residual: state and rate are on different grids");
  check_admissible(s);
  const Grid& g = s.grid;
  const int dim = g.dim;
  const auto f = padded(s, eos.rho_bar);
  const auto& L = f.layout;
  double res = 0.0;
  for (std::size_t idx = 0; idx < g.cell_count(); ++idx) {
    const auto co = g.coords(idx);
    const std::size_t c = L.at(co[0], co[1], co[2]);
    double r_rho = rate.rho[idx];
    std::array<double, 3> r_m{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) r_m[k] = rate.mom[k][idx] + a * s.mom[k][idx];
    for (int j = 0; j < dim; ++j) {
      const std::size_t p = c + L.stride[j], q = c - L.stride[j];
      auto flux = [&](std::size_t at) {
        CellState w;
        w.rho = f.rho[at];
        for (int k = 0; k < dim; ++k) w.m[k] = f.m[k][at];
        return physical_flux(w, j, dim, eos);
      };
      const Flux Fp = flux(p), Fq = flux(q);
      r_rho += (Fp.rho - Fq.rho) / (2.0 * g.spacing[j]);
      for (int k = 0; k < dim; ++k) r_m[k] += (Fp.m[k] - Fq.m[k]) / (2.0 * g.spacing[j]);
    }
    res = std::max(res, std::abs(r_rho));
    for (int k = 0; k < dim; ++k) res = std::max(res, std::abs(r_m[k]));
  }
  return res;
}

StrongSolution make_exact_uniform_damped(const Grid& grid, const EosParams& eos, const std::array<double, 3>& u0,
                                         double a, double t_end) {
  if (!grid.all_periodic()) throw ConfigError("exact_uniform_damped: needs a periodic grid");
  if (!(eos.rho_bar > 0.0)) throw ConfigError("exact_uniform_damped: needs rho_bar > 0");
  StrongSolution s;
  s.kind = StrongKind::exact_uniform_damped;
  s.eos = eos;
  s.a = a;
  s.grid = grid;
  s.u0 = u0;
  s.t_end = s.lifespan = t_end;
  s.gradients.times = {0.0, t_end};
  s.gradients.grad_u = {0.0, 0.0};
  s.gradients.grad_enthalpy = {0.0, 0.0};
  return s;
}

StrongSolution make_exact_rest(const Grid& grid, const EosParams& eos, double a, double t_end) {
  if (!(eos.rho_bar > 0.0)) throw ConfigError("exact_rest: needs rho_bar > 0");
  StrongSolution s;
  s.kind = StrongKind::exact_rest;
  s.eos = eos;
  s.a = a;
  s.grid = grid;
  s.t_end = s.lifespan = t_end;
  s.gradients.times = {0.0, t_end};
  s.gradients.grad_u = {0.0, 0.0};
  s.gradients.grad_enthalpy = {0.0, 0.0};
  return s;
}

std::vector<double> StrongSolution::snapshot_times() const {
  if (kind == StrongKind::fine_grid_reference) return reference.series.times;
  return gradients.times;
}

ConservedState StrongSolution::state_at(double t, const Grid& coarse) const {
  switch (kind) {
    case StrongKind::exact_uniform_damped: return exact_uniform_damped(coarse, eos.rho_bar, u0, a, t);
    case StrongKind::exact_rest: {
      ConservedState s(coarse, eos.rho_bar);
      s.time = t;
      return s;
    }
    case StrongKind::fine_grid_reference:
      for (const auto& snap : reference.snapshots)
        if (std::abs(snap.time - t) <= 1e-12 * std::max(1.0, t)) return restrict_to(snap, coarse);
      throw ConfigError("reference has no snapshot at t = " + std::to_string(t));
  }
  throw ConfigError("bad reference kind");
}

namespace {

// max |grad q| per field q = rho, u_1..u_N by central differences; the
// oscillation max q - min q alongside.
struct FieldGradients {
  std::array<double, 4> grad{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> osc{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> scale{0.0, 0.0, 0.0, 0.0};  // max |q|
  std::array<double, 4> jump{0.0, 0.0, 0.0, 0.0};   // max one-sided difference quotient, sees odd-even modes
  int count = 1;
};

FieldGradients field_gradients(const ConservedState& s, double rho_bar) {
  const Grid& g = s.grid;
  const int dim = g.dim;
  const auto f = padded(s, rho_bar);
  const auto& L = f.layout;
  FieldGradients out;
  out.count = 1 + dim;
  std::array<double, 4> lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  auto q = [&](int field, std::size_t at) { return field == 0 ? f.rho[at] : f.m[field - 1][at] / f.rho[at]; };
  for (std::size_t idx = 0; idx < g.cell_count(); ++idx) {
    const auto co = g.coords(idx);
    const std::size_t c = L.at(co[0], co[1], co[2]);
    for (int fld = 0; fld < out.count; ++fld) {
      const double v = q(fld, c);
      lo[fld] = std::min(lo[fld], v);
      hi[fld] = std::max(hi[fld], v);
      double g2 = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double qp = q(fld, c + L.stride[j]);
        const double dq = (qp - q(fld, c - L.stride[j])) / (2.0 * g.spacing[j]);
        g2 += dq * dq;
        out.jump[fld] = std::max(out.jump[fld], std::abs(qp - v) / g.spacing[j]);
      }
      out.grad[fld] = std::max(out.grad[fld], std::sqrt(g2));
    }
  }
  for (int fld = 0; fld < out.count; ++fld) {
    out.osc[fld] = hi[fld] - lo[fld];
    out.scale[fld] = std::max(std::abs(hi[fld]), std::abs(lo[fld]));
  }
  return out;
}

}  // namespace

double resolution_indicator(const ConservedState& s, double rho_bar) {
  const auto fg = field_gradients(s, rho_bar);
  const double h = s.grid.min_spacing();
  double worst = 0.0;
  for (int fld = 0; fld < fg.count; ++fld)
    if (fg.osc[fld] > 1e-10 * std::max(1.0, fg.scale[fld])) worst = std::max(worst, h * std::max(fg.grad[fld], fg.jump[fld]) / fg.osc[fld]);
  return worst;
}

std::pair<double, double> gradient_norms(const ConservedState& s, const EosParams& eos) {
  check_admissible(s);
  const Grid& g = s.grid;
  const int dim = g.dim;
  const auto f = padded(s, eos.rho_bar);
  const auto& L = f.layout;
  const double coef = eos.A * eos.gamma / (eos.gamma - 1.0);
  double gu = 0.0, gh = 0.0;
  for (std::size_t idx = 0; idx < g.cell_count(); ++idx) {
    const auto co = g.coords(idx);
    const std::size_t c = L.at(co[0], co[1], co[2]);
    for (int j = 0; j < dim; ++j) {
      const std::size_t p = c + L.stride[j], q = c - L.stride[j];
      const double inv = 1.0 / (2.0 * g.spacing[j]);
      for (int i = 0; i < dim; ++i) gu = std::max(gu, std::abs(f.m[i][p] / f.rho[p] - f.m[i][q] / f.rho[q]) * inv);
      const double hp = coef * std::pow(f.rho[p], eos.gamma - 1.0);
      const double hq = coef * std::pow(f.rho[q], eos.gamma - 1.0);
      gh = std::max(gh, std::abs(hp - hq) * inv);
    }
  }
  return {gu, gh};
}

StrongSolution run_reference(const ConservedState& init, const EosParams& eos, double a, const SchemeConfig& scheme,
                             double t_end, double snapshot_every, const ReferenceThresholds& th, Backend backend) {
  check_admissible(init);
  if (!(th.blowup > 1.0)) throw ConfigError("blowup threshold must exceed 1");
  if (!(th.vacuum_fraction > 0.0)) throw ConfigError("vacuum threshold must be positive");
  const double resolution = resolution_indicator(init, eos.rho_bar);
  if (resolution > th.resolution * (1.0 + 1e-9))
    throw ConfigError("reference initial data are under-resolved (h |grad q| / osc q = " + std::to_string(resolution) +
                      ")");

  StrongSolution sol;
  sol.kind = StrongKind::fine_grid_reference;
  sol.eos = eos;
  sol.a = a;
  sol.grid = init.grid;
  sol.t_end = t_end;
  sol.thresholds = th;

  double scale = eos.rho_bar;
  if (!(scale > 0.0)) scale = *std::min_element(init.rho.begin(), init.rho.end());
  const double vacuum = th.vacuum_fraction * scale;

  const FieldGradients g0 = field_gradients(init, eos.rho_bar);
  std::array<double, 4> base{};
  for (int fld = 0; fld < g0.count; ++fld) {
    // gradients at round-off level do not count as features
    const double floor = 1e-10 * std::max(1.0, fld == 0 ? scale : 1.0) / init.grid.min_spacing();
    base[fld] = g0.grad[fld] > floor ? g0.grad[fld] : 0.0;
  }

  PhysParams params;
  params.eos = eos;
  params.a = a;
  params.epsilon = 0.0;
  RunOptions opts;
  opts.backend = backend;
  double max_growth = 1.0;
  double stop_time = t_end;
  std::string reason;
  opts.observer = [&](const ConservedState& s) {
    const double min_rho = *std::min_element(s.rho.begin(), s.rho.end());
    if (min_rho < vacuum) {
      reason = "vacuum";
      stop_time = s.time;
      return true;
    }
    const FieldGradients gt = field_gradients(s, eos.rho_bar);
    double growth = 1.0;
    for (int fld = 0; fld < gt.count; ++fld)
      if (base[fld] > 0.0) growth = std::max(growth, gt.grad[fld] / base[fld]);
    max_growth = std::max(max_growth, growth);
    if (growth > th.blowup) {
      reason = "gradient_blowup";
      stop_time = s.time;
      return true;
    }
    return false;
  };

  sol.reference = run(init, params, scheme, t_end, snapshot_every, opts);
  sol.max_growth = max_growth;
  if (sol.reference.failed) {
    reason = "positivity_failure";
    stop_time = sol.reference.snapshots.back().time;
  }
  sol.stop_reason = reason;
  sol.blew_up = !reason.empty();
  if (sol.blew_up) {
    // the state that tripped the indicator is not part of the lifespan
    Trajectory& tr = sol.reference;
    if (sol.reference.stopped && tr.snapshots.size() > 1) {
      tr.snapshots.pop_back();
      tr.series.times.pop_back();
      tr.series.energy.pop_back();
      tr.series.damping_integral.pop_back();
      tr.series.viscous_integral.pop_back();
    }
    sol.lifespan = stop_time;
  } else {
    sol.lifespan = t_end;
  }
  for (const auto& s : sol.reference.snapshots) {
    const auto [gu, gh] = gradient_norms(s, eos);
    sol.gradients.times.push_back(s.time);
    sol.gradients.grad_u.push_back(gu);
    sol.gradients.grad_enthalpy.push_back(gh);
  }
  return sol;
}

}  // namespace vvl
