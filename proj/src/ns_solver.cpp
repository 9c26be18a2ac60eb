#include "vvl/ns_solver.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "vvl/errors.hpp"
#include "vvl/functionals.hpp"
#include "vvl/kernels.hpp"
#include "vvl/summation.hpp"

namespace vvl {

void PhysParams::validate() const {
  eos.validate();
  if (!(a >= 0.0)) throw ConfigError("damping rate a must be nonnegative");
  if (!(mu > 0.0)) throw ConfigError("shear viscosity mu must be positive");
  if (!(eta >= 0.0)) throw ConfigError("bulk viscosity eta must be nonnegative");
  if (!(epsilon >= 0.0)) throw ConfigError("viscosity scale epsilon must be nonnegative");
}

std::string to_string(Reconstruction r) { return r == Reconstruction::first_order ? "first_order" : "muscl_minmod"; }
std::string to_string(TimeIntegrator t) { return t == TimeIntegrator::forward_euler ? "forward_euler" : "ssp_rk2"; }

Reconstruction reconstruction_from_string(const std::string& s) {
  if (s == "first_order") return Reconstruction::first_order;
  if (s == "muscl_minmod" || s == "muscl") return Reconstruction::muscl_minmod;
  throw ConfigError("unknown reconstruction '" + s + "'");
}

TimeIntegrator time_integrator_from_string(const std::string& s) {
  if (s == "forward_euler") return TimeIntegrator::forward_euler;
  if (s == "ssp_rk2") return TimeIntegrator::ssp_rk2;
  throw ConfigError("unknown time integrator '" + s + "'");
}

void SchemeConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(viscous_stability_factor > 0.0 && viscous_stability_factor <= 1.0))
    throw ConfigError("viscous_stability_factor must lie in (0, 1]");
}

Tensor stress_tensor(const Tensor& G, const PhysParams& p, int dim) {
  double tr = 0.0;
  for (int i = 0; i < dim; ++i) tr += G[i][i];
  Tensor S{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      S[i][j] = p.mu * (G[i][j] + G[j][i]);
      if (i == j) S[i][j] += (p.eta - 2.0 * p.mu / dim) * tr;
    }
  return S;
}

double dissipation_density(const Tensor& G, const PhysParams& p, int dim) {
  double tr = 0.0;
  for (int i = 0; i < dim; ++i) tr += G[i][i];
  double dev2 = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double d = G[i][j] + G[j][i];
      if (i == j) d -= 2.0 * tr / dim;
      dev2 += d * d;
    }
  return 0.5 * p.mu * dev2 + p.eta * tr * tr;
}

double contract(const Tensor& a, const Tensor& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += a[i][j] * b[i][j];
  return s;
}

Flux physical_flux(const CellState& w, int axis, int dim, const EosParams& eos) {
  if (!(w.rho > 0.0)) throw PositivityError("physical_flux: non-positive density", 0);
  const double un = w.m[axis] / w.rho;
  Flux F;
  F.rho = w.m[axis];
  for (int k = 0; k < dim; ++k) F.m[k] = w.m[k] * un;
  F.m[axis] += pressure(w.rho, eos);
  return F;
}

Flux convective_flux(const CellState& left, const CellState& right, int axis, int dim, const EosParams& eos) {
  if (!(left.rho > 0.0)) throw PositivityError("convective_flux: non-positive density on the left", 0);
  if (!(right.rho > 0.0)) throw PositivityError("convective_flux: non-positive density on the right", 1);
  kernels::FaceStates fs{};
  fs.rho_l = left.rho;
  fs.rho_r = right.rho;
  for (int k = 0; k < dim; ++k) {
    fs.u_l[k] = left.m[k] / left.rho;
    fs.u_r[k] = right.m[k] / right.rho;
  }
  return kernels::rusanov(fs, axis, dim, eos);
}

DtBreakdown stable_dt_breakdown(const ConservedState& s, const PhysParams& p, const SchemeConfig& scheme) {
  const int dim = s.grid.dim;
  const double h = s.grid.min_spacing();
  double max_speed = 0.0;
  double min_rho = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s.rho[i];
    if (!std::isfinite(r)) throw DomainError("stable_dt: non-finite density in cell " + std::to_string(i));
    if (!(r > 0.0)) throw PositivityError("stable_dt: non-positive density", i);
    double u2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      if (!std::isfinite(s.mom[d][i])) throw DomainError("stable_dt: non-finite momentum in cell " + std::to_string(i));
      u2 += s.mom[d][i] * s.mom[d][i];
    }
    const double speed = std::sqrt(u2) / r + std::sqrt(p.eos.gamma * p.eos.A * std::pow(r, p.eos.gamma - 1.0));
    max_speed = std::max(max_speed, speed);
    min_rho = std::min(min_rho, r);
  }
  DtBreakdown b;
  b.acoustic = scheme.cfl * h / max_speed;
  if (p.epsilon > 0.0) {
    b.viscous = scheme.viscous_stability_factor * h * h * min_rho / (2.0 * dim * p.epsilon * (2.0 * p.mu + p.eta));
    b.combined = 1.0 / (1.0 / b.acoustic + 1.0 / b.viscous);
  } else {
    b.viscous = std::numeric_limits<double>::infinity();
    b.combined = b.acoustic;
  }
  return b;
}

double stable_dt(const ConservedState& s, const PhysParams& p, const SchemeConfig& scheme) {
  return stable_dt_breakdown(s, p, scheme).combined;
}

namespace {
std::atomic<std::size_t> g_viscous_calls{0};
}

std::size_t viscous_kernel_invocations() { return g_viscous_calls.load(); }

struct Integrator::Impl {
  Grid grid;
  PhysParams params;
  SchemeConfig scheme;
  Backend backend;
  kernels::PaddedFields w0, w1, w2;
  kernels::Workspace ws;
  std::vector<double> kinetic;
  std::size_t viscous_calls = 0;

  Impl(const Grid& g, const PhysParams& p, const SchemeConfig& s, Backend b)
      : grid(g), params(p), scheme(s), backend(b) {
    const kernels::PaddedLayout L(g);
    w0 = kernels::PaddedFields(L);
    w1 = kernels::PaddedFields(L);
    w2 = kernels::PaddedFields(L);
    kinetic.resize(g.cell_count());
  }

  bool par() const { return backend == Backend::parallel; }

  void check(const kernels::PaddedFields& f, const char* stage) const {
    const std::ptrdiff_t bad = kernels::first_inadmissible(f, grid);
    if (bad >= 0) throw PositivityError(std::string("density left the admissible set after the ") + stage, bad);
  }

  void convective(kernels::PaddedFields& in, kernels::PaddedFields& out, double dt) {
    kernels::fill_ghosts(in, grid, params.eos.rho_bar);
    const kernels::StageArgs args{&grid, &params.eos, scheme.reconstruction, dt};
    if (par())
      kernels::parallel::convective_stage(in, out, args, ws);
    else
      kernels::serial::convective_stage(in, out, args);
  }

  void advance(ConservedState& state, double dt, StepDiagnostics& diag) {
    const kernels::PaddedLayout& L = w0.layout;
    const int dim = grid.dim;
    kernels::load_interior(state, w0);
    convective(w0, w1, dt);
    check(w1, "convective stage");
    if (scheme.time_integrator == TimeIntegrator::ssp_rk2) {
      convective(w1, w2, dt);
      const bool p = par();
#pragma omp parallel for collapse(2) schedule(static) if (p)
      for (int k = 0; k < L.n[2]; ++k)
        for (int j = 0; j < L.n[1]; ++j)
          for (int i = 0; i < L.n[0]; ++i) {
            const std::size_t c = L.at(i, j, k);
            w1.rho[c] = 0.5 * w0.rho[c] + 0.5 * w2.rho[c];
            for (int d = 0; d < dim; ++d) w1.m[d][c] = 0.5 * w0.m[d][c] + 0.5 * w2.m[d][c];
          }
      check(w1, "second Runge-Kutta stage");
    }

    diag = StepDiagnostics{};
    if (params.epsilon > 0.0) {
      kernels::fill_ghosts(w1, grid, params.eos.rho_bar);
      const kernels::ViscousArgs args{&grid, &params, dt};
      const kernels::ViscousResult r =
          par() ? kernels::parallel::viscous_update(w1, args, ws) : kernels::serial::viscous_update(w1, args);
      g_viscous_calls.fetch_add(1);
      ++viscous_calls;
      check(w1, "viscous update");
      diag.viscous_dissipation = r.dissipation;
      diag.min_face_dissipation = r.min_face_density;
      diag.viscous_evaluated = true;
    }

    if (params.a > 0.0) {
      const double factor = std::exp(-params.a * dt);
      const bool p = par();
#pragma omp parallel for collapse(2) schedule(static) if (p)
      for (int k = 0; k < L.n[2]; ++k)
        for (int j = 0; j < L.n[1]; ++j)
          for (int i = 0; i < L.n[0]; ++i) {
            const std::size_t c = L.at(i, j, k);
            double m2 = 0.0;
            for (int d = 0; d < dim; ++d) {
              m2 += w1.m[d][c] * w1.m[d][c];
              w1.m[d][c] *= factor;
            }
            kinetic[grid.index(i, j, k)] = 0.5 * m2 / w1.rho[c];
          }
      diag.damping_dissipation = grid.cell_volume() * pairwise_sum(kinetic) * -std::expm1(-2.0 * params.a * dt);
    }

    kernels::store_interior(w1, state);
    state.time += dt;
  }
};

Integrator::Integrator(const Grid& grid, const PhysParams& params, const SchemeConfig& scheme, Backend backend) {
  params.validate();
  scheme.validate();
  impl_ = std::make_unique<Impl>(grid, params, scheme, backend);
}
Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;
Integrator& Integrator::operator=(Integrator&&) noexcept = default;

void Integrator::advance(ConservedState& state, double dt, StepDiagnostics& diag) {
  if (!state.grid.same_layout(impl_->grid)) throw ConfigError("Integrator::advance: state is on a different grid");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("Integrator::advance: dt must be positive");
  impl_->advance(state, dt, diag);
}

const PhysParams& Integrator::params() const { return impl_->params; }
std::size_t Integrator::viscous_calls() const { return impl_->viscous_calls; }

ConservedState step(const ConservedState& state, const PhysParams& params, const SchemeConfig& scheme, double dt,
                    Backend backend) {
  check_admissible(state);
  Integrator integ(state.grid, params, scheme, backend);
  ConservedState out = state;
  StepDiagnostics diag;
  integ.advance(out, dt, diag);
  return out;
}

std::vector<double> snapshot_schedule(double t_end, double every) {
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  std::vector<double> times{0.0};
  if (every > 0.0) {
    for (long k = 1;; ++k) {
      const double t = static_cast<double>(k) * every;
      if (t >= t_end * (1.0 - 1e-12)) break;
      times.push_back(t);
    }
  }
  times.push_back(t_end);
  return times;
}

Trajectory run(const ConservedState& init, const PhysParams& params, const SchemeConfig& scheme, double t_end,
               double snapshot_every, const RunOptions& options) {
  check_admissible(init);
  Trajectory traj;
  traj.params = params;
  traj.scheme = scheme;
  const std::vector<double> schedule = snapshot_schedule(t_end, snapshot_every);
  Integrator integ(init.grid, params, scheme, options.backend);

  ConservedState state = init;
  state.time = 0.0;
  double damp_acc = 0.0, visc_acc = 0.0;
  double min_diss = std::numeric_limits<double>::infinity();

  auto record = [&] {
    traj.snapshots.push_back(state);
    traj.series.times.push_back(state.time);
    traj.series.energy.push_back(total_energy(state, params.eos));
    traj.series.damping_integral.push_back(damp_acc);
    traj.series.viscous_integral.push_back(visc_acc);
  };
  record();

  std::size_t next = 1;
  try {
    while (next < schedule.size()) {
      const double target = schedule[next];
      double dt = stable_dt(state, params, scheme);
      bool land = false;
      if (state.time + dt >= target - 1e-12 * std::max(1.0, target)) {
        dt = target - state.time;
        land = true;
      }
      StepDiagnostics diag;
      integ.advance(state, dt, diag);
      ++traj.steps;
      damp_acc += diag.damping_dissipation;
      visc_acc += diag.viscous_dissipation;
      if (diag.viscous_evaluated) min_diss = std::min(min_diss, diag.min_face_dissipation);
      if (land) {
        state.time = target;
        ++next;
      }
      const bool stop = options.observer && options.observer(state);
      if (land || stop) record();
      if (stop) {
        traj.stopped = true;
        break;
      }
    }
  } catch (const PositivityError& e) {
    traj.failed = true;
    traj.failure = e.what();
  }
  traj.viscous_kernel_calls = integ.viscous_calls();
  traj.min_dissipation_density = std::isfinite(min_diss) ? min_diss : 0.0;
  return traj;
}

}  // namespace vvl
