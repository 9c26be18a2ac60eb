#include "vvl/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vvl/errors.hpp"
#include "vvl/kernels.hpp"
#include "vvl/summation.hpp"

namespace vvl {

double kinetic_density(double rho, const std::array<double, 3>& m, const std::array<double, 3>& U, int dim) {
  double w2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double w = m[d] - rho * U[d];
    w2 += w * w;
  }
  if (rho == 0.0) {
    if (w2 != 0.0) throw DomainError("vacuum cell carries momentum");
    return 0.0;
  }
  return 0.5 * w2 / rho;
}

double relative_energy_density(double rho, const std::array<double, 3>& m, double r, const std::array<double, 3>& U,
                               int dim, const EosParams& eos) {
  return kinetic_density(rho, m, U, dim) + relative_potential(rho, r, eos);
}

double energy_density(double rho, const std::array<double, 3>& m, int dim, const EosParams& eos) {
  return kinetic_density(rho, m, {0.0, 0.0, 0.0}, dim) + background_potential(rho, eos);
}

namespace {

// Everything that could throw inside a parallel sum is rejected here first.
void require_energy_domain(const ConservedState& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s.rho[i];
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("negative or non-finite density in cell " + std::to_string(i));
    if (r == 0.0)
      for (int d = 0; d < s.grid.dim; ++d)
        if (s.mom[d][i] != 0.0) throw DomainError("vacuum cell " + std::to_string(i) + " carries momentum");
  }
}

std::array<double, 3> momentum_of(const ConservedState& s, std::size_t i) {
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (int d = 0; d < s.grid.dim; ++d) m[d] = s.mom[d][i];
  return m;
}

}  // namespace

double total_energy(const ConservedState& s, const EosParams& eos) {
  require_energy_domain(s);
  const int dim = s.grid.dim;
  return s.grid.cell_volume() *
         deterministic_sum(s.size(), [&](std::size_t i) { return energy_density(s.rho[i], momentum_of(s, i), dim, eos); });
}

double relative_energy(const ConservedState& s, const ConservedState& ref, const EosParams& eos) {
  if (!s.grid.same_layout(ref.grid)) throw ConfigError("relative_energy: state and reference are on different grids");
  require_energy_domain(s);
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (!(ref.rho[i] > 0.0)) throw DomainError("relative_energy: reference density not positive in cell " + std::to_string(i));
  const int dim = s.grid.dim;
  return s.grid.cell_volume() * deterministic_sum(s.size(), [&](std::size_t i) {
    std::array<double, 3> U{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) U[d] = ref.mom[d][i] / ref.rho[i];
    return relative_energy_density(s.rho[i], momentum_of(s, i), ref.rho[i], U, dim, eos);
  });
}

std::vector<double> energy_budget_residual(const FunctionalSeries& series) {
  const std::size_t n = series.times.size();
  if (series.energy.size() != n || series.damping_integral.size() != n || series.viscous_integral.size() != n)
    throw ConfigError("energy_budget_residual: trajectory is missing dissipation accumulators");
  if (n == 0) return {};
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = series.energy[i] + series.damping_integral[i] + series.viscous_integral[i] - series.energy[0];
  return r;
}

std::vector<double> energy_budget_residual(const Trajectory& traj, const PhysParams&) {
  return energy_budget_residual(traj.series);
}

// --- test functions -------------------------------------------------------

namespace {

double s2_of(const TestFunction& f, double t, const std::array<double, 3>& x, int dim) {
  double s2 = (t - f.t0) * (t - f.t0);
  for (int d = 0; d < dim; ++d) s2 += (x[d] - f.x0[d]) * (x[d] - f.x0[d]);
  return s2 / (f.radius * f.radius);
}

// d phi / d(s^2 R^2) factor: -n (1 - s^2)^(n-1) / R^2, times 2 (y - y0) per coordinate.
double radial_factor(const TestFunction& f, double s2) {
  if (s2 >= 1.0) return 0.0;
  return -2.0 * f.degree * std::pow(1.0 - s2, f.degree - 1) / (f.radius * f.radius);
}

}  // namespace

double TestFunction::value(double t, const std::array<double, 3>& x, int dim) const {
  const double s2 = s2_of(*this, t, x, dim);
  return s2 >= 1.0 ? 0.0 : std::pow(1.0 - s2, degree);
}

double TestFunction::dt(double t, const std::array<double, 3>& x, int dim) const {
  return radial_factor(*this, s2_of(*this, t, x, dim)) * (t - t0);
}

std::array<double, 3> TestFunction::grad(double t, const std::array<double, 3>& x, int dim) const {
  const double f = radial_factor(*this, s2_of(*this, t, x, dim));
  std::array<double, 3> g{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) g[d] = f * (x[d] - x0[d]);
  return g;
}

namespace {

void require_support(const Trajectory& traj, const TestFunction& phi) {
  if (traj.snapshots.size() < 2) throw ConfigError("weak residual: trajectory needs at least two snapshots");
  if (!(phi.radius > 0.0) || phi.degree < 2) throw ConfigError("weak residual: test function needs radius > 0, degree >= 2");
  const double t_first = traj.snapshots.front().time, t_last = traj.snapshots.back().time;
  if (!(phi.t0 - phi.radius > t_first && phi.t0 + phi.radius < t_last))
    throw ConfigError("weak residual: test function support leaves the time interval");
  const Grid& g = traj.snapshots.front().grid;
  for (int d = 0; d < g.dim; ++d)
    if (!(phi.x0[d] - phi.radius > g.origin[d] && phi.x0[d] + phi.radius < g.origin[d] + g.extent[d]))
      throw ConfigError("weak residual: test function support leaves the box");
}

// Trapezoid in time of per-snapshot spatial integrals.
template <class F>
double time_integral(const Trajectory& traj, F&& spatial) {
  double acc = 0.0;
  double prev = spatial(traj.snapshots[0]);
  for (std::size_t n = 1; n < traj.snapshots.size(); ++n) {
    const double cur = spatial(traj.snapshots[n]);
    acc += 0.5 * (traj.snapshots[n].time - traj.snapshots[n - 1].time) * (prev + cur);
    prev = cur;
  }
  return acc;
}

}  // namespace

double weak_residual_continuity(const Trajectory& traj, const TestFunction& phi) {
  require_support(traj, phi);
  const double rho_bar = traj.params.eos.rho_bar;
  // phi vanishes at both ends of the interval, so only the space-time integral
  // remains. rho_bar d_t phi integrates to zero and is dropped.
  const double rhs = time_integral(traj, [&](const ConservedState& s) {
    const Grid& g = s.grid;
    return g.cell_volume() * deterministic_sum(s.size(), [&](std::size_t i) {
      const auto x = g.center(i);
      const auto gp = phi.grad(s.time, x, g.dim);
      double v = (s.rho[i] - rho_bar) * phi.dt(s.time, x, g.dim);
      for (int d = 0; d < g.dim; ++d) v += s.mom[d][i] * gp[d];
      return v;
    });
  });
  return std::abs(rhs);
}

double weak_residual_momentum(const Trajectory& traj, const TestFunction& phi, const PhysParams& params) {
  require_support(traj, phi);
  const int c = phi.component;
  const int dim = traj.snapshots.front().grid.dim;
  if (c < 0 || c >= dim) throw ConfigError("weak_residual_momentum: test function needs a momentum component");
  const EosParams& eos = params.eos;
  const double p_bar = eos.A * std::pow(eos.rho_bar, eos.gamma);
  const double rhs = time_integral(traj, [&](const ConservedState& s) {
    const Grid& g = s.grid;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (!(s.rho[i] > 0.0)) throw PositivityError("weak_residual_momentum: non-positive density", i);
    std::vector<Tensor> grads;
    if (params.epsilon > 0.0) grads = cell_velocity_gradients(s, eos.rho_bar);
    return g.cell_volume() * deterministic_sum(s.size(), [&](std::size_t i) {
      const auto x = g.center(i);
      const auto gp = phi.grad(s.time, x, g.dim);
      const double r = s.rho[i];
      const double mc = s.mom[c][i];
      double v = mc * phi.dt(s.time, x, g.dim) - params.a * mc * phi.value(s.time, x, g.dim);
      for (int d = 0; d < g.dim; ++d) v += mc * s.mom[d][i] / r * gp[d];
      v += (eos.A * std::pow(r, eos.gamma) - p_bar) * gp[c];
      if (params.epsilon > 0.0) {
        const Tensor S = stress_tensor(grads[i], params, g.dim);
        for (int d = 0; d < g.dim; ++d) v -= params.epsilon * S[c][d] * gp[d];
      }
      return v;
    });
  });
  return std::abs(rhs);
}

// --- Gronwall -------------------------------------------------------------

GronwallCertificate gronwall_certificate(const std::vector<double>& times, const std::vector<double>& E, double grad_u,
                                         double grad_enthalpy, double a, double delta, double kappa) {
  if (times.size() != E.size() || times.empty()) throw ConfigError("gronwall_certificate: series is empty or ragged");
  if (!std::isfinite(grad_u) || !std::isfinite(grad_enthalpy))
    throw ConfigError("gronwall_certificate: missing gradient records");
  GronwallCertificate cert;
  cert.kappa = kappa;
  cert.rate = kappa * (grad_u + grad_enthalpy + a);
  cert.delta_scheme = delta;
  cert.min_slack = std::numeric_limits<double>::infinity();
  const double t0 = times.front();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double bound = (E.front() + delta) * std::exp(cert.rate * (times[i] - t0));
    const double slack = bound - E[i];
    if (slack < cert.min_slack) {
      cert.min_slack = slack;
      cert.worst_sample = i;
    }
  }
  cert.pass = cert.min_slack >= 0.0;
  return cert;
}

GronwallCertificate gronwall_certificate(const std::vector<double>& times, const std::vector<double>& E,
                                         const StrongSolution& ref, double delta, double kappa) {
  if (ref.gradients.times.empty()) throw ConfigError("gronwall_certificate: reference has no gradient records");
  return gronwall_certificate(times, E, ref.gradients.sup_grad_u(), ref.gradients.sup_grad_enthalpy(), ref.a, delta,
                              kappa);
}

// --- post-hoc dissipation -------------------------------------------------

std::vector<Tensor> cell_velocity_gradients(const ConservedState& s, double rho_bar) {
  const Grid& g = s.grid;
  const kernels::PaddedLayout L(g);
  kernels::PaddedFields f(L);
  kernels::load_interior(s, f);
  kernels::fill_ghosts(f, g, rho_bar);
  std::vector<Tensor> out(g.cell_count());
  const int dim = g.dim;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(out.size()); ++idx) {
    const auto co = g.coords(static_cast<std::size_t>(idx));
    const std::size_t c = L.at(co[0], co[1], co[2]);
    Tensor G{};
    for (int j = 0; j < dim; ++j) {
      const std::ptrdiff_t sj = L.stride[j];
      for (int i = 0; i < dim; ++i)
        G[i][j] = (f.m[i][c + sj] / f.rho[c + sj] - f.m[i][c - sj] / f.rho[c - sj]) / (2.0 * g.spacing[j]);
    }
    out[idx] = G;
  }
  return out;
}

std::vector<double> posthoc_viscous_integral(const Trajectory& traj, const PhysParams& params) {
  std::vector<double> out;
  if (traj.snapshots.empty()) return out;
  auto rate = [&](const ConservedState& s) {
    if (params.epsilon == 0.0) return 0.0;
    const auto G = cell_velocity_gradients(s, params.eos.rho_bar);
    return params.epsilon * s.grid.cell_volume() *
           deterministic_sum(G.size(), [&](std::size_t i) { return dissipation_density(G[i], params, s.grid.dim); });
  };
  double prev = rate(traj.snapshots[0]);
  double acc = 0.0;
  out.push_back(0.0);
  for (std::size_t n = 1; n < traj.snapshots.size(); ++n) {
    const double cur = rate(traj.snapshots[n]);
    acc += 0.5 * (traj.snapshots[n].time - traj.snapshots[n - 1].time) * (prev + cur);
    out.push_back(acc);
    prev = cur;
  }
  return out;
}

}  // namespace vvl
