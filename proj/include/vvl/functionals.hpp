#pragma once
// Energy, energy budget, relative energy, weak-formulation residuals
// and the Gronwall check.

#include <array>
#include <vector>

#include "vvl/euler_reference.hpp"
#include "vvl/fields.hpp"
#include "vvl/ns_solver.hpp"
#include "vvl/series.hpp"
#include "vvl/thermo.hpp"

namespace vvl {

// 1/2 |m - rho U|^2 / rho with the vacuum convention (0 for rho = 0 and
// m = 0; DomainError for rho = 0 with m != 0).
double kinetic_density(double rho, const std::array<double, 3>& m, const std::array<double, 3>& U, int dim);

// 1/2 |m - rho U|^2 / rho + P(rho) - P'(r)(rho - r) - P(r).
// With r = rho_bar and U = 0 this is the energy integrand.
double relative_energy_density(double rho, const std::array<double, 3>& m, double r, const std::array<double, 3>& U,
                               int dim, const EosParams& eos);

// Energy integrand relative to the background state (rho_bar, 0).
double energy_density(double rho, const std::array<double, 3>& m, int dim, const EosParams& eos);

double total_energy(const ConservedState& state, const EosParams& eos);

// E(state | r, U) with r, rU the density and momentum of `ref`.
double relative_energy(const ConservedState& state, const ConservedState& ref, const EosParams& eos);

// r(tau) = E(tau) + damping_integral + viscous_integral - E(0).
std::vector<double> energy_budget_residual(const FunctionalSeries& series);
std::vector<double> energy_budget_residual(const Trajectory& traj, const PhysParams& params);

// phi(t, x) = (1 - s^2)^degree for s < 1, s^2 = ((t - t0)^2 + |x - x0|^2) / radius^2.
// `component` < 0 marks a scalar test function; otherwise the vector test
// function phi e_component.
struct TestFunction {
  double t0 = 0.0;
  std::array<double, 3> x0{0.0, 0.0, 0.0};
  double radius = 0.1;
  int degree = 8;
  int component = -1;

  double value(double t, const std::array<double, 3>& x, int dim) const;
  double dt(double t, const std::array<double, 3>& x, int dim) const;
  std::array<double, 3> grad(double t, const std::array<double, 3>& x, int dim) const;
};

// |LHS - RHS| of the weak continuity equation on [0, tau] with tau the last
// snapshot. Space: midpoint rule, time: trapezoid over snapshots. Throws
// ConfigError when the support leaves (0, T) x box.
double weak_residual_continuity(const Trajectory& traj, const TestFunction& phi);

// Same for the momentum balance, including pressure, eps S(grad u):grad phi
// and the damping term. `phi.component` selects the momentum component.
double weak_residual_momentum(const Trajectory& traj, const TestFunction& phi, const PhysParams& params);

struct GronwallCertificate {
  double kappa = 4.0;
  double rate = 0.0;          // C = kappa (|grad U|_inf + |grad P'(r)|_inf + a)
  double delta_scheme = 0.0;  // consistency allowance added to E(0)
  double min_slack = 0.0;     // min over samples of bound - E
  std::size_t worst_sample = 0;
  bool pass = false;
};

// Checks E(t) <= (E(0) + delta) exp(C t) at every sample.
GronwallCertificate gronwall_certificate(const std::vector<double>& times, const std::vector<double>& rel_energy,
                                         const StrongSolution& ref, double delta_scheme, double kappa = 4.0);
// Same with explicit gradient bounds.
GronwallCertificate gronwall_certificate(const std::vector<double>& times, const std::vector<double>& rel_energy,
                                         double grad_u, double grad_enthalpy, double a, double delta_scheme,
                                         double kappa = 4.0);

// eps int_0^t int S(grad u):grad u by post-hoc quadrature over snapshots
// (cell-centred central differences, trapezoid in time).
std::vector<double> posthoc_viscous_integral(const Trajectory& traj, const PhysParams& params);

// Cell-centred velocity gradients (central differences, boundary ghost
// rules of the grid; rho_bar feeds far-field ghosts). Grid cell order.
std::vector<Tensor> cell_velocity_gradients(const ConservedState& state, double rho_bar);

}  // namespace vvl
