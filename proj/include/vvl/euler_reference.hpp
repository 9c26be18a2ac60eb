#pragma once
// Strong solutions [r, U] of the damped Euler system: closed-form
// families and an inviscid fine-grid reference truncated at the first sign of
// gradient blow-up.

#include <array>
#include <numbers>
#include <string>
#include <vector>

#include "vvl/fields.hpp"
#include "vvl/ns_solver.hpp"

namespace vvl {

enum class StrongKind { exact_uniform_damped, exact_rest, fine_grid_reference };

std::string to_string(StrongKind kind);
StrongKind strong_kind_from_string(const std::string& s);

struct ReferenceThresholds {
  // Largest tolerated growth max|grad q(t)| / max|grad q(0)| over q in
  // {rho, u_1..u_N} (fields whose initial gradient vanishes are skipped).
  double blowup = 2.0;
  // Vacuum when min rho < vacuum_fraction * scale, scale = rho_bar (or the
  // initial minimum density when rho_bar == 0).
  double vacuum_fraction = 1e-6;
  // Initial data counts as under-resolved when h max|grad q| / osc(q)
  // exceeds this (pi/8 is a sine sampled with 8 cells per wavelength).
  double resolution = std::numbers::pi / 8.0;
};

// Sup-norm gradient records at the snapshot instants of the reference.
struct GradientRecord {
  std::vector<double> times;
  std::vector<double> grad_u;        // max_{i,j} |d_j U_i|
  std::vector<double> grad_enthalpy; // max_j |d_j P'(r)|

  double sup_grad_u() const;
  double sup_grad_enthalpy() const;
};

struct StrongSolution {
  StrongKind kind = StrongKind::exact_rest;
  EosParams eos;
  double a = 0.0;
  Grid grid;                      // grid the solution lives on
  std::array<double, 3> u0{0.0, 0.0, 0.0};  // exact_uniform_damped only
  Trajectory reference;           // fine_grid_reference only, truncated to the lifespan
  double t_end = 0.0;
  double lifespan = 0.0;           // first time an indicator fired, else t_end
  bool blew_up = false;           // lifespan ended before t_end
  std::string stop_reason;        // "", "gradient_blowup" or "vacuum"
  double max_growth = 1.0;        // largest gradient growth ratio seen
  std::size_t refinement = 1;     // fine / study resolution ratio, for the record
  ReferenceThresholds thresholds;
  GradientRecord gradients;

  // The solution at time t on `coarse` (block-averaged for the fine-grid
  // reference, whose snapshot instants must contain t).
  ConservedState state_at(double t, const Grid& coarse) const;
  std::vector<double> snapshot_times() const;
};

// rho = rho_bar, m = rho_bar u0 exp(-a t). Needs an all-periodic grid.
ConservedState exact_uniform_damped(const Grid& grid, double rho_bar, const std::array<double, 3>& u0, double a, double t);
// Time derivative of exact_uniform_damped: (0, -a rho_bar u0 exp(-a t)).
ConservedState exact_uniform_damped_rate(const Grid& grid, double rho_bar, const std::array<double, 3>& u0, double a,
                                         double t);

// Max-norm residual of d_t U + div F(U) + (0, a m) with F the Euler flux,
// given the state and its time derivative on the same grid. Spatial
// derivatives are second-order central differences with the grid's boundary
// ghost rules.
double euler_residual(const ConservedState& state, const ConservedState& rate, const EosParams& eos, double a);

StrongSolution make_exact_uniform_damped(const Grid& grid, const EosParams& eos, const std::array<double, 3>& u0,
                                         double a, double t_end);
StrongSolution make_exact_rest(const Grid& grid, const EosParams& eos, double a, double t_end);

// Max over fields q of h max|grad q| / osc(q) (central differences).
double resolution_indicator(const ConservedState& state, double rho_bar);

// Componentwise max |grad u| and max |grad P'(rho)| of a state.
std::pair<double, double> gradient_norms(const ConservedState& state, const EosParams& eos);

// Inviscid run of `init` (already on the fine grid). Throws ConfigError when
// the initial data are under-resolved.
StrongSolution run_reference(const ConservedState& init, const EosParams& eos, double a, const SchemeConfig& scheme,
                             double t_end, double snapshot_every, const ReferenceThresholds& thresholds = {},
                             Backend backend = Backend::parallel);

}  // namespace vvl
