#pragma once
// Explicit finite-volume integrator for the barotropic Navier-Stokes
// system with linear damping,
//
//     d_t rho + div m = 0
//     d_t m + div(m (x) m / rho) + grad p(rho) = eps div S(grad u) - a m,
//
// on structured grids. One step is the composition
//
//   1. convective/pressure update: Rusanov fluxes, optional MUSCL-minmod
//      reconstruction of (rho, u), forward Euler or two-stage SSP Runge-Kutta;
//   2. viscous update (only when eps > 0): explicit Euler on the momentum with
//      face-centred velocity gradients;
//   3. damping by the exact factor m <- m exp(-a dt).
//
// Substeps 2 and 3 leave the density untouched, so the kinetic energy they
// remove is recorded exactly and the discrete energy budget closes up to the
// dissipation of substep 1.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vvl/fields.hpp"
#include "vvl/series.hpp"
#include "vvl/thermo.hpp"

namespace vvl {

struct PhysParams {
  EosParams eos;
  double a = 0.0;        // damping rate
  double mu = 1.0;       // shear viscosity
  double eta = 0.0;      // bulk viscosity
  double epsilon = 0.0;  // viscosity scale (1/R); zero selects the inviscid path

  // lambda = eta - (2/N) mu.
  double lambda(int dim) const { return eta - 2.0 * mu / dim; }
  void validate() const;
};

enum class Reconstruction { first_order, muscl_minmod };
enum class TimeIntegrator { forward_euler, ssp_rk2 };

std::string to_string(Reconstruction r);
std::string to_string(TimeIntegrator t);
Reconstruction reconstruction_from_string(const std::string& s);
TimeIntegrator time_integrator_from_string(const std::string& s);

struct SchemeConfig {
  double cfl = 0.4;
  Reconstruction reconstruction = Reconstruction::muscl_minmod;
  TimeIntegrator time_integrator = TimeIntegrator::ssp_rk2;
  double viscous_stability_factor = 0.5;

  void validate() const;
};

// Kernel implementation. `serial` is the plain reference loop nest kept for
// testing; `parallel` is the OpenMP kernel used for production runs. Both
// produce bit-identical results.
enum class Backend { serial, parallel };

// grad[i][j] = d u_i / d x_j.
using Tensor = std::array<std::array<double, 3>, 3>;

// S = mu (G + G^T - (2/N) tr G I) + eta tr G I.
Tensor stress_tensor(const Tensor& grad_u, const PhysParams& params, int dim);

// S(G):G written as (mu/2)|G + G^T - (2/N) tr G I|^2 + eta (tr G)^2, which is
// nonnegative in floating point as well.
double dissipation_density(const Tensor& grad_u, const PhysParams& params, int dim);

double contract(const Tensor& a, const Tensor& b, int dim);

struct Flux {
  double rho = 0.0;
  std::array<double, 3> m{0.0, 0.0, 0.0};
};

// Physical flux of (rho, m) along `axis`.
Flux physical_flux(const CellState& w, int axis, int dim, const EosParams& eos);

// Rusanov flux 1/2 (F(L) + F(R)) - s/2 (R - L), s = max(|u_n| + c) over both sides.
// Throws PositivityError for a non-positive density.
Flux convective_flux(const CellState& left, const CellState& right, int axis, int dim, const EosParams& eos);

struct DtBreakdown {
  double acoustic = 0.0;  // cfl * min h / (|u| + c)
  double viscous = 0.0;   // +inf when eps == 0
  double combined = 0.0;  // 1 / (1/acoustic + 1/viscous)
};

DtBreakdown stable_dt_breakdown(const ConservedState& state, const PhysParams& params, const SchemeConfig& scheme);
double stable_dt(const ConservedState& state, const PhysParams& params, const SchemeConfig& scheme);

struct StepDiagnostics {
  double damping_dissipation = 0.0;  // kinetic energy removed by the damping factor
  double viscous_dissipation = 0.0;  // kinetic energy removed by the viscous update
  double min_face_dissipation = 0.0; // min over faces of eps S(G):G
  bool viscous_evaluated = false;
};

// Number of viscous-kernel evaluations since process start.
std::size_t viscous_kernel_invocations();

// Reusable workspace for repeated steps on one grid.
class Integrator {
 public:
  Integrator(const Grid& grid, const PhysParams& params, const SchemeConfig& scheme, Backend backend = Backend::parallel);
  ~Integrator();
  Integrator(Integrator&&) noexcept;
  Integrator& operator=(Integrator&&) noexcept;

  // Advances `state` in place by dt. Throws PositivityError (state is then unspecified).
  void advance(ConservedState& state, double dt, StepDiagnostics& diag);

  const PhysParams& params() const;
  // Viscous-kernel evaluations made by this integrator.
  std::size_t viscous_calls() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ConservedState step(const ConservedState& state, const PhysParams& params, const SchemeConfig& scheme, double dt,
                    Backend backend = Backend::parallel);

struct Trajectory {
  std::vector<ConservedState> snapshots;
  FunctionalSeries series;  // energy and dissipation integrals at snapshot times
  PhysParams params;
  SchemeConfig scheme;
  std::size_t steps = 0;
  std::size_t viscous_kernel_calls = 0;
  double min_dissipation_density = 0.0;  // over all faces and steps
  bool failed = false;
  bool stopped = false;  // halted by the observer
  std::string failure;
};

struct RunOptions {
  Backend backend = Backend::parallel;
  // Called after every accepted step; returning true stops the run after
  // recording the current state as a final snapshot.
  std::function<bool(const ConservedState&)> observer;
};

// Snapshots at t = 0, every `snapshot_every` and at t_end (steps are shortened
// to land on those instants). A positivity failure is recorded in the returned
// trajectory (failed = true) together with everything computed before it.
Trajectory run(const ConservedState& init, const PhysParams& params, const SchemeConfig& scheme, double t_end,
               double snapshot_every, const RunOptions& options = {});

// Snapshot instants used by run().
std::vector<double> snapshot_schedule(double t_end, double snapshot_every);

}  // namespace vvl
