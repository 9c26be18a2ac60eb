#pragma once
// Empirical Young measures over an epsilon ladder, duality pairings,
// truncation and the concentration / dissipation defect estimates.
//
// A family is indexed [level][snapshot]; every state lives on the same
// coarse grid and level L-1 (the smallest epsilon) stands in for the weak
// limit in the defect formulas.

#include <array>
#include <functional>
#include <vector>

#include "vvl/fields.hpp"
#include "vvl/ns_solver.hpp"
#include "vvl/thermo.hpp"

namespace vvl {

struct Atom {
  double drho = 0.0;  // rho - rho_bar
  std::array<double, 3> m{0.0, 0.0, 0.0};
};

struct EmpiricalMeasure {
  std::vector<Atom> atoms;  // equal weights 1/K
  std::size_t cell = 0;
  int dim = 1;
  double rho_bar = 0.0;

  double weight() const { return atoms.empty() ? 0.0 : 1.0 / static_cast<double>(atoms.size()); }
  double total_weight() const;
  Atom barycenter() const;
};

using Family = std::vector<std::vector<ConservedState>>;

// One atom per state in `states` at grid cell `cell`.
EmpiricalMeasure build_measure(const std::vector<const ConservedState*>& states, std::size_t cell, double rho_bar);
// Same over the levels of `family` at snapshot `snap`.
EmpiricalMeasure build_measure(const Family& family, std::size_t snap, std::size_t cell, double rho_bar);

// g(rho, m), rho the absolute density.
using Observable = std::function<double(double rho, const std::array<double, 3>& m)>;

double pair(const EmpiricalMeasure& nu, const Observable& g);
double truncated_pair(const EmpiricalMeasure& nu, const Observable& H, double k);

namespace observables {
Observable density_deviation(double rho_bar);
Observable momentum(int k);
// m_i m_j / rho, vacuum convention.
Observable convective(int i, int j);
Observable pressure_deviation(const EosParams& eos);
Observable energy(const EosParams& eos, int dim);
// |m|^2 / rho.
Observable kinetic_twice(int dim);
}  // namespace observables

// Mean squared distance of the atoms from their barycenter in (rho - rho_bar, m).
double atom_variance(const EmpiricalMeasure& nu);

// Cell-averaged atom variance at each snapshot of `family`.
std::vector<double> atom_variance_series(const Family& family, double rho_bar);

struct DefectEstimate {
  std::vector<double> times;
  std::vector<std::vector<Tensor>> mu_m;  // [snapshot][cell]
  std::vector<double> mu_m_mass;          // sum_cells |mu_m|_F vol
  std::vector<double> mu_c_mass;          // sum_cells |mu_c| vol
  std::vector<double> energy_defect;      // sum_cells E_inf vol
  std::vector<double> sigma_defect;       // sum_cells sigma_inf vol
  std::vector<double> D_raw;              // energy_defect + a int_0^t sigma_defect
  std::vector<double> D;                  // max(D_raw, 0)
  double clamp_magnitude = 0.0;           // max over tau of max(-D_raw, 0)
  double min_sigma = 0.0;                 // smallest per-cell sigma_inf seen (reported, not asserted)
  std::size_t levels = 0;

  // trapezoid integrals from the first snapshot
  std::vector<double> cumulative_mass() const;
  std::vector<double> cumulative_D() const;
  double max_D() const;
};

// Needs >= 3 levels with identical snapshot times on one grid.
DefectEstimate estimate_defects(const Family& family, const EosParams& eos, double a);

struct DominationResult {
  double fitted_C = 0.0;
  bool pass = false;
  std::vector<double> ratio;  // per tau, NaN where 0/0
};

// fitted_C = sup_tau (int_0^tau |mu_m| + |mu_c|) / (int_0^tau D).
DominationResult check_domination(const DefectEstimate& defects);

}  // namespace vvl
