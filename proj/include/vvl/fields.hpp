#pragma once
// Cell-averaged density/momentum fields and the reductions used by the
// a priori bounds.

#include <array>
#include <cstddef>
#include <vector>

#include "vvl/grid.hpp"
#include "vvl/thermo.hpp"

namespace vvl {

// Density and momentum of a single cell.
struct CellState {
  double rho = 0.0;
  std::array<double, 3> m{0.0, 0.0, 0.0};
};

struct ConservedState {
  Grid grid;
  std::vector<double> rho;
  std::array<std::vector<double>, 3> mom;  // only the first grid.dim are used
  double time = 0.0;

  ConservedState() = default;
  // Uniform state (rho0, m0) on `grid`.
  explicit ConservedState(const Grid& g, double rho0 = 0.0, std::array<double, 3> m0 = {0.0, 0.0, 0.0});

  std::size_t size() const { return rho.size(); }
  CellState cell(std::size_t idx) const;
  void set_cell(std::size_t idx, const CellState& c);

  bool operator==(const ConservedState& o) const = default;
};

// Throws PositivityError naming the first cell with rho <= 0 or a
// non-finite field value.
void check_admissible(const ConservedState& state);

// Embeds `state` into the larger grid `grid_large` (same spacing, origin
// offset an integer number of cells). New cells carry (rho_bar, 0).
ConservedState extend_far_field(const ConservedState& state, const Grid& grid_large, double rho_bar);

struct NormReport {
  double rho_ess_l2 = 0.0;      // ||[rho - rho_bar]_ess||_{L^2}
  double rho_res_lgamma = 0.0;  // ||[rho - rho_bar]_res||_{L^gamma}
  double m_ess_l2 = 0.0;        // ||[m]_ess||_{L^2}
  double m_res_lq = 0.0;        // ||[m]_res||_{L^{2 gamma/(gamma+1)}}
  double sqrt_rho_u_l2 = 0.0;   // ||sqrt(rho) u||_{L^2}
};

NormReport decomposed_norms(const ConservedState& state, const EosParams& eos, const CutoffProfile& profile);

// Integral of rho - rho_bar over the grid.
double total_mass_deviation(const ConservedState& state, const EosParams& eos);

// Conservative block averaging of a state on refine(coarse, f) onto `coarse`.
ConservedState restrict_to(const ConservedState& fine, const Grid& coarse);

}  // namespace vvl
