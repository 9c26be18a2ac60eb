#include "vvl/fields.hpp"

#include <cmath>

#include "vvl/errors.hpp"
#include "vvl/summation.hpp"

namespace vvl {

ConservedState::ConservedState(const Grid& g, double rho0, std::array<double, 3> m0) : grid(g) {
  const std::size_t n = g.cell_count();
  rho.assign(n, rho0);
  for (int d = 0; d < 3; ++d) mom[d].assign(d < g.dim ? n : 0, d < g.dim ? m0[d] : 0.0);
}

CellState ConservedState::cell(std::size_t idx) const {
  CellState c;
  c.rho = rho[idx];
  for (int d = 0; d < grid.dim; ++d) c.m[d] = mom[d][idx];
  return c;
}

void ConservedState::set_cell(std::size_t idx, const CellState& c) {
  rho[idx] = c.rho;
  for (int d = 0; d < grid.dim; ++d) mom[d][idx] = c.m[d];
}

void check_admissible(const ConservedState& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s.rho[i] > 0.0) || !std::isfinite(s.rho[i])) throw PositivityError("non-positive or non-finite density", i);
    for (int d = 0; d < s.grid.dim; ++d)
      if (!std::isfinite(s.mom[d][i])) throw PositivityError("non-finite momentum", i);
  }
}

ConservedState extend_far_field(const ConservedState& state, const Grid& large, double rho_bar) {
  const Grid& small = state.grid;
  if (large.dim != small.dim) throw ConfigError("extend_far_field: dimension mismatch");
  std::array<int, 3> offset{0, 0, 0};
  for (int d = 0; d < small.dim; ++d) {
    if (std::abs(large.spacing[d] - small.spacing[d]) > 1e-12 * small.spacing[d])
      throw ConfigError("extend_far_field: grids have different spacing");
    const double shift = (small.origin[d] - large.origin[d]) / small.spacing[d];
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) > 1e-9) throw ConfigError("extend_far_field: grids are misaligned");
    offset[d] = static_cast<int>(rounded);
    if (offset[d] < 0 || offset[d] + small.cells[d] > large.cells[d])
      throw ConfigError("extend_far_field: large grid does not contain the state's grid");
  }
  ConservedState out(large, rho_bar);
  out.time = state.time;
  for (std::size_t idx = 0; idx < state.size(); ++idx) {
    const auto c = small.coords(idx);
    const std::size_t target = large.index(c[0] + offset[0], c[1] + offset[1], c[2] + offset[2]);
    out.set_cell(target, state.cell(idx));
  }
  return out;
}

NormReport decomposed_norms(const ConservedState& s, const EosParams& eos, const CutoffProfile& profile) {
  const double vol = s.grid.cell_volume();
  const int dim = s.grid.dim;
  const double q = 2.0 * eos.gamma / (eos.gamma + 1.0);
  auto mom_norm = [&](std::size_t i) {
    double m2 = 0.0;
    for (int d = 0; d < dim; ++d) m2 += s.mom[d][i] * s.mom[d][i];
    return m2;
  };
  NormReport r;
  const std::size_t n = s.size();
  r.rho_ess_l2 = std::sqrt(vol * deterministic_sum(n, [&](std::size_t i) {
    const double e = ess_res_split(s.rho[i] - eos.rho_bar, s.rho[i], profile).ess;
    return e * e;
  }));
  r.rho_res_lgamma = std::pow(vol * deterministic_sum(n, [&](std::size_t i) {
    const double e = ess_res_split(s.rho[i] - eos.rho_bar, s.rho[i], profile).res;
    return std::pow(std::abs(e), eos.gamma);
  }), 1.0 / eos.gamma);
  r.m_ess_l2 = std::sqrt(vol * deterministic_sum(n, [&](std::size_t i) {
    const double chi = cutoff_chi(s.rho[i], profile);
    return chi * chi * mom_norm(i);
  }));
  r.m_res_lq = std::pow(vol * deterministic_sum(n, [&](std::size_t i) {
    const double w = 1.0 - cutoff_chi(s.rho[i], profile);
    return std::pow(w * std::sqrt(mom_norm(i)), q);
  }), 1.0 / q);
  for (std::size_t i = 0; i < n; ++i)
    if (s.rho[i] == 0.0 && mom_norm(i) != 0.0) throw DomainError("vacuum cell carries momentum");
  r.sqrt_rho_u_l2 = std::sqrt(vol * deterministic_sum(n, [&](std::size_t i) {
    return s.rho[i] == 0.0 ? 0.0 : mom_norm(i) / s.rho[i];
  }));
  return r;
}

double total_mass_deviation(const ConservedState& s, const EosParams& eos) {
  return s.grid.cell_volume() * deterministic_sum(s.size(), [&](std::size_t i) { return s.rho[i] - eos.rho_bar; });
}

ConservedState restrict_to(const ConservedState& fine, const Grid& coarse) {
  const Grid& fg = fine.grid;
  if (fg.dim != coarse.dim) throw ConfigError("restrict_to: dimension mismatch");
  std::array<int, 3> f{1, 1, 1};
  for (int d = 0; d < fg.dim; ++d) {
    if (fg.cells[d] % coarse.cells[d] != 0) throw ConfigError("restrict_to: fine grid is not a refinement of the coarse grid");
    f[d] = fg.cells[d] / coarse.cells[d];
    if (std::abs(fg.extent[d] - coarse.extent[d]) > 1e-12 * coarse.extent[d] ||
        std::abs(fg.origin[d] - coarse.origin[d]) > 1e-12 * std::max(1.0, coarse.extent[d]))
      throw ConfigError("restrict_to: grids cover different boxes");
  }
  ConservedState out(coarse);
  out.time = fine.time;
  const double inv = 1.0 / (static_cast<double>(f[0]) * f[1] * f[2]);
  const std::size_t n = coarse.cell_count();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(n); ++ci) {
    const auto c = coarse.coords(static_cast<std::size_t>(ci));
    std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k < f[2]; ++k)
      for (int j = 0; j < f[1]; ++j)
        for (int i = 0; i < f[0]; ++i) {
          const std::size_t fi = fg.index(c[0] * f[0] + i, c[1] * f[1] + j, c[2] * f[2] + k);
          acc[0] += fine.rho[fi];
          for (int d = 0; d < fg.dim; ++d) acc[1 + d] += fine.mom[d][fi];
        }
    out.rho[ci] = acc[0] * inv;
    for (int d = 0; d < fg.dim; ++d) out.mom[d][ci] = acc[1 + d] * inv;
  }
  return out;
}

}  // namespace vvl
