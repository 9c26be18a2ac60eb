#pragma once
// Ghost-padded field storage and the per-stage solver kernels.
//
// Two implementations share the pointwise formulas in this header:
// `serial::` recomputes both faces of every cell in a single loop nest and is
// the reference; `parallel::` computes each face flux once into a buffer and
// updates cells in an OpenMP loop. The arithmetic per face and per cell is
// identical, so the two agree bit for bit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vvl/grid.hpp"
#include "vvl/ns_solver.hpp"
#include "vvl/thermo.hpp"

namespace vvl::kernels {

constexpr int kGhost = 2;

struct PaddedLayout {
  int dim = 1;
  std::array<int, 3> n{1, 1, 1};       // interior cells
  std::array<int, 3> ng{0, 0, 0};      // ghost layers per side
  std::array<int, 3> padded{1, 1, 1};
  std::array<std::ptrdiff_t, 3> stride{1, 0, 0};
  std::size_t total = 1;

  explicit PaddedLayout(const Grid& g = Grid{});

  // Padded index of interior coordinates (may be negative / >= n for ghosts).
  std::size_t at(int i, int j = 0, int k = 0) const {
    return static_cast<std::size_t>((i + ng[0]) + padded[0] * (static_cast<std::ptrdiff_t>(j + ng[1]) +
                                                               static_cast<std::ptrdiff_t>(padded[1]) * (k + ng[2])));
  }
};

struct PaddedFields {
  PaddedLayout layout;
  std::vector<double> rho;
  std::array<std::vector<double>, 3> m;

  PaddedFields() = default;
  explicit PaddedFields(const PaddedLayout& l);
};

void load_interior(const ConservedState& state, PaddedFields& out);
void store_interior(const PaddedFields& in, ConservedState& state);
// Fills every ghost cell (corners included) from the boundary tags.
void fill_ghosts(PaddedFields& f, const Grid& grid, double rho_bar);

// Index of the first interior cell whose density is not positive and finite,
// or -1. Grid (unpadded) index.
std::ptrdiff_t first_inadmissible(const PaddedFields& f, const Grid& grid);

// ---------------------------------------------------------------------------
// Pointwise formulas shared by both implementations.

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

struct FaceStates {
  double rho_l, rho_r;
  std::array<double, 3> u_l, u_r;
};

// Reconstructs (rho, u) on both sides of the face between padded cells c and
// c + s (axis stride s).
inline FaceStates reconstruct(const PaddedFields& f, std::size_t c, std::ptrdiff_t s, int dim, Reconstruction rec) {
  const std::size_t l2 = c - s, l1 = c, r1 = c + s, r2 = c + 2 * s;
  FaceStates fs{};
  const double rl2 = f.rho[l2], rl1 = f.rho[l1], rr1 = f.rho[r1], rr2 = f.rho[r2];
  if (rec == Reconstruction::first_order) {
    fs.rho_l = rl1;
    fs.rho_r = rr1;
    for (int k = 0; k < dim; ++k) {
      fs.u_l[k] = f.m[k][l1] / rl1;
      fs.u_r[k] = f.m[k][r1] / rr1;
    }
    return fs;
  }
  fs.rho_l = rl1 + 0.5 * minmod(rl1 - rl2, rr1 - rl1);
  fs.rho_r = rr1 - 0.5 * minmod(rr1 - rl1, rr2 - rr1);
  for (int k = 0; k < dim; ++k) {
    const double ul2 = f.m[k][l2] / rl2, ul1 = f.m[k][l1] / rl1;
    const double ur1 = f.m[k][r1] / rr1, ur2 = f.m[k][r2] / rr2;
    fs.u_l[k] = ul1 + 0.5 * minmod(ul1 - ul2, ur1 - ul1);
    fs.u_r[k] = ur1 - 0.5 * minmod(ur1 - ul1, ur2 - ur1);
  }
  return fs;
}

// Rusanov flux from reconstructed primitive states; no argument checking.
inline Flux rusanov(const FaceStates& fs, int axis, int dim, const EosParams& eos) {
  const double pl = eos.A * std::pow(fs.rho_l, eos.gamma);
  const double pr = eos.A * std::pow(fs.rho_r, eos.gamma);
  const double cl = std::sqrt(eos.gamma * pl / fs.rho_l);
  const double cr = std::sqrt(eos.gamma * pr / fs.rho_r);
  const double unl = fs.u_l[axis], unr = fs.u_r[axis];
  const double s = std::max(std::abs(unl) + cl, std::abs(unr) + cr);
  const double mnl = fs.rho_l * unl, mnr = fs.rho_r * unr;
  Flux F;
  F.rho = 0.5 * (mnl + mnr) - 0.5 * s * (fs.rho_r - fs.rho_l);
  for (int k = 0; k < dim; ++k) {
    const double mkl = fs.rho_l * fs.u_l[k], mkr = fs.rho_r * fs.u_r[k];
    double fl = mkl * unl, fr = mkr * unr;
    if (k == axis) {
      fl += pl;
      fr += pr;
    }
    F.m[k] = 0.5 * (fl + fr) - 0.5 * s * (mkr - mkl);
  }
  return F;
}

// Velocity gradient at the face between padded cells c and c + s_axis.
// `u` holds padded velocity components.
inline Tensor face_gradient(const std::array<std::vector<double>, 3>& u, const PaddedLayout& L,
                            const std::array<double, 3>& h, std::size_t c, int axis) {
  Tensor G{};
  const std::ptrdiff_t sa = L.stride[axis];
  for (int e = 0; e < L.dim; ++e) {
    if (e == axis) {
      for (int k = 0; k < L.dim; ++k) G[k][e] = (u[k][c + sa] - u[k][c]) / h[e];
    } else {
      const std::ptrdiff_t se = L.stride[e];
      for (int k = 0; k < L.dim; ++k)
        G[k][e] = (u[k][c + se] + u[k][c + sa + se] - u[k][c - se] - u[k][c + sa - se]) / (4.0 * h[e]);
    }
  }
  return G;
}

// ---------------------------------------------------------------------------

struct StageArgs {
  const Grid* grid;
  const EosParams* eos;
  Reconstruction reconstruction;
  double dt;
};

struct ViscousArgs {
  const Grid* grid;
  const PhysParams* params;
  double dt;
};

struct ViscousResult {
  double dissipation = 0.0;
  double min_face_density = 0.0;
};

// Face buffers reused across calls by the parallel kernels.
struct Workspace {
  std::array<std::vector<Flux>, 3> flux;
  std::array<std::vector<std::array<double, 3>>, 3> viscous_flux;
  std::array<std::vector<double>, 3> u;
  std::vector<double> cell_values;
};

namespace serial {
// out(interior) = in + dt L(in); `in` must have ghosts filled.
void convective_stage(const PaddedFields& in, PaddedFields& out, const StageArgs& args);
// Updates the momentum of `f` (ghosts filled) in place.
ViscousResult viscous_update(PaddedFields& f, const ViscousArgs& args);
}  // namespace serial

namespace parallel {
void convective_stage(const PaddedFields& in, PaddedFields& out, const StageArgs& args, Workspace& ws);
ViscousResult viscous_update(PaddedFields& f, const ViscousArgs& args, Workspace& ws);
}  // namespace parallel

}  // namespace vvl::kernels
