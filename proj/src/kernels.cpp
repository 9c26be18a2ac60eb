#include "vvl/kernels.hpp"

#include <limits>

#include "vvl/summation.hpp"

namespace vvl::kernels {

PaddedLayout::PaddedLayout(const Grid& g) : dim(g.dim) {
  for (int d = 0; d < 3; ++d) {
    n[d] = g.cells[d];
    ng[d] = d < g.dim ? kGhost : 0;
    padded[d] = n[d] + 2 * ng[d];
  }
  stride = {1, padded[0], static_cast<std::ptrdiff_t>(padded[0]) * padded[1]};
  for (int d = g.dim; d < 3; ++d) stride[d] = 0;
  total = static_cast<std::size_t>(padded[0]) * padded[1] * padded[2];
}

PaddedFields::PaddedFields(const PaddedLayout& l) : layout(l), rho(l.total, 0.0) {
  for (int d = 0; d < 3; ++d) m[d].assign(d < l.dim ? l.total : 0, 0.0);
}

void load_interior(const ConservedState& s, PaddedFields& out) {
  const PaddedLayout& L = out.layout;
  const Grid& g = s.grid;
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i) {
        const std::size_t src = g.index(i, j, k), dst = L.at(i, j, k);
        out.rho[dst] = s.rho[src];
        for (int d = 0; d < L.dim; ++d) out.m[d][dst] = s.mom[d][src];
      }
}

void store_interior(const PaddedFields& in, ConservedState& s) {
  const PaddedLayout& L = in.layout;
  const Grid& g = s.grid;
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i) {
        const std::size_t dst = g.index(i, j, k), src = L.at(i, j, k);
        s.rho[dst] = in.rho[src];
        for (int d = 0; d < L.dim; ++d) s.mom[d][dst] = in.m[d][src];
      }
}

void fill_ghosts(PaddedFields& f, const Grid& grid, double rho_bar) {
  const PaddedLayout& L = f.layout;
  for (int a = 0; a < L.dim; ++a) {
    // other two axes, over their full padded range
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      const BoundaryTag tag = grid.faces[face_index(a, side)];
      for (int g = 1; g <= L.ng[a]; ++g) {
        const int ghost = side == 0 ? -g : L.n[a] - 1 + g;
        int src = 0;
        if (tag == BoundaryTag::periodic) {
          src = ((ghost % L.n[a]) + L.n[a]) % L.n[a];
        } else {
          const int inner = std::min(g - 1, L.n[a] - 1);
          src = side == 0 ? inner : L.n[a] - 1 - inner;
        }
        for (int q = -L.ng[c]; q < L.n[c] + L.ng[c]; ++q)
          for (int p = -L.ng[b]; p < L.n[b] + L.ng[b]; ++p) {
            std::array<int, 3> gi{}, si{};
            gi[a] = ghost;
            si[a] = src;
            gi[b] = si[b] = p;
            gi[c] = si[c] = q;
            const std::size_t gd = L.at(gi[0], gi[1], gi[2]);
            const std::size_t sd = L.at(si[0], si[1], si[2]);
            switch (tag) {
              case BoundaryTag::periodic:
                f.rho[gd] = f.rho[sd];
                for (int d = 0; d < L.dim; ++d) f.m[d][gd] = f.m[d][sd];
                break;
              case BoundaryTag::slip:
                f.rho[gd] = f.rho[sd];
                for (int d = 0; d < L.dim; ++d) f.m[d][gd] = d == a ? -f.m[d][sd] : f.m[d][sd];
                break;
              case BoundaryTag::noslip:
                f.rho[gd] = f.rho[sd];
                for (int d = 0; d < L.dim; ++d) f.m[d][gd] = -f.m[d][sd];
                break;
              case BoundaryTag::farfield:
                f.rho[gd] = rho_bar;
                for (int d = 0; d < L.dim; ++d) f.m[d][gd] = 0.0;
                break;
            }
          }
      }
    }
  }
}

std::ptrdiff_t first_inadmissible(const PaddedFields& f, const Grid& grid) {
  const PaddedLayout& L = f.layout;
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i) {
        const std::size_t c = L.at(i, j, k);
        bool ok = f.rho[c] > 0.0 && std::isfinite(f.rho[c]);
        for (int d = 0; d < L.dim; ++d) ok = ok && std::isfinite(f.m[d][c]);
        if (!ok) return static_cast<std::ptrdiff_t>(grid.index(i, j, k));
      }
  return -1;
}

namespace {

// Cell update shared by both backends: out = in - dt sum_a (F_hi - F_lo) / h_a.
inline void apply_divergence(const PaddedFields& in, PaddedFields& out, std::size_t c, const Flux* lo, const Flux* hi,
                             const std::array<double, 3>& h, int dim, double dt) {
  double dr = 0.0;
  std::array<double, 3> dm{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    dr += (hi[a].rho - lo[a].rho) / h[a];
    for (int k = 0; k < dim; ++k) dm[k] += (hi[a].m[k] - lo[a].m[k]) / h[a];
  }
  out.rho[c] = in.rho[c] - dt * dr;
  for (int k = 0; k < dim; ++k) out.m[k][c] = in.m[k][c] - dt * dm[k];
}

// Viscous face flux eps S(G)[k][a] for the face between c and c + s_a.
inline std::array<double, 3> viscous_face(const std::array<std::vector<double>, 3>& u, const PaddedLayout& L,
                                          const std::array<double, 3>& h, std::size_t c, int a,
                                          const PhysParams& p, double* diss) {
  const Tensor G = face_gradient(u, L, h, c, a);
  const Tensor S = stress_tensor(G, p, L.dim);
  *diss = p.epsilon * dissipation_density(G, p, L.dim);
  std::array<double, 3> F{0.0, 0.0, 0.0};
  for (int k = 0; k < L.dim; ++k) F[k] = p.epsilon * S[k][a];
  return F;
}

// Kinetic energy removed from a cell by the momentum change m_old -> m_new.
inline double kinetic_drop(const PaddedFields& f, std::size_t c, const std::array<double, 3>& m_old, int dim) {
  double drop = 0.0;
  for (int k = 0; k < dim; ++k) drop += (m_old[k] - f.m[k][c]) * (m_old[k] + f.m[k][c]);
  return 0.5 * drop / f.rho[c];
}

void fill_velocity(const PaddedFields& f, std::array<std::vector<double>, 3>& u) {
  const PaddedLayout& L = f.layout;
  for (int k = 0; k < L.dim; ++k) {
    u[k].resize(L.total);
    for (std::size_t c = 0; c < L.total; ++c) u[k][c] = f.m[k][c] / f.rho[c];
  }
}

inline std::size_t interior_count(const PaddedLayout& L) {
  return static_cast<std::size_t>(L.n[0]) * L.n[1] * L.n[2];
}

}  // namespace

namespace serial {

void convective_stage(const PaddedFields& in, PaddedFields& out, const StageArgs& args) {
  const PaddedLayout& L = in.layout;
  const std::array<double, 3>& h = args.grid->spacing;
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i) {
        const std::size_t c = L.at(i, j, k);
        Flux lo[3], hi[3];
        for (int a = 0; a < L.dim; ++a) {
          const std::ptrdiff_t s = L.stride[a];
          lo[a] = rusanov(reconstruct(in, c - s, s, L.dim, args.reconstruction), a, L.dim, *args.eos);
          hi[a] = rusanov(reconstruct(in, c, s, L.dim, args.reconstruction), a, L.dim, *args.eos);
        }
        apply_divergence(in, out, c, lo, hi, h, L.dim, args.dt);
      }
}

ViscousResult viscous_update(PaddedFields& f, const ViscousArgs& args) {
  const PaddedLayout& L = f.layout;
  const std::array<double, 3>& h = args.grid->spacing;
  std::array<std::vector<double>, 3> u;
  fill_velocity(f, u);
  std::vector<double> drops(interior_count(L));
  double min_diss = std::numeric_limits<double>::infinity();
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i) {
        const std::size_t c = L.at(i, j, k);
        std::array<double, 3> div{0.0, 0.0, 0.0};
        for (int a = 0; a < L.dim; ++a) {
          double d_lo = 0.0, d_hi = 0.0;
          const auto Flo = viscous_face(u, L, h, c - L.stride[a], a, *args.params, &d_lo);
          const auto Fhi = viscous_face(u, L, h, c, a, *args.params, &d_hi);
          min_diss = std::min(min_diss, std::min(d_lo, d_hi));
          for (int q = 0; q < L.dim; ++q) div[q] += (Fhi[q] - Flo[q]) / h[a];
        }
        std::array<double, 3> m_old{0.0, 0.0, 0.0};
        for (int q = 0; q < L.dim; ++q) {
          m_old[q] = f.m[q][c];
          f.m[q][c] = m_old[q] + args.dt * div[q];
        }
        drops[args.grid->index(i, j, k)] = kinetic_drop(f, c, m_old, L.dim);
      }
  return {args.grid->cell_volume() * pairwise_sum(drops), min_diss};
}

}  // namespace serial

namespace parallel {

void convective_stage(const PaddedFields& in, PaddedFields& out, const StageArgs& args, Workspace& ws) {
  const PaddedLayout& L = in.layout;
  const std::array<double, 3>& h = args.grid->spacing;
  // face[a][c] holds the flux through the face between c and c + s_a
  std::array<std::vector<Flux>, 3>& face = ws.flux;
  for (int a = 0; a < L.dim; ++a) {
    face[a].resize(L.total);
    const std::ptrdiff_t s = L.stride[a];
    std::array<int, 3> lo{0, 0, 0};
    lo[a] = -1;
    std::vector<Flux>& F = face[a];
#pragma omp parallel for collapse(2) schedule(static)
    for (int k = lo[2]; k < L.n[2]; ++k)
      for (int j = lo[1]; j < L.n[1]; ++j)
        for (int i = lo[0]; i < L.n[0]; ++i) {
          const std::size_t c = L.at(i, j, k);
          F[c] = rusanov(reconstruct(in, c, s, L.dim, args.reconstruction), a, L.dim, *args.eos);
        }
  }
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i) {
        const std::size_t c = L.at(i, j, k);
        Flux lo[3], hi[3];
        for (int a = 0; a < L.dim; ++a) {
          lo[a] = face[a][c - L.stride[a]];
          hi[a] = face[a][c];
        }
        apply_divergence(in, out, c, lo, hi, h, L.dim, args.dt);
      }
}

ViscousResult viscous_update(PaddedFields& f, const ViscousArgs& args, Workspace& ws) {
  const PaddedLayout& L = f.layout;
  const std::array<double, 3>& h = args.grid->spacing;
  std::array<std::vector<double>, 3>& u = ws.u;
  std::array<std::vector<std::array<double, 3>>, 3>& face = ws.viscous_flux;
  std::vector<double>& drops = ws.cell_values;
  for (int k = 0; k < L.dim; ++k) {
    u[k].resize(L.total);
    std::vector<double>& uk = u[k];
    const std::vector<double>& mk = f.m[k];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(L.total); ++c) uk[c] = mk[c] / f.rho[c];
  }
  double min_diss = std::numeric_limits<double>::infinity();
  for (int a = 0; a < L.dim; ++a) {
    face[a].resize(L.total);
    std::array<int, 3> lo{0, 0, 0};
    lo[a] = -1;
    std::vector<std::array<double, 3>>& F = face[a];
#pragma omp parallel for collapse(2) schedule(static) reduction(min : min_diss)
    for (int k = lo[2]; k < L.n[2]; ++k)
      for (int j = lo[1]; j < L.n[1]; ++j)
        for (int i = lo[0]; i < L.n[0]; ++i) {
          const std::size_t c = L.at(i, j, k);
          double d = 0.0;
          F[c] = viscous_face(u, L, h, c, a, *args.params, &d);
          min_diss = std::min(min_diss, d);
        }
  }
  drops.resize(interior_count(L));
  const Grid& g = *args.grid;
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i) {
        const std::size_t c = L.at(i, j, k);
        std::array<double, 3> div{0.0, 0.0, 0.0};
        for (int a = 0; a < L.dim; ++a) {
          const auto& Flo = face[a][c - L.stride[a]];
          const auto& Fhi = face[a][c];
          for (int q = 0; q < L.dim; ++q) div[q] += (Fhi[q] - Flo[q]) / h[a];
        }
        std::array<double, 3> m_old{0.0, 0.0, 0.0};
        for (int q = 0; q < L.dim; ++q) {
          m_old[q] = f.m[q][c];
          f.m[q][c] = m_old[q] + args.dt * div[q];
        }
        drops[g.index(i, j, k)] = kinetic_drop(f, c, m_old, L.dim);
      }
  return {g.cell_volume() * pairwise_sum(drops), min_diss};
}

}  // namespace parallel

}  // namespace vvl::kernels
