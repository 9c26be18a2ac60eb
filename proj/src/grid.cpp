#include "vvl/grid.hpp"

#include <algorithm>
#include <cmath>

#include "vvl/errors.hpp"

namespace vvl {

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::slip: return "slip";
    case BoundaryTag::noslip: return "noslip";
    case BoundaryTag::periodic: return "periodic";
    case BoundaryTag::farfield: return "farfield";
  }
  return "?";
}

BoundaryTag boundary_tag_from_string(const std::string& s) {
  if (s == "slip") return BoundaryTag::slip;
  if (s == "noslip") return BoundaryTag::noslip;
  if (s == "periodic") return BoundaryTag::periodic;
  if (s == "farfield") return BoundaryTag::farfield;
  throw ConfigError("unknown boundary tag '" + s + "'");
}

std::string to_string(DomainKind kind) { return kind == DomainKind::bounded ? "bounded" : "exterior"; }

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "bounded") return DomainKind::bounded;
  if (s == "exterior") return DomainKind::exterior;
  throw ConfigError("unknown domain kind '" + s + "'");
}

double Grid::min_spacing() const {
  double h = spacing[0];
  for (int d = 1; d < dim; ++d) h = std::min(h, spacing[d]);
  return h;
}

std::array<int, 3> Grid::coords(std::size_t idx) const {
  const std::size_t nx = cells[0], ny = cells[1];
  return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny), static_cast<int>(idx / (nx * ny))};
}

std::array<double, 3> Grid::center(std::size_t idx) const {
  const auto c = coords(idx);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) x[d] = origin[d] + (c[d] + 0.5) * spacing[d];
  return x;
}

bool Grid::all_periodic() const {
  for (int f = 0; f < 2 * dim; ++f)
    if (faces[f] != BoundaryTag::periodic) return false;
  return true;
}

bool Grid::same_layout(const Grid& o) const {
  if (dim != o.dim) return false;
  for (int d = 0; d < dim; ++d) {
    if (cells[d] != o.cells[d]) return false;
    if (std::abs(spacing[d] - o.spacing[d]) > 1e-12 * spacing[d]) return false;
    if (std::abs(origin[d] - o.origin[d]) > 1e-12 * std::max(1.0, extent[d])) return false;
  }
  return true;
}

Grid make_grid(const DomainSpec& spec) {
  if (spec.dim < 1 || spec.dim > 3) throw ConfigError("grid: dimension must be 1, 2 or 3");
  Grid g;
  g.dim = spec.dim;
  g.kind = spec.kind;
  for (int d = 0; d < 3; ++d) {
    if (d < spec.dim) {
      if (spec.cells[d] <= 0) throw ConfigError("grid: zero cells on axis " + std::to_string(d));
      if (!(spec.extent[d] > 0.0)) throw ConfigError("grid: extent must be positive on axis " + std::to_string(d));
      g.cells[d] = spec.cells[d];
      g.extent[d] = spec.extent[d];
      g.origin[d] = spec.origin[d];
      g.spacing[d] = spec.extent[d] / spec.cells[d];
    } else {
      g.cells[d] = 1;
      g.extent[d] = 1.0;
      g.origin[d] = 0.0;
      g.spacing[d] = 1.0;
    }
  }
  for (int f = 0; f < 6; ++f) g.faces[f] = f < 2 * spec.dim ? spec.faces[f] : BoundaryTag::periodic;

  for (int d = 0; d < spec.dim; ++d) {
    const bool lo = g.faces[face_index(d, 0)] == BoundaryTag::periodic;
    const bool hi = g.faces[face_index(d, 1)] == BoundaryTag::periodic;
    if (lo != hi) throw ConfigError("grid: periodic faces must come in opposite pairs (axis " + std::to_string(d) + ")");
  }
  for (int f = 0; f < 2 * spec.dim; ++f) {
    const BoundaryTag t = g.faces[f];
    if (spec.kind == DomainKind::bounded && (t == BoundaryTag::noslip || t == BoundaryTag::farfield))
      throw ConfigError("grid: bounded domains carry slip or periodic faces, got " + to_string(t));
    if (spec.kind == DomainKind::exterior && t == BoundaryTag::slip)
      throw ConfigError("grid: outer faces of an exterior surrogate must be noslip, farfield or periodic");
  }
  return g;
}

Grid refine(const Grid& grid, int factor) {
  if (factor < 1) throw ConfigError("refine: factor must be >= 1");
  Grid g = grid;
  for (int d = 0; d < grid.dim; ++d) {
    g.cells[d] = grid.cells[d] * factor;
    g.spacing[d] = grid.extent[d] / g.cells[d];
  }
  return g;
}

}  // namespace vvl
