#pragma once
// Axis-aligned structured grids on truncated boxes with per-face tags.

#include <array>
#include <cstddef>
#include <string>

namespace vvl {

enum class BoundaryTag { slip, noslip, periodic, farfield };

// bounded: the box itself is the physical domain (walls are slip walls).
// exterior: the box is the truncation of an unbounded domain; its outer
// faces carry the no-slip / far-field conditions.
enum class DomainKind { bounded, exterior };

std::string to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& s);
std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& s);

// Face index: 2*axis for the low side, 2*axis+1 for the high side.
constexpr int face_index(int axis, int side) { return 2 * axis + side; }

struct DomainSpec {
  int dim = 2;
  std::array<int, 3> cells{1, 1, 1};
  std::array<double, 3> extent{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<BoundaryTag, 6> faces{BoundaryTag::periodic, BoundaryTag::periodic, BoundaryTag::periodic,
                                   BoundaryTag::periodic, BoundaryTag::periodic, BoundaryTag::periodic};
  DomainKind kind = DomainKind::bounded;
};

struct Grid {
  int dim = 1;
  std::array<int, 3> cells{1, 1, 1};
  std::array<double, 3> extent{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<BoundaryTag, 6> faces{};
  DomainKind kind = DomainKind::bounded;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(cells[0]) * cells[1] * cells[2];
  }
  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= spacing[d];
    return v;
  }
  double volume() const { return cell_volume() * static_cast<double>(cell_count()); }
  double min_spacing() const;

  std::size_t index(int i, int j = 0, int k = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells[0]) * (j + static_cast<std::size_t>(cells[1]) * k);
  }
  std::array<int, 3> coords(std::size_t idx) const;
  std::array<double, 3> center(std::size_t idx) const;

  bool all_periodic() const;
  bool same_layout(const Grid& other) const;
  bool operator==(const Grid&) const = default;
};

// Validates counts, extents and boundary tags against the domain kind.
// Unused axes (>= dim) are normalised to one cell of unit extent.
Grid make_grid(const DomainSpec& spec);

// Grid with every axis refined by `factor`, same box and tags.
Grid refine(const Grid& grid, int factor);

}  // namespace vvl
