#pragma once
// VLFS1 field snapshots.
//
// Layout: one ASCII header line
//
//     VLFS1 dim nx [ny [nz]] time gamma A a rho_bar\n
//
// followed by little-endian IEEE-754 binary64 values: the density block, then
// one block per momentum component. Within a block cells are ordered with x
// fastest, then y, then z (row-major over (z, y, x)). Header reals are
// written in shortest round-trip form, so write/read is bit-exact.

#include <filesystem>
#include <string>

#include "vvl/fields.hpp"
#include "vvl/thermo.hpp"

namespace vvl {

struct Snapshot {
  ConservedState state;
  EosParams eos;
  double damping = 0.0;
};

void write_snapshot(const std::filesystem::path& path, const ConservedState& state, const EosParams& eos, double damping);

// The header does not record box extents or boundary tags. When `layout`
// is given its cell counts must match the file and its geometry is
// attached to the state; otherwise a unit box with periodic faces is used.
Snapshot read_snapshot(const std::filesystem::path& path, const Grid* layout = nullptr);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace vvl
