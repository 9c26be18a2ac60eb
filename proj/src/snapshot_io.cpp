#include "vvl/snapshot_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "vvl/errors.hpp"

namespace vvl {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("cannot parse number '" + s + "'");
  return v;
}

namespace {

void put_le(std::ostream& os, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xffu);
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ConservedState& s, const EosParams& eos, double damping) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  std::ostringstream header;
  header << "VLFS1 " << s.grid.dim;
  for (int d = 0; d < s.grid.dim; ++d) header << ' ' << s.grid.cells[d];
  header << ' ' << format_double(s.time) << ' ' << format_double(eos.gamma) << ' ' << format_double(eos.A) << ' '
         << format_double(damping) << ' ' << format_double(eos.rho_bar) << '\n';
  os << header.str();
  for (double v : s.rho) put_le(os, v);
  for (int d = 0; d < s.grid.dim; ++d)
    for (double v : s.mom[d]) put_le(os, v);
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

Snapshot read_snapshot(const std::filesystem::path& path, const Grid* layout) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(is, line)) throw IoError("'" + path.string() + "': missing header");
  std::istringstream hs(line);
  std::string magic;
  int dim = 0;
  hs >> magic >> dim;
  if (magic != "VLFS1") throw IoError("'" + path.string() + "': not a VLFS1 file");
  if (dim < 1 || dim > 3) throw IoError("'" + path.string() + "': bad dimension");
  std::array<int, 3> cells{1, 1, 1};
  for (int d = 0; d < dim; ++d) hs >> cells[d];
  std::string t_s, g_s, a_s, damp_s, rb_s;
  hs >> t_s >> g_s >> a_s >> damp_s >> rb_s;
  if (!hs) throw IoError("'" + path.string() + "': truncated header");

  Snapshot snap;
  snap.eos.gamma = parse_double(g_s);
  snap.eos.A = parse_double(a_s);
  snap.eos.rho_bar = parse_double(rb_s);
  snap.damping = parse_double(damp_s);

  Grid grid;
  if (layout) {
    if (layout->dim != dim) throw IoError("'" + path.string() + "': dimension does not match layout");
    for (int d = 0; d < dim; ++d)
      if (layout->cells[d] != cells[d]) throw IoError("'" + path.string() + "': cell counts do not match layout");
    grid = *layout;
  } else {
    DomainSpec spec;
    spec.dim = dim;
    spec.cells = cells;
    grid = make_grid(spec);
  }
  snap.state = ConservedState(grid);
  snap.state.time = parse_double(t_s);

  const std::size_t n = grid.cell_count();
  const std::size_t count = n * (1 + dim);
  std::vector<unsigned char> raw(count * 8);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size()) throw IoError("'" + path.string() + "': truncated data");
  for (std::size_t i = 0; i < n; ++i) snap.state.rho[i] = get_le(&raw[8 * i]);
  for (int d = 0; d < dim; ++d)
    for (std::size_t i = 0; i < n; ++i) snap.state.mom[d][i] = get_le(&raw[8 * (n * (1 + d) + i)]);
  return snap;
}

}  // namespace vvl
