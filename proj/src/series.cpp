#include "vvl/series.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "vvl/errors.hpp"
#include "vvl/snapshot_io.hpp"

namespace vvl {

namespace {
constexpr const char* kHeader = "t,E,damping_int,viscous_int,rel_energy";

std::string cell(double v) { return std::isnan(v) ? std::string("nan") : format_double(v); }
}  // namespace

void write_series_csv(const std::filesystem::path& path, const FunctionalSeries& s) {
  const std::size_t n = s.times.size();
  if (s.energy.size() != n || s.damping_integral.size() != n || s.viscous_integral.size() != n ||
      (!s.relative_energy.empty() && s.relative_energy.size() != n))
    throw IoError("'" + path.string() + "': ragged functional series");
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << kHeader << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    os << cell(s.times[i]) << ',' << cell(s.energy[i]) << ',' << cell(s.damping_integral[i]) << ','
       << cell(s.viscous_integral[i]) << ',' << (s.relative_energy.empty() ? std::string("nan") : cell(s.relative_energy[i]))
       << '\n';
  }
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

FunctionalSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(is, line) || line != kHeader) throw IoError("'" + path.string() + "': unexpected CSV header");
  FunctionalSeries s;
  bool any_rel = false;
  std::vector<double> rel;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[5];
    for (int k = 0; k < 5; ++k)
      if (!std::getline(ls, f[k], ','))
        throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": expected 5 columns");
    auto num = [&](const std::string& v) {
      if (v == "nan") return std::nan("");
      try {
        return parse_double(v);
      } catch (const IoError& e) {
        throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": " + e.what());
      }
    };
    s.times.push_back(num(f[0]));
    s.energy.push_back(num(f[1]));
    s.damping_integral.push_back(num(f[2]));
    s.viscous_integral.push_back(num(f[3]));
    const double r = num(f[4]);
    any_rel = any_rel || !std::isnan(r);
    rel.push_back(r);
  }
  if (any_rel) s.relative_energy = std::move(rel);
  return s;
}

}  // namespace vvl
