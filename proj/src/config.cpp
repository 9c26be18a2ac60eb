// INI configuration for sweeps. Every key is optional; unknown keys are errors.

#include <charconv>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "vvl/errors.hpp"
#include "vvl/harness.hpp"
#include "vvl/snapshot_io.hpp"

namespace vvl {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> k{
      {"domain", {"dim", "cells", "extent", "origin", "faces", "kind"}},
      {"eos", {"A", "gamma", "rho_bar"}},
      {"physics", {"a", "mu", "eta"}},
      {"scheme", {"cfl", "reconstruction", "time_integrator", "viscous_stability_factor"}},
      {"sweep", {"epsilon_ladder", "t_end", "snapshot_every", "seed", "workers", "output_dir", "write_snapshots"}},
      {"initial", {"kind", "amplitude", "velocity", "center", "radius", "wavenumber", "modes"}},
      {"reference", {"kind", "refine", "blowup_threshold", "vacuum_threshold", "resolution_threshold"}},
      {"checks", {"gronwall_kappa"}},
  };
  return k;
}

// line of "key" inside "[section]" in the raw text, 0 if absent
std::map<std::string, int> key_lines(const std::string& text) {
  std::map<std::string, int> out;
  std::istringstream is(text);
  std::string line, section;
  int n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      out[section] = n;
      continue;
    }
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[section + "." + trim(line.substr(0, eq))] = n;
  }
  return out;
}

struct Reader {
  const pt::ptree& tree;
  std::string source;
  std::map<std::string, int> lines;

  std::string where(const std::string& key) const {
    const auto it = lines.find(key);
    if (it == lines.end() || it->second == 0) return source + " (" + key + ")";
    return source + ":" + std::to_string(it->second) + " (" + key + ")";
  }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(where(key) + ": " + msg);
  }
  std::optional<std::string> raw(const std::string& key) const {
    const auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return *v;
  }
  double num(const std::string& key, double def) const {
    const auto v = raw(key);
    if (!v) return def;
    try {
      return parse_double(*v);
    } catch (const IoError&) {
      fail(key, "expected a number, got '" + *v + "'");
    }
  }
  long integer(const std::string& key, long def) const {
    const auto v = raw(key);
    if (!v) return def;
    long out = 0;
    const auto r = std::from_chars(v->data(), v->data() + v->size(), out);
    if (r.ec != std::errc() || r.ptr != v->data() + v->size()) fail(key, "expected an integer, got '" + *v + "'");
    return out;
  }
  std::string str(const std::string& key, const std::string& def) const { return raw(key).value_or(def); }
  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    const auto v = raw(key);
    if (!v) return out;
    std::istringstream is(*v);
    std::string item;
    while (std::getline(is, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) fail(key, "empty list entry");
      out.push_back(item.substr(b, e - b + 1));
    }
    return out;
  }
  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : list(key)) {
      try {
        out.push_back(parse_double(s));
      } catch (const IoError&) {
        fail(key, "expected a number, got '" + s + "'");
      }
    }
    return out;
  }
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

template <class T, std::size_t N>
std::vector<double> head(const std::array<T, N>& a, int n) {
  return std::vector<double>(a.begin(), a.begin() + n);
}

}  // namespace

void SweepConfig::validate() {
  warnings.clear();
  const int N = domain.dim;
  // make_grid carries the geometric checks
  (void)make_grid(domain);
  physics.validate();
  scheme.validate();
  if (domain.kind == DomainKind::exterior && !(physics.eos.rho_bar > 0.0))
    throw ConfigError("rho_bar must be positive on an exterior (unbounded) domain");
  if (physics.eos.gamma <= N / 2.0)
    warnings.push_back("below existence threshold gamma > N/2 (gamma = " + format_double(physics.eos.gamma) +
                       ", N = " + std::to_string(N) + ")");
  if (epsilon_ladder.empty()) throw ConfigError("epsilon ladder is empty");
  for (std::size_t i = 0; i < epsilon_ladder.size(); ++i) {
    if (!(epsilon_ladder[i] >= 0.0)) throw ConfigError("epsilon ladder entries must be >= 0");
    if (i > 0 && !(epsilon_ladder[i] < epsilon_ladder[i - 1])) throw ConfigError("ladder not decreasing");
  }
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(snapshot_every > 0.0)) throw ConfigError("snapshot_every must be positive");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (reference.refine < 1) throw ConfigError("reference refine factor must be >= 1");
  if (reference.kind == StrongKind::fine_grid_reference && reference.refine < 4)
    warnings.push_back("reference refinement below 4x the study grid");
  if (!(gronwall_kappa > 0.0)) throw ConfigError("gronwall_kappa must be positive");
  if (write_snapshots != "all" && write_snapshots != "final" && write_snapshots != "none")
    throw ConfigError("write_snapshots must be all, final or none");
  static const std::vector<std::string> kinds{"vortex", "uniform", "rest", "acoustic", "compression", "random_smooth"};
  if (std::find(kinds.begin(), kinds.end(), initial.kind) == kinds.end())
    throw ConfigError("unknown initial data kind '" + initial.kind + "'");
  if (initial.kind == "vortex") {
    if (N != 2) throw ConfigError("vortex initial data are two-dimensional");
    if (!(physics.eos.rho_bar > 0.0)) throw ConfigError("vortex initial data need rho_bar > 0");
    if (!(initial.radius > 0.0)) throw ConfigError("vortex radius must be positive");
  }
  if (initial.kind == "uniform" || reference.kind == StrongKind::exact_uniform_damped) {
    const Grid g = make_grid(domain);
    if (!g.all_periodic()) throw ConfigError("uniform flow needs periodic faces");
  }
  if (reference.kind == StrongKind::exact_uniform_damped && initial.kind != "uniform")
    throw ConfigError("exact_uniform_damped reference needs uniform initial data");
  if (reference.kind == StrongKind::exact_rest && initial.kind != "rest")
    throw ConfigError("exact_rest reference needs rest initial data");
  if (initial.wavenumber < 1) throw ConfigError("wavenumber must be >= 1");
  if (initial.modes < 1) throw ConfigError("modes must be >= 1");
}

SweepConfig parse_config(const std::string& text, const std::string& source, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  {
    std::istringstream is(text);
    try {
      pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    const auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + ov + "' is not of the form section.key=value");
    tree.put(pt::ptree::path_type(ov.substr(0, eq), '.'), ov.substr(eq + 1));
  }
  Reader r{tree, source, key_lines(text)};
  const auto& known = known_keys();
  for (const auto& [section, sub] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) r.fail(section, "unknown section '" + section + "'");
    if (!sub.data().empty()) r.fail(section, "value outside a section");
    for (const auto& [key, value] : sub)
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        r.fail(section + "." + key, "unknown key");
  }

  SweepConfig c;
  DomainSpec& d = c.domain;
  d.dim = static_cast<int>(r.integer("domain.dim", 2));
  if (d.dim < 1 || d.dim > 3) r.fail("domain.dim", "dimension must be 1, 2 or 3");
  d.cells = {1, 1, 1};
  d.extent = {1.0, 1.0, 1.0};
  d.origin = {0.0, 0.0, 0.0};
  auto fill3 = [&](const std::string& key, auto& arr, auto def) {
    const auto v = r.numbers(key);
    if (v.empty()) {
      for (int i = 0; i < d.dim; ++i) arr[i] = def;
      return;
    }
    if (v.size() == 1)
      for (int i = 0; i < d.dim; ++i) arr[i] = static_cast<std::decay_t<decltype(arr[0])>>(v[0]);
    else if (static_cast<int>(v.size()) == d.dim)
      for (int i = 0; i < d.dim; ++i) arr[i] = static_cast<std::decay_t<decltype(arr[0])>>(v[i]);
    else
      r.fail(key, "expected 1 or " + std::to_string(d.dim) + " values");
  };
  fill3("domain.cells", d.cells, 64);
  for (int i = 0; i < d.dim; ++i) {
    const auto v = r.numbers("domain.cells");
    if (!v.empty() && (v[std::min<std::size_t>(i, v.size() - 1)] != std::floor(v[std::min<std::size_t>(i, v.size() - 1)])))
      r.fail("domain.cells", "cell counts must be integers");
  }
  fill3("domain.extent", d.extent, 1.0);
  fill3("domain.origin", d.origin, 0.0);
  try {
    d.kind = domain_kind_from_string(r.str("domain.kind", "bounded"));
  } catch (const ConfigError& e) {
    r.fail("domain.kind", e.what());
  }
  const auto faces = r.list("domain.faces");
  const BoundaryTag def_tag = d.kind == DomainKind::bounded ? BoundaryTag::slip : BoundaryTag::farfield;
  for (int f = 0; f < 6; ++f) d.faces[f] = f < 2 * d.dim ? def_tag : BoundaryTag::periodic;
  if (!faces.empty()) {
    if (faces.size() != 1 && static_cast<int>(faces.size()) != 2 * d.dim)
      r.fail("domain.faces", "expected 1 or " + std::to_string(2 * d.dim) + " tags");
    for (int f = 0; f < 2 * d.dim; ++f) {
      try {
        d.faces[f] = boundary_tag_from_string(faces.size() == 1 ? faces[0] : faces[f]);
      } catch (const ConfigError& e) {
        r.fail("domain.faces", e.what());
      }
    }
  }

  EosParams& eos = c.physics.eos;
  eos.A = r.num("eos.A", 1.0);
  eos.gamma = r.num("eos.gamma", 1.4);
  eos.rho_bar = r.num("eos.rho_bar", 1.0);
  c.physics.a = r.num("physics.a", 0.5);
  c.physics.mu = r.num("physics.mu", 0.25);
  c.physics.eta = r.num("physics.eta", 0.0);
  c.physics.epsilon = 0.0;

  c.scheme.cfl = r.num("scheme.cfl", 0.4);
  c.scheme.viscous_stability_factor = r.num("scheme.viscous_stability_factor", 0.5);
  try {
    c.scheme.reconstruction = reconstruction_from_string(r.str("scheme.reconstruction", "muscl_minmod"));
  } catch (const ConfigError& e) {
    r.fail("scheme.reconstruction", e.what());
  }
  try {
    c.scheme.time_integrator = time_integrator_from_string(r.str("scheme.time_integrator", "ssp_rk2"));
  } catch (const ConfigError& e) {
    r.fail("scheme.time_integrator", e.what());
  }

  if (r.raw("sweep.epsilon_ladder")) c.epsilon_ladder = r.numbers("sweep.epsilon_ladder");
  c.t_end = r.num("sweep.t_end", 0.5);
  c.snapshot_every = r.num("sweep.snapshot_every", 0.05);
  const long seed = r.integer("sweep.seed", 0);
  if (seed < 0) r.fail("sweep.seed", "seed must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.workers = static_cast<int>(r.integer("sweep.workers", 1));
  c.output_dir = r.str("sweep.output_dir", "vvl_out");
  c.write_snapshots = r.str("sweep.write_snapshots", "all");

  InitialDataSpec& in = c.initial;
  in.kind = r.str("initial.kind", "vortex");
  in.amplitude = r.num("initial.amplitude", in.kind == "vortex" ? 2.0 : 0.1);
  {
    const auto v = r.numbers("initial.velocity");
    if (!v.empty() && static_cast<int>(v.size()) != d.dim) r.fail("initial.velocity", "expected one value per axis");
    for (std::size_t i = 0; i < v.size(); ++i) in.velocity[i] = v[i];
  }
  for (int i = 0; i < d.dim; ++i) in.center[i] = d.origin[i] + 0.5 * d.extent[i];
  {
    const auto v = r.numbers("initial.center");
    if (!v.empty() && static_cast<int>(v.size()) != d.dim) r.fail("initial.center", "expected one value per axis");
    for (std::size_t i = 0; i < v.size(); ++i) in.center[i] = v[i];
  }
  in.radius = r.num("initial.radius", 0.4);
  in.wavenumber = static_cast<int>(r.integer("initial.wavenumber", 1));
  in.modes = static_cast<int>(r.integer("initial.modes", 3));

  try {
    c.reference.kind = strong_kind_from_string(r.str("reference.kind", "fine_grid_reference"));
  } catch (const ConfigError& e) {
    r.fail("reference.kind", e.what());
  }
  c.reference.refine = static_cast<int>(r.integer("reference.refine", 4));
  c.reference.thresholds.blowup = r.num("reference.blowup_threshold", 2.0);
  c.reference.thresholds.vacuum_fraction = r.num("reference.vacuum_threshold", 1e-6);
  c.reference.thresholds.resolution = r.num("reference.resolution_threshold", std::numbers::pi / 8.0);
  c.gronwall_kappa = r.num("checks.gronwall_kappa", 4.0);

  try {
    c.validate();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    // attach a line when the message names a known invariant
    static const std::vector<std::pair<std::string, std::string>> owners{
        {"ladder", "sweep.epsilon_ladder"}, {"rho_bar", "eos.rho_bar"},   {"t_end", "sweep.t_end"},
        {"snapshot_every", "sweep.snapshot_every"}, {"workers", "sweep.workers"}, {"cfl", "scheme.cfl"},
        {"periodic", "domain.faces"},       {"grid:", "domain.cells"},    {"gamma", "eos.gamma"},
        {"vortex", "initial.kind"},         {"uniform", "initial.kind"},  {"damping", "physics.a"},
        {"viscosity mu", "physics.mu"},     {"bulk", "physics.eta"}};
    for (const auto& [needle, key] : owners)
      if (msg.find(needle) != std::string::npos) r.fail(key, msg);
    throw ConfigError(source + ": " + msg);
  }
  return c;
}

SweepConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string(), overrides);
}

std::string config_to_ini(const SweepConfig& c) {
  const DomainSpec& d = c.domain;
  std::ostringstream os;
  std::string faces;
  for (int f = 0; f < 2 * d.dim; ++f) faces += (f ? "," : "") + to_string(d.faces[f]);
  os << "[domain]\n"
     << "dim = " << d.dim << "\n"
     << "cells = " << join(head(d.cells, d.dim)) << "\n"
     << "extent = " << join(head(d.extent, d.dim)) << "\n"
     << "origin = " << join(head(d.origin, d.dim)) << "\n"
     << "faces = " << faces << "\n"
     << "kind = " << to_string(d.kind) << "\n\n"
     << "[eos]\n"
     << "A = " << format_double(c.physics.eos.A) << "\n"
     << "gamma = " << format_double(c.physics.eos.gamma) << "\n"
     << "rho_bar = " << format_double(c.physics.eos.rho_bar) << "\n\n"
     << "[physics]\n"
     << "a = " << format_double(c.physics.a) << "\n"
     << "mu = " << format_double(c.physics.mu) << "\n"
     << "eta = " << format_double(c.physics.eta) << "\n\n"
     << "[scheme]\n"
     << "cfl = " << format_double(c.scheme.cfl) << "\n"
     << "reconstruction = " << to_string(c.scheme.reconstruction) << "\n"
     << "time_integrator = " << to_string(c.scheme.time_integrator) << "\n"
     << "viscous_stability_factor = " << format_double(c.scheme.viscous_stability_factor) << "\n\n"
     << "[sweep]\n"
     << "epsilon_ladder = " << join(c.epsilon_ladder) << "\n"
     << "t_end = " << format_double(c.t_end) << "\n"
     << "snapshot_every = " << format_double(c.snapshot_every) << "\n"
     << "seed = " << c.seed << "\n"
     << "workers = " << c.workers << "\n"
     << "output_dir = " << c.output_dir.string() << "\n"
     << "write_snapshots = " << c.write_snapshots << "\n\n"
     << "[initial]\n"
     << "kind = " << c.initial.kind << "\n"
     << "amplitude = " << format_double(c.initial.amplitude) << "\n"
     << "velocity = " << join(head(c.initial.velocity, d.dim)) << "\n"
     << "center = " << join(head(c.initial.center, d.dim)) << "\n"
     << "radius = " << format_double(c.initial.radius) << "\n"
     << "wavenumber = " << c.initial.wavenumber << "\n"
     << "modes = " << c.initial.modes << "\n\n"
     << "[reference]\n"
     << "kind = " << to_string(c.reference.kind) << "\n"
     << "refine = " << c.reference.refine << "\n"
     << "blowup_threshold = " << format_double(c.reference.thresholds.blowup) << "\n"
     << "vacuum_threshold = " << format_double(c.reference.thresholds.vacuum_fraction) << "\n"
     << "resolution_threshold = " << format_double(c.reference.thresholds.resolution) << "\n\n"
     << "[checks]\n"
     << "gronwall_kappa = " << format_double(c.gronwall_kappa) << "\n";
  return os.str();
}

nlohmann::json config_to_json(const SweepConfig& c) {
  const DomainSpec& d = c.domain;
  nlohmann::json j;
  std::vector<std::string> faces;
  for (int f = 0; f < 2 * d.dim; ++f) faces.push_back(to_string(d.faces[f]));
  j["domain"] = {{"dim", d.dim},
                 {"cells", head(d.cells, d.dim)},
                 {"extent", head(d.extent, d.dim)},
                 {"origin", head(d.origin, d.dim)},
                 {"faces", faces},
                 {"kind", to_string(d.kind)}};
  j["eos"] = {{"a_coefficient", c.physics.eos.A}, {"gamma", c.physics.eos.gamma}, {"rho_bar", c.physics.eos.rho_bar}};
  j["physics"] = {{"damping", c.physics.a}, {"mu", c.physics.mu}, {"eta", c.physics.eta},
                  {"lambda", c.physics.lambda(d.dim)}};
  j["scheme"] = {{"cfl", c.scheme.cfl},
                 {"reconstruction", to_string(c.scheme.reconstruction)},
                 {"time_integrator", to_string(c.scheme.time_integrator)},
                 {"viscous_stability_factor", c.scheme.viscous_stability_factor}};
  j["sweep"] = {{"epsilon_ladder", c.epsilon_ladder}, {"t_end", c.t_end},     {"snapshot_every", c.snapshot_every},
                {"seed", c.seed},                     {"workers", c.workers}, {"write_snapshots", c.write_snapshots}};
  j["initial"] = {{"kind", c.initial.kind},
                  {"amplitude", c.initial.amplitude},
                  {"velocity", head(c.initial.velocity, d.dim)},
                  {"center", head(c.initial.center, d.dim)},
                  {"radius", c.initial.radius},
                  {"wavenumber", c.initial.wavenumber},
                  {"modes", c.initial.modes}};
  j["reference"] = {{"kind", to_string(c.reference.kind)},
                    {"refine", c.reference.refine},
                    {"blowup_threshold", c.reference.thresholds.blowup},
                    {"vacuum_threshold", c.reference.thresholds.vacuum_fraction},
                    {"resolution_threshold", c.reference.thresholds.resolution}};
  j["checks"] = {{"gronwall_kappa", c.gronwall_kappa}};
  j["warnings"] = c.warnings;
  return j;
}

}  // namespace vvl
