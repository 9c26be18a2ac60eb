#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "vvl/errors.hpp"
#include "vvl/fields.hpp"
#include "vvl/grid.hpp"
#include "vvl/series.hpp"
#include "vvl/snapshot_io.hpp"
#include "vvl/summation.hpp"

using namespace vvl;

namespace {

DomainSpec spec(int dim, int n, BoundaryTag tag, DomainKind kind = DomainKind::bounded) {
  DomainSpec d;
  d.dim = dim;
  for (int i = 0; i < dim; ++i) d.cells[i] = n;
  for (auto& f : d.faces) f = tag;
  d.kind = kind;
  return d;
}

ConservedState random_state(const Grid& g, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  ConservedState s(g, 1.0);
  for (std::size_t c = 0; c < s.size(); ++c) {
    s.rho[c] = 0.1 + 4.0 * U(gen);
    for (int d = 0; d < g.dim; ++d) s.mom[d][c] = U(gen) - 0.5;
  }
  return s;
}

std::filesystem::path tmp(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "vvl_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("fields") {

TEST_CASE("grid construction") {
  auto d = spec(1, 64, BoundaryTag::periodic);
  const Grid g = make_grid(d);
  CHECK(g.spacing[0] == 0.015625);
  CHECK(g.cell_count() == 64);
  const Grid g2 = make_grid(spec(2, 32, BoundaryTag::slip));
  for (int f = 0; f < 4; ++f) CHECK(g2.faces[f] == BoundaryTag::slip);
  const Grid g3 = make_grid(spec(2, 16, BoundaryTag::noslip, DomainKind::exterior));
  for (int f = 0; f < 4; ++f) CHECK(g3.faces[f] == BoundaryTag::noslip);
  CHECK(g3.kind == DomainKind::exterior);
  CHECK_THROWS_AS(make_grid(spec(2, 0, BoundaryTag::slip)), ConfigError);
  CHECK_THROWS_AS(make_grid(spec(2, 8, BoundaryTag::noslip)), ConfigError);
  CHECK_THROWS_AS(make_grid(spec(2, 8, BoundaryTag::slip, DomainKind::exterior)), ConfigError);
  auto bad = spec(2, 8, BoundaryTag::slip);
  bad.faces[0] = BoundaryTag::periodic;
  CHECK_THROWS_AS(make_grid(bad), ConfigError);
  const Grid r = refine(g2, 4);
  CHECK(r.cells[0] == 128);
  CHECK(r.spacing[1] == doctest::Approx(1.0 / 128));
  for (std::size_t i : {0ul, 17ul, 1023ul}) CHECK(g2.index(g2.coords(i)[0], g2.coords(i)[1]) == i);
}

TEST_CASE("far-field extension") {
  const Grid small = make_grid(spec(2, 8, BoundaryTag::farfield, DomainKind::exterior));
  auto dl = spec(2, 16, BoundaryTag::farfield, DomainKind::exterior);
  for (int i = 0; i < 2; ++i) {
    dl.extent[i] = 2.0;
    dl.origin[i] = -0.5;
  }
  const Grid large = make_grid(dl);
  const ConservedState rest(small, 1.3);
  const ConservedState ext = extend_far_field(rest, large, 1.3);
  for (double r : ext.rho) CHECK(r == 1.3);
  const ConservedState any = random_state(small, 1);
  CHECK(extend_far_field(any, small, 1.0) == any);
  EosParams eos;
  ConservedState bump(small, 1.0);
  for (std::size_t c = 0; c < bump.size(); ++c) {
    const auto x = small.center(c);
    bump.rho[c] = 1.0 + std::exp(-20.0 * ((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5)));
  }
  const auto big = extend_far_field(bump, large, 1.0);
  CHECK(total_mass_deviation(big, eos) == doctest::Approx(total_mass_deviation(bump, eos)).epsilon(1e-14));
}

TEST_CASE("decomposed norms") {
  const Grid g = make_grid(spec(2, 16, BoundaryTag::periodic));
  EosParams eos;
  const auto prof = CutoffProfile::for_background(1.0);
  const auto zero = decomposed_norms(ConservedState(g, 1.0), eos, prof);
  CHECK(zero.rho_ess_l2 == 0.0);
  CHECK(zero.rho_res_lgamma == 0.0);
  CHECK(zero.m_ess_l2 == 0.0);
  CHECK(zero.m_res_lq == 0.0);
  CHECK(zero.sqrt_rho_u_l2 == 0.0);

  ConservedState half(g, 1.0);
  for (std::size_t c = 0; c < half.size(); c += 2) half.rho[c] = 1.1;
  const auto h = decomposed_norms(half, eos, prof);
  CHECK(h.rho_ess_l2 == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(h.rho_res_lgamma == 0.0);

  // brute force over a state straddling the cutoff bands
  const ConservedState s = random_state(g, 2);
  const auto n = decomposed_norms(s, eos, prof);
  const double vol = g.cell_volume(), q = 2.0 * eos.gamma / (eos.gamma + 1.0);
  long double a = 0, b = 0, c = 0, d = 0, e = 0;
  for (std::size_t i = s.size(); i-- > 0;) {
    const double chi = cutoff_chi(s.rho[i], prof);
    const double dr = s.rho[i] - 1.0;
    const double m2 = s.mom[0][i] * s.mom[0][i] + s.mom[1][i] * s.mom[1][i];
    a += chi * dr * chi * dr;
    b += std::pow(std::abs((1 - chi) * dr), eos.gamma);
    c += chi * chi * m2;
    d += std::pow((1 - chi) * std::sqrt(m2), q);
    e += m2 / s.rho[i];
  }
  CHECK(n.rho_ess_l2 == doctest::Approx(std::sqrt(vol * (double)a)).epsilon(1e-12));
  CHECK(n.rho_res_lgamma == doctest::Approx(std::pow(vol * (double)b, 1 / eos.gamma)).epsilon(1e-12));
  CHECK(n.m_ess_l2 == doctest::Approx(std::sqrt(vol * (double)c)).epsilon(1e-12));
  CHECK(n.m_res_lq == doctest::Approx(std::pow(vol * (double)d, 1 / q)).epsilon(1e-12));
  CHECK(n.sqrt_rho_u_l2 == doctest::Approx(std::sqrt(vol * (double)e)).epsilon(1e-12));
}

TEST_CASE("total mass deviation") {
  const Grid g = make_grid(spec(2, 10, BoundaryTag::slip));
  EosParams eos;
  CHECK(total_mass_deviation(ConservedState(g, 1.0), eos) == 0.0);
  CHECK(total_mass_deviation(ConservedState(g, 1.25), eos) == doctest::Approx(0.25).epsilon(1e-14));
  const ConservedState s = random_state(g, 3);
  double rev = 0.0;
  for (std::size_t i = s.size(); i-- > 0;) rev += (s.rho[i] - 1.0) * g.cell_volume();
  CHECK(std::abs(total_mass_deviation(s, eos) - rev) < 1e-13);
}

TEST_CASE("admissibility and restriction") {
  const Grid g = make_grid(spec(2, 4, BoundaryTag::periodic));
  ConservedState s(g, 1.0);
  CHECK_NOTHROW(check_admissible(s));
  s.rho[5] = 0.0;
  CHECK_THROWS_AS(check_admissible(s), PositivityError);
  s.rho[5] = NAN;
  CHECK_THROWS_AS(check_admissible(s), PositivityError);
  const ConservedState fine = random_state(refine(g, 2), 4);
  const ConservedState coarse = restrict_to(fine, g);
  EosParams eos;
  CHECK(total_mass_deviation(coarse, eos) == doctest::Approx(total_mass_deviation(fine, eos)).epsilon(1e-13));
  const auto fc = fine.grid;
  const double avg = 0.25 * (fine.rho[fc.index(0, 0)] + fine.rho[fc.index(1, 0)] + fine.rho[fc.index(0, 1)] +
                             fine.rho[fc.index(1, 1)]);
  CHECK(coarse.rho[0] == doctest::Approx(avg).epsilon(1e-15));
}

TEST_CASE("pairwise sum is split independent") {
  std::vector<double> v(10007);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (double& x : v) x = U(gen) * std::pow(10.0, 8.0 * U(gen));
  const double a = pairwise_sum(v);
  const double b = deterministic_sum(v.size(), [&](std::size_t i) { return v[i]; });
  CHECK(a == b);
}

TEST_CASE("snapshot round trip") {
  const Grid g = make_grid(spec(2, 8, BoundaryTag::slip));
  ConservedState s = random_state(g, 5);
  s.time = 0.1 + 0.2;
  EosParams eos;
  eos.gamma = 1.4;
  eos.A = 0.7;
  write_snapshot(tmp("s.vlfs"), s, eos, 0.5);
  const Snapshot back = read_snapshot(tmp("s.vlfs"), &g);
  CHECK(back.state == s);
  CHECK(back.eos.gamma == eos.gamma);
  CHECK(back.eos.A == eos.A);
  CHECK(back.damping == 0.5);
  const Grid other = make_grid(spec(2, 4, BoundaryTag::slip));
  CHECK_THROWS_AS(read_snapshot(tmp("s.vlfs"), &other), IoError);
  std::ofstream(tmp("bad.vlfs")) << "VLFS2 2 8 8\n";
  CHECK_THROWS_AS(read_snapshot(tmp("bad.vlfs")), IoError);
  CHECK_THROWS_AS(read_snapshot(tmp("missing.vlfs")), IoError);
}

TEST_CASE("series csv round trip") {
  FunctionalSeries s;
  s.times = {0.0, 0.1, 0.30000000000000004};
  s.energy = {1.0, 0.9, 1.0 / 3.0};
  s.damping_integral = {0.0, 1e-300, 0.05};
  s.viscous_integral = {0.0, 0.01, 0.02};
  write_series_csv(tmp("s.csv"), s);
  CHECK(read_series_csv(tmp("s.csv")) == s);
  s.relative_energy = {0.0, 2.5e-7, 1e-3};
  write_series_csv(tmp("s2.csv"), s);
  CHECK(read_series_csv(tmp("s2.csv")) == s);
  std::ifstream is(tmp("s2.csv"));
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,E,damping_int,viscous_int,rel_energy");
  std::ofstream(tmp("bad.csv")) << "t,E,damping_int,viscous_int,rel_energy\n0,1,2\n";
  CHECK_THROWS_AS(read_series_csv(tmp("bad.csv")), IoError);
}

TEST_CASE("shortest round-trip doubles") {
  for (double v : {0.1, 1.0 / 3.0, 1e-310, 6.02e23, -0.0, 123456789.125})
    CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(0.1) == "0.1");
}

}
