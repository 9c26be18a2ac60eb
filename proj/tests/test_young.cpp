#include <cmath>
#include <random>

#include "doctest.h"
#include "vvl/errors.hpp"
#include "vvl/young_measure.hpp"

using namespace vvl;

namespace {

Grid periodic(int dim, int n) {
  DomainSpec d;
  d.dim = dim;
  for (int i = 0; i < dim; ++i) d.cells[i] = n;
  return make_grid(d);
}

ConservedState at(ConservedState s, double t) {
  s.time = t;
  return s;
}

Family random_family(const Grid& g, std::size_t levels, std::size_t snaps, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(-0.2, 0.2);
  Family f(levels);
  for (auto& level : f)
    for (std::size_t n = 0; n < snaps; ++n) {
      ConservedState s(g, 1.0);
      s.time = 0.1 * static_cast<double>(n);
      for (std::size_t c = 0; c < s.size(); ++c) {
        s.rho[c] += U(gen);
        for (int d = 0; d < g.dim; ++d) s.mom[d][c] = U(gen);
      }
      level.push_back(s);
    }
  return f;
}

}  // namespace

TEST_SUITE("young_measure") {

TEST_CASE("Dirac family") {
  const Grid g = periodic(2, 4);
  const ConservedState s(g, 1.3, {0.2, -0.1, 0});
  const auto nu = build_measure({&s, &s, &s}, 5, 1.0);
  CHECK(nu.total_weight() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(atom_variance(nu) == 0.0);
  CHECK(pair(nu, observables::density_deviation(1.0)) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(pair(nu, observables::momentum(1)) == doctest::Approx(-0.1).epsilon(1e-14));
  CHECK(pair(nu, observables::convective(0, 1)) == doctest::Approx(0.2 * -0.1 / 1.3).epsilon(1e-14));
}

TEST_CASE("two atoms") {
  const Grid g = periodic(1, 4);
  const ConservedState a(g, 1.1, {0.5, 0, 0}), b(g, 0.9, {-0.5, 0, 0});
  const auto nu = build_measure({&a, &b}, 0, 1.0);
  const Atom bc = nu.barycenter();
  CHECK(std::abs(bc.drho) < 1e-15);
  CHECK(std::abs(bc.m[0]) < 1e-15);
  CHECK(atom_variance(nu) == doctest::Approx(0.01 + 0.25).epsilon(1e-13));
  CHECK(pair(nu, observables::kinetic_twice(1)) == doctest::Approx(0.5 * (0.25 / 1.1 + 0.25 / 0.9)).epsilon(1e-14));
}

TEST_CASE("truncation") {
  const Grid g = periodic(1, 2);
  ConservedState s3(g, 3.0), s5(g, 5.0);
  const auto nu = build_measure({&s3, &s5}, 1, 1.0);
  const Observable H = [](double rho, const std::array<double, 3>&) { return rho; };
  CHECK(pair(nu, H) == 4.0);
  CHECK(truncated_pair(nu, H, 2.0) == 2.0);
  CHECK(truncated_pair(nu, H, 10.0) == 4.0);
  double prev = -INFINITY;
  for (double k : {0.5, 1.0, 3.0, 4.0, 4.5, 5.0, 100.0}) {
    const double v = truncated_pair(nu, H, k);
    CHECK(v >= prev);
    CHECK(v <= pair(nu, H));
    prev = v;
  }
}

TEST_CASE("convective observable brute force") {
  const Grid g = periodic(2, 3);
  const Family f = random_family(g, 4, 1, 11);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const auto nu = build_measure(f, 0, c, 1.0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double sum = 0.0;
        for (const auto& level : f) sum += level[0].mom[i][c] * level[0].mom[j][c] / level[0].rho[c];
        CHECK(pair(nu, observables::convective(i, j)) == doctest::Approx(sum / 4).epsilon(1e-14));
      }
  }
  CHECK_THROWS_AS(observables::convective(0, 0)(0.0, {1.0, 0, 0}), DomainError);
  CHECK(observables::convective(0, 0)(0.0, {0, 0, 0}) == 0.0);
}

TEST_CASE("measure construction errors") {
  const Grid g = periodic(2, 4);
  const ConservedState s(g, 1.0), t(periodic(2, 8), 1.0);
  CHECK_THROWS_AS(build_measure({&s}, 0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_measure({&s, &t}, 0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_measure({&s, &s}, 100, 1.0), ConfigError);
}

TEST_CASE("identical family has no defects") {
  const Grid g = periodic(2, 6);
  const Family one = random_family(g, 1, 4, 5);
  const Family f{one[0], one[0], one[0], one[0]};
  EosParams eos;
  const DefectEstimate d = estimate_defects(f, eos, 0.5);
  CHECK(d.levels == 4);
  for (std::size_t n = 0; n < d.times.size(); ++n) {
    CHECK(d.mu_m_mass[n] == 0.0);
    CHECK(d.mu_c_mass[n] == 0.0);
    CHECK(d.energy_defect[n] == 0.0);
    CHECK(d.sigma_defect[n] == 0.0);
    CHECK(d.D[n] == 0.0);
  }
  CHECK(d.clamp_magnitude == 0.0);
  for (double v : atom_variance_series(f, 1.0)) CHECK(v == 0.0);
  const auto dom = check_domination(d);
  CHECK(dom.pass);
  CHECK(dom.fitted_C == 0.0);
}

TEST_CASE("momentum concentration of an oscillating family") {
  // atoms +m0, -m0 and a finest level at rest: M = -<nu; m^2/rho>
  const Grid g = periodic(1, 4);
  const double m0 = 0.3;
  Family f(3);
  for (double t : {0.0, 1.0}) {
    f[0].push_back(at(ConservedState(g, 1.0, {m0, 0, 0}), t));
    f[1].push_back(at(ConservedState(g, 1.0, {-m0, 0, 0}), t));
    f[2].push_back(at(ConservedState(g, 1.0), t));
  }
  EosParams eos;
  const DefectEstimate d = estimate_defects(f, eos, 0.0);
  const double V = g.volume();
  for (std::size_t n = 0; n < 2; ++n) {
    CHECK(d.mu_m[n][2][0][0] == doctest::Approx(-2 * m0 * m0 / 3).epsilon(1e-14));
    CHECK(d.mu_m_mass[n] == doctest::Approx(2 * m0 * m0 / 3 * V).epsilon(1e-14));
    CHECK(d.mu_c_mass[n] == doctest::Approx(0.0));
    CHECK(d.energy_defect[n] == doctest::Approx(-m0 * m0 / 3 * V).epsilon(1e-14));
    CHECK(d.D[n] == 0.0);
  }
  CHECK(d.clamp_magnitude == doctest::Approx(m0 * m0 / 3 * V).epsilon(1e-14));
  // nonzero concentration with D = 0 violates domination
  CHECK_FALSE(check_domination(d).pass);
}

TEST_CASE("domination fit") {
  DefectEstimate d;
  d.times = {0.0, 1.0, 2.0};
  d.D = {1.0, 1.0, 1.0};
  d.mu_m_mass = {2.0, 2.0, 2.0};
  d.mu_c_mass = {0.0, 0.0, 0.0};
  const auto dom = check_domination(d);
  CHECK(dom.pass);
  CHECK(dom.fitted_C == doctest::Approx(2.0));
  CHECK(std::isnan(dom.ratio[0]));
  d.D.pop_back();
  CHECK_THROWS_AS(check_domination(d), ConfigError);
}

TEST_CASE("defect family checks") {
  const Grid g = periodic(1, 4);
  Family f = random_family(g, 2, 2, 1);
  EosParams eos;
  CHECK_THROWS_AS(estimate_defects(f, eos, 0.1), ConfigError);
  f.push_back(f[0]);
  f.back().pop_back();
  CHECK_THROWS_AS(estimate_defects(f, eos, 0.1), ConfigError);
}

}
