#include <cmath>
#include <random>

#include <omp.h>

#include "doctest.h"
#include "vvl/errors.hpp"
#include "vvl/functionals.hpp"
#include "vvl/harness.hpp"
#include "vvl/ns_solver.hpp"

using namespace vvl;

namespace {

Grid box(int dim, int n, BoundaryTag tag, DomainKind kind = DomainKind::bounded) {
  DomainSpec d;
  d.dim = dim;
  d.kind = kind;
  for (int i = 0; i < dim; ++i) d.cells[i] = n;
  for (auto& f : d.faces) f = tag;
  return make_grid(d);
}

PhysParams phys(double eps, double a = 0.5, double mu = 1.0, double eta = 0.0) {
  PhysParams p;
  p.a = a;
  p.mu = mu;
  p.eta = eta;
  p.epsilon = eps;
  return p;
}

ConservedState smooth_state(const Grid& g, unsigned seed, double amplitude = 0.2) {
  SweepConfig cfg;
  cfg.domain.dim = g.dim;
  cfg.initial.kind = "random_smooth";
  cfg.initial.amplitude = amplitude;
  cfg.seed = seed;
  return build_initial_state(cfg, g);
}

// Rusanov flux of the 1D barotropic system written out by hand
std::array<double, 2> rusanov_1d(double rl, double ml, double rr, double mr, double A, double g) {
  const double ul = ml / rl, ur = mr / rr;
  const double pl = A * std::pow(rl, g), pr = A * std::pow(rr, g);
  const double cl = std::sqrt(g * pl / rl), cr = std::sqrt(g * pr / rr);
  const double s = std::max(std::abs(ul) + cl, std::abs(ur) + cr);
  return {0.5 * (ml + mr) - 0.5 * s * (rr - rl), 0.5 * (ml * ul + pl + mr * ur + pr) - 0.5 * s * (mr - ml)};
}

double l1_error(const ConservedState& a, const ConservedState& b) {
  double e = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) e += std::abs(a.rho[c] - b.rho[c]);
  return e * a.grid.cell_volume();
}

}  // namespace

TEST_SUITE("ns_solver") {

TEST_CASE("viscous stress") {
  const auto p = phys(1.0, 0.0, 0.7, 0.3);
  Tensor G{};
  const Tensor S0 = stress_tensor(G, p, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(S0[i][j] == 0.0);
  const double c = 1.5;
  G[0][0] = c;
  const Tensor S = stress_tensor(G, p, 2);
  CHECK(S[0][0] == doctest::Approx((0.7 + 0.3) * c));
  CHECK(S[1][1] == doctest::Approx((0.3 - 0.7) * c));
  CHECK(S[0][1] == 0.0);
  CHECK(contract(S, G, 2) == doctest::Approx((0.7 + 0.3) * c * c));
  CHECK(dissipation_density(G, p, 2) == doctest::Approx((0.7 + 0.3) * c * c));
  // lambda form: mu (G + G^T) + lambda tr G I
  const double lam = p.lambda(2);
  CHECK(S[0][0] == doctest::Approx(2 * 0.7 * c + lam * c));
  Tensor W{};
  W[0][1] = 2.0;
  W[1][0] = -2.0;
  const Tensor Sw = stress_tensor(W, p, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(Sw[i][j] == 0.0);
  CHECK(dissipation_density(W, p, 2) == 0.0);
  // in one dimension only the bulk part survives
  Tensor G1{};
  G1[0][0] = 2.0;
  CHECK(dissipation_density(G1, p, 1) == doctest::Approx(0.3 * 4.0));
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int k = 0; k < 1000; ++k) {
    Tensor R{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) R[i][j] = U(gen);
    CHECK(dissipation_density(R, p, 3) >= 0.0);
    CHECK(dissipation_density(R, p, 3) == doctest::Approx(contract(stress_tensor(R, p, 3), R, 3)).epsilon(1e-12));
  }
}

TEST_CASE("Rusanov flux") {
  EosParams eos;
  const CellState rest{1.0, {0, 0, 0}};
  const Flux f0 = convective_flux(rest, rest, 1, 2, eos);
  CHECK(f0.rho == 0.0);
  CHECK(f0.m[0] == 0.0);
  CHECK(f0.m[1] == pressure(1.0, eos));
  const CellState moving{1.0, {0.7, 0.0, 0.0}};
  const Flux f1 = convective_flux(moving, moving, 0, 1, eos);
  CHECK(f1.rho == doctest::Approx(0.7));
  CHECK(f1.m[0] == doctest::Approx(0.49 + 1.0));
  const CellState L{1.0, {0, 0, 0}}, R{0.125, {0, 0, 0}};
  const Flux fs = convective_flux(L, R, 0, 1, eos);
  const auto o = rusanov_1d(1.0, 0.0, 0.125, 0.0, 1.0, 1.4);
  CHECK(std::abs(fs.rho - o[0]) <= 1e-14 * std::abs(o[0]));
  CHECK(std::abs(fs.m[0] - o[1]) <= 1e-14 * std::abs(o[1]));
  const CellState L2{0.8, {0.3, 0, 0}}, R2{1.3, {-0.4, 0, 0}};
  const auto o2 = rusanov_1d(0.8, 0.3, 1.3, -0.4, 1.0, 1.4);
  const Flux f2 = convective_flux(L2, R2, 0, 1, eos);
  CHECK(std::abs(f2.rho - o2[0]) <= 1e-14 * std::abs(o2[0]));
  CHECK(std::abs(f2.m[0] - o2[1]) <= 1e-14 * std::abs(o2[1]));
  CHECK_THROWS_AS(convective_flux(CellState{0.0, {}}, R, 0, 1, eos), PositivityError);
}

TEST_CASE("stable time step") {
  const Grid g = box(2, 32, BoundaryTag::periodic);
  SchemeConfig sc;
  EosParams eos;
  const ConservedState rest(g, 1.0);
  CHECK(stable_dt(rest, phys(0.0), sc) == doctest::Approx(sc.cfl * g.min_spacing() / sound_speed(1.0, eos)).epsilon(1e-15));
  CHECK(stable_dt(rest, phys(0.1), sc) <= stable_dt(rest, phys(0.0), sc));
  const ConservedState moving(g, 1.2, {1.2 * 0.3, 1.2 * 0.4, 0.0});
  const auto p = phys(0.05, 0.5, 0.8, 0.1);
  const double ac = sc.cfl * g.min_spacing() / (0.5 + sound_speed(1.2, eos));
  const double vi = sc.viscous_stability_factor * g.min_spacing() * g.min_spacing() * 1.2 / (2 * 2 * 0.05 * (1.6 + 0.1));
  const auto b = stable_dt_breakdown(moving, p, sc);
  CHECK(std::abs(b.acoustic - ac) <= 1e-15 * ac);
  CHECK(std::abs(b.viscous - vi) <= 1e-15 * vi);
  CHECK(std::abs(b.combined - 1.0 / (1.0 / ac + 1.0 / vi)) <= 1e-15 * b.combined);
  ConservedState bad = rest;
  bad.rho[3] = -1.0;
  CHECK_THROWS_AS(stable_dt(bad, p, sc), PositivityError);
}

TEST_CASE("uniform damped flow is reproduced exactly") {
  const Grid g = box(2, 16, BoundaryTag::periodic);
  for (double eps : {0.0, 0.1}) {
    const auto p = phys(eps);
    SchemeConfig sc;
    const ConservedState s0(g, 1.0, {0.3, -0.2, 0.0});
    const ConservedState s1 = step(s0, p, sc, 0.01);
    for (std::size_t c = 0; c < s1.size(); ++c) {
      CHECK(s1.rho[c] == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(s1.mom[0][c] == doctest::Approx(0.3 * std::exp(-0.005)).epsilon(1e-15));
    }
    const Trajectory tr = run(s0, p, sc, 2.0, 0.5);
    const double f = std::exp(-1.0);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      CHECK(std::abs(tr.snapshots.back().mom[0][c] - 0.3 * f) <= 1e-12 * 0.3 * f);
      CHECK(std::abs(tr.snapshots.back().mom[1][c] + 0.2 * f) <= 1e-12 * 0.2 * f);
    }
  }
}

TEST_CASE("rest state is an equilibrium for every boundary") {
  SchemeConfig sc;
  for (auto [tag, kind] : {std::pair{BoundaryTag::periodic, DomainKind::bounded}, {BoundaryTag::slip, DomainKind::bounded},
                           {BoundaryTag::noslip, DomainKind::exterior}, {BoundaryTag::farfield, DomainKind::exterior}}) {
    const Grid g = box(2, 12, tag, kind);
    const ConservedState rest(g, 1.0);
    ConservedState s = rest;
    for (int n = 0; n < 20; ++n) s = step(s, phys(0.1), sc, 0.01);
    s.time = rest.time;
    CHECK(s == rest);
  }
  const Trajectory tr = run(ConservedState(box(1, 32, BoundaryTag::slip), 1.0), phys(0.1), sc, 1.0, 0.25);
  for (const auto& s : tr.snapshots) {
    CHECK(s.rho == tr.snapshots.front().rho);
    CHECK(s.mom == tr.snapshots.front().mom);
  }
}

TEST_CASE("acoustic self-convergence") {
  for (auto [rec, order] : {std::pair{Reconstruction::first_order, 0.8}, {Reconstruction::muscl_minmod, 1.6}}) {
    SchemeConfig sc;
    sc.reconstruction = rec;
    SweepConfig cfg;
    cfg.domain.dim = 1;
    cfg.domain.faces = {BoundaryTag::periodic, BoundaryTag::periodic};
    cfg.initial.kind = "acoustic";
    cfg.initial.amplitude = 1e-2;
    const auto p = phys(0.0, 0.0);
    auto final_state = [&](int n) {
      const Grid g = box(1, n, BoundaryTag::periodic);
      return run(build_initial_state(cfg, g), p, sc, 0.5, 0.5).snapshots.back();
    };
    const ConservedState fine = final_state(256);
    const ConservedState c32 = final_state(32), c64 = final_state(64);
    const double e32 = l1_error(c32, restrict_to(fine, c32.grid));
    const double e64 = l1_error(c64, restrict_to(fine, c64.grid));
    const double observed = std::log2(e32 / e64);
    MESSAGE(to_string(rec) << " order " << observed);
    CHECK(observed >= order);
  }
}

TEST_CASE("mass conservation") {
  SchemeConfig sc;
  EosParams eos;
  for (BoundaryTag tag : {BoundaryTag::periodic, BoundaryTag::slip}) {
    const Grid g = box(2, 16, tag);
    ConservedState s = smooth_state(g, 3);
    const auto p = phys(0.02);
    const double m0 = total_mass_deviation(s, eos);
    double mass = 0.0;
    for (double r : s.rho) mass += r * g.cell_volume();
    Integrator integ(g, p, sc);
    StepDiagnostics d;
    for (int n = 0; n < 1000; ++n) integ.advance(s, stable_dt(s, p, sc), d);
    CHECK(std::abs(total_mass_deviation(s, eos) - m0) < 1e-12 * mass);
  }
}

TEST_CASE("serial and parallel kernels agree bitwise") {
  SchemeConfig sc;
  for (auto rec : {Reconstruction::first_order, Reconstruction::muscl_minmod}) {
    sc.reconstruction = rec;
    for (auto [tag, kind, dim] : {std::tuple{BoundaryTag::slip, DomainKind::bounded, 2},
                                  {BoundaryTag::farfield, DomainKind::exterior, 2},
                                  {BoundaryTag::periodic, DomainKind::bounded, 3}}) {
      const Grid g = box(dim, dim == 3 ? 8 : 24, tag, kind);
      const ConservedState init = smooth_state(g, 4);
      const auto p = phys(0.03, 0.5, 1.0, 0.2);
      ConservedState ref = init;
      {
        Integrator serial(g, p, sc, Backend::serial);
        StepDiagnostics d;
        for (int n = 0; n < 20; ++n) serial.advance(ref, 2e-3, d);
      }
      const int saved = omp_get_max_threads();
      for (int threads : {1, 2, 8}) {
        omp_set_num_threads(threads);
        ConservedState s = init;
        Integrator par(g, p, sc, Backend::parallel);
        StepDiagnostics d;
        for (int n = 0; n < 20; ++n) par.advance(s, 2e-3, d);
        CHECK(s == ref);
      }
      omp_set_num_threads(saved);
    }
  }
}

TEST_CASE("inviscid path never calls the viscous kernel") {
  const Grid g = box(2, 16, BoundaryTag::slip);
  const std::size_t before = viscous_kernel_invocations();
  const Trajectory tr = run(smooth_state(g, 5), phys(0.0), SchemeConfig{}, 0.1, 0.05);
  CHECK(tr.viscous_kernel_calls == 0);
  CHECK(viscous_kernel_invocations() == before);
  const Trajectory tv = run(smooth_state(g, 5), phys(0.01), SchemeConfig{}, 0.05, 0.05);
  CHECK(tv.viscous_kernel_calls == tv.steps);
  CHECK(tv.min_dissipation_density >= 0.0);
}

TEST_CASE("accumulated viscous dissipation matches post-hoc quadrature") {
  SweepConfig cfg;
  cfg.domain.cells = {64, 64, 1};
  const Grid g = study_grid(cfg);
  auto p = cfg.physics;
  p.epsilon = 0.01;
  const Trajectory tr = run(build_initial_state(cfg, g), p, cfg.scheme, 0.2, 0.005);
  const double measured = tr.series.viscous_integral.back();
  const double posthoc = posthoc_viscous_integral(tr, p).back();
  MESSAGE("measured " << measured << " post-hoc " << posthoc);
  CHECK(std::abs(measured - posthoc) <= 0.05 * measured);
}

TEST_CASE("energy budget of a vortex run is nonpositive") {
  SweepConfig cfg;
  cfg.domain.cells = {48, 48, 1};
  const Grid g = study_grid(cfg);
  auto p = cfg.physics;
  p.epsilon = 0.01;
  const Trajectory tr = run(build_initial_state(cfg, g), p, cfg.scheme, 0.2, 0.02);
  const auto r = energy_budget_residual(tr, p);
  for (double v : r) CHECK(v <= 1e-10 * tr.series.energy.front());
}

TEST_CASE("snapshot schedule") {
  const auto s = snapshot_schedule(0.5, 0.1);
  REQUIRE(s.size() == 6);
  CHECK(s.front() == 0.0);
  CHECK(s.back() == 0.5);
  CHECK(snapshot_schedule(0.25, 0.1).back() == 0.25);
  CHECK(snapshot_schedule(0.25, 0.1).size() == 4);
  CHECK_THROWS_AS(snapshot_schedule(0.0, 0.1), ConfigError);
}

TEST_CASE("overlong step loses positivity") {
  const Grid g = box(1, 32, BoundaryTag::periodic);
  ConservedState s(g, 1.0);
  for (std::size_t c = 0; c < s.size(); ++c) s.mom[0][c] = c < 16 ? -0.9 : 0.9;
  Integrator integ(g, phys(0.0), SchemeConfig{});
  StepDiagnostics d;
  CHECK_THROWS_AS(integ.advance(s, 0.5, d), PositivityError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(phys(-1.0).validate(), ConfigError);
  CHECK_THROWS_AS(phys(0.1, -1.0).validate(), ConfigError);
  CHECK_THROWS_AS(phys(0.1, 0.5, 0.0).validate(), ConfigError);
  SchemeConfig sc;
  sc.cfl = 1.5;
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  CHECK(reconstruction_from_string("muscl") == Reconstruction::muscl_minmod);
  CHECK_THROWS_AS(reconstruction_from_string("weno"), ConfigError);
}

}
