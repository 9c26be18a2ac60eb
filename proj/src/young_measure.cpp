#include "vvl/young_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vvl/errors.hpp"
#include "vvl/functionals.hpp"
#include "vvl/summation.hpp"

namespace vvl {

double EmpiricalMeasure::total_weight() const {
  double w = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) w += weight();
  return w;
}

Atom EmpiricalMeasure::barycenter() const {
  Atom b;
  for (const Atom& a : atoms) {
    b.drho += a.drho;
    for (int d = 0; d < dim; ++d) b.m[d] += a.m[d];
  }
  const double w = weight();
  b.drho *= w;
  for (int d = 0; d < dim; ++d) b.m[d] *= w;
  return b;
}

EmpiricalMeasure build_measure(const std::vector<const ConservedState*>& states, std::size_t cell, double rho_bar) {
  if (states.size() < 2) throw ConfigError("build_measure: need at least two levels");
  EmpiricalMeasure nu;
  nu.cell = cell;
  nu.rho_bar = rho_bar;
  nu.dim = states.front()->grid.dim;
  for (const ConservedState* s : states) {
    if (!s->grid.same_layout(states.front()->grid)) throw ConfigError("build_measure: levels are on misaligned grids");
    if (cell >= s->size()) throw ConfigError("build_measure: cell index out of range");
    Atom a;
    a.drho = s->rho[cell] - rho_bar;
    for (int d = 0; d < nu.dim; ++d) a.m[d] = s->mom[d][cell];
    nu.atoms.push_back(a);
  }
  return nu;
}

EmpiricalMeasure build_measure(const Family& family, std::size_t snap, std::size_t cell, double rho_bar) {
  std::vector<const ConservedState*> states;
  for (const auto& level : family) {
    if (snap >= level.size()) throw ConfigError("build_measure: snapshot index out of range");
    states.push_back(&level[snap]);
  }
  return build_measure(states, cell, rho_bar);
}

double pair(const EmpiricalMeasure& nu, const Observable& g) {
  double acc = 0.0;
  for (const Atom& a : nu.atoms) acc += g(a.drho + nu.rho_bar, a.m);
  return acc * nu.weight();
}

double truncated_pair(const EmpiricalMeasure& nu, const Observable& H, double k) {
  double acc = 0.0;
  for (const Atom& a : nu.atoms) acc += std::min(H(a.drho + nu.rho_bar, a.m), k);
  return acc * nu.weight();
}

namespace observables {

Observable density_deviation(double rho_bar) {
  return [rho_bar](double rho, const std::array<double, 3>&) { return rho - rho_bar; };
}

Observable momentum(int k) {
  return [k](double, const std::array<double, 3>& m) { return m[k]; };
}

Observable convective(int i, int j) {
  return [i, j](double rho, const std::array<double, 3>& m) {
    if (rho == 0.0) {
      if (m[i] != 0.0 || m[j] != 0.0) throw DomainError("observable undefined: vacuum with momentum");
      return 0.0;
    }
    return m[i] * m[j] / rho;
  };
}

Observable pressure_deviation(const EosParams& eos) {
  return [eos](double rho, const std::array<double, 3>&) { return pressure(rho, eos) - pressure(eos.rho_bar, eos); };
}

Observable energy(const EosParams& eos, int dim) {
  return [eos, dim](double rho, const std::array<double, 3>& m) { return energy_density(rho, m, dim, eos); };
}

Observable kinetic_twice(int dim) {
  return [dim](double rho, const std::array<double, 3>& m) {
    return 2.0 * kinetic_density(rho, m, {0.0, 0.0, 0.0}, dim);
  };
}

}  // namespace observables

double atom_variance(const EmpiricalMeasure& nu) {
  const Atom b = nu.barycenter();
  double acc = 0.0;
  for (const Atom& a : nu.atoms) {
    double d2 = (a.drho - b.drho) * (a.drho - b.drho);
    for (int d = 0; d < nu.dim; ++d) d2 += (a.m[d] - b.m[d]) * (a.m[d] - b.m[d]);
    acc += d2;
  }
  return acc * nu.weight();
}

namespace {

void require_family(const Family& family, std::size_t min_levels) {
  if (family.size() < min_levels)
    throw ConfigError("need at least " + std::to_string(min_levels) + " epsilon levels, got " +
                      std::to_string(family.size()));
  const std::size_t nt = family.front().size();
  if (nt == 0) throw ConfigError("family has no snapshots");
  const Grid& g = family.front().front().grid;
  for (const auto& level : family) {
    if (level.size() != nt) throw ConfigError("family levels have different snapshot counts");
    for (std::size_t n = 0; n < nt; ++n) {
      if (!level[n].grid.same_layout(g)) throw ConfigError("family levels are on misaligned grids");
      if (std::abs(level[n].time - family.front()[n].time) > 1e-12 * std::max(1.0, level[n].time))
        throw ConfigError("family levels have different snapshot times");
    }
  }
}

}  // namespace

std::vector<double> atom_variance_series(const Family& family, double rho_bar) {
  require_family(family, 2);
  const std::size_t nt = family.front().size();
  const std::size_t nc = family.front().front().size();
  std::vector<double> out(nt);
  for (std::size_t n = 0; n < nt; ++n) {
    out[n] = deterministic_sum(nc, [&](std::size_t c) {
      const int dim = family.front()[n].grid.dim;
      const double w = 1.0 / static_cast<double>(family.size());
      double b[4] = {0.0, 0.0, 0.0, 0.0};
      for (const auto& level : family) {
        b[0] += level[n].rho[c];
        for (int d = 0; d < dim; ++d) b[1 + d] += level[n].mom[d][c];
      }
      for (double& v : b) v *= w;
      double acc = 0.0;
      for (const auto& level : family) {
        double d2 = (level[n].rho[c] - b[0]) * (level[n].rho[c] - b[0]);
        for (int d = 0; d < dim; ++d) d2 += (level[n].mom[d][c] - b[1 + d]) * (level[n].mom[d][c] - b[1 + d]);
        acc += d2;
      }
      return acc * w;
    }) / static_cast<double>(nc);
  }
  (void)rho_bar;  // variance is translation invariant
  return out;
}

DefectEstimate estimate_defects(const Family& family, const EosParams& eos, double a) {
  require_family(family, 3);
  const std::size_t K = family.size();
  const std::size_t nt = family.front().size();
  const Grid& g = family.front().front().grid;
  const int dim = g.dim;
  const std::size_t nc = g.cell_count();
  const double vol = g.cell_volume();
  const double w = 1.0 / static_cast<double>(K);
  for (const auto& level : family)
    for (const auto& s : level)
      for (std::size_t c = 0; c < nc; ++c)
        if (!(s.rho[c] > 0.0)) throw DomainError("estimate_defects: non-positive density in cell " + std::to_string(c));

  DefectEstimate est;
  est.levels = K;
  est.min_sigma = std::numeric_limits<double>::infinity();
  const double p_bar = eos.A * std::pow(eos.rho_bar, eos.gamma);
  std::vector<double> mass_m(nc), mass_c(nc), e_inf(nc), s_inf(nc);
  double sigma_int = 0.0, prev_sigma = 0.0;
  for (std::size_t n = 0; n < nt; ++n) {
    std::vector<Tensor> mu(nc);
    const ConservedState& fin = family.back()[n];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(nc); ++ci) {
      const std::size_t c = static_cast<std::size_t>(ci);
      auto zm = [&](const ConservedState& s) {
        std::array<double, 3> m{0.0, 0.0, 0.0};
        for (int d = 0; d < dim; ++d) m[d] = s.mom[d][c];
        return m;
      };
      // ensemble means of the observables
      Tensor conv{};
      double pm = 0.0, em = 0.0, km = 0.0;
      std::array<double, 3> mm{0.0, 0.0, 0.0};
      for (const auto& level : family) {
        const ConservedState& s = level[n];
        const double r = s.rho[c];
        const auto m = zm(s);
        double m2 = 0.0;
        for (int i = 0; i < dim; ++i) {
          mm[i] += m[i];
          m2 += m[i] * m[i];
          for (int j = 0; j < dim; ++j) conv[i][j] += m[i] * m[j] / r;
        }
        pm += eos.A * std::pow(r, eos.gamma) - p_bar;
        em += energy_density(r, m, dim, eos);
        km += m2 / r;
      }
      const double rf = fin.rho[c];
      const auto mf = zm(fin);
      double mf2 = 0.0;
      for (int i = 0; i < dim; ++i) mf2 += mf[i] * mf[i];
      const double p_inf = (eos.A * std::pow(rf, eos.gamma) - p_bar) - pm * w;
      Tensor M{};
      double fro = 0.0, mc2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          M[i][j] = mf[i] * mf[j] / rf - conv[i][j] * w;
          if (i == j) M[i][j] += p_inf;
          fro += M[i][j] * M[i][j];
        }
        const double dc = mf[i] - mm[i] * w;
        mc2 += dc * dc;
      }
      mu[c] = M;
      mass_m[c] = std::sqrt(fro);
      mass_c[c] = std::sqrt(mc2);
      e_inf[c] = energy_density(rf, mf, dim, eos) - em * w;
      s_inf[c] = mf2 / rf - km * w;
    }
    est.times.push_back(family.front()[n].time);
    est.mu_m.push_back(std::move(mu));
    est.mu_m_mass.push_back(vol * pairwise_sum(mass_m));
    est.mu_c_mass.push_back(vol * pairwise_sum(mass_c));
    est.energy_defect.push_back(vol * pairwise_sum(e_inf));
    const double sig = vol * pairwise_sum(s_inf);
    est.sigma_defect.push_back(sig);
    for (double v : s_inf) est.min_sigma = std::min(est.min_sigma, v);
    if (n > 0) sigma_int += 0.5 * (est.times[n] - est.times[n - 1]) * (prev_sigma + sig);
    prev_sigma = sig;
    const double D = est.energy_defect.back() + a * sigma_int;
    est.D_raw.push_back(D);
    est.D.push_back(std::max(D, 0.0));
    est.clamp_magnitude = std::max(est.clamp_magnitude, -D);
  }
  return est;
}

namespace {
std::vector<double> trapezoid_cumulative(const std::vector<double>& t, const std::vector<double>& f) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t n = 1; n < t.size(); ++n) out[n] = out[n - 1] + 0.5 * (t[n] - t[n - 1]) * (f[n - 1] + f[n]);
  return out;
}
}  // namespace

std::vector<double> DefectEstimate::cumulative_mass() const {
  std::vector<double> total(times.size());
  for (std::size_t n = 0; n < times.size(); ++n) total[n] = mu_m_mass[n] + mu_c_mass[n];
  return trapezoid_cumulative(times, total);
}

std::vector<double> DefectEstimate::cumulative_D() const { return trapezoid_cumulative(times, D); }

double DefectEstimate::max_D() const {
  double m = 0.0;
  for (double v : D) m = std::max(m, v);
  return m;
}

DominationResult check_domination(const DefectEstimate& d) {
  if (d.mu_m_mass.size() != d.times.size() || d.mu_c_mass.size() != d.times.size() || d.D.size() != d.times.size())
    throw ConfigError("check_domination: ragged defect estimate");
  DominationResult r;
  r.pass = true;
  const auto num = d.cumulative_mass();
  const auto den = d.cumulative_D();
  for (std::size_t n = 0; n < d.times.size(); ++n) {
    if (den[n] > 0.0) {
      const double q = num[n] / den[n];
      r.ratio.push_back(q);
      r.fitted_C = std::max(r.fitted_C, q);
    } else if (num[n] > 0.0) {
      r.ratio.push_back(std::numeric_limits<double>::infinity());
      r.fitted_C = std::numeric_limits<double>::infinity();
      r.pass = false;
    } else {
      r.ratio.push_back(std::nan(""));
    }
  }
  r.pass = r.pass && std::isfinite(r.fitted_C);
  return r;
}

}  // namespace vvl
