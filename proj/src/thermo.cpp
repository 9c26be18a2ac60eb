#include "vvl/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vvl/errors.hpp"

namespace vvl {

namespace {

void require_nonnegative(double rho, const char* who) {
  if (!(rho >= 0.0)) throw DomainError(std::string(who) + ": negative or NaN density");
}

// (1 + d)^g - 1 - g d, accurate for small |d|.
double bregman_kernel(double d, double g) {
  if (std::abs(d) < 0.1) {
    double coeff = g * (g - 1.0) / 2.0;
    double power = d * d;
    double sum = 0.0;
    for (int k = 2; k < 80; ++k) {
      const double term = coeff * power;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      coeff *= (g - k) / (k + 1.0);
      power *= d;
    }
    return sum;
  }
  return std::pow(1.0 + d, g) - 1.0 - g * d;
}

double smoothstep(double t, int degree) {
  t = std::clamp(t, 0.0, 1.0);
  if (degree == 5) return t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

void EosParams::validate() const {
  if (!(A > 0.0)) throw ConfigError("eos: A must be positive");
  if (!(gamma > 1.0)) throw ConfigError("eos: gamma must exceed 1");
  if (!(rho_bar >= 0.0)) throw ConfigError("eos: rho_bar must be nonnegative");
}

double pressure(double rho, const EosParams& eos) {
  require_nonnegative(rho, "pressure");
  return eos.A * std::pow(rho, eos.gamma);
}

double sound_speed(double rho, const EosParams& eos) {
  require_nonnegative(rho, "sound_speed");
  return std::sqrt(eos.gamma * eos.A * std::pow(rho, eos.gamma - 1.0));
}

double pressure_potential(double rho, const EosParams& eos) {
  require_nonnegative(rho, "pressure_potential");
  const double gm1 = eos.gamma - 1.0;
  return eos.A / gm1 * (std::pow(rho, eos.gamma) - rho * std::pow(eos.rho_bar, gm1));
}

double pressure_potential_derivative(double rho, const EosParams& eos) {
  require_nonnegative(rho, "pressure_potential_derivative");
  const double gm1 = eos.gamma - 1.0;
  return eos.A / gm1 * (eos.gamma * std::pow(rho, gm1) - std::pow(eos.rho_bar, gm1));
}

double relative_potential(double rho, double r, const EosParams& eos) {
  require_nonnegative(rho, "relative_potential");
  if (!(r > 0.0)) throw DomainError("relative_potential: reference density must be positive");
  // The rho_bar terms of P are affine in rho and cancel identically.
  const double d = (rho - r) / r;
  const double value = eos.A / (eos.gamma - 1.0) * std::pow(r, eos.gamma) * bregman_kernel(d, eos.gamma);
  return std::max(value, 0.0);
}

double background_potential(double rho, const EosParams& eos) {
  if (eos.rho_bar > 0.0) return relative_potential(rho, eos.rho_bar, eos);
  return pressure_potential(rho, eos);
}

double sampled_coercivity_constant(const EosParams& eos, double rho_min, double rho_max, int count) {
  if (!(eos.rho_bar > 0.0)) throw DomainError("coercivity constant needs rho_bar > 0");
  if (!(rho_min > 0.0) || !(rho_max > rho_min) || count < 2)
    throw ConfigError("coercivity sampling: need 0 < rho_min < rho_max and count >= 2");
  const double rb = eos.rho_bar;
  double c = std::numeric_limits<double>::infinity();
  const double lmin = std::log(rho_min);
  const double lmax = std::log(rho_max);
  for (int i = 0; i < count; ++i) {
    const double rho = std::exp(lmin + (lmax - lmin) * i / (count - 1));
    if (rho == rb) continue;
    const double e = relative_potential(rho, rb, eos);
    const bool inner = rho > rb / 2.0 && rho < 2.0 * rb;
    const double weight = inner ? (rho - rb) * (rho - rb) : 1.0 + std::pow(rho, eos.gamma);
    c = std::min(c, e / weight);
  }
  return c;
}

CutoffProfile CutoffProfile::for_background(double rho_bar, int degree) {
  CutoffProfile p;
  p.degree = degree;
  if (!(rho_bar > 0.0)) {
    p.empty = true;
    p.plateau_lo = p.plateau_hi = p.band_lo = p.band_hi = 0.0;
    return p;
  }
  p.plateau_lo = rho_bar / 2.0;
  p.plateau_hi = 2.0 * rho_bar;
  p.band_lo = rho_bar / 4.0;
  p.band_hi = 2.0 * rho_bar;
  return p;
}

void CutoffProfile::validate() const {
  if (empty) return;
  if (degree != 3 && degree != 5) throw ConfigError("cutoff: smoothstep degree must be 3 or 5");
  if (!(band_lo > 0.0) || !(band_hi > 0.0)) throw ConfigError("cutoff: band widths must be positive");
  if (!(plateau_lo - band_lo > 0.0)) throw ConfigError("cutoff: support must stay inside (0, inf)");
  if (!(plateau_hi >= plateau_lo)) throw ConfigError("cutoff: empty plateau");
}

double cutoff_chi(double rho, const CutoffProfile& p) {
  if (p.empty) return 0.0;
  if (rho >= p.plateau_lo && rho <= p.plateau_hi) return 1.0;
  if (rho < p.plateau_lo) {
    const double lo = p.plateau_lo - p.band_lo;
    if (rho <= lo) return 0.0;
    return smoothstep((rho - lo) / p.band_lo, p.degree);
  }
  const double hi = p.plateau_hi + p.band_hi;
  if (rho >= hi) return 0.0;
  return smoothstep((hi - rho) / p.band_hi, p.degree);
}

EssRes ess_res_split(double h, double rho, const CutoffProfile& profile) {
  // |chi h| <= |h|, so h - res is exact (Fast2Sum) and ess + res == h bitwise
  const double res = h - cutoff_chi(rho, profile) * h;
  return {h - res, res};
}

}  // namespace vvl
