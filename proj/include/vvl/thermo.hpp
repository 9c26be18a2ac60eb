#pragma once
// Isentropic equation of state p = A rho^gamma, its pressure potential,
// the relative (Bregman) potential and the essential/residual cutoff.
//
// Everything here is a pure function of value arguments.

#include <span>
#include <utility>

namespace vvl {

struct EosParams {
  double A = 1.0;
  double gamma = 1.4;
  double rho_bar = 1.0;

  // Throws ConfigError unless A > 0, gamma > 1, rho_bar >= 0.
  void validate() const;
};

double pressure(double rho, const EosParams& eos);
double sound_speed(double rho, const EosParams& eos);

// P(rho) = A/(gamma-1) (rho^gamma - rho rho_bar^(gamma-1)), the primitive
// normalised by P(rho_bar) = 0. Satisfies rho P' - P = p.
double pressure_potential(double rho, const EosParams& eos);
double pressure_potential_derivative(double rho, const EosParams& eos);

// P(rho) - P'(r)(rho - r) - P(r). Nonnegative, zero only at rho == r.
// Evaluated without cancellation near rho == r.
double relative_potential(double rho, double r, const EosParams& eos);

// Potential part of the energy integrand relative to the background state:
// relative_potential(rho, rho_bar) for rho_bar > 0, plain P(rho) for a
// vacuum background.
double background_potential(double rho, const EosParams& eos);

// Smallest sampled ratio c with relative_potential(rho, rho_bar) >=
// c (rho-rho_bar)^2 on (rho_bar/2, 2 rho_bar) and >= c (1 + rho^gamma) outside.
// Samples `count` log-spaced densities in [rho_min, rho_max].
double sampled_coercivity_constant(const EosParams& eos, double rho_min, double rho_max, int count);

struct CutoffProfile {
  double plateau_lo = 0.5;   // chi == 1 on [plateau_lo, plateau_hi]
  double plateau_hi = 2.0;
  double band_lo = 0.25;     // chi ramps 0 -> 1 on [plateau_lo - band_lo, plateau_lo]
  double band_hi = 2.0;      // chi ramps 1 -> 0 on [plateau_hi, plateau_hi + band_hi]
  int degree = 3;            // smoothstep degree: 3 (C^1) or 5 (C^2)
  bool empty = false;        // chi == 0 everywhere (vacuum background)

  // Bands [rho_bar/4, rho_bar/2] and [2 rho_bar, 4 rho_bar]; empty for rho_bar == 0.
  static CutoffProfile for_background(double rho_bar, int degree = 3);
  void validate() const;
};

double cutoff_chi(double rho, const CutoffProfile& profile);

struct EssRes {
  double ess;
  double res;
};

// [h]_ess = chi(rho) h, [h]_res = h - [h]_ess.
EssRes ess_res_split(double h, double rho, const CutoffProfile& profile);

}  // namespace vvl
