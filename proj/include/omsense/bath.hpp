#pragma once

// Bath spectral densities, thermal statistics, and the self-energy the bath
// induces on the mechanical mode.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "omsense/constants.hpp"
#include "omsense/errors.hpp"
#include "omsense/grid.hpp"
#include "omsense/quadrature.hpp"

namespace omsense {

using Complex = std::complex<double>;

enum class BathKind { markovian, ohmic, cutoff_power_law };

// Spectral density J(omega) of the mechanical bath. Three families:
//  - markovian: flat, J = gamma_m / pi for omega > 0 (memoryless damping);
//  - ohmic family: J = eta * omega * (omega/omega_0)^(s-1) * exp(-omega/omega_0),
//    sub-ohmic for s < 1, ohmic for s = 1, super-ohmic for s > 1;
//  - cutoff_power_law: J = j_anchor * (omega/omega_anchor)^k on the closed band
//    [omega_lo, omega_hi], zero outside (sharp band edges).
struct SpectralDensity {
  BathKind kind = BathKind::markovian;
  double gamma_m = 0.0;       // markovian: damping rate, J = gamma_m / pi
  double eta = 0.0;           // ohmic family: dimensionless coupling
  double s = 1.0;             // ohmic family: exponent
  double omega_0 = 0.0;       // ohmic family: exponential cutoff frequency
  double j_anchor = 0.0;      // banded power law: density at omega_anchor
  double k = 0.0;             // banded power law: exponent
  double omega_lo = 0.0;      // banded power law: lower band edge
  double omega_hi = 0.0;      // banded power law: upper band edge
  double omega_anchor = 0.0;  // banded power law: reference frequency

  static SpectralDensity markovian(double gamma) {
    if (!(gamma > 0.0))
      throw std::invalid_argument("SpectralDensity::markovian: gamma must be > 0");
    SpectralDensity d;
    d.kind = BathKind::markovian;
    d.gamma_m = gamma;
    return d;
  }

  static SpectralDensity ohmic(double eta, double s, double omega_0) {
    if (!(eta > 0.0))
      throw std::invalid_argument("SpectralDensity::ohmic: eta must be > 0");
    if (!(s > 0.0))
      throw std::invalid_argument("SpectralDensity::ohmic: s must be > 0");
    if (!(omega_0 > 0.0))
      throw std::invalid_argument("SpectralDensity::ohmic: omega_0 must be > 0");
    SpectralDensity d;
    d.kind = BathKind::ohmic;
    d.eta = eta;
    d.s = s;
    d.omega_0 = omega_0;
    return d;
  }

  static SpectralDensity cutoff_power_law(double j_anchor, double k, double omega_lo,
                                          double omega_hi, double omega_anchor) {
    if (!(j_anchor > 0.0))
      throw std::invalid_argument("SpectralDensity::cutoff_power_law: j_anchor must be > 0");
    if (!(omega_lo > 0.0 && omega_lo < omega_hi))
      throw std::invalid_argument(
          "SpectralDensity::cutoff_power_law: requires 0 < omega_lo < omega_hi");
    if (!(omega_anchor > 0.0))
      throw std::invalid_argument(
          "SpectralDensity::cutoff_power_law: omega_anchor must be > 0");
    SpectralDensity d;
    d.kind = BathKind::cutoff_power_law;
    d.j_anchor = j_anchor;
    d.k = k;
    d.omega_lo = omega_lo;
    d.omega_hi = omega_hi;
    d.omega_anchor = omega_anchor;
    return d;
  }
};

inline double eval_density(const SpectralDensity& d, double omega) {
  switch (d.kind) {
    case BathKind::markovian:
      return omega > 0.0 ? d.gamma_m / pi : 0.0;
    case BathKind::ohmic:
      if (!(omega > 0.0)) return 0.0;
      return d.eta * omega * std::pow(omega / d.omega_0, d.s - 1.0) *
             std::exp(-omega / d.omega_0);
    case BathKind::cutoff_power_law:
      if (omega < d.omega_lo || omega > d.omega_hi) return 0.0;
      return d.j_anchor * std::pow(omega / d.omega_anchor, d.k);
  }
  return 0.0;
}

// A bath attached to a mechanical mode of frequency omega_m, at a physical
// temperature in kelvin.
struct BathContext {
  SpectralDensity density;
  double temperature = 0.0;  // kelvin
  double omega_m = 0.0;      // rad/s

  BathContext(SpectralDensity d, double temperature_kelvin, double omega_m_)
      : density(d), temperature(temperature_kelvin), omega_m(omega_m_) {
    if (!(temperature >= 0.0))
      throw std::invalid_argument("BathContext: temperature must be >= 0");
    if (!(omega_m > 0.0))
      throw std::invalid_argument("BathContext: omega_m must be > 0");
  }
};

// Bose occupation at frequency omega (rad/s) and temperature (kelvin).
inline double n_th(double omega, double temperature) {
  if (!(omega > 0.0)) throw std::invalid_argument("n_th: omega must be > 0");
  if (!(temperature >= 0.0))
    throw std::invalid_argument("n_th: temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  const double x = hbar * omega / (k_boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

// Effective damping rate pi * J(omega_m) seen by the mechanical mode; for a
// markovian bath this is gamma_m itself.
inline double gamma_eff(const BathContext& ctx) {
  if (ctx.density.kind == BathKind::markovian) return ctx.density.gamma_m;
  return pi * eval_density(ctx.density, ctx.omega_m);
}

// Coupling eta that makes an ohmic-family bath produce the requested
// effective damping at omega_m.
inline double calibrate_eta(double target_gamma_eff, double s, double omega_0,
                            double omega_m) {
  if (!(target_gamma_eff > 0.0))
    throw std::invalid_argument("calibrate_eta: target_gamma_eff must be > 0");
  if (!(s > 0.0)) throw std::invalid_argument("calibrate_eta: s must be > 0");
  if (!(omega_0 > 0.0))
    throw std::invalid_argument("calibrate_eta: omega_0 must be > 0");
  if (!(omega_m > 0.0))
    throw std::invalid_argument("calibrate_eta: omega_m must be > 0");
  return target_gamma_eff / (pi * omega_m *
                             std::pow(omega_m / omega_0, s - 1.0) *
                             std::exp(-omega_m / omega_0));
}

// Alternative ohmic-family couplings sometimes used alongside these exponents.
// They are independent presets, not outputs of calibrate_eta.
struct CouplingPreset {
  double s;
  double eta;
};
inline constexpr CouplingPreset quoted_coupling_presets[3] = {
    {0.5, 5.5e-3}, {1.0, 1.2e-2}, {2.0, 6.1e-2}};

// Symmetrized thermal force density driving the mechanical mode:
// pi*J(omega)*(n+1) on the positive axis (emission), pi*J(-omega)*n on the
// negative axis (absorption), zero at omega = 0.
inline double thermal_noise_at(const BathContext& ctx, double omega) {
  if (omega > 0.0) {
    const double n = ctx.temperature == 0.0 ? 0.0 : n_th(omega, ctx.temperature);
    return pi * eval_density(ctx.density, omega) * (n + 1.0);
  }
  if (omega < 0.0) {
    if (ctx.temperature == 0.0) return 0.0;
    return pi * eval_density(ctx.density, -omega) *
           n_th(-omega, ctx.temperature);
  }
  return 0.0;
}

inline RealSpectrum thermal_noise_spectrum(const BathContext& ctx,
                                           const FrequencyGrid& grid) {
  RealSpectrum out{grid, Eigen::ArrayXd(grid.points)};
  for (Eigen::Index i = 0; i < grid.points; ++i)
    out.values[i] = thermal_noise_at(ctx, grid.omega(i));
  return out;
}

// Resonant thermal force strength gamma_m * n_th(omega_m) of a memoryless
// bath; the structured families need the full spectrum instead.
inline double markovian_thermal_noise(const BathContext& ctx) {
  if (ctx.density.kind != BathKind::markovian)
    throw std::invalid_argument(
        "markovian_thermal_noise: defined only for a markovian bath");
  if (ctx.temperature == 0.0) return 0.0;
  return ctx.density.gamma_m * n_th(ctx.omega_m, ctx.temperature);
}

// Closed-form self-energy of the memoryless bath: i * gamma_m * omega / omega_m.
inline Complex markovian_self_energy(double gamma_m, double omega, double omega_m) {
  if (!(gamma_m > 0.0))
    throw std::invalid_argument("markovian_self_energy: gamma_m must be > 0");
  if (!(omega_m > 0.0))
    throw std::invalid_argument("markovian_self_energy: omega_m must be > 0");
  return Complex(0.0, gamma_m * omega / omega_m);
}

// Structured-bath self-energy
//   Sigma(omega) = PV int_0^inf dw' w' J(w') / (w'^2 - omega^2)
//                  + i * pi * J(omega) / 2          (omega > 0),
// with Sigma(-omega) = conj(Sigma(omega)) and Sigma(0) real.
inline Complex self_energy(const BathContext& ctx, double omega,
                           const quad::Options& opts = {}) {
  const SpectralDensity& d = ctx.density;
  if (d.kind == BathKind::markovian)
    throw std::invalid_argument(
        "self_energy: markovian bath has a closed form; use markovian_self_energy");
  if (omega < 0.0) return std::conj(self_energy(ctx, -omega, opts));

  const auto integrand = [&d, omega](double wp) {
    return wp * eval_density(d, wp) / ((wp - omega) * (wp + omega));
  };

  double re = 0.0;
  if (d.kind == BathKind::ohmic) {
    if (omega == 0.0) {
      // At zero frequency the integrand reduces to J(w')/w' >= 0.
      const auto over_freq = [&d](double wp) { return eval_density(d, wp) / wp; };
      re = quad::integrate_semi_infinite(over_freq, 0.0, d.omega_0, opts).value;
    } else {
      re = quad::principal_value(integrand, omega, 0.0, 2.0 * omega, opts).value +
           quad::integrate_semi_infinite(integrand, 2.0 * omega, d.omega_0, opts).value;
    }
  } else {  // cutoff_power_law: support restricted to [omega_lo, omega_hi]
    if (omega == d.omega_lo || omega == d.omega_hi)
      throw SingularityError("self-energy evaluated at a spectral band edge");
    if (omega > d.omega_lo && omega < d.omega_hi)
      re = quad::principal_value(integrand, omega, d.omega_lo, d.omega_hi, opts).value;
    else
      re = quad::integrate_finite(integrand, d.omega_lo, d.omega_hi, opts).value;
  }

  const double im =
      omega == 0.0 ? 0.0 : 0.5 * pi * eval_density(d, omega);
  return Complex(re, im);
}

// Self-energy of any bath family, dispatching to the closed form when the
// bath is memoryless.
inline Complex bath_self_energy(const BathContext& ctx, double omega,
                                const quad::Options& opts = {}) {
  if (ctx.density.kind == BathKind::markovian)
    return markovian_self_energy(ctx.density.gamma_m, omega, ctx.omega_m);
  return self_energy(ctx, omega, opts);
}

}  // namespace omsense
