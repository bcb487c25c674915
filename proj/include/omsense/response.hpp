#pragma once

// Linear response of the optomechanical system: cavity and mechanical
// susceptibilities, the bath-dressed mechanical response, and grid
// evaluators.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "omsense/bath.hpp"
#include "omsense/grid.hpp"
#include "omsense/parallel.hpp"

namespace omsense {

// Linearized system around the optical steady state: cavity linewidth kappa,
// effective cavity detuning (radiation-pressure shift included), field-enhanced
// coupling G (complex in general), and homodyne local-oscillator phase theta.
struct SystemParams {
  double omega_m = 0.0;       // mechanical frequency, rad/s
  double detuning_eff = 0.0;  // effective cavity detuning, rad/s
  double kappa = 0.0;         // cavity energy decay rate, rad/s
  Complex coupling{0.0, 0.0};  // field-enhanced optomechanical coupling, rad/s
  double theta = 0.0;         // homodyne phase, rad

  SystemParams(double omega_m_, double detuning_eff_, double kappa_,
               Complex coupling_, double theta_ = 0.0)
      : omega_m(omega_m_), detuning_eff(detuning_eff_), kappa(kappa_),
        coupling(coupling_), theta(theta_) {
    if (!(omega_m > 0.0))
      throw std::invalid_argument("SystemParams: omega_m must be > 0");
    if (!(kappa > 0.0))
      throw std::invalid_argument("SystemParams: kappa must be > 0");
  }
};

// Cavity response at +omega: 1 / (kappa/2 - i (omega - detuning)).
inline Complex chi_c(const SystemParams& p, double omega) {
  return 1.0 / Complex(0.5 * p.kappa, -(omega - p.detuning_eff));
}

// Conjugate-channel cavity response: 1 / (kappa/2 - i (omega + detuning)).
inline Complex chi_c_prime(const SystemParams& p, double omega) {
  return 1.0 / Complex(0.5 * p.kappa, -(omega + p.detuning_eff));
}

// Bare mechanical susceptibility dressed by a given bath self-energy:
// chi_m = -omega_m / ((omega^2 - omega_m^2) + omega_m * Sigma(omega)).
inline Complex chi_m_from_sigma(double omega, double omega_m, Complex sigma) {
  return -omega_m / ((omega * omega - omega_m * omega_m) + omega_m * sigma);
}

inline Complex chi_m(const BathContext& ctx, double omega,
                     const quad::Options& opts = {}) {
  return chi_m_from_sigma(omega, ctx.omega_m, bath_self_energy(ctx, omega, opts));
}

// Radiation-pressure-dressed mechanical response:
// 1/chi_xm = 1/chi_m - i |G|^2 (chi_c - chi_c').
inline Complex chi_xm_from_sigma(const SystemParams& p, double omega,
                                 Complex sigma) {
  const Complex inv_chi_m =
      -((omega * omega - p.omega_m * p.omega_m) + p.omega_m * sigma) / p.omega_m;
  const Complex cavity = chi_c(p, omega) - chi_c_prime(p, omega);
  return 1.0 / (inv_chi_m - Complex(0.0, std::norm(p.coupling)) * cavity);
}

inline Complex chi_xm(const SystemParams& p, const BathContext& ctx, double omega,
                      const quad::Options& opts = {}) {
  return chi_xm_from_sigma(p, omega, bath_self_energy(ctx, omega, opts));
}

// Resonant reference response used to normalize sensitivity ratios:
// 1/chi_x0 = -i gamma_eff - i |G|^2 (chi_c(omega_m) - chi_c'(omega_m)).
inline Complex chi_x0(const SystemParams& p, const BathContext& ctx) {
  const Complex cavity = chi_c(p, p.omega_m) - chi_c_prime(p, p.omega_m);
  const Complex inv = Complex(0.0, -gamma_eff(ctx)) -
                      Complex(0.0, std::norm(p.coupling)) * cavity;
  return 1.0 / inv;
}

// Bath-shifted mechanical frequency sqrt(omega_m * (omega_m - Re Sigma(omega_m))).
inline double effective_frequency(const BathContext& ctx,
                                  const quad::Options& opts = {}) {
  const Complex sigma = bath_self_energy(ctx, ctx.omega_m, opts);
  const double radicand = ctx.omega_m * (ctx.omega_m - sigma.real());
  if (!(radicand > 0.0))
    throw OverdampedShiftError(
        "effective_frequency: bath-induced shift exceeds the mechanical frequency");
  return std::sqrt(radicand);
}

struct GridExtremum {
  double omega = 0.0;
  double value = 0.0;
  Eigen::Index index = 0;
};

namespace detail {

// Quadratic refinement of an interior grid extremum through three samples;
// the same vertex formula serves maxima and minima. The offset is clamped to
// half a step, where the three-point fit is trustworthy.
inline GridExtremum refine_extremum(const FrequencyGrid& grid,
                                    const Eigen::ArrayXd& values,
                                    Eigen::Index i) {
  GridExtremum out{grid.omega(i), values[i], i};
  if (i == 0 || i == grid.points - 1) return out;
  const double d1 = 0.5 * (values[i + 1] - values[i - 1]);
  const double d2 = values[i + 1] - 2.0 * values[i] + values[i - 1];
  if (d2 == 0.0) return out;
  double delta = -d1 / d2;
  delta = std::clamp(delta, -0.5, 0.5);
  out.omega = grid.omega(i) + delta * grid.step();
  out.value = values[i] + d1 * delta + 0.5 * d2 * delta * delta;
  return out;
}

}  // namespace detail

// Location and height of the largest sample, refined by a parabola through
// its neighbours.
inline GridExtremum find_resonance(const RealSpectrum& spec) {
  Eigen::Index i = 0;
  spec.values.maxCoeff(&i);
  return detail::refine_extremum(spec.grid, spec.values, i);
}

inline ComplexSpectrum self_energy_grid(const BathContext& ctx,
                                        const FrequencyGrid& grid,
                                        const quad::Options& opts = {},
                                        unsigned threads = 0) {
  ComplexSpectrum out{grid, Eigen::ArrayXcd(grid.points)};
  parallel_for(static_cast<std::size_t>(grid.points), threads,
               [&](std::size_t i) {
                 const auto j = static_cast<Eigen::Index>(i);
                 out.values[j] = bath_self_energy(ctx, grid.omega(j), opts);
               });
  return out;
}

inline ComplexSpectrum chi_xm_grid(const SystemParams& p, const BathContext& ctx,
                                   const FrequencyGrid& grid,
                                   const quad::Options& opts = {},
                                   unsigned threads = 0) {
  ComplexSpectrum sigma = self_energy_grid(ctx, grid, opts, threads);
  for (Eigen::Index i = 0; i < grid.points; ++i)
    sigma.values[i] = chi_xm_from_sigma(p, grid.omega(i), sigma.values[i]);
  return sigma;
}

}  // namespace omsense
