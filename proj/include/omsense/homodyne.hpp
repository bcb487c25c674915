#pragma once

// Homodyne detection of the output field: transfer coefficients from the two
// optical inputs and the external force to the measured quadrature, and the
// force-referred added-noise spectrum.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "omsense/bath.hpp"
#include "omsense/response.hpp"

namespace omsense {

// Measured quadrature at +omega decomposed over the inputs:
//   M(omega) = a_coef * a_in(omega) + b_coef * a_in^dag(-omega) + c_coef * F(omega).
struct HomodyneCoefficients {
  Complex a_coef;
  Complex b_coef;
  Complex c_coef;
  Complex denominator;  // shared denominator, kept for diagnostics
};

// Coefficients for a given (bath-dressed, radiation-pressure-free) mechanical
// susceptibility value at +omega. D = 2 * detuning + i * kappa throughout.
inline HomodyneCoefficients coefficients_from_chi(const SystemParams& p,
                                                  double omega, Complex chi_m_val) {
  const Complex g = p.coupling;
  const Complex gc = std::conj(g);
  const double g2 = std::norm(g);
  const Complex dd(2.0 * p.detuning_eff, p.kappa);
  const Complex ddc = std::conj(dd);
  const Complex e_p = std::exp(Complex(0.0, p.theta));
  const Complex e_m = std::conj(e_p);
  const Complex km2iw(p.kappa, -2.0 * omega);
  const Complex den =
      std::sqrt(2.0) *
      (4.0 * p.detuning_eff * (p.detuning_eff - 2.0 * g2 * chi_m_val) +
       km2iw * km2iw);
  const double w4 = 4.0 * omega * omega;
  const Complex i1(0.0, 1.0);
  const Complex a = (4.0 * e_p * p.kappa * gc * gc * chi_m_val -
                     i1 * e_m * (dd * (4.0 * g2 * chi_m_val - dd) + w4)) /
                    den;
  const Complex b = (4.0 * e_m * p.kappa * g * g * chi_m_val +
                     i1 * e_p * (ddc * (4.0 * g2 * chi_m_val - ddc) + w4)) /
                    den;
  const Complex c = 2.0 * i1 * std::sqrt(p.kappa) * chi_m_val *
                    (e_p * gc * (ddc - 2.0 * omega) - e_m * g * (dd + 2.0 * omega)) /
                    den;
  return {a, b, c, den};
}

inline HomodyneCoefficients coefficients(const SystemParams& p,
                                         const BathContext& ctx, double omega,
                                         const quad::Options& opts = {}) {
  return coefficients_from_chi(p, omega, chi_m(ctx, omega, opts));
}

struct NoiseSpectrumResult {
  FrequencyGrid grid;
  Eigen::ArrayXd s_add;
  bool includes_thermal = false;
};

namespace detail {

// One-sided added noise at +-omega before symmetrization: optical vacuum
// part (|A|^2 + |B|^2) / (2 |C|^2) plus, optionally, the thermal force
// density at that signed frequency.
inline double added_noise_side(const SystemParams& p, const BathContext& ctx,
                               double omega, Complex chi_m_val,
                               bool include_thermal) {
  const HomodyneCoefficients co = coefficients_from_chi(p, omega, chi_m_val);
  double value = (std::norm(co.a_coef) + std::norm(co.b_coef)) /
                 (2.0 * std::norm(co.c_coef));
  if (include_thermal) value += thermal_noise_at(ctx, omega);
  return value;
}

// Same quantity on the zero-phase quadrature via the condensed route that
// never forms the individual coefficients.
inline double added_noise_side_theta0(const SystemParams& p,
                                      const BathContext& ctx, double omega,
                                      Complex chi_m_val, bool include_thermal) {
  const Complex g = p.coupling;
  const Complex gc = std::conj(g);
  const double g2 = std::norm(g);
  const Complex dd(2.0 * p.detuning_eff, p.kappa);
  const Complex ddc = std::conj(dd);
  const Complex i1(0.0, 1.0);
  const double w4 = 4.0 * omega * omega;
  const Complex pp =
      4.0 * (p.kappa * gc * gc - i1 * dd * g2) + i1 * (dd * dd - w4) / chi_m_val;
  const Complex qq =
      4.0 * (p.kappa * g * g + i1 * ddc * g2) - i1 * (ddc * ddc - w4) / chi_m_val;
  const Complex x = gc * ddc - g * dd - 2.0 * omega * (g + gc);
  double value =
      (std::norm(pp) + std::norm(qq)) / (8.0 * p.kappa * std::norm(x));
  if (include_thermal) value += thermal_noise_at(ctx, omega);
  return value;
}

}  // namespace detail

// Symmetrized force-referred added noise on a precomputed self-energy grid.
// Conjugation symmetry of the self-energy supplies chi_m(-omega) for free.
inline NoiseSpectrumResult s_add_general(const SystemParams& p,
                                         const BathContext& ctx,
                                         const ComplexSpectrum& sigma,
                                         bool include_thermal = false) {
  if (std::norm(p.coupling) == 0.0)
    throw NoTransductionError(
        "added noise undefined: zero coupling carries no force signal");
  NoiseSpectrumResult out{sigma.grid, Eigen::ArrayXd(sigma.grid.points),
                          include_thermal};
  for (Eigen::Index i = 0; i < sigma.grid.points; ++i) {
    const double w = sigma.grid.omega(i);
    const Complex xm = chi_m_from_sigma(w, p.omega_m, sigma.values[i]);
    const double plus = detail::added_noise_side(p, ctx, w, xm, include_thermal);
    const double minus =
        detail::added_noise_side(p, ctx, -w, std::conj(xm), include_thermal);
    out.s_add[i] = 0.5 * (plus + minus);
  }
  return out;
}

inline NoiseSpectrumResult s_add_general(const SystemParams& p,
                                         const BathContext& ctx,
                                         const FrequencyGrid& grid,
                                         bool include_thermal = false,
                                         const quad::Options& opts = {},
                                         unsigned threads = 0) {
  return s_add_general(p, ctx, self_energy_grid(ctx, grid, opts, threads),
                       include_thermal);
}

// Zero-phase quadrature route; algebraically identical to s_add_general at
// theta = 0 and rejected otherwise.
inline NoiseSpectrumResult s_add_theta0(const SystemParams& p,
                                        const BathContext& ctx,
                                        const ComplexSpectrum& sigma,
                                        bool include_thermal = false) {
  if (p.theta != 0.0)
    throw std::invalid_argument("s_add_theta0: requires theta == 0");
  if (std::norm(p.coupling) == 0.0)
    throw NoTransductionError(
        "added noise undefined: zero coupling carries no force signal");
  NoiseSpectrumResult out{sigma.grid, Eigen::ArrayXd(sigma.grid.points),
                          include_thermal};
  for (Eigen::Index i = 0; i < sigma.grid.points; ++i) {
    const double w = sigma.grid.omega(i);
    const Complex xm = chi_m_from_sigma(w, p.omega_m, sigma.values[i]);
    const double plus =
        detail::added_noise_side_theta0(p, ctx, w, xm, include_thermal);
    const double minus = detail::added_noise_side_theta0(p, ctx, -w,
                                                         std::conj(xm),
                                                         include_thermal);
    out.s_add[i] = 0.5 * (plus + minus);
  }
  return out;
}

inline NoiseSpectrumResult s_add_theta0(const SystemParams& p,
                                        const BathContext& ctx,
                                        const FrequencyGrid& grid,
                                        bool include_thermal = false,
                                        const quad::Options& opts = {},
                                        unsigned threads = 0) {
  return s_add_theta0(p, ctx, self_energy_grid(ctx, grid, opts, threads),
                      include_thermal);
}

// Grid minimum of the added noise, refined by a parabola through the
// neighbouring samples.
inline GridExtremum optimal_s_add_over_frequency(const SystemParams& p,
                                                 const BathContext& ctx,
                                                 const FrequencyGrid& grid,
                                                 bool include_thermal = false,
                                                 const quad::Options& opts = {},
                                                 unsigned threads = 0) {
  const NoiseSpectrumResult ns =
      s_add_general(p, ctx, grid, include_thermal, opts, threads);
  Eigen::Index i = 0;
  ns.s_add.minCoeff(&i);
  return detail::refine_extremum(grid, ns.s_add, i);
}

enum class SweepAxis { coupling, kappa, theta };
enum class SweepQuantity { s_add_optimum };

struct SweepSpec {
  SweepAxis axis = SweepAxis::coupling;
  SweepQuantity quantity = SweepQuantity::s_add_optimum;
  Eigen::ArrayXd axis_values;
  FrequencyGrid grid;
  bool include_thermal = false;
};

struct SweepRow {
  double axis_value = 0.0;
  bool ok = false;
  double omega_opt = 0.0;
  double s_add_opt = 0.0;
  std::string error;
};

// Sweeps one system parameter, reporting the added-noise optimum per value.
// The self-energy grid is bath-only, so it is computed once and shared; rows
// whose evaluation fails carry the error text instead of values.
inline std::vector<SweepRow> sweep(const SystemParams& base, const BathContext& ctx,
                                   const SweepSpec& spec,
                                   const quad::Options& opts = {},
                                   unsigned threads = 0) {
  const ComplexSpectrum sigma = self_energy_grid(ctx, spec.grid, opts, threads);
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(spec.axis_values.size()));
  for (Eigen::Index v = 0; v < spec.axis_values.size(); ++v) {
    SweepRow row;
    row.axis_value = spec.axis_values[v];
    try {
      SystemParams p = [&] {
        switch (spec.axis) {
          case SweepAxis::coupling:
            return SystemParams{base.omega_m, base.detuning_eff, base.kappa,
                                Complex(row.axis_value, 0.0), base.theta};
          case SweepAxis::kappa:
            return SystemParams{base.omega_m, base.detuning_eff, row.axis_value,
                                base.coupling, base.theta};
          case SweepAxis::theta:
            return SystemParams{base.omega_m, base.detuning_eff, base.kappa,
                                base.coupling, row.axis_value};
        }
        throw std::invalid_argument("sweep: unknown axis");
      }();
      const NoiseSpectrumResult ns =
          s_add_general(p, ctx, sigma, spec.include_thermal);
      Eigen::Index i = 0;
      ns.s_add.minCoeff(&i);
      const GridExtremum ext = detail::refine_extremum(spec.grid, ns.s_add, i);
      row.omega_opt = ext.omega;
      row.s_add_opt = ext.value;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace omsense
