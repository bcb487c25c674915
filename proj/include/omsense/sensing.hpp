#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "omsense/bath.hpp"
#include "omsense/errors.hpp"
#include "omsense/grid.hpp"
#include "omsense/homodyne.hpp"
#include "omsense/quadrature.hpp"
#include "omsense/response.hpp"

namespace omsense {

// Mass-sensing inputs: each deposited quantum of unit_mass raises the flat
// input signal power by unit_mass * responsivity.
struct SenseConfig {
  double responsivity = 0.0;  // signal power per gram of deposited mass
  double unit_mass = 0.0;     // grams per deposited quantum
  int count = 0;              // quanta deposited

  SenseConfig(double responsivity_, double unit_mass_, int count_)
      : responsivity(responsivity_), unit_mass(unit_mass_), count(count_) {
    if (!(responsivity > 0.0))
      throw std::invalid_argument("SenseConfig: responsivity must be > 0");
    if (!(unit_mass > 0.0))
      throw std::invalid_argument("SenseConfig: unit_mass must be > 0");
    if (count < 0)
      throw std::invalid_argument("SenseConfig: count must be >= 0");
  }
};

// Flat input signal power injected by the deposited mass. Expressed in the
// same frequency units as the system parameters, so it multiplies |C|^2
// directly.
inline double s_in(const SenseConfig& cfg) {
  return static_cast<double>(cfg.count) * cfg.unit_mass * cfg.responsivity;
}

// Four-point Lagrange interpolation on a uniform grid; the stencil is the
// bracketing cell plus one neighbour on each side, shifted inward at the
// boundaries.
inline double interpolate_cubic(const FrequencyGrid& grid,
                                const Eigen::ArrayXd& values, double x) {
  if (values.size() != grid.points)
    throw std::invalid_argument(
        "interpolate_cubic: values do not match the grid");
  if (grid.points < 4)
    throw std::invalid_argument("interpolate_cubic: need at least 4 points");
  if (!(x >= grid.start && x <= grid.stop))
    throw std::invalid_argument("interpolate_cubic: point outside the grid");
  const auto j = static_cast<Eigen::Index>((x - grid.start) / grid.step());
  const Eigen::Index base = std::clamp<Eigen::Index>(j - 1, 0, grid.points - 4);
  double acc = 0.0;
  for (Eigen::Index k = base; k < base + 4; ++k) {
    double weight = 1.0;
    for (Eigen::Index l = base; l < base + 4; ++l)
      if (l != k) weight *= (x - grid.omega(l)) / (grid.omega(k) - grid.omega(l));
    acc += weight * values[k];
  }
  return acc;
}

// Count-independent pieces of the output spectrum, computed once per
// parameter set so a scan over deposit counts reuses them.
struct SenseComponents {
  FrequencyGrid grid{0.0, 1.0, 2};
  Eigen::ArrayXd noise_floor;  // (|A|^2 + |B|^2) / 2
  Eigen::ArrayXd signal_gain;  // |C|^2
  double resonance = 0.0;      // bath-shifted mechanical frequency
};

inline SenseComponents sense_components(const SystemParams& p,
                                        const BathContext& ctx,
                                        const FrequencyGrid& grid,
                                        const quad::Options& opts = {},
                                        unsigned threads = 0) {
  SenseComponents comp;
  comp.grid = grid;
  comp.noise_floor.resize(grid.points);
  comp.signal_gain.resize(grid.points);
  comp.resonance = effective_frequency(ctx, opts);
  const ComplexSpectrum sigma = self_energy_grid(ctx, grid, opts, threads);
  for (Eigen::Index i = 0; i < grid.points; ++i) {
    const double w = grid.omega(i);
    const Complex xm = chi_m_from_sigma(w, p.omega_m, sigma.values[i]);
    const HomodyneCoefficients co = coefficients_from_chi(p, w, xm);
    comp.noise_floor[i] = 0.5 * (std::norm(co.a_coef) + std::norm(co.b_coef));
    comp.signal_gain[i] = std::norm(co.c_coef);
  }
  return comp;
}

struct SenseResult {
  RealSpectrum spectrum;  // output spectrum over the grid
  double resonant_value;  // spectrum read at the shifted resonance
  double resonance;       // bath-shifted mechanical frequency
};

// Assembles s_out = noise_floor + signal_power * signal_gain and reads it at
// the shifted resonance. Interpolating rather than snapping to the nearest
// sample keeps bath-to-bath comparisons free of grid-alignment bias.
inline SenseResult assemble_s_out(const SenseComponents& comp,
                                  double signal_power) {
  if (!(signal_power >= 0.0))
    throw std::invalid_argument("assemble_s_out: signal power must be >= 0");
  RealSpectrum spectrum{comp.grid,
                        comp.noise_floor + signal_power * comp.signal_gain};
  const double at_resonance =
      interpolate_cubic(comp.grid, spectrum.values, comp.resonance);
  return SenseResult{std::move(spectrum), at_resonance, comp.resonance};
}

// Output spectrum of the sensor for one deposit count.
inline SenseResult s_out(const SystemParams& p, const BathContext& ctx,
                         const SenseConfig& cfg, const FrequencyGrid& grid,
                         const quad::Options& opts = {}, unsigned threads = 0) {
  return assemble_s_out(sense_components(p, ctx, grid, opts, threads),
                        s_in(cfg));
}

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares of responses against counts. A constant response
// vector yields slope 0 and r^2 = 0 by convention.
inline FitResult fit_linear(const Eigen::ArrayXd& counts,
                            const Eigen::ArrayXd& responses) {
  const Eigen::Index n = counts.size();
  if (n != responses.size())
    throw std::invalid_argument("fit_linear: size mismatch");
  if (n < 3) throw std::invalid_argument("fit_linear: need at least 3 points");
  const double sxx = (counts - counts.mean()).square().sum();
  if (sxx == 0.0)
    throw std::invalid_argument("fit_linear: counts must not all coincide");
  if ((responses == responses[0]).all())
    return FitResult{0.0, responses[0], 0.0};
  const double rbar = responses.mean();
  const double sxy = ((counts - counts.mean()) * (responses - rbar)).sum();
  const double syy = (responses - rbar).square().sum();
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = rbar - fit.slope * counts.mean();
  fit.r_squared = sxy * sxy / (sxx * syy);
  return fit;
}

inline FitResult fit_linear(const std::vector<int>& counts,
                            const std::vector<double>& responses) {
  Eigen::ArrayXd c(static_cast<Eigen::Index>(counts.size()));
  Eigen::ArrayXd r(static_cast<Eigen::Index>(responses.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    c[static_cast<Eigen::Index>(i)] = counts[i];
  for (std::size_t i = 0; i < responses.size(); ++i)
    r[static_cast<Eigen::Index>(i)] = responses[i];
  return fit_linear(c, r);
}

}  // namespace omsense
