#pragma once

// Independent reference implementations used only by the tests.

#include <cmath>
#include <complex>
#include <functional>

#include "omsense/bath.hpp"
#include "omsense/quadrature.hpp"
#include "omsense/response.hpp"

namespace oracle {

using omsense::BathContext;
using omsense::Complex;
using omsense::SystemParams;

// First-principles reassembly of the homodyne transfer coefficients from the
// linearized input-output chain, written without reference to the condensed
// production formulas: solve the dressed mechanical response against the two
// optical inputs u = a_in(omega), v = a_in^dag(-omega) and the force, push it
// back through the cavity, apply the input-output relation, and project onto
// the local-oscillator quadrature.
struct ReassembledCoefficients {
  Complex on_a_in;
  Complex on_a_in_dag;
  Complex on_force;
};

inline ReassembledCoefficients reassemble_homodyne(const SystemParams& p,
                                                   double omega,
                                                   Complex chi_m_val) {
  const Complex xc = omsense::chi_c(p, omega);
  const Complex xcp = omsense::chi_c_prime(p, omega);
  const Complex g = p.coupling;
  const Complex gc = std::conj(g);
  const double rk = std::sqrt(p.kappa);
  const Complex i1(0.0, 1.0);
  // Dressed inverse response of q against its drives.
  const Complex lambda = 1.0 / chi_m_val - i1 * std::norm(g) * (xc - xcp);
  const Complex q_u = rk * gc * xc / lambda;
  const Complex q_v = rk * g * xcp / lambda;
  const Complex q_f = 1.0 / lambda;
  // Cavity field and input-output relation, channel by channel:
  //   a_out = sqrt(k) chi_c (i G q + sqrt(k) u) - u
  //   a_out^dag(-omega) = sqrt(k) chi_c' (-i G* q + sqrt(k) v) - v.
  const Complex aout_u = rk * xc * i1 * g * q_u + p.kappa * xc - 1.0;
  const Complex aout_v = rk * xc * i1 * g * q_v;
  const Complex aout_f = rk * xc * i1 * g * q_f;
  const Complex adag_u = -rk * xcp * i1 * gc * q_u;
  const Complex adag_v = -rk * xcp * i1 * gc * q_v + p.kappa * xcp - 1.0;
  const Complex adag_f = -rk * xcp * i1 * gc * q_f;
  // Measured quadrature M = (i/sqrt(2)) [e^{i theta} a_out^dag - e^{-i theta} a_out].
  const Complex e_p = std::exp(Complex(0.0, p.theta));
  const Complex e_m = std::conj(e_p);
  const Complex pref = i1 / std::sqrt(2.0);
  return {pref * (e_p * adag_u - e_m * aout_u),
          pref * (e_p * adag_v - e_m * aout_v),
          pref * (e_p * adag_f - e_m * aout_f)};
}

// Finite-observation-window thermal force spectrum: the expectation of the
// length-T periodogram of the bath force,
//   S_T(omega) = (1/2T) int_0^T int_0^T dt dt' e^{i omega (t - t')}
//                <xi(t) xi(t')>,
// integrated directly from the bath density. The double time integral
// collapses onto Fejer kernels (positive, 1/x^2 sidelobes), so the estimate
// tends to the stationary density smoothly as the window grows. Used to pin
// the thermal spectrum against a path that never invokes the production
// thermal formulas.
inline double windowed_thermal_spectrum(const BathContext& ctx, double omega,
                                        double window, double support_hi) {
  const auto fejer = [window](double x) {
    const double arg = x * window;
    if (std::abs(arg) < 1e-2) return window * (0.5 - arg * arg / 24.0);
    return (1.0 - std::cos(arg)) / (x * x * window);
  };
  const auto integrand = [&](double wp) {
    const double density = omsense::eval_density(ctx.density, wp);
    const double occupation =
        ctx.temperature > 0.0 ? omsense::n_th(wp, ctx.temperature) : 0.0;
    return density * (occupation * (fejer(omega - wp) + fejer(omega + wp)) +
                      fejer(omega - wp));
  };
  // Composite fixed-order panels sized to resolve the kernel oscillation.
  const double lo =
      ctx.density.kind == omsense::BathKind::cutoff_power_law
          ? ctx.density.omega_lo
          : 0.0;
  const double width = 0.8 * 2.0 * omsense::pi / window;
  const int panels =
      std::max(8, static_cast<int>(std::ceil((support_hi - lo) / width)));
  const double h = (support_hi - lo) / panels;
  // 8-point Gauss-Legendre half-nodes.
  static constexpr double nodes[4] = {0.18343464249564980494,
                                      0.52553240991632898582,
                                      0.79666647741362673959,
                                      0.96028985649753623168};
  static constexpr double weights[4] = {0.36268378337836198297,
                                        0.31370664587788728734,
                                        0.22238103445337447054,
                                        0.10122853629037625915};
  const auto panel_sum = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double est = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double x = half * nodes[j];
      est += weights[j] * (integrand(mid - x) + integrand(mid + x));
    }
    return est * half;
  };
  double acc = 0.0;
  int first = 0;
  if (lo == 0.0) {
    // With the thermal occupation (~1/wp at small wp) folded in, densities
    // that vanish slower than linearly leave an integrable wp^(s-1) endpoint
    // singularity; a single fixed-order panel under-integrates it by a few
    // percent of the panel mass. Resolve the first panel on a geometric
    // ladder instead, where every subpanel sees a smooth integrand.
    double edge = h;
    for (int k = 0; k < 40; ++k) {
      const double next = 0.5 * edge;
      acc += panel_sum(next, edge);
      edge = next;
    }
    acc += panel_sum(0.0, edge);
    first = 1;
  }
  for (int i = first; i < panels; ++i)
    acc += panel_sum(lo + i * h, lo + (i + 1) * h);
  // The Fejer kernels integrate to pi, so the stationary limit needs no
  // further normalization.
  return acc;
}

}  // namespace oracle
