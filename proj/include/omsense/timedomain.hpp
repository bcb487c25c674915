#pragma once

// Time-domain cross-check of the frequency-domain response: direct
// integration of the coupled cavity-mechanics mean-value equations with a
// memory-kernel friction term, followed by steady-state transfer extraction.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "omsense/bath.hpp"
#include "omsense/response.hpp"

namespace omsense {

// Friction memory kernel f(t) = int_0^inf dw J(w) sin(w t), tabulated on the
// integrator's step so the history convolution needs no interpolation.
// Entries past nonzero_taps are exact zeros (negligible-tail truncation).
struct MemoryKernel {
  Eigen::ArrayXd values;  // values[k] = f(k * dt)
  double dt = 0.0;
  double horizon = 0.0;   // covers lags up to this time
  Eigen::Index nonzero_taps = 0;
  double slope0 = 0.0;    // f'(0) = int J(w) w dw, for the endpoint correction
};

namespace detail {

// Fixed 8-point Gauss-Legendre rule on [-1, 1], tabulated as nonnegative
// half-nodes.
inline constexpr double gl8_nodes[4] = {0.18343464249564980494,
                                        0.52553240991632898582,
                                        0.79666647741362673959,
                                        0.96028985649753623168};
inline constexpr double gl8_weights[4] = {0.36268378337836198297,
                                          0.31370664587788728734,
                                          0.22238103445337447054,
                                          0.10122853629037625915};

inline double gl8_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double x = h * gl8_nodes[j];
    acc += gl8_weights[j] * (f(c - x) + f(c + x));
  }
  return acc * h;
}

// Oscillation-resolving composite rule for int_lo^hi J(w) sin(w t) dw.
inline double kernel_tap_banded(const SpectralDensity& d, double t, double lo,
                                double hi) {
  const auto integrand = [&](double w) { return eval_density(d, w) * std::sin(w * t); };
  const double max_width = t > 0.0 ? 2.0 * pi / (3.0 * t) : (hi - lo);
  const int panels = std::max(4, static_cast<int>(std::ceil((hi - lo) / max_width)));
  const double width = (hi - lo) / panels;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i)
    acc += gl8_panel(integrand, lo + i * width, lo + (i + 1) * width);
  return acc;
}

}  // namespace detail

// Tabulates the friction kernel at the integrator step. The ohmic family has
// the closed form f(t) = eta w0^2 Gamma(s+1) Im[(1 - i w0 t)^-(s+1)]; the
// banded density is integrated numerically with oscillation-matched panels.
// Once 64 consecutive taps fall below 1e-8 of the running peak the tail is
// zero-filled and nonzero_taps records the cut.
inline MemoryKernel build_kernel(const SpectralDensity& d, double dt,
                                 double horizon) {
  if (d.kind == BathKind::markovian)
    throw std::invalid_argument("build_kernel: markovian damping has no memory kernel");
  if (!(dt > 0.0)) throw std::invalid_argument("build_kernel: dt must be > 0");
  if (!(horizon >= dt))
    throw std::invalid_argument("build_kernel: horizon must be >= dt");

  const auto taps =
      static_cast<Eigen::Index>(std::floor(horizon / dt + 1e-9)) + 1;
  MemoryKernel kernel{Eigen::ArrayXd::Zero(taps), dt, horizon, taps, 0.0};
  if (d.kind == BathKind::ohmic) {
    kernel.slope0 = d.eta * std::pow(d.omega_0, 3.0) * std::tgamma(d.s + 2.0);
  } else {
    const auto first_moment = [&d](double w) { return eval_density(d, w) * w; };
    kernel.slope0 =
        quad::integrate_finite(first_moment, d.omega_lo, d.omega_hi,
                               {.rel_tol = 1e-12})
            .value;
  }

  const double gamma_s1 =
      d.kind == BathKind::ohmic ? std::tgamma(d.s + 1.0) : 0.0;
  double peak = 0.0;
  int quiet = 0;
  for (Eigen::Index k = 1; k < taps; ++k) {
    const double t = static_cast<double>(k) * dt;
    double f = 0.0;
    if (d.kind == BathKind::ohmic) {
      const Complex z = std::pow(Complex(1.0, -d.omega_0 * t), -(d.s + 1.0));
      f = d.eta * d.omega_0 * d.omega_0 * gamma_s1 * z.imag();
    } else {
      f = detail::kernel_tap_banded(d, t, d.omega_lo, d.omega_hi);
    }
    kernel.values[k] = f;
    peak = std::max(peak, std::abs(f));
    quiet = std::abs(f) < 1e-8 * peak ? quiet + 1 : 0;
    if (quiet >= 64) {
      kernel.values.segment(k + 1, taps - k - 1).setZero();
      kernel.nonzero_taps = k + 1;
      break;
    }
  }
  return kernel;
}

// Mean-value trajectory of (q, p, Re a, Im a) on a uniform time grid.
struct Trajectory {
  Eigen::ArrayXd time, q, p, a_re, a_im;
};

// Integrates the linearized mean-value equations
//   dq/dt = omega_m p
//   dp/dt = -omega_m q + I(t) + 2 Re(G* a) + F(t)
//   da/dt = -(kappa/2) a - i detuning a + i G q
// with I(t) = int_0^t f(t - tau) q(tau) dtau for a structured bath (trapezoid
// over the tabulated kernel; f(0) = 0 keeps each step explicit) or
// I(t) = -gamma_m p for memoryless damping. Classical RK4 with the memory
// term interpolated between step boundaries. Starts from the zero state.
// dt must resolve the fastest scale: dt <= 2 pi / (50 max(omega_m, |det|, kappa)).
inline Trajectory simulate_mean_response(const SystemParams& params,
                                         const BathContext& ctx,
                                         const std::function<double(double)>& force,
                                         double dt, double t_final,
                                         const MemoryKernel* kernel = nullptr) {
  if (!(dt > 0.0))
    throw std::invalid_argument("simulate_mean_response: dt must be > 0");
  if (!(t_final > dt))
    throw std::invalid_argument("simulate_mean_response: t_final must exceed dt");
  const double fastest =
      std::max({params.omega_m, std::abs(params.detuning_eff), params.kappa});
  if (dt > 2.0 * pi / (50.0 * fastest))
    throw std::invalid_argument(
        "simulate_mean_response: dt too coarse for the fastest system scale");
  if (params.omega_m != ctx.omega_m)
    throw std::invalid_argument(
        "simulate_mean_response: system and bath disagree on omega_m");

  const bool structured = ctx.density.kind != BathKind::markovian;
  MemoryKernel local;
  if (structured) {
    if (kernel == nullptr) {
      local = build_kernel(ctx.density, dt, t_final);
      kernel = &local;
    } else {
      if (std::abs(kernel->dt - dt) > 1e-12 * dt)
        throw std::invalid_argument(
            "simulate_mean_response: kernel step does not match integrator step");
      if (kernel->horizon < t_final - 1e-9 * dt)
        throw std::invalid_argument(
            "simulate_mean_response: kernel horizon shorter than t_final");
    }
  } else if (kernel != nullptr) {
    throw std::invalid_argument(
        "simulate_mean_response: memoryless damping takes no kernel");
  }

  const auto steps = static_cast<Eigen::Index>(std::ceil(t_final / dt - 1e-9));
  Trajectory traj{Eigen::ArrayXd(steps + 1), Eigen::ArrayXd::Zero(steps + 1),
                  Eigen::ArrayXd::Zero(steps + 1), Eigen::ArrayXd::Zero(steps + 1),
                  Eigen::ArrayXd::Zero(steps + 1)};
  for (Eigen::Index n = 0; n <= steps; ++n)
    traj.time[n] = static_cast<double>(n) * dt;

  const double wm = params.omega_m;
  const double half_kappa = 0.5 * params.kappa;
  const double det = params.detuning_eff;
  const double g_re = params.coupling.real();
  const double g_im = params.coupling.imag();
  const double gamma_m = structured ? 0.0 : ctx.density.gamma_m;

  // Euler-Maclaurin endpoint correction of the trapezoid convolution at the
  // tau = t end (the tau = 0 end vanishes for the zero initial state); it is
  // local in q, so each stage applies it to its own displacement.
  const double mem_slope =
      structured ? dt * dt / 12.0 * kernel->slope0 : 0.0;

  // Trapezoid memory integral at t_m from the stored history q[0..m-1];
  // the f(0) = 0 endpoint makes it independent of the unknown q[m].
  const auto memory_at = [&](Eigen::Index m) -> double {
    const Eigen::Index K = std::min<Eigen::Index>(m, kernel->nonzero_taps - 1);
    if (K <= 0) return 0.0;
    const double* fk = kernel->values.data();
    const double* qh = traj.q.data();
    double acc = 0.0;
    for (Eigen::Index k = 1; k <= K; ++k) acc += fk[k] * qh[m - k];
    if (K == m) acc -= 0.5 * fk[m] * qh[0];
    return dt * acc;
  };

  struct State {
    double q, p, ar, ai;
  };
  const auto deriv = [&](const State& y, double mem, double f_ext) -> State {
    return {wm * y.p,
            -wm * y.q - gamma_m * y.p + mem + mem_slope * y.q +
                2.0 * (g_re * y.ar + g_im * y.ai) + f_ext,
            -half_kappa * y.ar + det * y.ai - g_im * y.q,
            -half_kappa * y.ai - det * y.ar + g_re * y.q};
  };

  State y{0.0, 0.0, 0.0, 0.0};
  double mem0 = 0.0;  // I(t_0) = 0 from the empty history
  double f_max = 0.0;
  for (Eigen::Index n = 0; n < steps; ++n) {
    const double t = traj.time[n];
    const double mem1 = structured ? memory_at(n + 1) : 0.0;
    const double mem_half = 0.5 * (mem0 + mem1);
    const double f0 = force(t);
    const double fh = force(t + 0.5 * dt);
    const double f1 = force(t + dt);
    f_max = std::max(f_max, std::abs(f0));

    const State k1 = deriv(y, mem0, f0);
    const State k2 = deriv({y.q + 0.5 * dt * k1.q, y.p + 0.5 * dt * k1.p,
                            y.ar + 0.5 * dt * k1.ar, y.ai + 0.5 * dt * k1.ai},
                           mem_half, fh);
    const State k3 = deriv({y.q + 0.5 * dt * k2.q, y.p + 0.5 * dt * k2.p,
                            y.ar + 0.5 * dt * k2.ar, y.ai + 0.5 * dt * k2.ai},
                           mem_half, fh);
    const State k4 = deriv({y.q + dt * k3.q, y.p + dt * k3.p, y.ar + dt * k3.ar,
                            y.ai + dt * k3.ai},
                           mem1, f1);
    y.q += dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    y.p += dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    y.ar += dt / 6.0 * (k1.ar + 2.0 * k2.ar + 2.0 * k3.ar + k4.ar);
    y.ai += dt / 6.0 * (k1.ai + 2.0 * k2.ai + 2.0 * k3.ai + k4.ai);

    traj.q[n + 1] = y.q;
    traj.p[n + 1] = y.p;
    traj.a_re[n + 1] = y.ar;
    traj.a_im[n + 1] = y.ai;
    mem0 = mem1;

    if ((n & 63) == 63) {
      const double norm =
          std::sqrt(y.q * y.q + y.p * y.p + y.ar * y.ar + y.ai * y.ai);
      if (norm > 1e12 * (f_max / wm))
        throw DivergenceError("simulate_mean_response: trajectory diverged");
    }
  }
  return traj;
}

// Complex steady-state amplitude of q against a unit cosine drive at
// omega_d: A = (2 / T_w) int q(t) exp(+i omega_d t) dt over the last whole
// number of drive periods (at least 20) after the settling window. For
// q(t) = Re[A exp(-i omega_d t)] this returns A; a unit-cosine-driven system
// therefore returns its transfer function at omega_d.
inline Complex extract_transfer(const Trajectory& traj, double omega_d,
                                double settle_fraction) {
  if (!(omega_d > 0.0))
    throw std::invalid_argument("extract_transfer: omega_d must be > 0");
  if (!(settle_fraction >= 0.0 && settle_fraction < 1.0))
    throw std::invalid_argument(
        "extract_transfer: settle_fraction must lie in [0, 1)");
  const Eigen::Index n = traj.time.size();
  if (n < 3) throw std::invalid_argument("extract_transfer: trajectory too short");
  const double dt = traj.time[1] - traj.time[0];
  const double t_end = traj.time[n - 1];
  const double period = 2.0 * pi / omega_d;
  const double usable = t_end * (1.0 - settle_fraction);
  const auto whole_periods = static_cast<long>(std::floor(usable / period + 1e-12));
  if (whole_periods < 20)
    throw std::invalid_argument(
        "extract_transfer: window must span at least 20 whole drive periods");
  const double t_w = static_cast<double>(whole_periods) * period;
  const double w_start = t_end - t_w;

  const auto sample = [&](Eigen::Index j) {
    return Complex(traj.q[j], 0.0) *
           std::exp(Complex(0.0, omega_d * traj.time[j]));
  };
  auto j0 = static_cast<Eigen::Index>(std::ceil(w_start / dt - 1e-12));
  j0 = std::clamp<Eigen::Index>(j0, 1, n - 1);
  Complex integral(0.0, 0.0);
  for (Eigen::Index j = j0; j + 1 < n; ++j)
    integral += 0.5 * (sample(j) + sample(j + 1)) * dt;
  const double lead = traj.time[j0] - w_start;  // partial first cell
  if (lead > 1e-12 * dt) {
    const double frac = lead / dt;  // linear interpolation back from j0
    const double q_start = traj.q[j0] * (1.0 - frac) + traj.q[j0 - 1] * frac;
    const Complex g_start =
        Complex(q_start, 0.0) * std::exp(Complex(0.0, omega_d * w_start));
    integral += 0.5 * (g_start + sample(j0)) * lead;
  }
  return 2.0 / t_w * integral;
}

// Runs a unit cosine drive at omega_d until the transient has settled, then
// reads off the transfer amplitude; equals the dressed mechanical response
// at omega_d up to discretization error. A prebuilt kernel (matching dt,
// horizon >= settle + 22 periods) is reused when supplied.
inline Complex driven_transfer(const SystemParams& params, const BathContext& ctx,
                               double omega_d, double dt, double settle_time,
                               const MemoryKernel* kernel = nullptr) {
  if (!(omega_d > 0.0))
    throw std::invalid_argument("driven_transfer: omega_d must be > 0");
  if (!(settle_time > 0.0))
    throw std::invalid_argument("driven_transfer: settle_time must be > 0");
  const double t_final = settle_time + 22.0 * 2.0 * pi / omega_d;
  const auto drive = [omega_d](double t) { return std::cos(omega_d * t); };
  const Trajectory traj =
      simulate_mean_response(params, ctx, drive, dt, t_final, kernel);
  const double settle_fraction = (settle_time - 0.5 * dt) / t_final;
  return extract_transfer(traj, omega_d, settle_fraction);
}

}  // namespace omsense
