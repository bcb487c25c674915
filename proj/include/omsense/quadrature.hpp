#pragma once

// Adaptive numerical integration: Gauss-Kronrod panels on finite intervals,
// truncated exponentially decaying tails, and Cauchy principal values via
// singularity subtraction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>

#include "omsense/errors.hpp"

namespace omsense::quad {

using Integrand = std::function<double(double)>;

struct Options {
  double rel_tol = 1e-8;
  std::size_t max_panels = std::size_t{1} << 15;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss; nonnegative abscissae, the
// Gauss subset sits at indices 1, 3, 5 plus the midpoint.
inline constexpr double gk_nodes[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double gk_weights[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr double gauss_weights[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

inline Panel evaluate_panel(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = gk_weights[7] * fc;
  double gauss = gauss_weights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * gk_nodes[j];
    const double pair = f(c - x) + f(c + x);
    kron += gk_weights[j] * pair;
    if (j % 2 == 1) gauss += gauss_weights[(j - 1) / 2] * pair;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over [a, b]. Converged
// when the summed error estimate drops under rel_tol * |value| or under the
// 1e-14 absolute floor (for integrals that cancel to zero).
inline QuadratureResult integrate_finite(const Integrand& f, double a, double b,
                                         const Options& opts = {}) {
  if (!(a < b)) throw std::invalid_argument("integrate_finite: requires a < b");
  std::priority_queue<detail::Panel> panels;
  detail::Panel first = detail::evaluate_panel(f, a, b);
  panels.push(first);
  double total = first.value;
  double err = first.error;
  std::size_t evals = 15;
  std::size_t count = 1;
  constexpr double abs_floor = 1e-14;
  while (err > std::max(opts.rel_tol * std::abs(total), abs_floor)) {
    if (count >= opts.max_panels)
      throw QuadratureError("integrate_finite: subdivision budget exhausted", total, err);
    const detail::Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b))
      throw QuadratureError("integrate_finite: interval underflow", total, err);
    panels.pop();
    const detail::Panel left = detail::evaluate_panel(f, worst.a, mid);
    const detail::Panel right = detail::evaluate_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    evals += 30;
    count += 1;
  }
  return {total, err, evals};
}

// Integrates f over [a, inf) for integrands that decay at least exponentially
// on the given scale. The tail is truncated at a + 40 * decay_scale, which is
// below double precision for a pure exponential.
inline QuadratureResult integrate_semi_infinite(const Integrand& f, double a,
                                                double decay_scale,
                                                const Options& opts = {}) {
  if (!(decay_scale > 0.0))
    throw std::invalid_argument("integrate_semi_infinite: decay_scale must be > 0");
  return integrate_finite(f, a, a + 40.0 * decay_scale, opts);
}

namespace detail {

struct ResidueEstimate {
  double residue;
  double smooth_at_pole;
  std::size_t evaluations;
};

// Residue of a simple pole from Richardson-extrapolated symmetric
// differences; also returns the even (smooth) part at the pole. Throws when
// successive extrapolations disagree, which signals a non-simple singularity.
inline ResidueEstimate estimate_residue(const Integrand& f, double pole, double h0) {
  const auto sym = [&](double h) { return 0.5 * h * (f(pole + h) - f(pole - h)); };
  const double r_a = sym(h0);
  const double r_b = sym(0.5 * h0);
  const double r_c = sym(0.25 * h0);
  const double r1 = (4.0 * r_b - r_a) / 3.0;
  const double r2 = (4.0 * r_c - r_b) / 3.0;
  const double smooth = 0.5 * (f(pole + h0) + f(pole - h0));
  const double scale = std::max({std::abs(r1), std::abs(r2), 1e-30});
  if (!std::isfinite(r2) ||
      std::abs(r2 - r1) > 1e-3 * scale + 1e-13 * std::abs(smooth) * h0)
    throw SingularityError("principal_value: residue estimate unstable near pole");
  return {r2, smooth, 6};
}

}  // namespace detail

// Cauchy principal value of f over [a, b] with one declared simple pole
// strictly inside. The pole term r/(x - pole) is subtracted, integrated
// analytically (r * log((b - pole)/(pole - a))), and the regular remainder is
// handled adaptively. Nodes that land within 1e-8 of the pole return the
// smooth part directly to avoid catastrophic cancellation.
inline QuadratureResult principal_value(const Integrand& f, double pole, double a,
                                        double b, const Options& opts = {}) {
  if (!(a < pole && pole < b))
    throw std::invalid_argument("principal_value: pole must lie strictly inside (a, b)");
  const double margin = std::min(pole - a, b - pole);
  const double h0 = 1e-4 * margin;
  const detail::ResidueEstimate res = detail::estimate_residue(f, pole, h0);
  const double near = 1e-8 * margin;
  const Integrand regular = [&f, pole, near, r = res.residue,
                             s = res.smooth_at_pole](double x) {
    if (std::abs(x - pole) < near) return s;
    return f(x) - r / (x - pole);
  };
  QuadratureResult out = integrate_finite(regular, a, b, opts);
  out.value += res.residue * std::log((b - pole) / (pole - a));
  out.evaluations += res.evaluations;
  return out;
}

}  // namespace omsense::quad
