#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "omsense/bath.hpp"
#include "omsense/parallel.hpp"
#include "omsense/response.hpp"
#include "omsense/timedomain.hpp"

namespace omsense {

// Controls for the time-domain-vs-frequency-domain cross-check. Times are in
// units of 1/omega_m so the same numbers work at any absolute scale.
struct ValidateSpec {
  int points = 5;           // probe frequencies across the window
  double span = 0.1;        // window width as a fraction of the resonance
  double tolerance = 1e-2;  // acceptable relative deviation
  double dt = 0.05;         // integrator step, units of 1/omega_m
  double settle = 0.0;      // ring-down wait, units of 1/omega_m; 0 = automatic
};

struct OraclePoint {
  double omega = 0.0;            // probe frequency
  double magnitude_freq = 0.0;   // |chi_xm| from the frequency-domain formula
  double magnitude_oracle = 0.0; // |chi_xm| recovered from the simulation
  double rel_dev = 0.0;
};

struct OracleComparison {
  std::vector<OraclePoint> points;
  double max_rel_dev = 0.0;
  double resonance = 0.0;  // bath-shifted resonance the window is centered on
};

// Drives the time-domain equations at each probe frequency and compares the
// extracted transfer magnitude against the analytic susceptibility. The
// bracket grid supplies the peak response, which sets both the ring-down rate
// estimate and how far each transient must decay below its steady signal.
inline OracleComparison compare_oracle_transfer(const SystemParams& p,
                                                const BathContext& ctx,
                                                const ValidateSpec& spec,
                                                const FrequencyGrid& bracket,
                                                unsigned threads = 0) {
  if (spec.points < 1)
    throw std::invalid_argument("compare_oracle_transfer: points must be >= 1");
  if (!(spec.span > 0.0 && spec.span < 2.0))
    throw std::invalid_argument(
        "compare_oracle_transfer: span must be in (0, 2)");
  if (!(spec.dt > 0.0))
    throw std::invalid_argument("compare_oracle_transfer: dt must be > 0");

  OracleComparison out;
  out.resonance = effective_frequency(ctx);

  std::vector<double> freqs(static_cast<std::size_t>(spec.points));
  if (spec.points == 1) {
    freqs[0] = out.resonance;
  } else {
    const double lo = out.resonance * (1.0 - 0.5 * spec.span);
    const double hi = out.resonance * (1.0 + 0.5 * spec.span);
    for (int i = 0; i < spec.points; ++i)
      freqs[static_cast<std::size_t>(i)] =
          lo + (hi - lo) * i / (spec.points - 1);
  }

  const ComplexSpectrum bracket_chi = chi_xm_grid(p, ctx, bracket, {}, threads);
  const double peak = bracket_chi.values.abs().maxCoeff();
  const double ring_rate = 1.0 / peak;  // Lorentzian peak height ~ 1/linewidth

  const double dt = spec.dt / ctx.omega_m;
  std::vector<Complex> reference(freqs.size());
  std::vector<double> settles(freqs.size());
  double horizon = 0.0;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    reference[i] = chi_xm(p, ctx, freqs[i]);
    double settle = spec.settle / ctx.omega_m;
    if (!(settle > 0.0)) {
      // The transient rings at the resonance with near-peak amplitude; wait
      // until it sits ~1.5e-4 below the steady off-resonant signal.
      const double ratio = std::max(1.0, peak / std::abs(reference[i]));
      settle = 2.0 * std::log(ratio / 1.5e-4) / ring_rate;
    }
    settles[i] = settle;
    horizon = std::max(horizon, settle + 22.0 * 2.0 * pi / freqs[i]);
  }

  std::optional<MemoryKernel> kernel;
  if (ctx.density.kind != BathKind::markovian)
    kernel.emplace(build_kernel(ctx.density, dt, horizon + dt));
  const MemoryKernel* kernel_ptr = kernel ? &*kernel : nullptr;

  out.points.resize(freqs.size());
  parallel_for(freqs.size(), threads, [&](std::size_t i) {
    const Complex transfer =
        driven_transfer(p, ctx, freqs[i], dt, settles[i], kernel_ptr);
    OraclePoint& pt = out.points[i];
    pt.omega = freqs[i];
    pt.magnitude_freq = std::abs(reference[i]);
    pt.magnitude_oracle = std::abs(transfer);
    pt.rel_dev = std::abs(pt.magnitude_oracle - pt.magnitude_freq) /
                 pt.magnitude_freq;
  });

  for (const OraclePoint& pt : out.points)
    out.max_rel_dev = std::max(out.max_rel_dev, pt.rel_dev);
  return out;
}

}  // namespace omsense
