#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "omsense/bath.hpp"

using namespace omsense;

namespace {
constexpr double omega_m = 1.0e6;  // rad/s

// Independent closed form for the strict-ohmic (s = 1) dispersion integral,
//   Re Sigma(w) = eta * [w0 - (w/2) * (exp(-a) Ei(a) - exp(a) Ei(-a))],
// with a = w / w0, derived by partial fractions and the exponential-integral
// representation of PV int_0^inf exp(-t)/(t -+ a) dt.
double ohmic1_re_sigma(double eta, double omega_0, double omega) {
  const double a = omega / omega_0;
  return eta * (omega_0 - 0.5 * omega *
                              (std::exp(-a) * std::expint(a) -
                               std::exp(a) * std::expint(-a)));
}

// Independent closed form for the banded k = -2 density: partial fractions
// give Re Sigma = (j * wa^2 / w^2) * (log(|hi^2-w^2|/|lo^2-w^2|)/2 - log(hi/lo)).
double banded_km2_re_sigma(double j, double wa, double lo, double hi, double w) {
  return j * wa * wa / (w * w) *
         (0.5 * std::log(std::abs(hi * hi - w * w) / std::abs(lo * lo - w * w)) -
          std::log(hi / lo));
}
}  // namespace

TEST_CASE("spectral densities have the declared shapes and supports") {
  const auto flat = SpectralDensity::markovian(0.3 * omega_m);
  CHECK(eval_density(flat, 0.7 * omega_m) == doctest::Approx(0.3 * omega_m / pi));
  CHECK(eval_density(flat, 12.0 * omega_m) == doctest::Approx(0.3 * omega_m / pi));
  CHECK(eval_density(flat, 0.0) == 0.0);
  CHECK(eval_density(flat, -omega_m) == 0.0);

  const auto oh = SpectralDensity::ohmic(2.0e-3, 2.0, 10.0 * omega_m);
  const double w = 3.0 * omega_m;
  CHECK(eval_density(oh, w) ==
        doctest::Approx(2.0e-3 * w * (w / (10.0 * omega_m)) *
                        std::exp(-w / (10.0 * omega_m))));
  CHECK(eval_density(oh, 0.0) == 0.0);
  CHECK(eval_density(oh, -w) == 0.0);

  const auto band = SpectralDensity::cutoff_power_law(1.0e-3 * omega_m, -2.0,
                                                      0.9 * omega_m, 1.1 * omega_m,
                                                      omega_m);
  CHECK(eval_density(band, omega_m) == doctest::Approx(1.0e-3 * omega_m));
  CHECK(eval_density(band, 0.9 * omega_m) ==
        doctest::Approx(1.0e-3 * omega_m / (0.9 * 0.9)));  // closed band edge
  CHECK(eval_density(band, 0.89999 * omega_m) == 0.0);
  CHECK(eval_density(band, 1.10001 * omega_m) == 0.0);

  CHECK_THROWS_AS(SpectralDensity::markovian(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralDensity::ohmic(1e-3, 0.0, omega_m), std::invalid_argument);
  CHECK_THROWS_AS(SpectralDensity::cutoff_power_law(1e-3, -2.0, omega_m,
                                                    0.5 * omega_m, omega_m),
                  std::invalid_argument);
}

TEST_CASE("effective damping and its calibration invert each other") {
  const double target = pi * 1.0e-3 * omega_m;
  for (double s : {0.5, 1.0, 2.0}) {
    const double eta = calibrate_eta(target, s, 10.0 * omega_m, omega_m);
    const BathContext ctx{SpectralDensity::ohmic(eta, s, 10.0 * omega_m), 0.0,
                          omega_m};
    CHECK(gamma_eff(ctx) == doctest::Approx(target).epsilon(1e-13));
  }
  // Strict ohmic with omega_0 = 10 omega_m: eta = 1e-3 * exp(0.1).
  CHECK(calibrate_eta(target, 1.0, 10.0 * omega_m, omega_m) ==
        doctest::Approx(1.0e-3 * std::exp(0.1)).epsilon(1e-13));

  const BathContext flat{SpectralDensity::markovian(0.2 * omega_m), 0.0, omega_m};
  CHECK(gamma_eff(flat) == 0.2 * omega_m);

  CHECK(quoted_coupling_presets[0].s == 0.5);
  CHECK(quoted_coupling_presets[0].eta == 5.5e-3);
  CHECK(quoted_coupling_presets[1].eta == 1.2e-2);
  CHECK(quoted_coupling_presets[2].eta == 6.1e-2);
}

TEST_CASE("thermal occupation follows Bose statistics") {
  CHECK(n_th(omega_m, 0.0) == 0.0);
  CHECK_THROWS_AS(n_th(0.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(n_th(-omega_m, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(n_th(omega_m, -1.0), std::invalid_argument);

  // High-temperature expansion brackets: 1/x - 1/2 < n(x) < 1/x for x > 0.
  const double x = hbar * omega_m / (k_boltzmann * 1e-3);
  const double n = n_th(omega_m, 1e-3);
  CHECK(n < 1.0 / x);
  CHECK(n > 1.0 / x - 0.5);

  // Doubling the temperature roughly doubles the occupation in this regime.
  CHECK(n_th(omega_m, 2e-3) == doctest::Approx(2.0 * n).epsilon(2e-3));
}

TEST_CASE("thermal force spectrum obeys detailed balance") {
  const double eta = calibrate_eta(pi * 1e-3 * omega_m, 1.0, 10.0 * omega_m, omega_m);
  const BathContext ctx{SpectralDensity::ohmic(eta, 1.0, 10.0 * omega_m), 1e-3,
                        omega_m};
  for (double w : {0.3 * omega_m, omega_m, 2.4 * omega_m}) {
    const double n = n_th(w, ctx.temperature);
    CHECK(thermal_noise_at(ctx, w) / thermal_noise_at(ctx, -w) ==
          doctest::Approx((n + 1.0) / n).epsilon(1e-12));
    CHECK(thermal_noise_at(ctx, w) ==
          doctest::Approx(pi * eval_density(ctx.density, w) * (n + 1.0)));
  }
  CHECK(thermal_noise_at(ctx, 0.0) == 0.0);

  // At zero temperature only the emission side survives.
  const BathContext cold{ctx.density, 0.0, omega_m};
  CHECK(thermal_noise_at(cold, omega_m) ==
        doctest::Approx(pi * eval_density(ctx.density, omega_m)));
  CHECK(thermal_noise_at(cold, -omega_m) == 0.0);

  const FrequencyGrid grid{-2.0 * omega_m, 2.0 * omega_m, 9};
  const RealSpectrum spec = thermal_noise_spectrum(ctx, grid);
  for (Eigen::Index i = 0; i < grid.points; ++i)
    CHECK(spec.values[i] == thermal_noise_at(ctx, grid.omega(i)));
}

TEST_CASE("resonant thermal strength of the memoryless bath") {
  const BathContext ctx{SpectralDensity::markovian(pi * 1e-3 * omega_m), 1e-3,
                        omega_m};
  CHECK(markovian_thermal_noise(ctx) ==
        doctest::Approx(0.4096 * omega_m).epsilon(1e-3));
  CHECK(markovian_thermal_noise(ctx) ==
        doctest::Approx(ctx.density.gamma_m * n_th(omega_m, 1e-3)).epsilon(1e-15));

  const BathContext cold{ctx.density, 0.0, omega_m};
  CHECK(markovian_thermal_noise(cold) == 0.0);

  const BathContext structured{
      SpectralDensity::ohmic(1e-3, 1.0, 10.0 * omega_m), 1e-3, omega_m};
  CHECK_THROWS_AS(markovian_thermal_noise(structured), std::invalid_argument);
}

TEST_CASE("memoryless self-energy closed form") {
  const double g = 0.3 * omega_m;
  for (double w : {-1.7 * omega_m, -omega_m, 0.0, 0.5 * omega_m, 2.0 * omega_m}) {
    const Complex sig = markovian_self_energy(g, w, omega_m);
    CHECK(sig.real() == 0.0);
    CHECK(sig.imag() == doctest::Approx(g * w / omega_m).epsilon(1e-15));
  }
  CHECK_THROWS_AS(markovian_self_energy(0.0, omega_m, omega_m),
                  std::invalid_argument);
}

TEST_CASE("ohmic-family self-energy matches closed forms") {
  const double omega_0 = 10.0 * omega_m;

  // Zero frequency: integral of J/w' = eta * omega_0 * Gamma(s).
  for (double s : {0.5, 1.0, 2.0}) {
    const double eta = calibrate_eta(pi * 1e-3 * omega_m, s, omega_0, omega_m);
    const BathContext ctx{SpectralDensity::ohmic(eta, s, omega_0), 0.0, omega_m};
    const Complex s0 = self_energy(ctx, 0.0);
    CHECK(s0.imag() == 0.0);
    CHECK(s0.real() ==
          doctest::Approx(eta * omega_0 * std::tgamma(s)).epsilon(1e-6));
    CHECK(s0.real() > 0.0);
  }

  // Strict ohmic at finite frequency: exponential-integral closed form.
  const double eta1 = calibrate_eta(pi * 1e-3 * omega_m, 1.0, omega_0, omega_m);
  const BathContext ctx1{SpectralDensity::ohmic(eta1, 1.0, omega_0), 0.0, omega_m};
  for (double w : {0.3 * omega_0, 1.0 * omega_0, 2.5 * omega_0, 0.1 * omega_m}) {
    const Complex sig = self_energy(ctx1, w);
    CHECK(sig.real() ==
          doctest::Approx(ohmic1_re_sigma(eta1, omega_0, w)).epsilon(1e-6));
    CHECK(sig.imag() ==
          doctest::Approx(0.5 * pi * eval_density(ctx1.density, w)).epsilon(1e-12));
    CHECK(sig.imag() > 0.0);
  }
}

TEST_CASE("banded self-energy matches the log closed form") {
  const double j = 1.0e-3 * omega_m;
  const double lo = 0.9 * omega_m, hi = 1.1 * omega_m;
  const BathContext ctx{SpectralDensity::cutoff_power_law(j, -2.0, lo, hi, omega_m),
                        0.0, omega_m};
  // Inside the band (principal value) and outside it (plain integral).
  for (double w : {0.95 * omega_m, 1.0 * omega_m, 1.05 * omega_m, 0.5 * omega_m,
                   1.6 * omega_m}) {
    const Complex sig = self_energy(ctx, w);
    CHECK(sig.real() ==
          doctest::Approx(banded_km2_re_sigma(j, omega_m, lo, hi, w)).epsilon(1e-7));
    CHECK(sig.imag() ==
          doctest::Approx(0.5 * pi * eval_density(ctx.density, w)).epsilon(1e-12));
  }
  // Outside the band the density vanishes, so the self-energy is purely real.
  CHECK(self_energy(ctx, 0.5 * omega_m).imag() == 0.0);
  CHECK(self_energy(ctx, 1.6 * omega_m).imag() == 0.0);

  CHECK_THROWS_AS(self_energy(ctx, lo), SingularityError);
  CHECK_THROWS_AS(self_energy(ctx, hi), SingularityError);
}

TEST_CASE("self-energy respects conjugation symmetry") {
  const double eta = calibrate_eta(pi * 1e-3 * omega_m, 0.5, 10.0 * omega_m, omega_m);
  const BathContext ctx{SpectralDensity::ohmic(eta, 0.5, 10.0 * omega_m), 0.0,
                        omega_m};
  std::mt19937_64 rng(404u);
  std::uniform_real_distribution<double> freq(0.05 * omega_m, 4.0 * omega_m);
  for (int i = 0; i < 12; ++i) {
    const double w = freq(rng);
    const Complex plus = self_energy(ctx, w);
    const Complex minus = self_energy(ctx, -w);
    CHECK(minus.real() == doctest::Approx(plus.real()).epsilon(1e-14));
    CHECK(minus.imag() == doctest::Approx(-plus.imag()).epsilon(1e-14));
    CHECK(plus.imag() > 0.0);  // positive-frequency damping sign
  }
}

TEST_CASE("self-energy dispatch by bath family") {
  const BathContext flat{SpectralDensity::markovian(0.3 * omega_m), 0.0, omega_m};
  CHECK_THROWS_AS(self_energy(flat, omega_m), std::invalid_argument);
  CHECK(bath_self_energy(flat, 0.7 * omega_m) ==
        markovian_self_energy(0.3 * omega_m, 0.7 * omega_m, omega_m));

  const double eta = calibrate_eta(pi * 1e-3 * omega_m, 1.0, 10.0 * omega_m, omega_m);
  const BathContext oh{SpectralDensity::ohmic(eta, 1.0, 10.0 * omega_m), 0.0, omega_m};
  const Complex a = bath_self_energy(oh, 1.3 * omega_m);
  const Complex b = self_energy(oh, 1.3 * omega_m);
  CHECK(a.real() == b.real());
  CHECK(a.imag() == b.imag());
}

TEST_CASE("bath context validates its physical parameters") {
  const auto d = SpectralDensity::markovian(omega_m);
  CHECK_THROWS_AS((BathContext{d, -1.0, omega_m}), std::invalid_argument);
  CHECK_THROWS_AS((BathContext{d, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS((BathContext{d, 0.0, -omega_m}), std::invalid_argument);
}
