#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "omsense/config.hpp"
#include "omsense/csv.hpp"
#include "omsense/homodyne.hpp"
#include "omsense/response.hpp"
#include "omsense/sensing.hpp"
#include "omsense/validate.hpp"
#include "omsense/version.hpp"

namespace omsense::jobs {

inline std::string default_output(JobKind kind) {
  return std::string(job_kind_name(kind)) + ".csv";
}

// Every output file records the complete resolved parameter set, defaults
// included, so a CSV alone reproduces its run. Frequencies are reported in
// units of omega_m (the absolute scale is the omega_m_rad_s line),
// susceptibilities in 1/omega_m, spectral densities in omega_m. No
// timestamps: identical configs must produce byte-identical files.
inline void write_common_metadata(csv::Table& t, const RunConfig& c) {
  const double u = c.params.omega_m;
  t.meta("generator", "omsense");
  t.meta("version", version);
  t.meta("job", job_kind_name(*c.job));
  t.comment("frequency unit below: omega_m; susceptibility unit: 1/omega_m; "
            "spectra unit: omega_m");
  t.meta("omega_m_rad_s", u);
  t.meta("kappa", c.params.kappa / u);
  t.meta("coupling_re", c.params.coupling.real() / u);
  t.meta("coupling_im", c.params.coupling.imag() / u);
  t.meta("detuning_eff", c.params.detuning_eff / u);
  t.meta("theta", c.params.theta);
  const SpectralDensity& d = c.bath.density;
  switch (d.kind) {
    case BathKind::markovian:
      t.meta("bath_kind", "markovian");
      t.meta("bath_gamma_m", d.gamma_m / u);
      break;
    case BathKind::ohmic:
      t.meta("bath_kind", "ohmic");
      t.meta("bath_eta", d.eta);
      t.meta("bath_s", d.s);
      t.meta("bath_omega_0", d.omega_0 / u);
      break;
    case BathKind::cutoff_power_law:
      t.meta("bath_kind", "cutoff_power_law");
      t.meta("bath_j_anchor", d.j_anchor / u);
      t.meta("bath_k", d.k);
      t.meta("bath_omega_lo", d.omega_lo / u);
      t.meta("bath_omega_hi", d.omega_hi / u);
      t.meta("bath_omega_anchor", d.omega_anchor / u);
      break;
  }
  t.meta("temperature_K", c.bath.temperature);
  t.meta_flag("include_thermal", c.include_thermal);
  t.meta("grid_start", c.grid.start / u);
  t.meta("grid_stop", c.grid.stop / u);
  t.meta_int("grid_points", c.grid.points);
}

inline int run_spectrum(const RunConfig& c, const std::string& out_path,
                        std::ostream& diag) {
  const double u = c.params.omega_m;
  const ComplexSpectrum sigma = self_energy_grid(c.bath, c.grid, {}, c.threads);
  const Complex x0 = chi_x0(c.params, c.bath);
  const double x0_abs = std::abs(x0);

  std::optional<Eigen::ArrayXd> s_add;
  try {
    s_add = s_add_general(c.params, c.bath, sigma, c.include_thermal).s_add;
  } catch (const NoTransductionError& e) {
    diag << "note: " << e.what() << "; s_add column left empty\n";
  }
  const RealSpectrum s_xi = thermal_noise_spectrum(c.bath, c.grid);

  csv::Table t;
  write_common_metadata(t, c);
  t.header({"omega", "chi_xm_re", "chi_xm_im", "chi_ratio", "s_add", "s_xixi"});
  for (Eigen::Index i = 0; i < c.grid.points; ++i) {
    const double w = c.grid.omega(i);
    const Complex chi = chi_xm_from_sigma(c.params, w, sigma.values[i]);
    t.row({w / u, chi.real() * u, chi.imag() * u, std::abs(chi) / x0_abs,
           s_add ? std::optional<double>((*s_add)[i] / u) : std::nullopt,
           s_xi.values[i] / u});
  }
  t.write_file(out_path);
  return 0;
}

inline int run_sweep(const RunConfig& c, const std::string& out_path,
                     std::ostream& diag) {
  const double u = c.params.omega_m;
  const SweepJobSpec& body = *c.sweep;
  Eigen::ArrayXd values(body.points);
  for (int i = 0; i < body.points; ++i) {
    const double frac = static_cast<double>(i) / (body.points - 1);
    values[i] = body.log_scale
                    ? body.start * std::pow(body.stop / body.start, frac)
                    : body.start + (body.stop - body.start) * frac;
  }
  const SweepSpec spec{body.axis, SweepQuantity::s_add_optimum, values, c.grid,
                       c.include_thermal};
  const std::vector<SweepRow> rows = sweep(c.params, c.bath, spec, {}, c.threads);

  const double axis_unit = body.axis == SweepAxis::theta ? 1.0 : u;
  const char* axis_name = body.axis == SweepAxis::coupling ? "coupling"
                          : body.axis == SweepAxis::kappa  ? "kappa"
                                                           : "theta";
  csv::Table t;
  write_common_metadata(t, c);
  t.meta("sweep_axis", axis_name);
  t.meta("sweep_start", body.start / axis_unit);
  t.meta("sweep_stop", body.stop / axis_unit);
  t.meta_int("sweep_points", body.points);
  t.meta("sweep_scale", body.log_scale ? "log" : "linear");
  t.header({"axis_value", "omega_opt", "s_add_opt"});
  for (const SweepRow& row : rows) {
    if (row.ok) {
      t.row({row.axis_value / axis_unit, row.omega_opt / u, row.s_add_opt / u});
    } else {
      t.row({row.axis_value / axis_unit, std::nullopt, std::nullopt});
      diag << "note: sweep row at " << csv::format_number(row.axis_value / axis_unit)
           << " failed: " << row.error << "\n";
    }
  }
  t.write_file(out_path);
  return 0;
}

inline int run_sense(const RunConfig& c, const std::string& out_path,
                     std::ostream&) {
  const double u = c.params.omega_m;
  const SenseConfig& body = *c.sense;
  const SenseComponents comp =
      sense_components(c.params, c.bath, c.grid, {}, c.threads);
  const SenseResult result = assemble_s_out(comp, s_in(body));

  csv::Table t;
  write_common_metadata(t, c);
  t.meta("sense_responsivity", body.responsivity);
  t.meta("sense_unit_mass", body.unit_mass);
  t.meta_int("sense_count", body.count);
  t.meta("s_in", s_in(body));
  t.meta("s_in_omega_m", s_in(body) / u);
  t.meta("omega_eff", result.resonance / u);
  t.meta("i_out", result.resonant_value);
  t.header({"omega", "s_out"});
  for (Eigen::Index i = 0; i < c.grid.points; ++i)
    t.row({c.grid.omega(i) / u, result.spectrum.values[i]});
  t.comment("summary: count,i_out");
  t.comment(std::to_string(body.count) + "," +
            csv::format_number(result.resonant_value));
  t.write_file(out_path);
  return 0;
}

inline int run_validate(const RunConfig& c, const std::string& out_path,
                        std::ostream& diag) {
  const double u = c.params.omega_m;
  const OracleComparison cmp =
      compare_oracle_transfer(c.params, c.bath, c.validate, c.grid, c.threads);

  csv::Table t;
  write_common_metadata(t, c);
  t.meta_int("validate_points", c.validate.points);
  t.meta("validate_span", c.validate.span);
  t.meta("validate_tolerance", c.validate.tolerance);
  t.meta("validate_dt", c.validate.dt);
  t.meta("validate_settle", c.validate.settle);
  t.meta("omega_eff", cmp.resonance / u);
  t.meta("max_rel_dev", cmp.max_rel_dev);
  t.header({"omega", "chi_abs_freq", "chi_abs_oracle", "rel_dev"});
  for (const OraclePoint& pt : cmp.points)
    t.row({pt.omega / u, pt.magnitude_freq * u, pt.magnitude_oracle * u,
           pt.rel_dev});
  t.write_file(out_path);

  diag << "max relative deviation = " << csv::format_number(cmp.max_rel_dev)
       << "\n";
  if (cmp.max_rel_dev >= c.validate.tolerance) {
    diag << "tolerance " << csv::format_number(c.validate.tolerance)
         << " exceeded\n";
    return 1;
  }
  return 0;
}

// Dispatches a resolved config; returns the process exit status.
inline int run(const RunConfig& c, std::ostream& diag) {
  if (!c.job) throw std::invalid_argument("run: job kind unresolved");
  const std::string out_path =
      c.output.empty() ? default_output(*c.job) : c.output;
  switch (*c.job) {
    case JobKind::spectrum: return run_spectrum(c, out_path, diag);
    case JobKind::sweep: return run_sweep(c, out_path, diag);
    case JobKind::sense: return run_sense(c, out_path, diag);
    case JobKind::validate: return run_validate(c, out_path, diag);
  }
  return 1;
}

}  // namespace omsense::jobs
