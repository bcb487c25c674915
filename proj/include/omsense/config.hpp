#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "omsense/bath.hpp"
#include "omsense/errors.hpp"
#include "omsense/grid.hpp"
#include "omsense/homodyne.hpp"
#include "omsense/response.hpp"
#include "omsense/sensing.hpp"
#include "omsense/validate.hpp"

namespace omsense {

enum class JobKind { spectrum, sweep, sense, validate };

inline const char* job_kind_name(JobKind kind) {
  switch (kind) {
    case JobKind::spectrum: return "spectrum";
    case JobKind::sweep: return "sweep";
    case JobKind::sense: return "sense";
    case JobKind::validate: return "validate";
  }
  return "unknown";
}

// Sweep request as written in a config: the axis values are generated at run
// time from the range and scale.
struct SweepJobSpec {
  SweepAxis axis = SweepAxis::coupling;
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
  bool log_scale = false;
};

// A fully resolved run: every default filled in, every unit converted to
// absolute rad/s, every invariant already enforced.
struct RunConfig {
  SystemParams params;
  BathContext bath;
  FrequencyGrid grid;
  std::optional<JobKind> job;  // absent = decided by the CLI subcommand
  bool include_thermal = false;
  std::string output;  // empty = "<job>.csv"
  std::optional<SweepJobSpec> sweep;
  std::optional<SenseConfig> sense;
  ValidateSpec validate;
  bool has_validate_body = false;
  unsigned threads = 0;  // CLI flag, not a config key; 0 = hardware choice
};

namespace detail_config {

using nlohmann::json;

inline long line_of_offset(const std::string& text, std::size_t byte) {
  long line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Strict accessor for one JSON object: every key an accessor touches is
// registered, and done() rejects whatever was never asked for, so typos never
// pass silently.
class Section {
 public:
  Section(const json* obj, std::string name)
      : obj_(obj), name_(std::move(name)) {}

  bool present(const std::string& key) const {
    return obj_ != nullptr && obj_->contains(key);
  }

  double number(const std::string& key) {
    mark(key);
    if (!present(key)) throw ConfigError(path(key) + " is required");
    return as_number(key);
  }

  std::optional<double> maybe_number(const std::string& key) {
    mark(key);
    if (!present(key)) return std::nullopt;
    return as_number(key);
  }

  double number_or(const std::string& key, double fallback) {
    return maybe_number(key).value_or(fallback);
  }

  long long integer(const std::string& key) {
    mark(key);
    if (!present(key)) throw ConfigError(path(key) + " is required");
    const json& v = (*obj_)[key];
    if (!v.is_number_integer())
      throw ConfigError(path(key) + " must be an integer");
    return v.get<long long>();
  }

  std::string text(const std::string& key) {
    mark(key);
    if (!present(key)) throw ConfigError(path(key) + " is required");
    return as_text(key);
  }

  std::optional<std::string> maybe_text(const std::string& key) {
    mark(key);
    if (!present(key)) return std::nullopt;
    return as_text(key);
  }

  bool flag_or(const std::string& key, bool fallback) {
    mark(key);
    if (!present(key)) return fallback;
    const json& v = (*obj_)[key];
    if (!v.is_boolean()) throw ConfigError(path(key) + " must be true or false");
    return v.get<bool>();
  }

  // A coupling may be a plain number or a [re, im] pair.
  Complex complex_number(const std::string& key) {
    mark(key);
    if (!present(key)) throw ConfigError(path(key) + " is required");
    const json& v = (*obj_)[key];
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return Complex(v[0].get<double>(), v[1].get<double>());
    throw ConfigError(path(key) + " must be a number or an [re, im] pair");
  }

  const json* child(const std::string& key, bool required) {
    mark(key);
    if (!present(key)) {
      if (required) throw ConfigError("section \"" + key + "\" is required");
      return nullptr;
    }
    const json& v = (*obj_)[key];
    if (!v.is_object())
      throw ConfigError("section \"" + key + "\" must be an object");
    return &v;
  }

  void done() const {
    if (obj_ == nullptr) return;
    for (const auto& item : obj_->items())
      if (known_.find(item.key()) == known_.end())
        throw ConfigError("unknown key \"" + item.key() + "\" in section \"" +
                          name_ + "\"");
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  void mark(const std::string& key) { known_.insert(key); }

  double as_number(const std::string& key) const {
    const json& v = (*obj_)[key];
    if (!v.is_number()) throw ConfigError(path(key) + " must be a number");
    return v.get<double>();
  }

  std::string as_text(const std::string& key) const {
    const json& v = (*obj_)[key];
    if (!v.is_string()) throw ConfigError(path(key) + " must be a string");
    return v.get<std::string>();
  }

  const json* obj_;
  std::string name_;
  std::set<std::string> known_;
};

inline double require_positive(double value, const std::string& field) {
  if (!(value > 0.0)) throw ConfigError(field + " must be > 0");
  return value;
}

inline SpectralDensity parse_bath_density(Section& bath, double scale,
                                          double omega_m) {
  const std::string kind = bath.text("kind");
  if (kind == "markovian") {
    const double gamma =
        require_positive(bath.number("gamma_m"), bath.path("gamma_m"));
    return SpectralDensity::markovian(gamma * scale);
  }
  if (kind == "ohmic") {
    const double s = require_positive(bath.number("s"), bath.path("s"));
    const double omega_0 =
        require_positive(bath.number("omega_0"), bath.path("omega_0")) * scale;
    const auto eta = bath.maybe_number("eta");
    const auto gamma_eff = bath.maybe_number("gamma_eff");
    if (eta && gamma_eff)
      throw ConfigError("bath.eta and bath.gamma_eff are mutually exclusive");
    if (!eta && !gamma_eff)
      throw ConfigError("bath requires one of eta, gamma_eff");
    double eta_value;
    if (eta) {
      eta_value = require_positive(*eta, bath.path("eta"));
    } else {
      const double target =
          require_positive(*gamma_eff, bath.path("gamma_eff")) * scale;
      eta_value = calibrate_eta(target, s, omega_0, omega_m);
    }
    return SpectralDensity::ohmic(eta_value, s, omega_0);
  }
  if (kind == "cutoff_power_law") {
    const double k = bath.number("k");
    const double omega_lo =
        require_positive(bath.number("omega_lo"), bath.path("omega_lo")) * scale;
    const double omega_hi =
        require_positive(bath.number("omega_hi"), bath.path("omega_hi")) * scale;
    if (!(omega_hi > omega_lo))
      throw ConfigError("bath.omega_hi must exceed bath.omega_lo");
    double anchor = omega_m;
    if (const auto given = bath.maybe_number("omega_anchor"))
      anchor = require_positive(*given, bath.path("omega_anchor")) * scale;
    const auto j_anchor = bath.maybe_number("j_anchor");
    const auto gamma_eff = bath.maybe_number("gamma_eff");
    if (j_anchor && gamma_eff)
      throw ConfigError("bath.j_anchor and bath.gamma_eff are mutually exclusive");
    if (!j_anchor && !gamma_eff)
      throw ConfigError("bath requires one of j_anchor, gamma_eff");
    double j_value;
    if (j_anchor) {
      j_value = require_positive(*j_anchor, bath.path("j_anchor")) * scale;
    } else {
      const double target =
          require_positive(*gamma_eff, bath.path("gamma_eff")) * scale;
      if (!(omega_lo <= omega_m && omega_m <= omega_hi))
        throw ConfigError(
            "bath.gamma_eff calibration requires omega_m inside "
            "[omega_lo, omega_hi]");
      j_value = target / pi / std::pow(omega_m / anchor, k);
    }
    return SpectralDensity::cutoff_power_law(j_value, k, omega_lo, omega_hi,
                                             anchor);
  }
  throw ConfigError(
      "bath.kind must be one of markovian, ohmic, cutoff_power_law");
}

}  // namespace detail_config

inline RunConfig parse_config(const std::string& text) {
  using detail_config::Section;
  using nlohmann::json;

  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    const long line = detail_config::line_of_offset(text, e.byte);
    throw ConfigError(
        "syntax error at line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");

  Section top(&root, "config");

  const std::string units = top.maybe_text("units").value_or("omega_m");
  if (units != "omega_m" && units != "rad_s")
    throw ConfigError("units must be \"omega_m\" or \"rad_s\"");

  // --- system ---
  Section system(top.child("system", true), "system");
  const double omega_m =
      detail_config::require_positive(system.number("omega_m"), "system.omega_m");
  const double scale = units == "omega_m" ? omega_m : 1.0;
  const double kappa =
      detail_config::require_positive(system.number("kappa"), "system.kappa") *
      scale;
  const Complex coupling = system.complex_number("coupling") * scale;
  double detuning = omega_m;  // default sits on the mechanical resonance
  if (const auto given = system.maybe_number("detuning")) detuning = *given * scale;
  const double theta = system.number_or("theta", 0.0);  // radians, never scaled
  system.done();
  const SystemParams params{omega_m, detuning, kappa, coupling, theta};

  // --- bath ---
  Section bath_section(top.child("bath", true), "bath");
  const double temperature = bath_section.number_or("temperature", 0.0);
  if (!(temperature >= 0.0))
    throw ConfigError("bath.temperature must be >= 0");
  const SpectralDensity density =
      detail_config::parse_bath_density(bath_section, scale, omega_m);
  bath_section.done();
  const BathContext bath{density, temperature, omega_m};

  // --- grid ---
  Section grid_section(top.child("grid", true), "grid");
  const double grid_start = grid_section.number("start") * scale;
  const double grid_stop = grid_section.number("stop") * scale;
  const long long grid_points = grid_section.integer("points");
  grid_section.done();
  if (!(grid_stop > grid_start))
    throw ConfigError("grid.stop must exceed grid.start");
  if (grid_points < 2) throw ConfigError("grid.points must be >= 2");
  const FrequencyGrid grid{grid_start, grid_stop,
                           static_cast<Eigen::Index>(grid_points)};

  // --- job ---
  std::optional<JobKind> job;
  bool include_thermal = false;
  if (const auto* job_obj = top.child("job", false)) {
    Section job_section(job_obj, "job");
    if (const auto kind = job_section.maybe_text("kind")) {
      if (*kind == "spectrum") job = JobKind::spectrum;
      else if (*kind == "sweep") job = JobKind::sweep;
      else if (*kind == "sense") job = JobKind::sense;
      else if (*kind == "validate") job = JobKind::validate;
      else
        throw ConfigError(
            "job.kind must be one of spectrum, sweep, sense, validate");
    }
    include_thermal = job_section.flag_or("include_thermal", false);
    job_section.done();
  }

  const std::string output = top.maybe_text("output").value_or("");

  // --- sweep body ---
  std::optional<SweepJobSpec> sweep;
  if (const auto* obj = top.child("sweep", false)) {
    Section sw(obj, "sweep");
    const std::string axis_name = sw.text("axis");
    SweepAxis axis;
    if (axis_name == "coupling") axis = SweepAxis::coupling;
    else if (axis_name == "kappa") axis = SweepAxis::kappa;
    else if (axis_name == "theta") axis = SweepAxis::theta;
    else
      throw ConfigError("sweep.axis must be one of coupling, kappa, theta");
    const double axis_scale = axis == SweepAxis::theta ? 1.0 : scale;
    const double start = sw.number("start") * axis_scale;
    const double stop = sw.number("stop") * axis_scale;
    const long long points = sw.integer("points");
    const std::string scale_name = sw.maybe_text("scale").value_or("linear");
    sw.done();
    if (scale_name != "linear" && scale_name != "log")
      throw ConfigError("sweep.scale must be \"linear\" or \"log\"");
    const bool log_scale = scale_name == "log";
    if (!(stop > start)) throw ConfigError("sweep.stop must exceed sweep.start");
    if (log_scale && !(start > 0.0))
      throw ConfigError("sweep.start must be > 0 for a log scale");
    if (points < 2) throw ConfigError("sweep.points must be >= 2");
    sweep = SweepJobSpec{axis, start, stop, static_cast<int>(points), log_scale};
  }

  // --- sense body ---
  std::optional<SenseConfig> sense;
  if (const auto* obj = top.child("sense", false)) {
    Section sn(obj, "sense");
    // Absolute frequency units per gram: the signal power bridges straight
    // into the output formula, so the omega_m units switch never touches it.
    const double responsivity = detail_config::require_positive(
        sn.number("responsivity"), "sense.responsivity");
    const double unit_mass = detail_config::require_positive(
        sn.number("unit_mass"), "sense.unit_mass");
    const long long count = sn.integer("count");
    sn.done();
    if (count < 0) throw ConfigError("sense.count must be >= 0");
    sense = SenseConfig{responsivity, unit_mass, static_cast<int>(count)};
  }

  // --- validate body (times in 1/omega_m, never unit-scaled) ---
  ValidateSpec validate;
  if (const auto* obj = top.child("validate", false)) {
    Section va(obj, "validate");
    const long long points = va.integer("points");
    if (points < 1) throw ConfigError("validate.points must be >= 1");
    validate.points = static_cast<int>(points);
    validate.span = va.number_or("span", validate.span);
    if (!(validate.span > 0.0 && validate.span < 2.0))
      throw ConfigError("validate.span must be in (0, 2)");
    validate.tolerance = va.number_or("tolerance", validate.tolerance);
    if (!(validate.tolerance > 0.0))
      throw ConfigError("validate.tolerance must be > 0");
    validate.dt = va.number_or("dt", validate.dt);
    if (!(validate.dt > 0.0)) throw ConfigError("validate.dt must be > 0");
    validate.settle = va.number_or("settle", validate.settle);
    if (!(validate.settle >= 0.0))
      throw ConfigError("validate.settle must be >= 0");
    va.done();
  }

  top.done();

  // --- exactly one job body ---
  const bool has_validate_body = root.contains("validate");
  const int bodies = (sweep ? 1 : 0) + (sense ? 1 : 0);
  if (bodies > 1)
    throw ConfigError("sections sweep and sense are mutually exclusive");
  if (job) {
    if (sweep && *job != JobKind::sweep)
      throw ConfigError("sweep section present but job kind is " +
                        std::string(job_kind_name(*job)));
    if (sense && *job != JobKind::sense)
      throw ConfigError("sense section present but job kind is " +
                        std::string(job_kind_name(*job)));
    if (has_validate_body && *job != JobKind::validate)
      throw ConfigError("validate section present but job kind is " +
                        std::string(job_kind_name(*job)));
    if (*job == JobKind::sweep && !sweep)
      throw ConfigError("sweep job requires a sweep section");
    if (*job == JobKind::sense && !sense)
      throw ConfigError("sense job requires a sense section");
  }

  return RunConfig{params, bath,  grid,  job,      include_thermal,
                   output, sweep, sense, validate, has_validate_body};
}

// Resolves the job kind requested on the command line against the config,
// enforcing the body rules parse_config could not check without a kind.
inline void finalize_job(RunConfig& config, JobKind requested) {
  if (config.job && *config.job != requested)
    throw ConfigError("config job kind \"" +
                      std::string(job_kind_name(*config.job)) +
                      "\" does not match the requested job \"" +
                      std::string(job_kind_name(requested)) + "\"");
  config.job = requested;
  if (config.sweep && requested != JobKind::sweep)
    throw ConfigError("sweep section present but job kind is " +
                      std::string(job_kind_name(requested)));
  if (config.sense && requested != JobKind::sense)
    throw ConfigError("sense section present but job kind is " +
                      std::string(job_kind_name(requested)));
  if (config.has_validate_body && requested != JobKind::validate)
    throw ConfigError("validate section present but job kind is " +
                      std::string(job_kind_name(requested)));
  if (requested == JobKind::sweep && !config.sweep)
    throw ConfigError("sweep job requires a sweep section");
  if (requested == JobKind::sense && !config.sense)
    throw ConfigError("sense job requires a sense section");
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace omsense
