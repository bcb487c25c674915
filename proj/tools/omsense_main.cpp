#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "omsense/config.hpp"
#include "omsense/jobs.hpp"
#include "omsense/version.hpp"

namespace {

struct JobOptions {
  std::string config_path;
  std::string output_override;
  unsigned threads = 0;
};

CLI::App* attach(CLI::App& app, const char* name, const char* description,
                 JobOptions& opts) {
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--config", opts.config_path, "JSON run configuration")
      ->required();
  sub->add_option("--output", opts.output_override,
                  "write the CSV here instead of the config's output path");
  sub->add_option("--threads", opts.threads,
                  "worker threads for grid evaluation (0 = hardware)");
  return sub;
}

int execute(omsense::JobKind kind, const JobOptions& opts) {
  omsense::RunConfig config = omsense::parse_config_file(opts.config_path);
  omsense::finalize_job(config, kind);
  if (!opts.output_override.empty()) config.output = opts.output_override;
  config.threads = opts.threads;
  return omsense::jobs::run(config, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensitivity and noise spectra of an optomechanical force "
               "sensor coupled to a structured mechanical bath"};
  app.set_version_flag("--version", std::string("omsense ") + omsense::version);
  app.require_subcommand(1);

  JobOptions spectrum_opts, sweep_opts, sense_opts, validate_opts;
  CLI::App* spectrum_cmd =
      attach(app, "spectrum",
             "susceptibilities and noise spectra over a frequency grid",
             spectrum_opts);
  CLI::App* sweep_cmd = attach(
      app, "sweep", "optimal added noise against a swept system parameter",
      sweep_opts);
  CLI::App* sense_cmd =
      attach(app, "sense", "mass-sensing output spectrum and resonant readout",
             sense_opts);
  CLI::App* validate_cmd =
      attach(app, "validate",
             "cross-check the frequency-domain response against the "
             "time-domain integrator",
             validate_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum_cmd->parsed())
      return execute(omsense::JobKind::spectrum, spectrum_opts);
    if (sweep_cmd->parsed()) return execute(omsense::JobKind::sweep, sweep_opts);
    if (sense_cmd->parsed()) return execute(omsense::JobKind::sense, sense_opts);
    if (validate_cmd->parsed())
      return execute(omsense::JobKind::validate, validate_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
