// nhsoc: run one experiment and write its CSV/JSON artifacts.
//
//   nhsoc <experiment> [--config file.json] [--out dir] [--workers N]
//         [--step dt] [--stride n] [--speed v] [--kappa k]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nhsoc/config.hpp"
#include "nhsoc/error.hpp"
#include "nhsoc/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven non-Hermitian two-band simulator"};
  app.set_version_flag("--version", std::string(NHSOC_VERSION));

  std::string experiment_name;
  std::string config_file;
  nhsoc::CliOverrides overrides;
  std::string out_dir;
  int workers = 0;
  double step = 0.0;
  int stride = -1;
  double speed = 0.0;
  double kappa = 0.0;

  app.add_option("experiment", experiment_name,
                 "bands | evolve | speed-sweep | point-source | predict-radius | phase-diagram")
      ->required();
  app.add_option("-c,--config", config_file, "JSON experiment config")->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("-o,--out", out_dir, "Output directory (default: $NHSOC_OUT_DIR or ./nhsoc_out)");
  auto* workers_opt = app.add_option("-j,--workers", workers, "Worker threads");
  auto* step_opt = app.add_option("--step", step, "Integrator step dt");
  auto* stride_opt = app.add_option("--stride", stride, "Trajectory sample stride");
  auto* speed_opt = app.add_option("--speed", speed, "Parameter speed |v|");
  auto* kappa_opt = app.add_option("--kappa", kappa, "2 E_r / Omega_R");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const auto experiment = nhsoc::parse_experiment(experiment_name);
  if (!experiment) {
    std::cerr << "error: unknown experiment '" << experiment_name << "'\n";
    return kExitConfig;
  }
  if (out_opt->count()) overrides.out = out_dir;
  if (workers_opt->count()) overrides.workers = workers;
  if (step_opt->count()) overrides.step = step;
  if (stride_opt->count()) overrides.stride = stride;
  if (speed_opt->count()) overrides.speed = speed;
  if (kappa_opt->count()) overrides.kappa = kappa;

  nhsoc::ExperimentConfig cfg;
  try {
    cfg = config_file.empty() ? nhsoc::parse_config("{}", "<defaults>", experiment, overrides)
                              : nhsoc::load_config(config_file, experiment, overrides);
  } catch (const nhsoc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const auto manifest = nhsoc::run(cfg);
    for (const auto& f : manifest.files)
      std::cout << (manifest.output_dir / f.name).string() << " (" << f.rows << " rows)\n";
  } catch (const nhsoc::Error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
