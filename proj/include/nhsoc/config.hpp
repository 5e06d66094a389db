#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nhsoc/dynamics.hpp"
#include "nhsoc/model.hpp"
#include "nhsoc/path.hpp"

namespace nhsoc {

enum class Experiment { Bands, Evolve, SpeedSweep, PointSource, PredictRadius, PhaseDiagram };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

/// Environment variable consulted for the output directory when neither
/// --out nor "output_dir" is given.
inline constexpr const char* kOutDirEnv = "NHSOC_OUT_DIR";

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Evolve;
  Model model;
  StepControl step;
  int workers = 1;
  std::filesystem::path output_dir = "nhsoc_out";

  // bands
  GridAxis q_axis{-2.0, 2.0, 201};
  GridAxis g_axis{0.0, 2.0, 201};

  // evolve, speed-sweep
  std::vector<ControlPoint> waypoints;
  nlohmann::json path_json;
  std::vector<double> speeds;

  // evolve, point-source, predict-radius, phase-diagram
  double speed = 0.0;
  InitialState initial = Band::Lower;
  ControlPoint origin{-1.0, 1.0};

  // point-source
  int n_rays = 360;
  double max_arc = 2.0;
  int min_samples_per_ray = 400;
  double hysteresis = 0.02;

  // predict-radius
  std::optional<Complex> b0;

  // phase-diagram
  GridAxis xm_axis{-1.0, -0.1, 25};
  GridAxis h_axis{0.048, 1.2, 25};
  Direction direction = Direction::Ccw;

  /// Effective configuration after defaults and overrides, for the manifest.
  nlohmann::json echo;
};

struct CliOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<int> workers;
  std::optional<double> step;
  std::optional<int> stride;
  std::optional<double> speed;
  std::optional<double> kappa;
};

/// Invalid configuration; `line` is 1-based within the source text (0 when
/// the problem is not tied to a location, e.g. a command-line override).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Parses and validates a JSON experiment config. `experiment` from the
/// command line must agree with an "experiment" key when both are present.
ExperimentConfig parse_config(std::string_view text, std::string_view source_name,
                              std::optional<Experiment> experiment, const CliOverrides& overrides = {});

ExperimentConfig load_config(const std::filesystem::path& file, std::optional<Experiment> experiment,
                             const CliOverrides& overrides = {});

/// Path <-> JSON. The JSON form is either a named protocol
/// {"kind": "loop", "direction": "ccw", "h": 1.2, ...} or explicit
/// {"kind": "custom", "waypoints": [[q, g], ...]}.
nlohmann::json path_to_json(const Path& path);
std::vector<ControlPoint> waypoints_from_json(const nlohmann::json& j);

}  // namespace nhsoc
