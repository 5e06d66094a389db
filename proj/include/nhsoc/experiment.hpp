#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhsoc/config.hpp"
#include "nhsoc/csv.hpp"
#include "nhsoc/dynamics.hpp"
#include "nhsoc/model.hpp"
#include "nhsoc/nat.hpp"

namespace nhsoc {

struct BandRow {
  ControlPoint point;
  Complex e_plus;
  Complex e_minus;
  /// Spin polarization of psi+ and psi-; NaN on EP rows.
  double spin_plus = 0.0;
  double spin_minus = 0.0;
  bool ep = false;
};

/// Complex bands over a q-major grid. EP points are flagged, never fatal.
std::vector<BandRow> band_surface_scan(const GridAxis& q_axis, const GridAxis& g_axis,
                                       const Model& model = {});

struct OutputFile {
  std::string name;
  std::size_t rows = 0;
};

struct RunManifest {
  nlohmann::json config;
  std::string tool_version;
  double wall_seconds = 0.0;
  std::filesystem::path output_dir;
  std::vector<OutputFile> files;
  /// Non-fatal flags raised during the run, e.g. omitted boundary columns.
  nlohmann::json notes = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// Table builders. Each returns exactly what `run` writes for that file.
CsvTable bands_table(const std::vector<BandRow>& rows);
CsvTable trajectory_table(const Trajectory& traj);
CsvTable speed_sweep_table(const std::vector<SpeedPoint>& points);
CsvTable point_source_table(const PointSourceField& field);
CsvTable nat_front_table(const PointSourceField& field);
CsvTable phase_diagram_table(const PhaseDiagram& pd);
CsvTable boundary_table(const PhaseDiagram& pd);

/// Runs one experiment, writes its files plus manifest.json into
/// cfg.output_dir, and returns the manifest. Numerical failures surface as
/// nhsoc::Error.
RunManifest run(const ExperimentConfig& cfg);

}  // namespace nhsoc
