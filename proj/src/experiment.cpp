#include "nhsoc/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "nhsoc/dynamics.hpp"
#include "nhsoc/error.hpp"
#include "nhsoc/nat.hpp"

#ifndef NHSOC_VERSION
#define NHSOC_VERSION "0.0.0"
#endif

namespace nhsoc {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> axis_values(const GridAxis& a) { return linspace(a.min, a.max, a.count); }

std::size_t write_json(const std::filesystem::path& file, const json& j) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
  os << j.dump(2) << '\n';
  return 1;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

}  // namespace

std::vector<BandRow> band_surface_scan(const GridAxis& q_axis, const GridAxis& g_axis, const Model& model) {
  const auto qs = axis_values(q_axis);
  const auto gs = axis_values(g_axis);
  std::vector<BandRow> rows;
  rows.reserve(qs.size() * gs.size());
  for (double q : qs) {
    for (double g : gs) {
      BandRow row;
      row.point = {q, g};
      const Complex d = half_gap(row.point, model.kappa);
      row.e_plus = d;
      row.e_minus = -d;
      if (std::abs(d) <= model.ep_tolerance) {
        row.ep = true;
        row.spin_plus = kNaN;
        row.spin_minus = kNaN;
      } else {
        const Eigensystem eig = eigensystem(row.point, model);
        row.spin_plus = spin_polarization(eig.psi_plus);
        row.spin_minus = spin_polarization(eig.psi_minus);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

json RunManifest::to_json() const {
  json files_json = json::array();
  for (const auto& f : files) files_json.push_back({{"name", f.name}, {"rows", f.rows}});
  return {{"tool", "nhsoc"},
          {"tool_version", tool_version},
          {"config", config},
          {"output_dir", output_dir.string()},
          {"wall_seconds", wall_seconds},
          {"files", files_json},
          {"notes", notes}};
}

CsvTable bands_table(const std::vector<BandRow>& rows) {
  CsvTable t{{"qx", "dgamma", "re_E_plus", "im_E_plus", "re_E_minus", "im_E_minus", "spin_plus", "spin_minus",
              "ep_flag"},
             {}};
  t.rows.reserve(rows.size());
  for (const auto& r : rows)
    t.rows.push_back({r.point.q, r.point.g, r.e_plus.real(), r.e_plus.imag(), r.e_minus.real(), r.e_minus.imag(),
                      r.spin_plus, r.spin_minus, r.ep ? 1.0 : 0.0});
  return t;
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t{{"t", "qx", "dgamma", "re_c_plus", "im_c_plus", "re_c_minus", "im_c_minus", "re_expE", "im_expE",
              "band_index", "spin", "re_E_plus", "im_E_plus", "re_E_minus", "im_E_minus", "log_norm"},
             {}};
  t.rows.reserve(traj.samples.size());
  for (const auto& s : traj.samples)
    t.rows.push_back({s.t, s.point.q, s.point.g, s.coeffs.c_plus.real(), s.coeffs.c_plus.imag(),
                      s.coeffs.c_minus.real(), s.coeffs.c_minus.imag(), s.expected_energy.real(),
                      s.expected_energy.imag(), s.band_index, s.spin, s.e_plus.real(), s.e_plus.imag(),
                      s.e_minus.real(), s.e_minus.imag(), s.state.log_norm});
  return t;
}

CsvTable speed_sweep_table(const std::vector<SpeedPoint>& points) {
  CsvTable t{{"speed", "band_index_final"}, {}};
  for (const auto& p : points) t.rows.push_back({p.speed, p.band_index_final});
  return t;
}

CsvTable point_source_table(const PointSourceField& field) {
  CsvTable t{{"angle", "arclen", "qx", "dgamma", "band_index"}, {}};
  for (const auto& ray : field.rays)
    for (std::size_t i = 0; i < ray.arc_length.size(); ++i)
      t.rows.push_back({ray.angle, ray.arc_length[i], ray.points[i].q, ray.points[i].g, ray.band_index[i]});
  return t;
}

CsvTable nat_front_table(const PointSourceField& field) {
  CsvTable t{{"angle", "radius_measured", "radius_predicted"}, {}};
  const double predicted = field.prediction ? field.prediction->radius : kNaN;
  for (const auto& f : field.front) t.rows.push_back({f.angle, f.measured_radius, predicted});
  return t;
}

CsvTable phase_diagram_table(const PhaseDiagram& pd) {
  CsvTable t{{"x_m", "h", "band_index_final"}, {}};
  for (std::size_t i = 0; i < pd.xm_grid.size(); ++i)
    for (std::size_t j = 0; j < pd.h_grid.size(); ++j)
      t.rows.push_back({pd.xm_grid[i], pd.h_grid[j], pd.band_index_final[i][j]});
  return t;
}

CsvTable boundary_table(const PhaseDiagram& pd) {
  CsvTable t{{"x_m", "h_star"}, {}};
  for (const auto& b : pd.boundary) t.rows.push_back({b.x_m, b.h_star});
  return t;
}

RunManifest run(const ExperimentConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);

  RunManifest manifest;
  manifest.config = cfg.echo;
  manifest.tool_version = NHSOC_VERSION;
  manifest.output_dir = cfg.output_dir;
  auto emit_csv = [&](const std::string& name, const CsvTable& table) {
    manifest.files.push_back({name, write_csv(cfg.output_dir / name, table)});
  };

  switch (cfg.experiment) {
    case Experiment::Bands:
      emit_csv("bands.csv", bands_table(band_surface_scan(cfg.q_axis, cfg.g_axis, cfg.model)));
      break;
    case Experiment::Evolve: {
      const Path path(cfg.waypoints, cfg.speed);
      emit_csv("trajectory.csv", trajectory_table(evolve(path, cfg.initial, cfg.model, cfg.step)));
      break;
    }
    case Experiment::SpeedSweep:
      emit_csv("speedsweep.csv",
               speed_sweep_table(speed_sweep(cfg.waypoints, cfg.speeds, cfg.initial, cfg.step, cfg.model, cfg.workers)));
      break;
    case Experiment::PointSource: {
      PointSourceOptions opts;
      opts.n_rays = cfg.n_rays;
      opts.max_arc = cfg.max_arc;
      opts.min_samples_per_ray = cfg.min_samples_per_ray;
      opts.hysteresis = cfg.hysteresis;
      opts.step = cfg.step;
      opts.workers = cfg.workers;
      const auto field = point_source_diagram(cfg.origin, cfg.initial, cfg.speed, opts, cfg.model);
      emit_csv("pointsource.csv", point_source_table(field));
      emit_csv("natfront.csv", nat_front_table(field));
      break;
    }
    case Experiment::PredictRadius: {
      const Complex b0 = cfg.b0 ? *cfg.b0 : b_parameter(cfg.initial);
      const auto pred = predict_nat_radius(cfg.origin, b0, cfg.speed, cfg.model);
      json out{{"origin", {cfg.origin.q, cfg.origin.g}},
               {"speed", cfg.speed},
               {"b0", complex_json(b0)},
               {"delta_e0", complex_json(half_gap(cfg.origin, cfg.model.kappa))},
               {"radius", pred.radius},
               {"xi", pred.xi},
               {"n0", complex_json(pred.n0)},
               {"tau_root", pred.tau_root},
               {"t_occur", pred.t_occur}};
      manifest.files.push_back({"prediction.json", write_json(cfg.output_dir / "prediction.json", out)});
      break;
    }
    case Experiment::PhaseDiagram: {
      const auto xs = axis_values(cfg.xm_axis);
      const auto hs = axis_values(cfg.h_axis);
      const auto pd = protocol_phase_diagram(xs, hs, cfg.speed, cfg.direction, cfg.step, cfg.model, cfg.workers);
      emit_csv("phasediagram.csv", phase_diagram_table(pd));
      if (pd.boundary.empty())
        throw Error(ErrorCode::NoTransition, "predicted boundary failed to bracket in every x_m column");
      emit_csv("boundary.csv", boundary_table(pd));
      if (!pd.boundary_omitted.empty()) manifest.notes["boundary_omitted_x_m"] = pd.boundary_omitted;
      break;
    }
  }

  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_json(cfg.output_dir / "manifest.json", manifest.to_json());
  return manifest;
}

}  // namespace nhsoc
