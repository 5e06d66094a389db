#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nhsoc/config.hpp"
#include "nhsoc/error.hpp"
#include "nhsoc/experiment.hpp"

using namespace nhsoc;
namespace fs = std::filesystem;

namespace {

int config_error_line(std::string_view text, std::optional<Experiment> e = std::nullopt) {
  try {
    parse_config(text, "cfg.json", e);
  } catch (const ConfigError& err) {
    return err.line();
  }
  return -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n - 1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nhsoc_test_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double") {
  CHECK(format_double(1.0) == "1.0000000000000000e+00");
  CHECK(format_double(-0.5) == "-5.0000000000000000e-01");
  CHECK(format_double(0.1) == "1.0000000000000001e-01");
  CHECK(format_double(NAN) == "nan");
  // Round trip.
  for (double v : {std::exp(-2.0), 1e-300, -123456.789, 0.0})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("to_csv") {
  CsvTable t{{"a", "b"}, {{1.0, 2.0}, {3.0, NAN}}};
  CHECK(to_csv(t) ==
        "a,b\n1.0000000000000000e+00,2.0000000000000000e+00\n3.0000000000000000e+00,nan\n");
}

TEST_CASE("config: defaults and experiment resolution") {
  auto cfg = parse_config("{}", "x", Experiment::Evolve);
  CHECK(cfg.speed == doctest::Approx(std::exp(-2.0)));
  REQUIRE(cfg.waypoints.size() == 4);
  CHECK(cfg.waypoints[1] == ControlPoint{1.0, 1.2});
  CHECK(cfg.step.dt == 1e-3);
  CHECK(cfg.step.stride == 10);

  cfg = parse_config(R"({"experiment": "phase-diagram"})", "x", std::nullopt);
  CHECK(cfg.experiment == Experiment::PhaseDiagram);
  CHECK(cfg.speed == doctest::Approx(std::exp(-3.0)));
  CHECK(cfg.xm_axis.count == 25);

  cfg = parse_config(R"({"speeds": {"ln_min": -1, "ln_max": 1, "count": 3}})", "x", Experiment::SpeedSweep);
  REQUIRE(cfg.speeds.size() == 3);
  CHECK(cfg.speeds[1] == doctest::Approx(1.0));

  cfg = parse_config(R"({"speed": {"ln": -2, "scale": 0.5}})", "x", Experiment::PredictRadius);
  CHECK(cfg.speed == doctest::Approx(0.5 * std::exp(-2.0)));

  cfg = parse_config(R"({"initial": {"c_plus": [1, 0], "c_minus": [0, 2]}})", "x", Experiment::Evolve);
  const auto& c = std::get<BandCoefficients>(cfg.initial);
  CHECK(c.c_minus == Complex{0.0, 2.0});

  cfg = parse_config(R"({"path": {"kind": "custom", "waypoints": [[0, 0], [1, 1]]}})", "x", Experiment::Evolve);
  CHECK(cfg.waypoints.size() == 2);

  CHECK_THROWS_AS(parse_config("{}", "x", std::nullopt), ConfigError);
}

TEST_CASE("config: overrides win") {
  CliOverrides o;
  o.step = 0.01;
  o.speed = 0.2;
  o.workers = 3;
  o.out = "elsewhere";
  const auto cfg = parse_config(R"({"speed": 0.1, "workers": 1, "numerics": {"step": 0.001}})", "x",
                                Experiment::Evolve, o);
  CHECK(cfg.step.dt == 0.01);
  CHECK(cfg.speed == 0.2);
  CHECK(cfg.workers == 3);
  CHECK(cfg.output_dir == fs::path("elsewhere"));
  CHECK(cfg.echo["speed"] == 0.2);

  o = {};
  o.step = -1.0;
  CHECK_THROWS_AS(parse_config("{}", "x", Experiment::Evolve, o), ConfigError);
}

TEST_CASE("config: errors carry line numbers") {
  CHECK(config_error_line("{\n  \"speed\": 0.1,\n  \"bogus\": 1\n}", Experiment::Evolve) == 3);
  CHECK(config_error_line("{\n  \"speed\": -1\n}", Experiment::Evolve) == 2);
  CHECK(config_error_line("{\n  \"rays\": 10\n}", Experiment::Evolve) == 2);
  CHECK(config_error_line("{\n\n  \"path\": {\n    \"kind\": \"loop\",\n    \"height\": 2\n  }\n}",
                          Experiment::Evolve) == 5);
  CHECK(config_error_line("{\n  \"path\": {\"kind\": \"spike\", \"x_m\": 0.5}\n}", Experiment::Evolve) == 2);
  CHECK(config_error_line("{\n  \"speed\": 0.1,\n  oops\n}", Experiment::Evolve) == 3);
  CHECK(config_error_line("{\n \"experiment\": \"bands\"\n}", Experiment::Evolve) == 2);
  CHECK(config_error_line("{\n \"numerics\": {\n  \"step\": 0\n }\n}", Experiment::Bands) == 3);
  CHECK(config_error_line("{\"x_m\": {\"min\": -1, \"max\": 0.5}}", Experiment::PhaseDiagram) == 1);

  try {
    parse_config("{\n  \"bogus\": 1\n}", "cfg.json", Experiment::Evolve);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).starts_with("cfg.json:2: bogus: unknown key"));
  }
}

TEST_CASE("config file and env var") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "c.json") << R"({"experiment": "bands", "grid": {"q": {"count": 3}}})";
  }
  ::setenv(kOutDirEnv, "from_env", 1);
  auto cfg = load_config(dir / "c.json", std::nullopt);
  CHECK(cfg.q_axis.count == 3);
  CHECK(cfg.output_dir == fs::path("from_env"));
  ::unsetenv(kOutDirEnv);
  cfg = load_config(dir / "c.json", std::nullopt);
  CHECK(cfg.output_dir == fs::path("nhsoc_out"));
  CHECK_THROWS_AS(load_config(dir / "missing.json", std::nullopt), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("path json round trip") {
  const Path p = standard_path(ProtocolKind::Spike, {}, Direction::Cw, 1.0);
  const auto pts = waypoints_from_json(path_to_json(p));
  CHECK(pts == p.waypoints());
}

TEST_CASE("band surface scan") {
  const auto rows = band_surface_scan({-2.0, 2.0, 5}, {0.0, 1.0, 3});
  REQUIRE(rows.size() == 15);
  int eps = 0;
  for (const auto& r : rows) {
    if (r.point == ControlPoint{0.0, 0.0}) CHECK((r.e_plus - r.e_minus).real() == doctest::Approx(2.0));
    if (r.point.g == 0.0) {
      CHECK(r.e_plus.imag() == 0.0);
      CHECK(r.e_minus.imag() == 0.0);
    }
    if (r.point == ControlPoint{-1.0, 0.0}) {
      CHECK(r.spin_plus > 0.0);
      CHECK(r.spin_minus < 0.0);
    }
    if (r.ep) {
      ++eps;
      CHECK(r.point == ControlPoint{0.0, 1.0});
      CHECK(std::isnan(r.spin_plus));
    }
  }
  CHECK(eps == 1);

  const auto table = bands_table(rows);
  CHECK(table.header == std::vector<std::string>{"qx", "dgamma", "re_E_plus", "im_E_plus", "re_E_minus",
                                                 "im_E_minus", "spin_plus", "spin_minus", "ep_flag"});
}

TEST_CASE("table headers") {
  const Path p = standard_path(ProtocolKind::Hermitian, {}, Direction::Ccw, 1.0);
  const auto traj = evolve(p, Band::Lower, {}, {1e-2, 50, true});
  const auto t = trajectory_table(traj);
  CHECK(t.header == std::vector<std::string>{"t", "qx", "dgamma", "re_c_plus", "im_c_plus", "re_c_minus",
                                             "im_c_minus", "re_expE", "im_expE", "band_index", "spin",
                                             "re_E_plus", "im_E_plus", "re_E_minus", "im_E_minus",
                                             "log_norm"});
  CHECK(t.rows.size() == traj.samples.size());
  CHECK(speed_sweep_table({}).header == std::vector<std::string>{"speed", "band_index_final"});

  PointSourceField f;
  CHECK(point_source_table(f).header ==
        std::vector<std::string>{"angle", "arclen", "qx", "dgamma", "band_index"});
  CHECK(nat_front_table(f).header ==
        std::vector<std::string>{"angle", "radius_measured", "radius_predicted"});
  PhaseDiagram pd;
  CHECK(phase_diagram_table(pd).header == std::vector<std::string>{"x_m", "h", "band_index_final"});
  CHECK(boundary_table(pd).header == std::vector<std::string>{"x_m", "h_star"});
}

TEST_CASE("run: bands writes bands.csv and a consistent manifest") {
  const fs::path dir = scratch("bands");
  auto cfg = parse_config(R"({"grid": {"q": {"count": 21}, "g": {"count": 11}}})", "x", Experiment::Bands);
  cfg.output_dir = dir;
  const auto m = run(cfg);
  REQUIRE(m.files.size() == 1);
  CHECK(m.files[0].name == "bands.csv");
  CHECK(m.files[0].rows == 231);
  CHECK(data_rows(dir / "bands.csv") == 231);
  CHECK(fs::exists(dir / "manifest.json"));
  const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(j["files"][0]["rows"] == 231);
  CHECK(j["config"]["experiment"] == "bands");
  CHECK(j.contains("tool_version"));
  fs::remove_all(dir);
}

TEST_CASE("run: evolve and predict-radius") {
  const fs::path dir = scratch("evolve");
  auto cfg = parse_config(R"({"numerics": {"step": 0.01}})", "x", Experiment::Evolve);
  cfg.output_dir = dir;
  auto m = run(cfg);
  CHECK(m.files[0].rows == data_rows(dir / "trajectory.csv"));

  cfg = parse_config("{}", "x", Experiment::PredictRadius);
  cfg.output_dir = dir;
  m = run(cfg);
  const auto pred = nlohmann::json::parse(slurp(dir / "prediction.json"));
  CHECK(pred["radius"].get<double>() == doctest::Approx(0.366781782440216795).epsilon(1e-12));

  cfg = parse_config(R"({"origin": [-1, 0]})", "x", Experiment::PredictRadius);
  cfg.output_dir = dir;
  CHECK_THROWS_AS(run(cfg), Error);
  fs::remove_all(dir);
}

TEST_CASE("run: evolve from the EP is a numeric error") {
  auto cfg = parse_config(R"({"path": {"kind": "custom", "waypoints": [[0, 1], [1, 1]]}})", "x",
                          Experiment::Evolve);
  cfg.output_dir = scratch("ep");
  try {
    run(cfg);
    FAIL("expected EpDegenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EpDegenerate);
  }
  fs::remove_all(cfg.output_dir);
}
