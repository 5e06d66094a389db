#include "nhsoc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "nhsoc/error.hpp"

namespace nhsoc {

using nlohmann::json;

namespace {

using KeyPath = std::vector<std::string>;

KeyPath child(KeyPath p, std::string key) {
  p.push_back(std::move(key));
  return p;
}

std::string dotted(const KeyPath& p) {
  std::string out;
  for (const auto& k : p) {
    if (!out.empty()) out += '.';
    out += k;
  }
  return out.empty() ? "<root>" : out;
}

/// Locates keys in the raw text so validation errors can name a line.
class Reader {
 public:
  Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  int line_of(const KeyPath& keys) const {
    std::size_t pos = 0;
    for (const auto& key : keys) {
      const std::string needle = "\"" + key + "\"";
      std::size_t at = text_.find(needle, pos);
      while (at != std::string_view::npos) {
        std::size_t after = at + needle.size();
        while (after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]))) ++after;
        if (after < text_.size() && text_[after] == ':') break;
        at = text_.find(needle, at + 1);
      }
      if (at == std::string_view::npos) break;
      pos = at;
    }
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
  }

  [[noreturn]] void fail(const KeyPath& keys, const std::string& msg) const {
    throw ConfigError(source_, line_of(keys), dotted(keys) + ": " + msg);
  }

  const json& object(const json& j, const KeyPath& at) const {
    if (!j.is_object()) fail(at, "expected an object");
    return j;
  }

  void allow_keys(const json& obj, const KeyPath& at, std::initializer_list<std::string_view> allowed) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
        fail(child(at, it.key()), "unknown key");
    }
  }

  double number(const json& j, const KeyPath& at) const {
    if (!j.is_number()) fail(at, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(at, "expected a finite number");
    return v;
  }

  int integer(const json& j, const KeyPath& at) const {
    if (!j.is_number_integer()) fail(at, "expected an integer");
    return j.get<int>();
  }

  std::string string(const json& j, const KeyPath& at) const {
    if (!j.is_string()) fail(at, "expected a string");
    return j.get<std::string>();
  }

  ControlPoint point(const json& j, const KeyPath& at) const {
    if (!j.is_array() || j.size() != 2) fail(at, "expected [q, g]");
    return {number(j[0], at), number(j[1], at)};
  }

  Complex complex(const json& j, const KeyPath& at) const {
    if (!j.is_array() || j.size() != 2) fail(at, "expected [re, im]");
    return {number(j[0], at), number(j[1], at)};
  }

  /// A number, or {"ln": x, "scale": s} meaning s * exp(x).
  double speed(const json& j, const KeyPath& at) const {
    double v = 0.0;
    if (j.is_object()) {
      allow_keys(j, at, {"ln", "scale"});
      if (!j.contains("ln")) fail(at, "speed object needs \"ln\"");
      v = std::exp(number(j["ln"], child(at, "ln")));
      if (j.contains("scale")) v *= number(j["scale"], child(at, "scale"));
    } else {
      v = number(j, at);
    }
    if (!(v > 0.0) || !std::isfinite(v)) fail(at, "speed must be > 0");
    return v;
  }

  GridAxis axis(const json& j, const KeyPath& at, GridAxis def) const {
    object(j, at);
    allow_keys(j, at, {"min", "max", "count"});
    if (j.contains("min")) def.min = number(j["min"], child(at, "min"));
    if (j.contains("max")) def.max = number(j["max"], child(at, "max"));
    if (j.contains("count")) def.count = integer(j["count"], child(at, "count"));
    if (def.count < 1) fail(child(at, "count"), "count must be >= 1");
    if (def.count > 1 && !(def.max > def.min)) fail(at, "max must exceed min");
    return def;
  }

  InitialState initial(const json& j, const KeyPath& at) const {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "lower") return Band::Lower;
      if (s == "upper") return Band::Upper;
      fail(at, "expected \"lower\", \"upper\" or {\"c_plus\": [re, im], \"c_minus\": [re, im]}");
    }
    object(j, at);
    allow_keys(j, at, {"c_plus", "c_minus"});
    if (!j.contains("c_plus") || !j.contains("c_minus")) fail(at, "superposition needs c_plus and c_minus");
    BandCoefficients c{complex(j["c_plus"], child(at, "c_plus")), complex(j["c_minus"], child(at, "c_minus"))};
    if (std::norm(c.c_plus) + std::norm(c.c_minus) == 0.0) fail(at, "coefficients must not both be zero");
    return c;
  }

 private:
  std::string_view text_;
  std::string source_;
};

json initial_to_json(const InitialState& s) {
  if (const auto* b = std::get_if<Band>(&s)) return *b == Band::Lower ? "lower" : "upper";
  const auto& c = std::get<BandCoefficients>(s);
  return {{"c_plus", {c.c_plus.real(), c.c_plus.imag()}}, {"c_minus", {c.c_minus.real(), c.c_minus.imag()}}};
}

json axis_to_json(const GridAxis& a) { return {{"min", a.min}, {"max", a.max}, {"count", a.count}}; }

json point_to_json(ControlPoint p) { return json::array({p.q, p.g}); }

std::vector<ControlPoint> read_path(const Reader& r, const json& j, const KeyPath& at) {
  r.object(j, at);
  if (!j.contains("kind")) r.fail(at, "path needs \"kind\"");
  const std::string kind = r.string(j["kind"], child(at, "kind"));
  if (kind == "custom") {
    r.allow_keys(j, at, {"kind", "waypoints"});
    if (!j.contains("waypoints") || !j["waypoints"].is_array())
      r.fail(child(at, "waypoints"), "custom path needs a waypoints array");
    std::vector<ControlPoint> pts;
    for (const auto& p : j["waypoints"]) pts.push_back(r.point(p, child(at, "waypoints")));
    try {
      Path(pts, 1.0);
    } catch (const Error& e) {
      r.fail(child(at, "waypoints"), e.what());
    }
    return pts;
  }
  r.allow_keys(j, at, {"kind", "direction", "q_start", "q_end", "h", "x_m", "origin", "angle", "max_len"});
  ProtocolKind pk{};
  Direction dir = Direction::Ccw;
  try {
    pk = parse_protocol_kind(kind);
  } catch (const Error& e) {
    r.fail(child(at, "kind"), e.what());
  }
  if (j.contains("direction")) {
    try {
      dir = parse_direction(r.string(j["direction"], child(at, "direction")));
    } catch (const Error& e) {
      r.fail(child(at, "direction"), e.what());
    }
  }
  ProtocolParams p;
  if (j.contains("q_start")) p.q_start = r.number(j["q_start"], child(at, "q_start"));
  if (j.contains("q_end")) p.q_end = r.number(j["q_end"], child(at, "q_end"));
  if (j.contains("h")) p.h = r.number(j["h"], child(at, "h"));
  if (j.contains("x_m")) p.x_m = r.number(j["x_m"], child(at, "x_m"));
  if (j.contains("origin")) p.origin = r.point(j["origin"], child(at, "origin"));
  if (j.contains("angle")) p.angle = r.number(j["angle"], child(at, "angle"));
  if (j.contains("max_len")) p.max_len = r.number(j["max_len"], child(at, "max_len"));
  try {
    return protocol_waypoints(pk, p, dir);
  } catch (const Error& e) {
    r.fail(at, e.what());
  }
}

json default_path() { return {{"kind", "loop"}, {"direction", "ccw"}, {"h", 1.2}}; }

}  // namespace

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                  : source + ": " + message),
      line_(line) {}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Bands: return "bands";
    case Experiment::Evolve: return "evolve";
    case Experiment::SpeedSweep: return "speed-sweep";
    case Experiment::PointSource: return "point-source";
    case Experiment::PredictRadius: return "predict-radius";
    case Experiment::PhaseDiagram: return "phase-diagram";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (auto e : {Experiment::Bands, Experiment::Evolve, Experiment::SpeedSweep, Experiment::PointSource,
                 Experiment::PredictRadius, Experiment::PhaseDiagram})
    if (to_string(e) == name) return e;
  return std::nullopt;
}

json path_to_json(const Path& path) {
  json pts = json::array();
  for (const auto& p : path.waypoints()) pts.push_back(point_to_json(p));
  return {{"kind", "custom"}, {"waypoints", pts}};
}

std::vector<ControlPoint> waypoints_from_json(const json& j) {
  Reader r(j.dump(), "<path>");
  return read_path(r, j, {});
}

ExperimentConfig parse_config(std::string_view text, std::string_view source_name,
                              std::optional<Experiment> experiment, const CliOverrides& overrides) {
  const std::string source(source_name);
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(source, line, std::string("malformed JSON: ") + e.what());
  }
  const Reader r(text, source);
  r.object(root, {});

  ExperimentConfig cfg;
  if (root.contains("experiment")) {
    const auto name = r.string(root["experiment"], {"experiment"});
    const auto parsed = parse_experiment(name);
    if (!parsed) r.fail({"experiment"}, "unknown experiment '" + name + "'");
    if (experiment && *experiment != *parsed)
      r.fail({"experiment"}, "config is for '" + name + "' but '" + std::string(to_string(*experiment)) +
                                 "' was requested");
    experiment = parsed;
  }
  if (!experiment) throw ConfigError(source, 0, "no experiment given");
  cfg.experiment = *experiment;

  std::vector<std::string_view> allowed{"experiment", "model", "numerics", "workers", "output_dir"};
  switch (cfg.experiment) {
    case Experiment::Bands: allowed.insert(allowed.end(), {"grid"}); break;
    case Experiment::Evolve: allowed.insert(allowed.end(), {"path", "speed", "initial"}); break;
    case Experiment::SpeedSweep: allowed.insert(allowed.end(), {"path", "speeds", "initial"}); break;
    case Experiment::PointSource:
      allowed.insert(allowed.end(),
                     {"origin", "speed", "initial", "rays", "max_arc", "min_samples_per_ray", "hysteresis"});
      break;
    case Experiment::PredictRadius: allowed.insert(allowed.end(), {"origin", "speed", "initial", "b0"}); break;
    case Experiment::PhaseDiagram: allowed.insert(allowed.end(), {"x_m", "h", "speed", "direction"}); break;
  }
  for (auto it = root.begin(); it != root.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      r.fail({it.key()}, "unknown key for experiment '" + std::string(to_string(cfg.experiment)) + "'");

  if (root.contains("model")) {
    const auto& m = r.object(root["model"], {"model"});
    r.allow_keys(m, {"model"}, {"kappa", "ep_tolerance"});
    if (m.contains("kappa")) cfg.model.kappa = r.number(m["kappa"], {"model", "kappa"});
    if (m.contains("ep_tolerance")) cfg.model.ep_tolerance = r.number(m["ep_tolerance"], {"model", "ep_tolerance"});
    if (!(cfg.model.kappa > 0.0)) r.fail({"model", "kappa"}, "kappa must be > 0");
    if (!(cfg.model.ep_tolerance > 0.0)) r.fail({"model", "ep_tolerance"}, "ep_tolerance must be > 0");
  }
  if (root.contains("numerics")) {
    const auto& n = r.object(root["numerics"], {"numerics"});
    r.allow_keys(n, {"numerics"}, {"step", "stride", "renormalize"});
    if (n.contains("step")) cfg.step.dt = r.number(n["step"], {"numerics", "step"});
    if (n.contains("stride")) cfg.step.stride = r.integer(n["stride"], {"numerics", "stride"});
    if (n.contains("renormalize")) {
      if (!n["renormalize"].is_boolean()) r.fail({"numerics", "renormalize"}, "expected true or false");
      cfg.step.renormalize = n["renormalize"].get<bool>();
    }
    if (!(cfg.step.dt > 0.0)) r.fail({"numerics", "step"}, "step must be > 0");
    if (cfg.step.stride < 0) r.fail({"numerics", "stride"}, "stride must be >= 0");
  }
  if (root.contains("workers")) {
    cfg.workers = r.integer(root["workers"], {"workers"});
    if (cfg.workers < 1) r.fail({"workers"}, "workers must be >= 1");
  }
  if (root.contains("output_dir")) {
    cfg.output_dir = r.string(root["output_dir"], {"output_dir"});
  } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
    cfg.output_dir = env;
  }

  const double e = std::exp(1.0);
  switch (cfg.experiment) {
    case Experiment::Bands:
      if (root.contains("grid")) {
        const auto& g = r.object(root["grid"], {"grid"});
        r.allow_keys(g, {"grid"}, {"q", "g"});
        if (g.contains("q")) cfg.q_axis = r.axis(g["q"], {"grid", "q"}, cfg.q_axis);
        if (g.contains("g")) cfg.g_axis = r.axis(g["g"], {"grid", "g"}, cfg.g_axis);
      }
      break;
    case Experiment::Evolve:
    case Experiment::SpeedSweep:
      cfg.path_json = root.contains("path") ? root["path"] : default_path();
      cfg.waypoints = read_path(r, cfg.path_json, {"path"});
      if (root.contains("initial")) cfg.initial = r.initial(root["initial"], {"initial"});
      if (cfg.experiment == Experiment::Evolve) {
        cfg.speed = root.contains("speed") ? r.speed(root["speed"], {"speed"}) : 1.0 / (e * e);
      } else if (root.contains("speeds")) {
        const auto& s = root["speeds"];
        if (s.is_array()) {
          if (s.empty()) r.fail({"speeds"}, "speed list is empty");
          for (const auto& v : s) cfg.speeds.push_back(r.speed(v, {"speeds"}));
        } else {
          r.object(s, {"speeds"});
          r.allow_keys(s, {"speeds"}, {"ln_min", "ln_max", "count"});
          const double lo = s.contains("ln_min") ? r.number(s["ln_min"], {"speeds", "ln_min"}) : -5.0;
          const double hi = s.contains("ln_max") ? r.number(s["ln_max"], {"speeds", "ln_max"}) : 2.0;
          const int count = s.contains("count") ? r.integer(s["count"], {"speeds", "count"}) : 29;
          if (count < 1) r.fail({"speeds", "count"}, "count must be >= 1");
          if (count > 1 && !(hi > lo)) r.fail({"speeds"}, "ln_max must exceed ln_min");
          for (int i = 0; i < count; ++i)
            cfg.speeds.push_back(std::exp(count == 1 ? lo : lo + (hi - lo) * i / (count - 1)));
        }
      } else {
        for (int i = 0; i < 29; ++i) cfg.speeds.push_back(std::exp(-5.0 + 7.0 * i / 28));
      }
      break;
    case Experiment::PointSource:
    case Experiment::PredictRadius:
      if (root.contains("origin")) cfg.origin = r.point(root["origin"], {"origin"});
      cfg.speed = root.contains("speed") ? r.speed(root["speed"], {"speed"}) : 1.0 / (e * e);
      if (root.contains("initial")) cfg.initial = r.initial(root["initial"], {"initial"});
      if (cfg.experiment == Experiment::PredictRadius) {
        if (root.contains("b0")) {
          if (root.contains("initial")) r.fail({"b0"}, "give either b0 or initial, not both");
          cfg.b0 = r.complex(root["b0"], {"b0"});
        }
        break;
      }
      if (root.contains("rays")) cfg.n_rays = r.integer(root["rays"], {"rays"});
      if (root.contains("max_arc")) cfg.max_arc = r.number(root["max_arc"], {"max_arc"});
      if (root.contains("min_samples_per_ray"))
        cfg.min_samples_per_ray = r.integer(root["min_samples_per_ray"], {"min_samples_per_ray"});
      if (root.contains("hysteresis")) cfg.hysteresis = r.number(root["hysteresis"], {"hysteresis"});
      if (cfg.n_rays < 4) r.fail({"rays"}, "need at least 4 rays");
      if (!(cfg.max_arc > 0.0)) r.fail({"max_arc"}, "max_arc must be > 0");
      if (cfg.min_samples_per_ray < 1) r.fail({"min_samples_per_ray"}, "must be >= 1");
      if (!(cfg.hysteresis >= 0.0 && cfg.hysteresis < 1.0)) r.fail({"hysteresis"}, "must lie in [0, 1)");
      break;
    case Experiment::PhaseDiagram:
      if (root.contains("x_m")) cfg.xm_axis = r.axis(root["x_m"], {"x_m"}, cfg.xm_axis);
      if (root.contains("h")) cfg.h_axis = r.axis(root["h"], {"h"}, cfg.h_axis);
      cfg.speed = root.contains("speed") ? r.speed(root["speed"], {"speed"}) : 1.0 / (e * e * e);
      if (root.contains("direction")) {
        try {
          cfg.direction = parse_direction(r.string(root["direction"], {"direction"}));
        } catch (const Error& err) {
          r.fail({"direction"}, err.what());
        }
      }
      if (!(cfg.xm_axis.max < 0.0)) r.fail({"x_m"}, "x_m values must be < 0");
      if (!(cfg.xm_axis.min >= -1.0)) r.fail({"x_m"}, "x_m values must be >= -1 (the sweep end point)");
      if (!(cfg.h_axis.min > 0.0)) r.fail({"h"}, "h values must be > 0");
      break;
  }

  // Command-line overrides win over the file.
  const std::string cli = "command line";
  if (overrides.out) cfg.output_dir = *overrides.out;
  if (overrides.workers) {
    if (*overrides.workers < 1) throw ConfigError(cli, 0, "--workers must be >= 1");
    cfg.workers = *overrides.workers;
  }
  if (overrides.step) {
    if (!(*overrides.step > 0.0)) throw ConfigError(cli, 0, "--step must be > 0");
    cfg.step.dt = *overrides.step;
  }
  if (overrides.stride) {
    if (*overrides.stride < 0) throw ConfigError(cli, 0, "--stride must be >= 0");
    cfg.step.stride = *overrides.stride;
  }
  if (overrides.kappa) {
    if (!(*overrides.kappa > 0.0)) throw ConfigError(cli, 0, "--kappa must be > 0");
    cfg.model.kappa = *overrides.kappa;
  }
  if (overrides.speed) {
    if (!(*overrides.speed > 0.0)) throw ConfigError(cli, 0, "--speed must be > 0");
    if (cfg.experiment == Experiment::SpeedSweep) cfg.speeds = {*overrides.speed};
    else cfg.speed = *overrides.speed;
  }

  json echo;
  echo["experiment"] = to_string(cfg.experiment);
  echo["model"] = {{"kappa", cfg.model.kappa}, {"ep_tolerance", cfg.model.ep_tolerance}};
  echo["numerics"] = {{"step", cfg.step.dt}, {"stride", cfg.step.stride}, {"renormalize", cfg.step.renormalize}};
  echo["workers"] = cfg.workers;
  echo["output_dir"] = cfg.output_dir.string();
  switch (cfg.experiment) {
    case Experiment::Bands:
      echo["grid"] = {{"q", axis_to_json(cfg.q_axis)}, {"g", axis_to_json(cfg.g_axis)}};
      break;
    case Experiment::Evolve:
      echo["path"] = cfg.path_json;
      echo["speed"] = cfg.speed;
      echo["initial"] = initial_to_json(cfg.initial);
      break;
    case Experiment::SpeedSweep:
      echo["path"] = cfg.path_json;
      echo["speeds"] = cfg.speeds;
      echo["initial"] = initial_to_json(cfg.initial);
      break;
    case Experiment::PointSource:
      echo["origin"] = point_to_json(cfg.origin);
      echo["speed"] = cfg.speed;
      echo["initial"] = initial_to_json(cfg.initial);
      echo["rays"] = cfg.n_rays;
      echo["max_arc"] = cfg.max_arc;
      echo["min_samples_per_ray"] = cfg.min_samples_per_ray;
      echo["hysteresis"] = cfg.hysteresis;
      break;
    case Experiment::PredictRadius:
      echo["origin"] = point_to_json(cfg.origin);
      echo["speed"] = cfg.speed;
      if (cfg.b0) echo["b0"] = {cfg.b0->real(), cfg.b0->imag()};
      else echo["initial"] = initial_to_json(cfg.initial);
      break;
    case Experiment::PhaseDiagram:
      echo["x_m"] = axis_to_json(cfg.xm_axis);
      echo["h"] = axis_to_json(cfg.h_axis);
      echo["speed"] = cfg.speed;
      echo["direction"] = to_string(cfg.direction);
      break;
  }
  cfg.echo = std::move(echo);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file, std::optional<Experiment> experiment,
                             const CliOverrides& overrides) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ConfigError(file.string(), 0, "cannot read config file");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), file.string(), experiment, overrides);
}

}  // namespace nhsoc
