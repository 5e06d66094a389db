#include "nhsoc/nat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nhsoc/error.hpp"
#include "nhsoc/parallel.hpp"

namespace nhsoc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPoleTolerance = 1e-12;

const Complex kI{0.0, 1.0};

}  // namespace

Complex adiabatic_b_exact(const AdiabaticFrameInput& in, double t) {
  const Complex d = in.delta_e0;
  if (std::abs(d) == 0.0) throw Error(ErrorCode::InvalidInput, "Delta E(0) must be nonzero");
  const Complex d3 = d * d * d;
  const Complex d6 = d3 * d3;
  const Complex th = in.vartheta;
  // ratio = Delta E'(0) / Delta E(0); the sign of the root drops out of b(t).
  const Complex ratio = kI * std::sqrt(-th * th - 4.0 * d6) / (2.0 * d3);
  const Complex coupling = th / (2.0 * d3);
  const Complex tn = std::tan(d * ratio * t);

  const Complex num = in.b0 * ratio - kI * (1.0 - kI * coupling) * tn;
  const Complex den = ratio - kI * in.b0 * (1.0 + kI * coupling) * tn;
  if (std::abs(den) < kPoleTolerance || !std::isfinite(std::abs(den)))
    throw Error(ErrorCode::PoleEncountered, "b(t) denominator vanishes at t = " + std::to_string(t));
  return num / den;
}

Complex nat_phase_factor(Complex delta_e0, double speed) {
  const double mag = std::abs(delta_e0);
  return std::polar(1.0, std::atan(speed / (2.0 * mag * mag * mag)));
}

Complex adiabatic_b_approx(const AdiabaticFrameInput& in, double t) {
  const double damping = in.delta_e0.imag();
  if (damping == 0.0) throw Error(ErrorCode::NoDamping, "Im(Delta E(0)) = 0, no NAT mechanism");
  const Complex n0 = nat_phase_factor(in.delta_e0, in.speed);
  // b0 n0 = -1 is a fixed point: numerator and denominator vanish together.
  if (in.b0 * n0 == Complex{-1.0, 0.0}) return in.b0;
  const double tn = std::tanh(damping * t);
  const Complex den = 1.0 + in.b0 * tn * n0;
  if (std::abs(den) < kPoleTolerance)
    throw Error(ErrorCode::PoleEncountered, "b(t) denominator vanishes at t = " + std::to_string(t));
  return (in.b0 + tn / n0) / den;
}

NatPrediction predict_nat_radius(ControlPoint origin, Complex b0, double speed, const Model& model) {
  if (!(speed > 0.0) || !std::isfinite(speed))
    throw Error(ErrorCode::InvalidInput, "speed must be positive");
  if (!std::isfinite(b0.real()) || !std::isfinite(b0.imag()))
    throw Error(ErrorCode::InvalidInput, "b0 is not finite");

  const Complex d = half_gap(origin, model.kappa);
  const double damping = d.imag();
  if (!(damping > 0.0)) throw Error(ErrorCode::NoTransition, "Im(Delta E(0)) <= 0 at the origin");
  const double scaled_speed = model.kappa * speed;

  NatPrediction out;
  out.n0 = nat_phase_factor(d, scaled_speed);
  out.xi = 1.0 + std::norm(b0);
  const double a = (b0 * out.n0 * out.n0).real();
  const double c = b0.real();
  const double disc = out.xi * out.xi - 4.0 * c * a;
  if (disc < 0.0) throw Error(ErrorCode::NoTransition, "Re(b) = 0 has no real root");

  std::vector<double> roots;
  if (a == 0.0) {
    roots.push_back(-c / out.xi);
  } else {
    const double s = std::sqrt(disc);
    roots.push_back((-out.xi + s) / (2.0 * a));
    roots.push_back((-out.xi - s) / (2.0 * a));
  }
  double tau = kNaN;
  for (double r : roots)
    if (r > 0.0 && r < 1.0 && !(tau <= r)) tau = r;
  if (std::isnan(tau)) throw Error(ErrorCode::NoTransition, "no tanh root in (0, 1)");

  out.tau_root = tau;
  out.t_occur = std::atanh(tau) / damping;
  out.radius = speed * out.t_occur;
  return out;
}

std::optional<double> first_sign_flip(std::span<const double> x, std::span<const double> y,
                                      double hysteresis) {
  const std::size_t n = std::min(x.size(), y.size());
  int side = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = y[i];
    if (std::isnan(v)) continue;
    if (side == 0) {
      if (v > hysteresis) side = 1;
      else if (v < -hysteresis) side = -1;
      if (side != 0) last = i;
      continue;
    }
    if (v * side > 0.0) {
      last = i;
    } else if (v * side < -hysteresis) {
      std::size_t next = last + 1;
      while (std::isnan(y[next])) ++next;
      const double y0 = y[last];
      const double y1 = y[next];
      return x[last] + (x[next] - x[last]) * y0 / (y0 - y1);
    }
  }
  return std::nullopt;
}

double PointSourceField::median_front() const {
  std::vector<double> r;
  for (const auto& f : front)
    if (!std::isnan(f.measured_radius)) r.push_back(f.measured_radius);
  if (r.empty()) return kNaN;
  std::sort(r.begin(), r.end());
  const std::size_t m = r.size() / 2;
  return r.size() % 2 ? r[m] : 0.5 * (r[m - 1] + r[m]);
}

PointSourceField point_source_diagram(ControlPoint origin, const InitialState& initial, double speed,
                                      const PointSourceOptions& options, const Model& model) {
  if (options.n_rays < 4) throw Error(ErrorCode::InvalidInput, "need at least 4 rays");
  if (!(options.max_arc > 0.0)) throw Error(ErrorCode::InvalidInput, "max_arc must be > 0");
  if (!(speed > 0.0)) throw Error(ErrorCode::InvalidInput, "speed must be > 0");
  eigensystem(origin, model);

  PointSourceField field;
  field.origin = origin;
  field.speed = speed;
  const auto nrays = static_cast<std::size_t>(options.n_rays);
  field.rays.resize(nrays);
  field.front.resize(nrays);

  const double duration = options.max_arc / speed;
  const long nsteps = static_cast<long>(std::ceil(duration / options.step.dt));
  const long per_sample = std::max(1L, nsteps / std::max(1, options.min_samples_per_ray));
  StepControl step = options.step;
  step.stride = static_cast<int>(step.stride > 0 ? std::min<long>(step.stride, per_sample) : per_sample);

  parallel_for(nrays, options.workers, [&](std::size_t k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nrays);
    ProtocolParams params;
    params.origin = origin;
    params.angle = angle;
    params.max_len = options.max_arc;
    const Path ray = standard_path(ProtocolKind::Ray, params, Direction::Ccw, speed);
    const Trajectory traj = evolve(ray, initial, model, step);

    RaySamples& out = field.rays[k];
    out.angle = angle;
    out.arc_length.reserve(traj.samples.size());
    out.points.reserve(traj.samples.size());
    out.band_index.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
      out.arc_length.push_back(s.t * speed);
      out.points.push_back(s.point);
      out.band_index.push_back(s.band_index);
    }
    const auto flip = first_sign_flip(out.arc_length, out.band_index, options.hysteresis);
    field.front[k] = {angle, flip.value_or(kNaN)};
  });

  try {
    field.prediction = predict_nat_radius(origin, b_parameter(initial), speed, model);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoTransition) throw;
  }
  return field;
}

std::vector<SpeedPoint> speed_sweep(const std::vector<ControlPoint>& waypoints,
                                    std::span<const double> speeds, const InitialState& initial,
                                    const StepControl& step, const Model& model, int workers) {
  for (double v : speeds)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "speeds must be > 0");
  const Path base(waypoints, 1.0);

  StepControl endpoints = step;
  endpoints.stride = 0;
  std::vector<SpeedPoint> out(speeds.size());
  parallel_for(speeds.size(), workers, [&](std::size_t i) {
    out[i] = {speeds[i], evolve(base.with_speed(speeds[i]), initial, model, endpoints).final_band_index()};
  });
  return out;
}

std::vector<SpeedPoint> speed_sweep(const ProtocolSpec& protocol, std::span<const double> speeds,
                                    const InitialState& initial, const StepControl& step,
                                    const Model& model, int workers) {
  return speed_sweep(protocol_waypoints(protocol.kind, protocol.params, protocol.direction), speeds,
                     initial, step, model, workers);
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw Error(ErrorCode::InvalidInput, "grid count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  out.back() = hi;
  return out;
}

std::vector<double> log_spaced_speeds(double ln_min, double ln_max, int count) {
  auto out = linspace(ln_min, ln_max, count);
  for (double& v : out) v = std::exp(v);
  return out;
}

std::optional<double> PhaseDiagram::measured_boundary(std::size_t i, double hysteresis) const {
  return first_sign_flip(h_grid, band_index_final.at(i), hysteresis);
}

std::optional<double> predicted_min_height(double x_m, double speed, double h_lo, double h_hi,
                                           const Model& model, double tol) {
  auto excess = [&](double h) {
    try {
      return predict_nat_radius({x_m, h}, Complex{-1.0, 0.0}, speed, model).radius - h;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoTransition) throw;
      return std::numeric_limits<double>::infinity();
    }
  };
  double lo = h_lo;
  double hi = h_hi;
  double f_lo = excess(lo);
  const double f_hi = excess(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = excess(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PhaseDiagram protocol_phase_diagram(std::span<const double> xm_grid, std::span<const double> h_grid,
                                    double speed, Direction direction, const StepControl& step,
                                    const Model& model, int workers) {
  if (xm_grid.empty() || h_grid.empty()) throw Error(ErrorCode::InvalidInput, "empty phase-diagram grid");
  for (double x : xm_grid)
    if (!(x < 0.0)) throw Error(ErrorCode::InvalidInput, "x_m values must be < 0");
  for (double h : h_grid)
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidInput, "h values must be > 0");
  if (!(speed > 0.0)) throw Error(ErrorCode::InvalidInput, "speed must be > 0");

  PhaseDiagram pd;
  pd.xm_grid.assign(xm_grid.begin(), xm_grid.end());
  pd.h_grid.assign(h_grid.begin(), h_grid.end());
  pd.speed = speed;
  pd.direction = direction;
  const std::size_t nx = xm_grid.size();
  const std::size_t nh = h_grid.size();
  pd.band_index_final.assign(nx, std::vector<double>(nh, 0.0));

  StepControl endpoints = step;
  endpoints.stride = 0;
  parallel_for(nx * nh, workers, [&](std::size_t cell) {
    const std::size_t i = cell / nh;
    const std::size_t j = cell % nh;
    ProtocolSpec spec;
    spec.kind = ProtocolKind::Spike;
    spec.params.x_m = xm_grid[i];
    spec.params.h = h_grid[j];
    spec.direction = direction;
    const Path path = standard_path(spec, speed);
    pd.band_index_final[i][j] = evolve(path, Band::Lower, model, endpoints).final_band_index();
  });

  const auto [h_min, h_max] = std::minmax_element(h_grid.begin(), h_grid.end());
  for (double x : xm_grid) {
    if (auto h = predicted_min_height(x, speed, *h_min, *h_max, model))
      pd.boundary.push_back({x, *h});
    else
      pd.boundary_omitted.push_back(x);
  }
  return pd;
}

}  // namespace nhsoc
