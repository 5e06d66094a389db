#include "nhsoc/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhsoc/error.hpp"

namespace nhsoc {

double Velocity::magnitude() const { return std::hypot(v_q, v_g); }

Path::Path(std::vector<ControlPoint> waypoints, double speed)
    : waypoints_(std::move(waypoints)), speed_(speed) {
  if (waypoints_.size() < 2) throw Error(ErrorCode::InvalidInput, "a path needs at least two waypoints");
  if (!(speed_ > 0.0) || !std::isfinite(speed_))
    throw Error(ErrorCode::InvalidInput, "path speed must be positive and finite");
  cumulative_.reserve(waypoints_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i) {
    const auto& a = waypoints_[i];
    const auto& b = waypoints_[i + 1];
    if (!std::isfinite(a.q) || !std::isfinite(a.g) || !std::isfinite(b.q) || !std::isfinite(b.g))
      throw Error(ErrorCode::InvalidInput, "waypoint is not finite");
    const double len = std::hypot(b.q - a.q, b.g - a.g);
    if (!(len > 0.0))
      throw Error(ErrorCode::InvalidInput, "zero-length segment at waypoint " + std::to_string(i));
    cumulative_.push_back(cumulative_.back() + len);
  }
}

Velocity Path::segment_velocity(std::size_t i) const {
  const auto& a = waypoints_[i];
  const auto& b = waypoints_[i + 1];
  const double len = segment_length(i);
  return {speed_ * (b.q - a.q) / len, speed_ * (b.g - a.g) / len};
}

ControlPoint Path::on_segment(std::size_t i, double tau) const {
  const auto& a = waypoints_[i];
  const auto& b = waypoints_[i + 1];
  const double f = std::clamp(tau * speed_ / segment_length(i), 0.0, 1.0);
  if (f == 1.0) return b;
  return {a.q + f * (b.q - a.q), a.g + f * (b.g - a.g)};
}

PathPoint Path::at(double t) const {
  const double total = total_time();
  if (!(t >= 0.0 && t <= total))
    throw Error(ErrorCode::OutOfRange,
                "t = " + std::to_string(t) + " outside [0, " + std::to_string(total) + "]");
  const double s = t * speed_;
  // First segment whose end is at or beyond s: corners belong to the incoming segment.
  auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), s);
  if (it == cumulative_.end()) --it;
  auto seg = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  // t * speed may land a few ulps past a corner that t names exactly.
  if (seg > 0 && s - cumulative_[seg] <= 1e-12 * total_length()) --seg;
  PathPoint out;
  out.segment = seg;
  out.velocity = segment_velocity(seg);
  out.point = on_segment(seg, t - segment_start_time(seg));
  if (t == total) out.point = waypoints_.back();
  return out;
}

Path Path::reversed() const {
  std::vector<ControlPoint> rev(waypoints_.rbegin(), waypoints_.rend());
  return Path(std::move(rev), speed_);
}

Path Path::with_speed(double speed) const { return Path(waypoints_, speed); }

std::vector<ControlPoint> protocol_waypoints(ProtocolKind kind, const ProtocolParams& p,
                                             Direction direction) {
  auto finite = [](double x) { return std::isfinite(x); };
  std::vector<ControlPoint> pts;
  switch (kind) {
    case ProtocolKind::Hermitian:
      if (!finite(p.q_start) || !finite(p.q_end) || p.q_start == p.q_end)
        throw Error(ErrorCode::InvalidInput, "hermitian sweep needs distinct finite endpoints");
      pts = {{p.q_start, 0.0}, {p.q_end, 0.0}};
      break;
    case ProtocolKind::Loop:
      if (!(p.h > 0.0) || !finite(p.h)) throw Error(ErrorCode::InvalidInput, "loop height h must be > 0");
      if (!finite(p.q_start) || !finite(p.q_end) || p.q_start == p.q_end)
        throw Error(ErrorCode::InvalidInput, "loop needs distinct finite endpoints");
      pts = {{p.q_start, 0.0}, {p.q_start, p.h}, {p.q_end, p.h}, {p.q_end, 0.0}};
      break;
    case ProtocolKind::Spike: {
      if (!(p.h > 0.0) || !finite(p.h)) throw Error(ErrorCode::InvalidInput, "spike height h must be > 0");
      const double lo = std::min(p.q_start, p.q_end);
      const double hi = std::max(p.q_start, p.q_end);
      if (!finite(p.x_m) || !(p.x_m < 0.0) || p.x_m < lo || p.x_m > hi || p.x_m == p.q_start)
        throw Error(ErrorCode::InvalidInput,
                    "spike position x_m must be negative and lie in [q_end, q_start)");
      pts = {{p.q_start, 0.0}, {p.x_m, 0.0}, {p.x_m, p.h}, {p.x_m, 0.0}};
      if (p.x_m != p.q_end) pts.push_back({p.q_end, 0.0});
      break;
    }
    case ProtocolKind::Ray:
      if (!(p.max_len > 0.0) || !finite(p.max_len) || !finite(p.angle) || !finite(p.origin.q) ||
          !finite(p.origin.g))
        throw Error(ErrorCode::InvalidInput, "ray needs a finite origin, angle and max_len > 0");
      pts = {p.origin,
             {p.origin.q + p.max_len * std::cos(p.angle), p.origin.g + p.max_len * std::sin(p.angle)}};
      break;
  }
  if (direction == Direction::Cw) std::reverse(pts.begin(), pts.end());
  return pts;
}

Path standard_path(ProtocolKind kind, const ProtocolParams& params, Direction direction,
                   double speed) {
  return Path(protocol_waypoints(kind, params, direction), speed);
}

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Hermitian: return "hermitian";
    case ProtocolKind::Loop: return "loop";
    case ProtocolKind::Spike: return "spike";
    case ProtocolKind::Ray: return "ray";
  }
  return "?";
}

std::string_view to_string(Direction direction) {
  return direction == Direction::Ccw ? "ccw" : "cw";
}

ProtocolKind parse_protocol_kind(std::string_view name) {
  if (name == "hermitian") return ProtocolKind::Hermitian;
  if (name == "loop") return ProtocolKind::Loop;
  if (name == "spike") return ProtocolKind::Spike;
  if (name == "ray") return ProtocolKind::Ray;
  throw Error(ErrorCode::InvalidInput, "unknown protocol kind '" + std::string(name) + "'");
}

Direction parse_direction(std::string_view name) {
  if (name == "ccw" || name == "negative") return Direction::Ccw;
  if (name == "cw" || name == "positive") return Direction::Cw;
  throw Error(ErrorCode::InvalidInput, "unknown direction '" + std::string(name) + "'");
}

}  // namespace nhsoc
