#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "nhsoc/model.hpp"

namespace nhsoc {

/// Rate of change of the control point, (dq/dt, dg/dt).
struct Velocity {
  double v_q = 0.0;
  double v_g = 0.0;

  /// -v_q + i v_g, the combination entering the adiabatic-frame coupling.
  Complex vartheta() const { return {-v_q, v_g}; }
  double magnitude() const;
};

struct PathPoint {
  ControlPoint point;
  Velocity velocity;
  std::size_t segment = 0;
};

/// Piecewise-linear route through the control plane, traversed at constant
/// speed. Zero-length segments are rejected; a segment may retrace the
/// previous one.
class Path {
 public:
  Path(std::vector<ControlPoint> waypoints, double speed);

  const std::vector<ControlPoint>& waypoints() const { return waypoints_; }
  double speed() const { return speed_; }
  double total_length() const { return cumulative_.back(); }
  double total_time() const { return total_length() / speed_; }

  std::size_t segment_count() const { return waypoints_.size() - 1; }
  double segment_length(std::size_t i) const { return cumulative_[i + 1] - cumulative_[i]; }
  double segment_start_time(std::size_t i) const { return cumulative_[i] / speed_; }
  double segment_duration(std::size_t i) const { return segment_length(i) / speed_; }
  Velocity segment_velocity(std::size_t i) const;

  /// Position `tau` time units into segment i, tau in [0, segment_duration(i)].
  ControlPoint on_segment(std::size_t i, double tau) const;

  /// Arc-length parameterization. At an interior waypoint the incoming
  /// segment's velocity is reported. Throws OutOfRange outside [0, T].
  PathPoint at(double t) const;

  Path reversed() const;
  Path with_speed(double speed) const;

 private:
  std::vector<ControlPoint> waypoints_;
  std::vector<double> cumulative_;
  double speed_;
};

inline PathPoint position_at(const Path& path, double t) { return path.at(t); }

enum class ProtocolKind { Hermitian, Loop, Spike, Ray };

/// Ccw traverses q from q_start towards q_end (the "negative" Hermitian
/// sweep); Cw is the same geometric path run backwards.
enum class Direction { Ccw, Cw };

struct ProtocolParams {
  double q_start = 1.0;
  double q_end = -1.0;
  double h = 1.2;
  double x_m = -0.5;
  ControlPoint origin{-1.0, 1.0};
  double angle = 0.0;
  double max_len = 2.0;
};

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::Hermitian;
  ProtocolParams params;
  Direction direction = Direction::Ccw;
};

/// Waypoints of the standard protocols, in Ccw order:
///   hermitian: (q0,0) (q1,0)
///   loop:      (q0,0) (q0,h) (q1,h) (q1,0)
///   spike:     (q0,0) (x_m,0) (x_m,h) (x_m,0) (q1,0)
///   ray:       origin, origin + max_len (cos angle, sin angle)
/// A spike at x_m == q1 drops its empty final leg.
std::vector<ControlPoint> protocol_waypoints(ProtocolKind kind, const ProtocolParams& params,
                                             Direction direction);

Path standard_path(ProtocolKind kind, const ProtocolParams& params, Direction direction,
                   double speed);
inline Path standard_path(const ProtocolSpec& spec, double speed) {
  return standard_path(spec.kind, spec.params, spec.direction, speed);
}

std::string_view to_string(ProtocolKind kind);
std::string_view to_string(Direction direction);
/// Accepts hermitian|loop|spike|ray. Throws InvalidInput otherwise.
ProtocolKind parse_protocol_kind(std::string_view name);
/// Accepts ccw|negative and cw|positive. Throws InvalidInput otherwise.
Direction parse_direction(std::string_view name);

}  // namespace nhsoc
