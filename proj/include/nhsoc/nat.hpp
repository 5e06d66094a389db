#pragma once

// Analytics for nonadiabatic transitions (NATs): the adiabatic-frame
// evolution of b = (c+ - c-)/(c+ + c-), the closed-form NAT radius, and the
// simulation drivers that measure it (point-source diagrams, speed sweeps,
// protocol phase diagrams).

#include <optional>
#include <span>
#include <vector>

#include "nhsoc/dynamics.hpp"
#include "nhsoc/model.hpp"
#include "nhsoc/path.hpp"

namespace nhsoc {

struct AdiabaticFrameInput {
  Complex b0;
  Complex delta_e0;
  Complex vartheta;
  double speed = 0.0;

  static AdiabaticFrameInput from(Complex b0, Complex delta_e0, const Velocity& v) {
    return {b0, delta_e0, v.vartheta(), v.magnitude()};
  }
};

/// b(t) with the adiabatic-frame coefficients frozen at t = 0 (complex
/// tangent form). Throws PoleEncountered when the denominator vanishes.
Complex adiabatic_b_exact(const AdiabaticFrameInput& in, double t);

/// Leading-order form: Re(Delta E(0)) dropped and vartheta replaced by |v|.
/// Throws NoDamping when Im(Delta E(0)) == 0.
Complex adiabatic_b_approx(const AdiabaticFrameInput& in, double t);

/// n(0) = exp(i atan(|v| / (2 |Delta E(0)|^3))).
Complex nat_phase_factor(Complex delta_e0, double speed);

struct NatPrediction {
  double radius = 0.0;
  double xi = 0.0;
  Complex n0;
  double tau_root = 0.0;
  double t_occur = 0.0;
};

/// Radius at which Re(b) first reaches zero along a straight ray from
/// `origin`. Coordinates and speed are scaled by kappa before the kappa = 1
/// formula and the radius scaled back. Throws NoTransition when no root lies
/// in (0, 1) or Im(Delta E(0)) <= 0.
NatPrediction predict_nat_radius(ControlPoint origin, Complex b0, double speed,
                                 const Model& model = {});

/// First crossing of y = 0 away from its initial sign, with a dead band of
/// +-hysteresis. The crossing is linearly interpolated between the last
/// sample on the original side and its successor. NaN samples are skipped.
std::optional<double> first_sign_flip(std::span<const double> x, std::span<const double> y,
                                      double hysteresis = 0.02);

struct RaySamples {
  double angle = 0.0;
  std::vector<double> arc_length;
  std::vector<ControlPoint> points;
  std::vector<double> band_index;
};

struct FrontPoint {
  double angle = 0.0;
  /// NaN when the band index never changes sign along the ray.
  double measured_radius = 0.0;
};

struct PointSourceOptions {
  int n_rays = 360;
  double max_arc = 2.0;
  int min_samples_per_ray = 400;
  double hysteresis = 0.02;
  StepControl step{};
  int workers = 1;
};

struct PointSourceField {
  ControlPoint origin;
  double speed = 0.0;
  std::vector<RaySamples> rays;
  std::vector<FrontPoint> front;
  /// Empty when the closed form reports NoTransition at the origin.
  std::optional<NatPrediction> prediction;

  double median_front() const;
};

/// Throws EpDegenerate when the origin sits on the EP.
PointSourceField point_source_diagram(ControlPoint origin, const InitialState& initial, double speed,
                                      const PointSourceOptions& options = {},
                                      const Model& model = {});

struct SpeedPoint {
  double speed = 0.0;
  double band_index_final = 0.0;
};

/// One evolution per speed along the same geometric path; final band index only.
std::vector<SpeedPoint> speed_sweep(const std::vector<ControlPoint>& waypoints,
                                    std::span<const double> speeds, const InitialState& initial,
                                    const StepControl& step = {}, const Model& model = {},
                                    int workers = 1);
std::vector<SpeedPoint> speed_sweep(const ProtocolSpec& protocol, std::span<const double> speeds,
                                    const InitialState& initial, const StepControl& step = {},
                                    const Model& model = {}, int workers = 1);

/// exp(ln_min), ..., exp(ln_max), `count` points equally spaced in ln |v|.
std::vector<double> log_spaced_speeds(double ln_min, double ln_max, int count);
std::vector<double> linspace(double lo, double hi, int count);

struct BoundaryPoint {
  double x_m = 0.0;
  double h_star = 0.0;
};

struct PhaseDiagram {
  std::vector<double> xm_grid;
  std::vector<double> h_grid;
  /// band_index_final[i][j] for xm_grid[i], h_grid[j].
  std::vector<std::vector<double>> band_index_final;
  /// Predicted R(x_m, h) = h curve; columns that failed to bracket are left out.
  std::vector<BoundaryPoint> boundary;
  std::vector<double> boundary_omitted;
  double speed = 0.0;
  Direction direction = Direction::Ccw;

  /// Simulated boundary of column i: first sign flip of the final band
  /// index along h, linearly interpolated. Empty when the column never flips.
  std::optional<double> measured_boundary(std::size_t i, double hysteresis = 0.02) const;
};

/// Solves R(x_m, h, speed) = h for h in [h_lo, h_hi] by bisection, with the
/// state assumed on the lower band at (x_m, h). Heights where no NAT is
/// predicted count as R = infinity.
std::optional<double> predicted_min_height(double x_m, double speed, double h_lo, double h_hi,
                                           const Model& model = {}, double tol = 1e-3);

/// Spike protocol from the lower band on every (x_m, h) cell.
PhaseDiagram protocol_phase_diagram(std::span<const double> xm_grid, std::span<const double> h_grid,
                                    double speed, Direction direction, const StepControl& step = {},
                                    const Model& model = {}, int workers = 1);

}  // namespace nhsoc
