#pragma once

#include <variant>
#include <vector>

#include "nhsoc/model.hpp"
#include "nhsoc/path.hpp"

namespace nhsoc {

struct BandCoefficients {
  Complex c_plus;
  Complex c_minus;
};

enum class Band { Lower, Upper };

/// Either a pure band or a raw superposition c+ psi+ + c- psi- at the path start.
using InitialState = std::variant<Band, BandCoefficients>;

/// c_i = <phi_i|state>.
BandCoefficients project(const Spinor& state, const Eigensystem& eig);

struct BandObservables {
  Complex expected_energy;
  double band_index = 0.0;
  /// Imaginary part of 2<E>/(E+ - E-) that was discarded.
  double band_index_residual = 0.0;
};

/// Weighted complex energy and band index. Throws InvalidInput for zero weights.
BandObservables band_observables(const BandCoefficients& coeffs, const Eigensystem& eig);

/// b = (c+ - c-) / (c+ + c-).
Complex b_parameter(const BandCoefficients& coeffs);
Complex b_parameter(const InitialState& initial);

struct StepControl {
  double dt = 1e-3;
  /// Record every `stride` steps; <= 0 records only the endpoints.
  int stride = 10;
  bool renormalize = true;
};

/// Diagnostic fields are NaN when `valid` is false (|Delta E| within the EP
/// tolerance at that instant).
struct TrajectorySample {
  double t = 0.0;
  ControlPoint point;
  TwoState state;
  BandCoefficients coeffs;
  Complex expected_energy;
  double band_index = 0.0;
  double spin = 0.0;
  Complex e_plus;
  Complex e_minus;
  bool valid = true;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Path path;
  double step_size = 0.0;

  const TrajectorySample& final() const { return samples.back(); }
  double final_band_index() const { return samples.back().band_index; }
};

/// Resolve the initial state at `start` into a unit spinor.
Spinor initial_spinor(const InitialState& initial, ControlPoint start, const Model& model);

/// Integrates i d psi/dt = H(q(t), g(t)) psi with classical RK4. Each path
/// segment is stepped separately with n_k = ceil(T_k / dt) equal steps so
/// corners fall on step boundaries.
Trajectory evolve(const Path& path, const InitialState& initial, const Model& model = {},
                  const StepControl& step = {});

/// Fill diagnostics for a state at point p.
TrajectorySample make_sample(double t, ControlPoint p, const TwoState& state, const Model& model);

}  // namespace nhsoc
