#include "nhsoc/dynamics.hpp"

#include <cmath>
#include <limits>

#include "nhsoc/error.hpp"

namespace nhsoc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Spinor rhs(const Hamiltonian2& h, const Spinor& y) {
  const Spinor hy = h.apply(y);
  const Complex minus_i{0.0, -1.0};
  return {minus_i * hy[0], minus_i * hy[1]};
}

Spinor axpy(const Spinor& y, double a, const Spinor& k) { return {y[0] + a * k[0], y[1] + a * k[1]}; }

long steps_for(double duration, double dt) {
  // The small relative slack keeps T/dt that is integral up to rounding from
  // gaining an extra step.
  const double n = std::ceil(duration / dt * (1.0 - 1e-12));
  return n < 1.0 ? 1L : static_cast<long>(n);
}

}  // namespace

BandCoefficients project(const Spinor& state, const Eigensystem& eig) {
  return {inner(eig.phi_plus, state), inner(eig.phi_minus, state)};
}

BandObservables band_observables(const BandCoefficients& c, const Eigensystem& eig) {
  const double wp = std::norm(c.c_plus);
  const double wm = std::norm(c.c_minus);
  const double total = wp + wm;
  if (!(total > 0.0) || !std::isfinite(total))
    throw Error(ErrorCode::InvalidInput, "band observables of zero coefficients");
  BandObservables out;
  out.expected_energy = (wp * eig.e_plus + wm * eig.e_minus) / total;
  const Complex b = 2.0 * out.expected_energy / (eig.e_plus - eig.e_minus);
  out.band_index = b.real();
  out.band_index_residual = b.imag();
  return out;
}

Complex b_parameter(const BandCoefficients& c) {
  const Complex den = c.c_plus + c.c_minus;
  if (std::abs(den) == 0.0) throw Error(ErrorCode::InvalidInput, "b parameter undefined for c+ = -c-");
  return (c.c_plus - c.c_minus) / den;
}

Complex b_parameter(const InitialState& initial) {
  if (const auto* band = std::get_if<Band>(&initial)) return *band == Band::Lower ? -1.0 : 1.0;
  return b_parameter(std::get<BandCoefficients>(initial));
}

Spinor initial_spinor(const InitialState& initial, ControlPoint start, const Model& model) {
  const Eigensystem eig = eigensystem(start, model);
  if (const auto* band = std::get_if<Band>(&initial))
    return *band == Band::Lower ? eig.psi_minus : eig.psi_plus;
  const auto& c = std::get<BandCoefficients>(initial);
  Spinor s{c.c_plus * eig.psi_plus[0] + c.c_minus * eig.psi_minus[0],
           c.c_plus * eig.psi_plus[1] + c.c_minus * eig.psi_minus[1]};
  const double n = norm(s);
  if (!(n > 0.0) || !std::isfinite(n))
    throw Error(ErrorCode::InvalidInput, "initial superposition is zero or not finite");
  return {s[0] / n, s[1] / n};
}

TrajectorySample make_sample(double t, ControlPoint p, const TwoState& state, const Model& model) {
  TrajectorySample s;
  s.t = t;
  s.point = p;
  s.state = state;
  s.spin = spin_polarization(state.amp);
  const Complex d = half_gap(p, model.kappa);
  s.e_plus = d;
  s.e_minus = -d;
  if (std::abs(d) <= model.ep_tolerance) {
    s.valid = false;
    s.coeffs = {Complex{kNaN, kNaN}, Complex{kNaN, kNaN}};
    s.expected_energy = Complex{kNaN, kNaN};
    s.band_index = kNaN;
    return s;
  }
  const Eigensystem eig = eigensystem(p, model);
  s.coeffs = project(state.amp, eig);
  const auto obs = band_observables(s.coeffs, eig);
  s.expected_energy = obs.expected_energy;
  s.band_index = obs.band_index;
  return s;
}

Trajectory evolve(const Path& path, const InitialState& initial, const Model& model,
                  const StepControl& step) {
  if (!(step.dt > 0.0) || !std::isfinite(step.dt))
    throw Error(ErrorCode::InvalidInput, "step size must be positive");

  const ControlPoint start = path.waypoints().front();
  TwoState state;
  state.amp = initial_spinor(initial, start, model);
  state.log_norm = 0.0;

  Trajectory traj{{}, path, step.dt};
  traj.samples.push_back(make_sample(0.0, start, state, model));

  long global_step = 0;
  const std::size_t nseg = path.segment_count();
  for (std::size_t seg = 0; seg < nseg; ++seg) {
    const double t0 = path.segment_start_time(seg);
    const double duration = path.segment_duration(seg);
    const long n = steps_for(duration, step.dt);
    const double h = duration / static_cast<double>(n);
    const bool last_seg = seg + 1 == nseg;

    for (long k = 0; k < n; ++k) {
      const double tau = static_cast<double>(k) * h;
      const Hamiltonian2 h0 = build_hamiltonian(path.on_segment(seg, tau), model.kappa);
      const Hamiltonian2 h1 = build_hamiltonian(path.on_segment(seg, tau + 0.5 * h), model.kappa);
      const Hamiltonian2 h2 = build_hamiltonian(path.on_segment(seg, tau + h), model.kappa);

      const Spinor& y = state.amp;
      const Spinor k1 = rhs(h0, y);
      const Spinor k2 = rhs(h1, axpy(y, 0.5 * h, k1));
      const Spinor k3 = rhs(h1, axpy(y, 0.5 * h, k2));
      const Spinor k4 = rhs(h2, axpy(y, h, k3));
      for (int c = 0; c < 2; ++c) state.amp[c] = y[c] + (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);

      if (step.renormalize) {
        const double nrm = norm(state.amp);
        state.amp[0] /= nrm;
        state.amp[1] /= nrm;
        state.log_norm += std::log(nrm);
      }

      ++global_step;
      const bool is_final = last_seg && k + 1 == n;
      if (is_final) {
        traj.samples.push_back(
            make_sample(path.total_time(), path.waypoints().back(), state, model));
      } else if (step.stride > 0 && global_step % step.stride == 0) {
        const ControlPoint p = k + 1 == n ? path.waypoints()[seg + 1] : path.on_segment(seg, tau + h);
        traj.samples.push_back(make_sample(t0 + tau + h, p, state, model));
      }
    }
  }
  return traj;
}

}  // namespace nhsoc
