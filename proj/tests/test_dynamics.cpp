#include <doctest.h>

#include <cmath>

#include "nhsoc/dynamics.hpp"
#include "nhsoc/error.hpp"

using namespace nhsoc;

namespace {

Spinor combine(Complex a, const Spinor& u, Complex b, const Spinor& v) {
  return {a * u[0] + b * v[0], a * u[1] + b * v[1]};
}

double distance(const Spinor& a, const Spinor& b) {
  return std::hypot(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
}

}  // namespace

TEST_CASE("project") {
  const auto eig = eigensystem({0.3, 0.7});
  auto c = project(eig.psi_plus, eig);
  CHECK(std::abs(c.c_plus - 1.0) < 1e-12);
  CHECK(std::abs(c.c_minus) < 1e-12);

  c = project(combine(1.0, eig.psi_plus, 1.0, eig.psi_minus), eig);
  CHECK(std::abs(c.c_plus - 1.0) < 1e-12);
  CHECK(std::abs(c.c_minus - 1.0) < 1e-12);

  const auto e0 = eigensystem({0.0, 0.0});
  c = project(Spinor{Complex{1, 0}, Complex{0, 0}}, e0);
  CHECK(std::abs(c.c_plus - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(c.c_minus + 1.0 / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("band observables") {
  const auto eig = eigensystem({-0.4, 0.9});
  auto obs = band_observables({1.0, 0.0}, eig);
  CHECK(std::abs(obs.expected_energy - eig.e_plus) < 1e-15);
  CHECK(obs.band_index == doctest::Approx(1.0));
  obs = band_observables({1.0, 1.0}, eig);
  CHECK(std::abs(obs.band_index) < 1e-15);
  obs = band_observables({1.0, 2.0}, eig);
  CHECK(obs.band_index == doctest::Approx(-0.6).epsilon(1e-14));
  CHECK(std::abs(obs.band_index_residual) < 1e-9);

  // Scale invariance.
  const Complex lambda{0.3, -4.0};
  const auto scaled = band_observables({lambda * 1.0, lambda * 2.0}, eig);
  CHECK(scaled.band_index == doctest::Approx(-0.6).epsilon(1e-14));
  CHECK(std::abs(scaled.expected_energy - obs.expected_energy) < 1e-14);

  CHECK_THROWS_AS(band_observables({0.0, 0.0}, eig), Error);
}

TEST_CASE("b parameter") {
  CHECK(b_parameter(InitialState{Band::Lower}) == Complex{-1, 0});
  CHECK(b_parameter(InitialState{Band::Upper}) == Complex{1, 0});
  CHECK(std::abs(b_parameter(BandCoefficients{1.0, 1.0})) == 0.0);
  CHECK_THROWS_AS(b_parameter(BandCoefficients{1.0, -1.0}), Error);
}

TEST_CASE("stationary eigenstate keeps its band") {
  const Path p({{0.0, 0.0}, {-1e-6, 0.0}}, 1e-6);
  const auto traj = evolve(p, Band::Lower, {}, {1e-2, 1, true});
  REQUIRE(traj.samples.size() >= 2);
  for (const auto& s : traj.samples) CHECK(std::abs(s.band_index + 1.0) <= 1e-6);
}

TEST_CASE("trajectory sampling layout") {
  const Path p = standard_path(ProtocolKind::Loop, {}, Direction::Ccw, 1.0);
  const auto traj = evolve(p, Band::Lower, {}, {1e-2, 10, true});
  CHECK(traj.samples.front().t == 0.0);
  CHECK(traj.samples.back().t == p.total_time());
  CHECK(traj.samples.back().point == ControlPoint{-1, 0});
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    CHECK(traj.samples[i].t > traj.samples[i - 1].t);
  // 440 steps, stride 10, the final step doubles as a stride point.
  CHECK(traj.samples.size() == 45);

  const auto ends = evolve(p, Band::Lower, {}, {1e-2, 0, true});
  CHECK(ends.samples.size() == 2);

  CHECK_THROWS_AS(evolve(p, Band::Lower, {}, {0.0, 10, true}), Error);
}

TEST_CASE("sample invariants along a loop") {
  const Path p = standard_path(ProtocolKind::Loop, {}, Direction::Ccw, std::exp(-1.0));
  const auto traj = evolve(p, Band::Lower, {}, {1e-2, 5, true});
  for (const auto& s : traj.samples) {
    REQUIRE(s.valid);
    CHECK(s.band_index >= -1.0 - 1e-12);
    CHECK(s.band_index <= 1.0 + 1e-12);
    CHECK(std::abs(norm(s.state.amp) - 1.0) <= 1e-12);
    const auto eig = eigensystem(s.point);
    CHECK(distance(combine(s.coeffs.c_plus, eig.psi_plus, s.coeffs.c_minus, eig.psi_minus),
                   s.state.amp) <= 1e-9);
    const Complex b = 2.0 * s.expected_energy / (s.e_plus - s.e_minus);
    CHECK(std::abs(b.imag()) <= 1e-9);
  }
}

TEST_CASE("EP crossing flags samples and keeps going") {
  const Path p({{0.0, 0.5}, {0.0, 1.5}}, 1.0);
  // Step 1/64 lands a sample exactly on g = 1.
  const auto traj = evolve(p, Band::Lower, {}, {1.0 / 64.0, 1, true});
  int flagged = 0;
  for (const auto& s : traj.samples) {
    if (!s.valid) {
      ++flagged;
      CHECK(std::isnan(s.band_index));
    }
  }
  CHECK(flagged == 1);
  CHECK(traj.final().valid);
  CHECK(std::isfinite(traj.final_band_index()));
}

TEST_CASE("Hermitian sweep conserves the norm") {
  const Path p = standard_path(ProtocolKind::Hermitian, {}, Direction::Ccw, std::exp(-2.0));
  const auto traj = evolve(p, Band::Lower);
  CHECK(std::abs(traj.final().state.log_norm) <= 1e-6);

  const auto raw = evolve(p, Band::Lower, {}, {1e-3, 10, false});
  CHECK(std::abs(norm(raw.final().state.amp) - 1.0) <= 1e-6);
}

TEST_CASE("renormalization does not change diagnostics") {
  const Path p = standard_path(ProtocolKind::Loop, {}, Direction::Ccw, 1.0);
  const auto a = evolve(p, Band::Lower, {}, {1e-3, 50, true});
  const auto b = evolve(p, Band::Lower, {}, {1e-3, 50, false});
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& x = a.samples[i];
    const auto& y = b.samples[i];
    CHECK(std::abs(x.band_index - y.band_index) <= 1e-10);
    CHECK(std::abs(x.spin - y.spin) <= 1e-10);
    CHECK(std::abs(x.expected_energy - y.expected_energy) <= 1e-10);
    CHECK(std::abs(x.state.log_norm - std::log(norm(y.state.amp))) <= 1e-10);
  }
}

TEST_CASE("Rayleigh quotient equals the weighted energy at g = 0") {
  const Path p = standard_path(ProtocolKind::Hermitian, {}, Direction::Ccw, 0.5);
  const auto traj = evolve(p, Band::Upper, {}, {1e-3, 20, true});
  for (const auto& s : traj.samples) {
    const auto h = build_hamiltonian(s.point, 1.0);
    const Spinor hv = h.apply(s.state.amp);
    const Complex rq = inner(s.state.amp, hv) / inner(s.state.amp, s.state.amp);
    CHECK(std::abs(rq - s.expected_energy) <= 1e-9);
  }
}

TEST_CASE("fourth-order convergence") {
  const Path p = standard_path(ProtocolKind::Loop, {}, Direction::Ccw, std::exp(-2.0));
  const double dt = 0.04;
  auto run = [&](double h) { return evolve(p, Band::Lower, {}, {h, 0, true}).final().state.amp; };
  const Spinor coarse = run(dt);
  const Spinor half = run(dt / 2);
  const Spinor ref = run(dt / 4);
  const double ratio = distance(coarse, ref) / distance(half, ref);
  // Against a quarter-step reference the ideal ratio is (1 - 1/256)/(1/16 - 1/256) = 17.
  CHECK(ratio > 13.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("slow Hermitian sweep follows the band") {
  const Path p = standard_path(ProtocolKind::Hermitian, {}, Direction::Ccw, std::exp(-4.0));
  const auto traj = evolve(p, Band::Lower, {}, {1e-2, 0, true});
  CHECK(traj.final_band_index() == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("sudden Hermitian sweep reproduces the initial distribution") {
  const Path p = standard_path(ProtocolKind::Hermitian, {}, Direction::Ccw, 1e7);
  const auto traj = evolve(p, Band::Lower, {}, {1e-3, 0, true});
  // |<psi-(-1)|psi-(1)>|^2 = cos^2(pi/4) = 1/2
  CHECK(std::abs(traj.final_band_index()) <= 1e-5);
}

TEST_CASE("loop CCW climbs to the upper band crossing the cut once") {
  const Path p = standard_path(ProtocolKind::Loop, {}, Direction::Ccw, std::exp(-2.0));
  const auto traj = evolve(p, Band::Lower, {}, {1e-3, 10, true});
  CHECK(traj.final_band_index() == doctest::Approx(1.0).epsilon(0.02));

  int flips = 0;
  double q_at_flip = NAN;
  double g_at_flip = NAN;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const double a = traj.samples[i - 1].band_index;
    const double b = traj.samples[i].band_index;
    if ((a < 0.0) != (b < 0.0)) {
      ++flips;
      q_at_flip = traj.samples[i].point.q;
      g_at_flip = traj.samples[i].point.g;
    }
  }
  CHECK(flips == 1);
  CHECK(std::abs(q_at_flip) <= 0.01);
  CHECK(g_at_flip == doctest::Approx(1.2));
}

TEST_CASE("loop CW drops back to the lower band") {
  const Path p = standard_path(ProtocolKind::Loop, {}, Direction::Cw, std::exp(-2.0));
  const auto traj = evolve(p, Band::Lower, {}, {1e-3, 0, true});
  CHECK(traj.final_band_index() < 0.0);
}

TEST_CASE("initial superposition") {
  const ControlPoint start{1.0, 0.0};
  const auto eig = eigensystem(start);
  const Spinor s = initial_spinor(BandCoefficients{1.0, 2.0}, start, {});
  CHECK(std::abs(norm(s) - 1.0) < 1e-15);
  const auto c = project(s, eig);
  CHECK(std::abs(c.c_minus / c.c_plus - 2.0) < 1e-12);
  CHECK_THROWS_AS(initial_spinor(BandCoefficients{0.0, 0.0}, start, {}), Error);
  CHECK_THROWS_AS(initial_spinor(Band::Lower, {0.0, 1.0}, {}), Error);
}
