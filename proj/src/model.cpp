#include "nhsoc/model.hpp"

#include <cmath>
#include <numbers>

#include "nhsoc/error.hpp"

namespace nhsoc {

namespace {

bool finite(ControlPoint p) { return std::isfinite(p.q) && std::isfinite(p.g); }

void require_valid(ControlPoint p, double kappa) {
  if (!finite(p)) throw Error(ErrorCode::InvalidInput, "control point is not finite");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw Error(ErrorCode::InvalidInput, "kappa must be positive and finite");
}

}  // namespace

Complex inner(const Spinor& bra, const Spinor& ket) {
  return std::conj(bra[0]) * ket[0] + std::conj(bra[1]) * ket[1];
}

double norm(const Spinor& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

Hamiltonian2 build_hamiltonian(ControlPoint p, double kappa) {
  require_valid(p, kappa);
  const Complex diag = kappa * Complex{-p.q, p.g};
  return {diag, Complex{1.0, 0.0}, Complex{1.0, 0.0}, -diag};
}

Complex half_gap(ControlPoint p, double kappa) {
  require_valid(p, kappa);
  const Complex a = kappa * Complex{-p.q, p.g};
  Complex d = std::sqrt(1.0 + a * a);
  // std::sqrt follows the sign of a signed-zero imaginary part on the cut.
  if (d.real() == 0.0 && d.imag() < 0.0) d = -d;
  return d;
}

Eigensystem eigensystem(ControlPoint p, const Model& model) {
  const Complex d = half_gap(p, model.kappa);
  if (std::abs(d) <= model.ep_tolerance)
    throw Error(ErrorCode::EpDegenerate, "eigenvectors coalesce at (q=" + std::to_string(p.q) +
                                             ", g=" + std::to_string(p.g) + ")");

  const Complex a = model.kappa * Complex{-p.q, p.g};
  Eigensystem eig;
  eig.delta_e = d;
  eig.e_plus = d;
  eig.e_minus = -d;
  // tan(theta) = Delta E + a; its branch points +-i are only reached at the EP.
  eig.theta = std::atan(d + a);

  const Complex s = std::sin(eig.theta);
  const Complex c = std::cos(eig.theta);
  const double n = std::sqrt(std::norm(s) + std::norm(c));
  eig.psi_plus = {s / n, c / n};
  eig.psi_minus = {-c / n, s / n};
  // s^2 + c^2 = 1 for complex theta, so scaling by n restores <phi_i|psi_i> = 1.
  eig.phi_plus = {std::conj(s) * n, std::conj(c) * n};
  eig.phi_minus = {-std::conj(c) * n, std::conj(s) * n};
  return eig;
}

double spin_polarization(const Spinor& s) {
  const double up = std::norm(s[0]);
  const double down = std::norm(s[1]);
  const double total = up + down;
  if (!(total > 0.0) || !std::isfinite(total))
    throw Error(ErrorCode::InvalidInput, "spin polarization of a zero or non-finite state");
  return (up - down) / total;
}

NormalizedParams physical_to_normalized(const PhysicalParams& p) {
  if (!(p.lambda_raman > 0.0)) throw Error(ErrorCode::InvalidInput, "lambda_raman must be > 0");
  if (!(p.omega_r > 0.0)) throw Error(ErrorCode::InvalidInput, "omega_r must be > 0");
  if (!(p.mass > 0.0)) throw Error(ErrorCode::InvalidInput, "mass must be > 0");

  const double k_r = 2.0 * std::numbers::pi / p.lambda_raman * std::sin(p.alpha / 2.0);
  if (!(k_r > 0.0))
    throw Error(ErrorCode::InvalidInput, "recoil momentum must be > 0 (alpha in (0, 2 pi))");
  const double e_r = kHbar * kHbar * k_r * k_r / (2.0 * p.mass);

  NormalizedParams out;
  out.k_recoil = k_r;
  out.e_recoil = e_r;
  out.q = 2.0 * p.qx_phys / k_r - p.delta_detune / (2.0 * e_r);
  out.g = (p.gamma_down - p.gamma_up) / (4.0 * e_r);
  out.kappa = 2.0 * e_r / p.omega_r;
  out.time_scale = 2.0 * kHbar / p.omega_r;
  return out;
}

}  // namespace nhsoc
