#pragma once

// Two-band non-Hermitian model of a lossy spin-orbit-coupled atom in
// normalized units: energies in Omega_R/2, time in 2*hbar/Omega_R.

#include <array>
#include <complex>

namespace nhsoc {

using Complex = std::complex<double>;

/// Two-component amplitude vector, (spin-up, spin-down).
using Spinor = std::array<Complex, 2>;

/// A point of the external control plane: quasimomentum parameter q and
/// loss contrast g.
struct ControlPoint {
  double q = 0.0;
  double g = 0.0;

  friend bool operator==(const ControlPoint&, const ControlPoint&) = default;
};

/// Model-wide constants. kappa = 2 E_r / Omega_R multiplies the diagonal.
struct Model {
  double kappa = 1.0;
  double ep_tolerance = 1e-9;
};

/// Gauged 2x2 Hamiltonian. Always traceless with unit off-diagonal coupling.
struct Hamiltonian2 {
  Complex h11, h12, h21, h22;

  Spinor apply(const Spinor& v) const {
    return {h11 * v[0] + h12 * v[1], h21 * v[0] + h22 * v[1]};
  }
  Complex determinant() const { return h11 * h22 - h12 * h21; }
};

/// Evolving state with the log of all norm factors divided out so far.
struct TwoState {
  Spinor amp{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
  double log_norm = 0.0;

  Complex up() const { return amp[0]; }
  Complex down() const { return amp[1]; }
};

/// Right eigenstates are unit-norm and related by psi_plus = J psi_minus,
/// J = [[0,1],[-1,0]]. Left eigenstates are scaled so <phi_i|psi_j> = delta_ij.
struct Eigensystem {
  Complex delta_e;
  Complex e_plus;
  Complex e_minus;
  Complex theta;
  Spinor psi_plus;
  Spinor psi_minus;
  Spinor phi_plus;
  Spinor phi_minus;
};

/// Experimental parameters in SI units. Rates are given as energies (J).
struct PhysicalParams {
  double lambda_raman = 556e-9;  // m
  double alpha = 0.0;            // rad, Raman beam intersection angle
  double omega_r = 0.0;          // J
  double delta_detune = 0.0;     // J
  double gamma_up = 0.0;         // J
  double gamma_down = 0.0;       // J
  double qx_phys = 0.0;          // 1/m
  double mass = 0.0;             // kg
};

struct NormalizedParams {
  double q = 0.0;
  double g = 0.0;
  double kappa = 1.0;
  /// Seconds per unit of normalized time, 2 hbar / Omega_R.
  double time_scale = 0.0;
  /// Recoil quantities, kept for reference.
  double k_recoil = 0.0;
  double e_recoil = 0.0;
};

inline constexpr double kHbar = 1.054571817e-34;  // J s

Complex inner(const Spinor& bra, const Spinor& ket);
double norm(const Spinor& v);

Hamiltonian2 build_hamiltonian(ControlPoint p, double kappa);

/// Half gap Delta E = sqrt(1 + a^2), a = kappa (-q + i g), on the sheet with
/// Re >= 0 (Im >= 0 on the cut Re = 0). Defined everywhere, including the EP.
Complex half_gap(ControlPoint p, double kappa);

/// Throws EpDegenerate when |Delta E| <= model.ep_tolerance.
Eigensystem eigensystem(ControlPoint p, const Model& model = {});

/// (|up|^2 - |down|^2) / (|up|^2 + |down|^2). Throws InvalidInput on a zero vector.
double spin_polarization(const Spinor& s);
inline double spin_polarization(const TwoState& s) { return spin_polarization(s.amp); }

NormalizedParams physical_to_normalized(const PhysicalParams& p);

}  // namespace nhsoc
