#pragma once

#include <vector>

#include "qcf/fields.hpp"

namespace qcf {

/// Barotropic closure. Polytropic: E(D) = kappa D^(gamma-1) / (gamma-1),
/// p = D^2 E'(D) = kappa D^gamma.
struct EquationOfState {
  enum class Kind { none, polytropic };
  Kind kind = Kind::none;
  double kappa = 0.0;
  double gamma = 2.0;

  static EquationOfState none() { return {}; }
  static EquationOfState polytropic(double kappa, double gamma);

  bool active() const noexcept { return kind == Kind::polytropic; }
  /// Internal energy per unit mass E(D).
  double internal_energy(double d) const noexcept;
  double pressure(double d) const noexcept;
  /// dp/dD.
  double sound_speed_squared(double d) const noexcept;
};

/// Throws vacuum-error at the first nonpositive D.
void require_positive(const ScalarField& d, const char* what);

/// p(D) as a field; zero for eos none.
ScalarField pressure(const ScalarField& d, const EquationOfState& eos);

struct Coupling {
  ScalarField v;
  Matrix b;
};

/// H(q) = V0(q) 1 + sum_a V_a(q) B_a together with the fluid mass M and hbar.
struct Hamiltonian {
  double mass = 1.0;
  double hbar = 1.0;
  int n = 2;
  ScalarField v0;
  std::vector<Coupling> couplings;
  EquationOfState eos;

  /// Checks Hermitian B_a, matching n and a common grid.
  void validate() const;
  MatrixField assemble() const;
  /// Per-axis dH/dq_l, built from the potential gradients (H is linear in
  /// the potentials).
  MatrixVector gradient() const;
  /// Same Hamiltonian with every B_a replaced by U B_a U^dagger.
  Hamiltonian conjugated(const Matrix& u) const;
  /// True when the Hamiltonian is V0 1 + V_I sigma_k for one Pauli matrix.
  bool is_pure_dephasing(int* k = nullptr) const;
};

}  // namespace qcf
