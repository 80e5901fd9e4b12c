#pragma once

#include <array>

#include "qcf/fields.hpp"

namespace qcf {

enum class StateMode { density_matrix, pure_state };

/// The evolving arrays: D, u, rho or psi, b, c. Also used for right-hand
/// sides, which carry the same shapes. Empty members are absent from the
/// model (b on planar grids, rho in pure-state mode, ...).
struct Fields {
  ScalarField d;
  VectorField u;
  MatrixField rho;
  SpinorField psi;
  ScalarField b;
  ScalarField c;

  /// this += a * x over every present member.
  void axpy(double a, const Fields& x);
  Fields zeros_like() const;
  /// False at the first NaN/Inf; `where` receives a description.
  bool all_finite(std::string* where = nullptr) const;
};

/// Hybrid state. In 3D the backreaction field is b(q) = b_periodic(q) +
/// b_slope . q: a constant background gradient lets b = beta z live on the
/// periodic box. On planar grids b is absent and c holds c~ = beta c.
struct State {
  StateMode mode = StateMode::density_matrix;
  Fields f;
  std::array<double, 3> b_slope{0.0, 0.0, 0.0};
  double t = 0.0;

  const Grid& grid() const noexcept { return f.d.grid(); }
  int hilbert_dim() const noexcept { return mode == StateMode::pure_state ? f.psi.n() : f.rho.n(); }
  bool planar() const noexcept { return grid().dim() == 2; }
  /// rho itself, or psi psi^dagger in pure-state mode.
  MatrixField density() const;
  /// b at cell centers including the background slope (3D only).
  ScalarField full_b() const;
  /// Checks shapes and the pointwise invariants (D > 0, Hermitian unit-trace
  /// rho, unit psi). Throws shape-error / vacuum-error / unnormalized-state.
  void validate(double tol = 1e-10) const;
};

/// Bracket geometry: the 3-vector grad b per cell. Planar grids use e3.
struct BracketGeometry {
  VectorField gb;  // always 3 components
};

BracketGeometry make_geometry(const State& s);
BracketGeometry planar_geometry(const Grid& g, double beta = 1.0);
BracketGeometry geometry_from_b(const ScalarField& b, std::array<double, 3> slope);

}  // namespace qcf
