#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcf/hamiltonian.hpp"
#include "qcf/state.hpp"

namespace qcf {

/// amp * cos(2 pi k.x / L + phase), integer wave numbers per axis.
struct CosineMode {
  double amp = 0.0;
  std::array<int, 3> k{0, 0, 0};
  double phase = 0.0;
};

/// Smooth periodic scalar: offset + sum of cosine modes, optionally with
/// seeded random low modes. `scale_density` instead selects s * D0 (the
/// c0 = D0 initialisation).
struct ScalarSpec {
  double offset = 0.0;
  std::vector<CosineMode> modes;
  int random_modes = 0;
  int random_kmax = 2;
  double random_amp = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> scale_density;

  static ScalarSpec constant(double v) { return ScalarSpec{v, {}}; }
  ScalarSpec& add(double amp, std::array<int, 3> k, double phase = 0.0);
  /// offset + amp cos(kx x) cos(ky y) cos(kz z) written as cosine modes.
  ScalarSpec& add_product(double amp, std::array<int, 3> k);
  /// Appends `count` random modes drawn from `seed`.
  ScalarSpec& randomize(std::uint64_t seed, int count, double amp, int kmax = 2);
  bool is_constant() const noexcept;
};

/// Expands the random part into explicit modes (deterministic in seed and
/// grid dimension).
std::vector<CosineMode> expand_modes(const ScalarSpec& s, int dim);
double evaluate(const ScalarSpec& s, const Grid& g, std::array<double, 3> x);
ScalarField make_scalar(const Grid& g, const ScalarSpec& s);

/// Velocity: one spec per component, optionally projected onto div-free.
struct VelocitySpec {
  std::vector<ScalarSpec> components;
  bool project = false;
};
VectorField make_velocity(const Grid& g, const VelocitySpec& v);

/// Quantum initial data. n = 2 uses Bloch angles theta, phi and radius r
/// (r = 1 pure). Other n use per-component amplitudes and phases.
struct QuantumSpec {
  ScalarSpec theta = ScalarSpec::constant(0.0);
  ScalarSpec phi = ScalarSpec::constant(0.0);
  ScalarSpec radius = ScalarSpec::constant(1.0);
  std::vector<ScalarSpec> amplitudes;
  std::vector<ScalarSpec> phases;
};
SpinorField make_spinor(const Grid& g, int n, const QuantumSpec& q);
MatrixField make_density(const Grid& g, int n, const QuantumSpec& q);

struct CouplingSpec {
  Matrix b;
  ScalarSpec v;
};

struct HamiltonianSpec {
  double mass = 1.0;
  double hbar = 1.0;
  int n = 2;
  ScalarSpec v0 = ScalarSpec::constant(0.0);
  std::vector<CouplingSpec> couplings;
  EquationOfState eos;
};
Hamiltonian make_hamiltonian(const Grid& g, const HamiltonianSpec& h);

struct StateSpec {
  StateMode mode = StateMode::density_matrix;
  ScalarSpec d = ScalarSpec::constant(1.0);
  VelocitySpec u;
  QuantumSpec quantum;
  ScalarSpec b = ScalarSpec::constant(0.0);
  std::array<double, 3> b_slope{0.0, 0.0, 0.0};
  ScalarSpec c = ScalarSpec::constant(0.0);
  /// Planar incompressible runs carry no c field (c~ = beta D).
  bool with_c = true;
};
State make_state(const Grid& g, int n, const StateSpec& s);

/// Named matrices: identity, sigma_x, sigma_y, sigma_z.
Matrix named_matrix(const std::string& name, int n);

}  // namespace qcf
