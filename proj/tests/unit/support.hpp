#pragma once

#include <algorithm>
#include <cmath>

#include "qcf/models.hpp"
#include "qcf/presets.hpp"

namespace qcf::test {

inline double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const MatrixField& a, const MatrixField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

inline double max_diff(const SpinorField& a, const SpinorField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

inline double max_diff_u(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int d = 0; d < a.ncomp(); ++d) m = std::max(m, max_diff(a[d], b[d]));
  return m;
}

/// Smooth spec around `offset` with a few seeded modes.
inline ScalarSpec smooth(double offset, double amp, std::uint64_t seed, int count = 4) {
  ScalarSpec s = ScalarSpec::constant(offset);
  s.randomize(seed, count, amp, 2);
  return s;
}

/// Generic smooth mixed (radius < 1) or pure state.
inline StateSpec smooth_state(std::uint64_t seed, StateMode mode = StateMode::density_matrix, bool mixed = true) {
  StateSpec s;
  s.mode = mode;
  s.d = smooth(1.0, 0.4, seed + 1);
  s.u.components = {smooth(0.0, 0.3, seed + 2), smooth(0.0, 0.3, seed + 3), smooth(0.0, 0.3, seed + 4)};
  s.quantum.theta = smooth(1.0, 1.0, seed + 5);
  s.quantum.phi = smooth(0.5, 2.0, seed + 6);
  s.quantum.radius = mixed ? smooth(0.8, 0.2, seed + 7, 2) : ScalarSpec::constant(1.0);
  s.b = smooth(0.0, 0.5, seed + 8);
  s.b_slope = {0.0, 0.0, 0.7};
  s.c = smooth(1.0, 0.4, seed + 9);
  return s;
}

inline StateSpec for_grid(StateSpec s, const Grid& g) {
  s.u.components.resize(static_cast<std::size_t>(g.dim()));
  return s;
}

inline HamiltonianSpec smooth_hamiltonian(std::uint64_t seed, bool eos = true) {
  HamiltonianSpec h;
  h.mass = 1.3;
  h.hbar = 0.7;
  h.v0 = smooth(0.0, 0.5, seed + 20);
  h.couplings = {{pauli()[0], smooth(0.2, 0.5, seed + 21)}, {pauli()[2], smooth(-0.1, 0.5, seed + 22)}};
  if (eos) h.eos = EquationOfState::polytropic(0.8, 2.0);
  return h;
}

}  // namespace qcf::test
