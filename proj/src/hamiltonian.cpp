#include "qcf/hamiltonian.hpp"

#include <cmath>
#include <sstream>

#include "qcf/calculus.hpp"

namespace qcf {

EquationOfState EquationOfState::polytropic(double kappa, double gamma) {
  if (!(kappa >= 0.0)) fail(ErrorKind::config_error, "polytropic kappa must be >= 0");
  if (!(gamma > 1.0)) fail(ErrorKind::config_error, "polytropic gamma must be > 1");
  EquationOfState e;
  e.kind = Kind::polytropic;
  e.kappa = kappa;
  e.gamma = gamma;
  return e;
}

double EquationOfState::internal_energy(double d) const noexcept {
  if (!active()) return 0.0;
  return kappa * std::pow(d, gamma - 1.0) / (gamma - 1.0);
}

double EquationOfState::pressure(double d) const noexcept {
  if (!active()) return 0.0;
  if (gamma == 2.0) return kappa * d * d;
  return kappa * std::pow(d, gamma);
}

double EquationOfState::sound_speed_squared(double d) const noexcept {
  if (!active()) return 0.0;
  if (gamma == 2.0) return 2.0 * kappa * d;
  return kappa * gamma * std::pow(d, gamma - 1.0);
}

void require_positive(const ScalarField& d, const char* what) {
  for (std::size_t c = 0; c < d.size(); ++c)
    if (!(d[c] > 0.0)) {
      const auto ijk = d.grid().coords(c);
      std::ostringstream os;
      os << what << ": D = " << d[c] << " at cell (" << ijk[0] << ", " << ijk[1] << ", " << ijk[2] << ")";
      fail(ErrorKind::vacuum_error, os.str());
    }
}

ScalarField pressure(const ScalarField& d, const EquationOfState& eos) {
  ScalarField p(d.grid());
  if (!eos.active()) return p;
  require_positive(d, "pressure");
  for (std::size_t c = 0; c < d.size(); ++c) p[c] = eos.pressure(d[c]);
  return p;
}

void Hamiltonian::validate() const {
  if (!(mass > 0.0)) fail(ErrorKind::config_error, "mass M must be positive");
  if (!(hbar > 0.0)) fail(ErrorKind::config_error, "hbar must be positive");
  if (n < 1 || n > max_hilbert_dim) fail(ErrorKind::shape_error, "Hilbert dimension out of range");
  for (const auto& cp : couplings) {
    if (cp.b.n() != n) fail(ErrorKind::shape_error, "coupling matrix dimension differs from n");
    if (hermiticity_error(cp.b) > 1e-12) fail(ErrorKind::config_error, "coupling matrix is not Hermitian");
    require_same_grid(cp.v.grid(), v0.grid(), "coupling potential");
  }
}

MatrixField Hamiltonian::assemble() const {
  const Grid& g = v0.grid();
  MatrixField h(g, n);
  for (std::size_t c = 0; c < g.size(); ++c) {
    cplx* a = h.at(c);
    for (int i = 0; i < n; ++i) a[i * n + i] = v0[c];
    for (const auto& cp : couplings)
      for (int q = 0; q < n * n; ++q) a[q] += cp.v[c] * cp.b.data()[q];
  }
  return h;
}

MatrixVector Hamiltonian::gradient() const {
  const Grid& g = v0.grid();
  const VectorField g0 = grad(v0);
  std::vector<VectorField> ga;
  for (const auto& cp : couplings) ga.push_back(grad(cp.v));
  MatrixVector out;
  for (int d = 0; d < g.dim(); ++d) {
    MatrixField m(g, n);
    for (std::size_t c = 0; c < g.size(); ++c) {
      cplx* a = m.at(c);
      for (int i = 0; i < n; ++i) a[i * n + i] = g0[d][c];
      for (std::size_t k = 0; k < couplings.size(); ++k) {
        const double w = ga[k][d][c];
        for (int q = 0; q < n * n; ++q) a[q] += w * couplings[k].b.data()[q];
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

Hamiltonian Hamiltonian::conjugated(const Matrix& u) const {
  Hamiltonian h = *this;
  for (auto& cp : h.couplings) cp.b = hermitize(u * cp.b * u.adjoint()).matrix;
  return h;
}

bool Hamiltonian::is_pure_dephasing(int* k) const {
  if (n != 2 || couplings.size() != 1) return false;
  for (int s = 0; s < 3; ++s)
    if ((couplings[0].b - pauli()[s]).frobenius_norm() <= 1e-14) {
      if (k) *k = s;
      return true;
    }
  return false;
}

}  // namespace qcf
