#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "qcf/matrix.hpp"

using namespace qcf;

namespace {

Matrix random_matrix(std::mt19937_64& rng, int n, bool hermitian) {
  std::normal_distribution<double> nd;
  Matrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  return hermitian ? hermitize(a).matrix : a;
}

std::vector<double> eigen_oracle(const Matrix& a) {
  Eigen::MatrixXcd m(a.n(), a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) m(i, j) = a(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + a.n());
  return out;
}

}  // namespace

TEST_CASE("Pauli algebra") {
  const auto& P = pauli();
  const cplx i(0, 1);
  CHECK((commutator(P[0], P[1]) - 2.0 * i * P[2]).frobenius_norm() == 0.0);
  CHECK(inner_re(P[0], P[1]) == 0.0);
  CHECK(inner_re(P[0], P[0]) == 2.0);
  CHECK(inner_full(P[1], P[1]) == cplx(2.0));
  std::mt19937_64 rng(1);
  const Matrix a = random_matrix(rng, 3, true);
  CHECK(commutator(a, a).frobenius_norm() == 0.0);
  CHECK_THROWS_AS(commutator(P[0], a), Error);
}

TEST_CASE("hermitize") {
  const auto& P = pauli();
  const auto h = hermitize(P[2]);
  CHECK((h.matrix - P[2]).frobenius_norm() == 0.0);
  CHECK(h.drift == 0.0);
  const auto z = hermitize(cplx(0, 1) * P[0]);
  CHECK(z.matrix.frobenius_norm() == 0.0);
  CHECK(z.drift > 0.0);
  std::mt19937_64 rng(2);
  const Matrix a = random_matrix(rng, 4, false);
  const Matrix b = hermitize(a).matrix;
  CHECK((b - b.adjoint()).frobenius_norm() == 0.0);
  CHECK(hermiticity_error(b) == 0.0);
}

TEST_CASE("eigenvalues and expectations") {
  const auto& P = pauli();
  const Matrix half = 0.5 * P.id;
  CHECK(min_eigenvalue(half) == doctest::Approx(0.5));
  CHECK(expect(half, P[2]) == 0.0);
  const double d[2] = {1.0, 0.0};
  const Matrix up = Matrix::diagonal(d);
  CHECK(min_eigenvalue(up) == 0.0);
  CHECK(expect(up, P[2]) == 1.0);

  std::mt19937_64 rng(4);
  double worst2 = 0, worstn = 0;
  for (int s = 0; s < 200; ++s) {
    // quadratic-formula oracle for 2x2
    const Matrix a = random_matrix(rng, 2, true);
    const double tr = a.trace().real();
    const double det = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)).real();
    const double disc = std::sqrt(tr * tr / 4 - det);
    const auto ev = eigenvalues_hermitian(a);
    worst2 = std::max({worst2, std::abs(ev[0] - (tr / 2 - disc)), std::abs(ev[1] - (tr / 2 + disc))});
    for (int n : {3, 5, 8}) {
      const Matrix b = random_matrix(rng, n, true);
      const auto e1 = eigenvalues_hermitian(b);
      const auto e2 = eigen_oracle(b);
      for (int k = 0; k < n; ++k) worstn = std::max(worstn, std::abs(e1[static_cast<std::size_t>(k)] - e2[static_cast<std::size_t>(k)]));
    }
  }
  CHECK(worst2 <= 1e-13);
  CHECK(worstn <= 1e-12);
}

TEST_CASE("adjoint identities on random triples") {
  std::mt19937_64 rng(9);
  double worst = 0;
  for (int s = 0; s < 100; ++s) {
    const Matrix a = random_matrix(rng, 3, false), b = random_matrix(rng, 3, false), c = random_matrix(rng, 3, false);
    // Re Tr(A^dag [B, C]) = Re Tr([B^dag, A]^dag C)
    const double l = inner_re(a, commutator(b, c));
    const double r = inner_re(commutator(b.adjoint(), a), c);
    worst = std::max(worst, std::abs(l - r) / (1 + std::abs(l)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("density-matrix expectations stay in [-1, 1]") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ud(-1, 1);
  const auto& P = pauli();
  for (int s = 0; s < 100; ++s) {
    double r[3];
    double nrm;
    do {
      for (double& x : r) x = ud(rng);
      nrm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    } while (nrm > 1.0);
    const Matrix rho = 0.5 * (P.id + r[0] * P[0] + r[1] * P[1] + r[2] * P[2]);
    for (int k = 0; k < 3; ++k) {
      CHECK(expect(rho, P[k]) <= 1.0 + 1e-15);
      CHECK(expect(rho, P[k]) >= -1.0 - 1e-15);
    }
    CHECK(min_eigenvalue(rho) >= -1e-15);
  }
}

TEST_CASE("unitary propagator") {
  std::mt19937_64 rng(21);
  for (int n : {2, 4}) {
    const Matrix h = random_matrix(rng, n, true);
    const Matrix u = unitary_propagator(h, 0.37);
    CHECK((u * u.adjoint() - Matrix::identity(n)).frobenius_norm() < 1e-13);
    // Taylor oracle on a small step: exp(-iHt) ~ sum_k (-iHt)^k/k!
    const double t = 1e-2;
    Matrix term = Matrix::identity(n), sum = Matrix::identity(n);
    for (int k = 1; k < 20; ++k) {
      term = (cplx(0, -t) / static_cast<double>(k)) * (term * h);
      sum += term;
    }
    CHECK((unitary_propagator(h, t) - sum).frobenius_norm() < 1e-14);
  }
}
