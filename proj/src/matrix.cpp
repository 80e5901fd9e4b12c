#include "qcf/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace qcf {

namespace {

void same_dim(const Matrix& a, const Matrix& b, const char* what) {
  if (a.n() != b.n())
    fail(ErrorKind::shape_error, std::string(what) + ": dimension " + std::to_string(a.n()) + " vs " +
                                     std::to_string(b.n()));
}

// Cyclic complex Jacobi. On return `a` is (numerically) diagonal and, when
// requested, v holds the eigenvectors in its columns.
void jacobi(Matrix& a, Matrix* v) {
  const int n = a.n();
  if (v) *v = Matrix::identity(n);
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) return;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        const cplx phase = apq / mag;  // a(p,q) = mag * phase
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * mag, aqq - app);
        const double c = std::cos(theta), s = std::sin(theta);
        // Rotation J with J(p,p)=c, J(q,q)=c, J(p,q)=s*phase, J(q,p)=-s*conj(phase).
        // a <- J^dagger a J
        for (int k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(phase) * akq;
          a(k, q) = s * phase * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * std::conj(phase) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        if (v) {
          Matrix& w = *v;
          for (int k = 0; k < n; ++k) {
            const cplx wkp = w(k, p), wkq = w(k, q);
            w(k, p) = c * wkp - s * std::conj(phase) * wkq;
            w(k, q) = s * phase * wkp + c * wkq;
          }
        }
      }
  }
  fail(ErrorKind::eigen_failure, "Jacobi iteration did not converge in 100 sweeps");
}

}  // namespace

Matrix::Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n * n), cplx(0.0)) {
  if (n < 1) fail(ErrorKind::shape_error, "matrix dimension must be positive");
}

Matrix::Matrix(int n, std::vector<cplx> row_major) : n_(n), a_(std::move(row_major)) {
  if (n < 1 || a_.size() != static_cast<std::size_t>(n * n))
    fail(ErrorKind::shape_error, "matrix data size does not match n*n");
}

Matrix Matrix::identity(int n) {
  Matrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = std::conj((*this)(j, i));
  return m;
}

cplx Matrix::trace() const {
  cplx s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, i);
  return s;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& x : a_) s += std::norm(x);
  return std::sqrt(s);
}

Matrix& Matrix::operator+=(const Matrix& o) {
  same_dim(*this, o, "matrix sum");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  same_dim(*this, o, "matrix difference");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

Matrix& Matrix::operator*=(cplx s) {
  for (cplx& x : a_) x *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  same_dim(a, b, "matrix product");
  Matrix out(a.n());
  kern::mul<0>(a.data(), b.data(), out.data(), a.n());
  return out;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  same_dim(a, b, "commutator");
  Matrix out(a.n());
  kern::comm<0>(a.data(), b.data(), out.data(), a.n());
  return out;
}

double inner_re(const Matrix& a, const Matrix& b) {
  same_dim(a, b, "inner_re");
  return kern::inner<0>(a.data(), b.data(), a.n());
}

cplx inner_full(const Matrix& a, const Matrix& b) {
  same_dim(a, b, "inner_full");
  cplx s = 0.0;
  for (int k = 0; k < a.n() * a.n(); ++k) s += std::conj(a.data()[k]) * b.data()[k];
  return s;
}

Hermitized hermitize(const Matrix& a) {
  const Matrix ad = a.adjoint();
  Hermitized h{0.5 * (a + ad), (a - ad).frobenius_norm()};
  return h;
}

double hermiticity_error(const Matrix& a) {
  return (a - a.adjoint()).frobenius_norm() / std::max(a.frobenius_norm(), 1e-300);
}

std::vector<double> eigenvalues_hermitian(const Matrix& a) {
  const int n = a.n();
  if (n == 1) return {a(0, 0).real()};
  if (n == 2) {
    const double p = a(0, 0).real(), q = a(1, 1).real();
    const double mean = 0.5 * (p + q);
    const double r = std::hypot(0.5 * (p - q), std::abs(a(0, 1)));
    return {mean - r, mean + r};
  }
  Matrix w = hermitize(a).matrix;
  jacobi(w, nullptr);
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = w(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

double min_eigenvalue(const Matrix& a) { return eigenvalues_hermitian(a).front(); }

double expect(const Matrix& rho, const Matrix& b) { return inner_re(rho, b); }

PauliBasis::PauliBasis() : id(Matrix::identity(2)) {
  const cplx i(0.0, 1.0);
  sigma[0] = Matrix(2, {0.0, 1.0, 1.0, 0.0});
  sigma[1] = Matrix(2, {0.0, -i, i, 0.0});
  sigma[2] = Matrix(2, {1.0, 0.0, 0.0, -1.0});
  // s_j s_k = delta_jk 1 + i eps_jkl s_l
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      Matrix expected = (j == k) ? id : Matrix(2);
      if (j != k) {
        const int l = 3 - j - k;
        const double eps = ((k - j + 3) % 3 == 1) ? 1.0 : -1.0;
        expected = (i * eps) * sigma[l];
      }
      if ((sigma[j] * sigma[k] - expected).frobenius_norm() > 1e-15)
        fail(ErrorKind::precondition, "Pauli multiplication table check failed");
    }
}

const PauliBasis& pauli() {
  static const PauliBasis basis;
  return basis;
}

Matrix unitary_propagator(const Matrix& h, double t) {
  const int n = h.n();
  const cplx i(0.0, 1.0);
  if (n == 2) {
    // H = a0 1 + a . sigma ; exp(-iHt) = e^{-i a0 t}(cos(|a|t) - i sin(|a|t) n.sigma)
    const double a0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double ax = h(0, 1).real(), ay = -h(0, 1).imag(), az = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double r = std::sqrt(ax * ax + ay * ay + az * az);
    const double c = std::cos(r * t);
    const double sr = r > 0.0 ? std::sin(r * t) / r : t;
    const PauliBasis& P = pauli();
    Matrix u = c * P.id;
    u -= (i * sr) * (ax * P[0] + ay * P[1] + az * P[2]);
    return std::exp(-i * a0 * t) * u;
  }
  Matrix w = hermitize(h).matrix;
  Matrix v;
  jacobi(w, &v);
  Matrix d(n);
  for (int k = 0; k < n; ++k) d(k, k) = std::exp(-i * w(k, k).real() * t);
  return v * d * v.adjoint();
}

}  // namespace qcf
