#include "qcf/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcf {

namespace {

template <class T>
void check_size(const T& a, const T& b) {
  require_same_grid(a.grid(), b.grid(), "field arithmetic");
}

}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  check_size(*this, o);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  check_size(*this, o);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
  check_size(*this, o);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] *= o.v_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  if (o.ncomp() != ncomp()) fail(ErrorKind::shape_error, "vector component count mismatch");
  for (std::size_t d = 0; d < c_.size(); ++d) c_[d] += o.c_[d];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : c_) c *= s;
  return *this;
}

MatrixField::MatrixField(const Grid& g, int n) : grid_(g), n_(n) {
  if (n < 1 || n > max_hilbert_dim)
    fail(ErrorKind::shape_error, "Hilbert dimension " + std::to_string(n) + " outside [1, " +
                                     std::to_string(max_hilbert_dim) + "]");
  v_.assign(g.size() * stride(), cplx(0.0));
}

Matrix MatrixField::get(std::size_t cell) const {
  const cplx* p = at(cell);
  return Matrix(n_, std::vector<cplx>(p, p + stride()));
}

void MatrixField::set(std::size_t cell, const Matrix& m) {
  if (m.n() != n_) fail(ErrorKind::shape_error, "matrix dimension mismatch in MatrixField::set");
  std::copy(m.data(), m.data() + stride(), at(cell));
}

MatrixField& MatrixField::operator+=(const MatrixField& o) {
  check_size(*this, o);
  if (o.n_ != n_) fail(ErrorKind::shape_error, "Hilbert dimension mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

MatrixField& MatrixField::operator*=(double s) {
  for (auto& x : v_) x *= s;
  return *this;
}

SpinorField::SpinorField(const Grid& g, int n) : grid_(g), n_(n) {
  if (n < 1 || n > max_hilbert_dim) fail(ErrorKind::shape_error, "Hilbert dimension out of range");
  v_.assign(g.size() * static_cast<std::size_t>(n), cplx(0.0));
}

SpinorField& SpinorField::operator+=(const SpinorField& o) {
  check_size(*this, o);
  if (o.n_ != n_) fail(ErrorKind::shape_error, "Hilbert dimension mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

SpinorField& SpinorField::operator*=(double s) {
  for (auto& x : v_) x *= s;
  return *this;
}

StressField::StressField(const Grid& g) : grid_(g) {
  for (auto& t : t_) t = ScalarField(g);
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double min_value(const ScalarField& f) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : f.values()) m = std::min(m, x);
  return m;
}

double max_abs(const MatrixField& f) {
  double m = 0.0;
  for (const cplx& x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double hermiticity_error(const MatrixField& f) {
  const int n = f.n();
  double worst = 0.0;
  for (std::size_t c = 0; c < f.cells(); ++c) {
    const cplx* a = f.at(c);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        num += std::norm(a[i * n + j] - std::conj(a[j * n + i]));
        den += std::norm(a[i * n + j]);
      }
    if (den > 0.0) worst = std::max(worst, std::sqrt(num / den));
  }
  return worst;
}

ScalarField trace_real(const MatrixField& f) {
  ScalarField t(f.grid());
  const int n = f.n();
  for (std::size_t c = 0; c < f.cells(); ++c) {
    const cplx* a = f.at(c);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i * n + i].real();
    t[c] = s;
  }
  return t;
}

MatrixField outer(const SpinorField& psi) {
  const int n = psi.n();
  MatrixField rho(psi.grid(), n);
  for (std::size_t c = 0; c < psi.grid().size(); ++c) {
    const cplx* p = psi.at(c);
    cplx* r = rho.at(c);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r[i * n + j] = p[i] * std::conj(p[j]);
  }
  return rho;
}

double norm_error(const SpinorField& psi) {
  const int n = psi.n();
  double worst = 0.0;
  for (std::size_t c = 0; c < psi.grid().size(); ++c) {
    const cplx* p = psi.at(c);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::norm(p[i]);
    worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
  }
  return worst;
}

MatrixField constant_matrix_field(const Grid& g, const Matrix& m) {
  MatrixField f(g, m.n());
  for (std::size_t c = 0; c < g.size(); ++c) f.set(c, m);
  return f;
}

MatrixField scale(const ScalarField& s, const MatrixField& a) {
  require_same_grid(s.grid(), a.grid(), "scale");
  MatrixField out = a;
  const std::size_t st = a.stride();
  auto v = out.values();
  for (std::size_t c = 0; c < a.cells(); ++c)
    for (std::size_t k = 0; k < st; ++k) v[c * st + k] *= s[c];
  return out;
}

}  // namespace qcf
