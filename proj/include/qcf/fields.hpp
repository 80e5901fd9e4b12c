#pragma once

#include <array>
#include <span>
#include <vector>

#include "qcf/grid.hpp"
#include "qcf/matrix.hpp"

namespace qcf {

/// One real value per cell.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g, double value = 0.0) : grid_(g), v_(g.size(), value) {}

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return v_.size(); }
  double& operator[](std::size_t i) noexcept { return v_[i]; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }
  double* data() noexcept { return v_.data(); }
  const double* data() const noexcept { return v_.data(); }
  std::span<double> values() noexcept { return v_; }
  std::span<const double> values() const noexcept { return v_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator*=(double s);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

 private:
  Grid grid_;
  std::vector<double> v_;
};

/// `ncomp` real components per cell; ncomp defaults to the grid dimension.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& g) : VectorField(g, g.dim()) {}
  VectorField(const Grid& g, int ncomp) : grid_(g), c_(static_cast<std::size_t>(ncomp), ScalarField(g)) {}

  const Grid& grid() const noexcept { return grid_; }
  int ncomp() const noexcept { return static_cast<int>(c_.size()); }
  ScalarField& operator[](int d) noexcept { return c_[static_cast<std::size_t>(d)]; }
  const ScalarField& operator[](int d) const noexcept { return c_[static_cast<std::size_t>(d)]; }
  /// Component d at cell i, zero for d >= ncomp (planar embedding).
  double at(int d, std::size_t i) const noexcept { return d < ncomp() ? c_[static_cast<std::size_t>(d)][i] : 0.0; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<ScalarField> c_;
};

/// One n x n complex matrix per cell, row-major. Holds Hermitian fields
/// (density matrices, Hamiltonians) as well as general products of them.
class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(const Grid& g, int n);

  const Grid& grid() const noexcept { return grid_; }
  int n() const noexcept { return n_; }
  std::size_t stride() const noexcept { return static_cast<std::size_t>(n_ * n_); }
  std::size_t cells() const noexcept { return grid_.size(); }

  cplx* at(std::size_t cell) noexcept { return v_.data() + cell * stride(); }
  const cplx* at(std::size_t cell) const noexcept { return v_.data() + cell * stride(); }
  Matrix get(std::size_t cell) const;
  void set(std::size_t cell, const Matrix& m);

  std::span<cplx> values() noexcept { return v_; }
  std::span<const cplx> values() const noexcept { return v_; }

  MatrixField& operator+=(const MatrixField& o);
  MatrixField& operator*=(double s);

 private:
  Grid grid_;
  int n_ = 0;
  std::vector<cplx> v_;
};

/// Per-axis matrix fields, e.g. the gradient of a Hermitian field or a
/// Mead connection. Size equals the grid dimension.
using MatrixVector = std::vector<MatrixField>;

/// One C^n vector per cell.
class SpinorField {
 public:
  SpinorField() = default;
  SpinorField(const Grid& g, int n);

  const Grid& grid() const noexcept { return grid_; }
  int n() const noexcept { return n_; }
  cplx* at(std::size_t cell) noexcept { return v_.data() + cell * static_cast<std::size_t>(n_); }
  const cplx* at(std::size_t cell) const noexcept { return v_.data() + cell * static_cast<std::size_t>(n_); }
  std::span<cplx> values() noexcept { return v_; }
  std::span<const cplx> values() const noexcept { return v_; }

  SpinorField& operator+=(const SpinorField& o);
  SpinorField& operator*=(double s);

 private:
  Grid grid_;
  int n_ = 0;
  std::vector<cplx> v_;
};

/// Symmetric-in-the-continuum rank-2 tensor per cell, always 3 x 3 so that
/// planar grids reuse the same algebra with zero z-gradients.
class StressField {
 public:
  StressField() = default;
  explicit StressField(const Grid& g);
  ScalarField& operator()(int j, int k) noexcept { return t_[static_cast<std::size_t>(3 * j + k)]; }
  const ScalarField& operator()(int j, int k) const noexcept { return t_[static_cast<std::size_t>(3 * j + k)]; }
  const Grid& grid() const noexcept { return grid_; }

 private:
  Grid grid_;
  std::array<ScalarField, 9> t_;
};

// Pointwise helpers.

double max_abs(const ScalarField& f);
double min_value(const ScalarField& f);
double max_abs(const MatrixField& f);
/// Max over cells of the relative anti-Hermitian residue.
double hermiticity_error(const MatrixField& f);
/// Field of Tr A.
ScalarField trace_real(const MatrixField& f);
/// rho = psi psi^dagger.
MatrixField outer(const SpinorField& psi);
/// Largest deviation of |psi| from one.
double norm_error(const SpinorField& psi);
/// Constant matrix on every cell.
MatrixField constant_matrix_field(const Grid& g, const Matrix& m);
/// s * A cellwise.
MatrixField scale(const ScalarField& s, const MatrixField& a);

}  // namespace qcf
