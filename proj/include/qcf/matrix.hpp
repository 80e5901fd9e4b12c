#pragma once

// Dense complex n x n algebra used pointwise on the grid.

#include <complex>
#include <span>
#include <vector>

#include "qcf/error.hpp"

namespace qcf {

using cplx = std::complex<double>;

/// Largest Hilbert dimension supported by the pointwise kernels.
inline constexpr int max_hilbert_dim = 8;

/// Row-major dense complex matrix. Used for Hermitian quantities (states,
/// Hamiltonians, coupling matrices) as well as general products of them.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n);
  Matrix(int n, std::vector<cplx> row_major);

  static Matrix identity(int n);
  static Matrix diagonal(std::span<const double> d);

  int n() const noexcept { return n_; }
  cplx& operator()(int i, int j) noexcept { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  const cplx& operator()(int i, int j) const noexcept { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  cplx* data() noexcept { return a_.data(); }
  const cplx* data() const noexcept { return a_.data(); }

  Matrix adjoint() const;
  cplx trace() const;
  double frobenius_norm() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(cplx s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);

 private:
  int n_ = 0;
  std::vector<cplx> a_;
};

/// [A, B] = AB - BA. Throws shape-error on dimension mismatch.
Matrix commutator(const Matrix& a, const Matrix& b);
/// Re Tr(A^dagger B).
double inner_re(const Matrix& a, const Matrix& b);
/// Tr(A^dagger B).
cplx inner_full(const Matrix& a, const Matrix& b);

struct Hermitized {
  Matrix matrix;
  double drift = 0.0;  ///< ||A - A^dagger||_F of the input
};
/// (A + A^dagger) / 2 together with the anti-Hermitian residue that was removed.
Hermitized hermitize(const Matrix& a);

/// Relative Frobenius distance of A from Hermitian: ||A - A^dagger|| / max(||A||, tiny).
double hermiticity_error(const Matrix& a);

/// Eigenvalues of a Hermitian matrix in ascending order. Closed form for
/// n <= 2, cyclic Jacobi otherwise; eigen-failure after 100 sweeps.
std::vector<double> eigenvalues_hermitian(const Matrix& a);
double min_eigenvalue(const Matrix& a);

/// <B> = inner_re(rho, B).
double expect(const Matrix& rho, const Matrix& b);

/// Identity and the three Pauli matrices. The multiplication table is checked
/// on construction.
struct PauliBasis {
  Matrix id;
  Matrix sigma[3];

  PauliBasis();
  const Matrix& operator[](int k) const { return sigma[k]; }
};

const PauliBasis& pauli();

/// exp(-i H t) for Hermitian H via eigen-decomposition (n = 2 closed form,
/// Jacobi eigenvectors otherwise).
Matrix unitary_propagator(const Matrix& h, double t);

namespace kern {

// Raw pointwise kernels on contiguous row-major storage. N > 0 fixes the
// dimension at compile time; N == 0 reads it from `n`.

template <int N>
inline int dim(int n) {
  if constexpr (N > 0) return N; else return n;
}

/// out = a * b
template <int N>
inline void mul(const cplx* a, const cplx* b, cplx* out, int n_rt) {
  const int n = dim<N>(n_rt);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + j];
      out[i * n + j] = s;
    }
}

/// out = a * b - c * d
template <int N>
inline void mul_sub(const cplx* a, const cplx* b, const cplx* c, const cplx* d, cplx* out, int n_rt) {
  const int n = dim<N>(n_rt);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + j] - c[i * n + k] * d[k * n + j];
      out[i * n + j] = s;
    }
}

/// out += alpha * a * b
template <int N>
inline void mul_acc(cplx alpha, const cplx* a, const cplx* b, cplx* out, int n_rt) {
  const int n = dim<N>(n_rt);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + j];
      out[i * n + j] += alpha * s;
    }
}

/// out = a * b - b * a
template <int N>
inline void comm(const cplx* a, const cplx* b, cplx* out, int n_rt) {
  const int n = dim<N>(n_rt);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + j] - b[i * n + k] * a[k * n + j];
      out[i * n + j] = s;
    }
}

/// Re Tr(a^dagger b)
template <int N>
inline double inner(const cplx* a, const cplx* b, int n_rt) {
  const int n = dim<N>(n_rt);
  double s = 0.0;
  for (int k = 0; k < n * n; ++k) s += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  return s;
}

/// Re Tr(a^dagger (i b)) = -Im-part pairing, used for <A, iB>.
template <int N>
inline double inner_i(const cplx* a, const cplx* b, int n_rt) {
  const int n = dim<N>(n_rt);
  double s = 0.0;
  for (int k = 0; k < n * n; ++k) s += a[k].imag() * b[k].real() - a[k].real() * b[k].imag();
  return s;
}

template <int N>
inline cplx trace(const cplx* a, int n_rt) {
  const int n = dim<N>(n_rt);
  cplx s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i * n + i];
  return s;
}

}  // namespace kern

/// Calls `f(std::integral_constant<int, N>{})` with N = 2 for qubits and
/// N = 0 (runtime dimension) otherwise.
template <class F>
decltype(auto) dispatch_dim(int n, F&& f) {
  if (n == 2) return f(std::integral_constant<int, 2>{});
  return f(std::integral_constant<int, 0>{});
}

}  // namespace qcf
