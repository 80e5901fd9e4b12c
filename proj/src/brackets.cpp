#include "qcf/brackets.hpp"

#include <cmath>

#include "qcf/calculus.hpp"

namespace qcf {

namespace {

constexpr int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};

// out = sum eps_ijk gb_i F_j G_k at one cell. Null gradient pointers are
// zero (the z axis of planar grids).
template <int N>
void nambu_cell(const double gb[3], const cplx* const f[3], const cplx* const g[3], cplx* out, int n, bool reversed) {
  const int nn = kern::dim<N>(n) * kern::dim<N>(n);
  for (int q = 0; q < nn; ++q) out[q] = 0.0;
  cplx tmp[max_hilbert_dim * max_hilbert_dim];
  for (const auto& t : cyc) {
    const double w = gb[t[0]];
    if (w == 0.0) continue;
    const int j = t[1], k = t[2];
    const bool a = f[j] && g[k], b = f[k] && g[j];
    if (!a && !b) continue;
    if (a && b) {
      if (reversed) kern::mul_sub<N>(g[k], f[j], g[j], f[k], tmp, n);
      else kern::mul_sub<N>(f[j], g[k], f[k], g[j], tmp, n);
    } else if (a) {
      if (reversed) kern::mul<N>(g[k], f[j], tmp, n);
      else kern::mul<N>(f[j], g[k], tmp, n);
    } else {
      if (reversed) kern::mul<N>(g[j], f[k], tmp, n);
      else kern::mul<N>(f[k], g[j], tmp, n);
      for (int q = 0; q < nn; ++q) tmp[q] = -tmp[q];
    }
    for (int q = 0; q < nn; ++q) out[q] += w * tmp[q];
  }
}

void check_vector(const MatrixVector& v, const Grid& g, int n, const char* what) {
  if (static_cast<int>(v.size()) != g.dim()) fail(ErrorKind::shape_error, std::string(what) + ": one gradient per axis expected");
  for (const auto& m : v) {
    require_same_grid(m.grid(), g, what);
    if (m.n() != n) fail(ErrorKind::shape_error, std::string(what) + ": Hilbert dimension mismatch");
  }
}

}  // namespace

double nambu_scalar(const Vec3& gb, const Vec3& f, const Vec3& g) noexcept {
  return gb[0] * (f[1] * g[2] - f[2] * g[1]) + gb[1] * (f[2] * g[0] - f[0] * g[2]) + gb[2] * (f[0] * g[1] - f[1] * g[0]);
}

Matrix nambu_matrix(const Vec3& gb, const MatrixGrad& gF, const MatrixGrad& gG) {
  const int n = gF[0].n();
  for (int a = 0; a < 3; ++a)
    if (gF[a].n() != n || gG[a].n() != n) fail(ErrorKind::shape_error, "nambu_matrix: Hilbert dimension mismatch");
  Matrix out(n);
  const cplx* f[3] = {gF[0].data(), gF[1].data(), gF[2].data()};
  const cplx* g[3] = {gG[0].data(), gG[1].data(), gG[2].data()};
  nambu_cell<0>(gb.data(), f, g, out.data(), n, false);
  return out;
}

ScalarField nambu_scalar_field(const BracketGeometry& geo, const ScalarField& f, const ScalarField& g) {
  const Grid& gr = f.grid();
  const VectorField gf = grad(f), gg = grad(g);
  ScalarField out(gr);
  for (std::size_t c = 0; c < gr.size(); ++c) {
    const Vec3 b{geo.gb.at(0, c), geo.gb.at(1, c), geo.gb.at(2, c)};
    out[c] = nambu_scalar(b, {gf.at(0, c), gf.at(1, c), gf.at(2, c)}, {gg.at(0, c), gg.at(1, c), gg.at(2, c)});
  }
  return out;
}

ScalarField nambu_scalar_field(const ScalarField& b, const ScalarField& f, const ScalarField& g) {
  return nambu_scalar_field(geometry_from_b(b, {0.0, 0.0, 0.0}), f, g);
}

MatrixField nambu_matrix_field(const BracketGeometry& geo, const MatrixVector& gF, const MatrixVector& gG,
                               bool reversed) {
  const Grid& g = gF.front().grid();
  const int n = gF.front().n();
  check_vector(gF, g, n, "nambu_matrix_field");
  check_vector(gG, g, n, "nambu_matrix_field");
  MatrixField out(g, n);
  const int dim = g.dim();
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    if (dim == 2) {
      // only the z component of gb enters: gb_z (F_x G_y - F_y G_x)
      const int nn = n * n;
      for (std::size_t c = 0; c < g.size(); ++c) {
        cplx* o = out.at(c);
        if (reversed) kern::mul_sub<NN>(gG[1].at(c), gF[0].at(c), gG[0].at(c), gF[1].at(c), o, n);
        else kern::mul_sub<NN>(gF[0].at(c), gG[1].at(c), gF[1].at(c), gG[0].at(c), o, n);
        const double w = geo.gb.at(2, c);
        for (int q = 0; q < nn; ++q) o[q] *= w;
      }
      return;
    }
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double gb[3] = {geo.gb.at(0, c), geo.gb.at(1, c), geo.gb.at(2, c)};
      const cplx* f[3] = {gF[0].at(c), gF[1].at(c), dim == 3 ? gF[2].at(c) : nullptr};
      const cplx* h[3] = {gG[0].at(c), gG[1].at(c), dim == 3 ? gG[2].at(c) : nullptr};
      nambu_cell<decltype(N)::value>(gb, f, h, out.at(c), n, reversed);
    }
  });
  return out;
}

MatrixField nambu_matrix_field(const BracketGeometry& geo, const VectorField& gf, const MatrixVector& gG) {
  // {f, G} = sum_k (gb x grad f)_k d_k G
  const Grid& g = gf.grid();
  const int n = gG.front().n();
  check_vector(gG, g, n, "nambu_matrix_field");
  MatrixField out(g, n);
  const std::size_t st = out.stride();
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Vec3 b{geo.gb.at(0, c), geo.gb.at(1, c), geo.gb.at(2, c)};
    const Vec3 v{gf.at(0, c), gf.at(1, c), gf.at(2, c)};
    cplx* o = out.at(c);
    for (int k = 0; k < g.dim(); ++k) {
      const double w = b[static_cast<std::size_t>((k + 1) % 3)] * v[static_cast<std::size_t>((k + 2) % 3)] -
                       b[static_cast<std::size_t>((k + 2) % 3)] * v[static_cast<std::size_t>((k + 1) % 3)];
      const cplx* src = gG[static_cast<std::size_t>(k)].at(c);
      for (std::size_t q = 0; q < st; ++q) o[q] += w * src[q];
    }
  }
  return out;
}

MatrixField nambu_matrix_field(const BracketGeometry& geo, const MatrixVector& gF, const VectorField& gg) {
  // {F, g} = sum_j (grad g x gb)_j d_j F
  const Grid& g = gg.grid();
  const int n = gF.front().n();
  check_vector(gF, g, n, "nambu_matrix_field");
  MatrixField out(g, n);
  const std::size_t st = out.stride();
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Vec3 b{geo.gb.at(0, c), geo.gb.at(1, c), geo.gb.at(2, c)};
    const Vec3 v{gg.at(0, c), gg.at(1, c), gg.at(2, c)};
    cplx* o = out.at(c);
    for (int j = 0; j < g.dim(); ++j) {
      const double w = v[static_cast<std::size_t>((j + 1) % 3)] * b[static_cast<std::size_t>((j + 2) % 3)] -
                       v[static_cast<std::size_t>((j + 2) % 3)] * b[static_cast<std::size_t>((j + 1) % 3)];
      const cplx* src = gF[static_cast<std::size_t>(j)].at(c);
      for (std::size_t q = 0; q < st; ++q) o[q] += w * src[q];
    }
  }
  return out;
}

ScalarField planar_bracket(const ScalarField& f, const ScalarField& g) {
  if (f.grid().dim() != 2) fail(ErrorKind::unsupported_operation, "planar_bracket needs a 2D grid");
  return derivative(f, 0) * derivative(g, 1) - derivative(f, 1) * derivative(g, 0);
}

MatrixField planar_bracket(const MatrixField& f, const MatrixField& g) {
  if (f.grid().dim() != 2) fail(ErrorKind::unsupported_operation, "planar_bracket needs a 2D grid");
  return nambu_matrix_field(planar_geometry(f.grid()), grad_h(f), grad_h(g));
}

MatrixVector mead_connection(const MatrixField& rho, const MatrixVector& grad_rho, double hbar) {
  const Grid& g = rho.grid();
  const int n = rho.n();
  check_vector(grad_rho, g, n, "mead_connection");
  MatrixVector out;
  const cplx pre(0.0, 0.5 * hbar);
  for (int d = 0; d < g.dim(); ++d) {
    MatrixField m(g, n);
    dispatch_dim(n, [&](auto N) {
      for (std::size_t c = 0; c < g.size(); ++c) {
        cplx* o = m.at(c);
        kern::comm<decltype(N)::value>(rho.at(c), grad_rho[static_cast<std::size_t>(d)].at(c), o, n);
        for (int q = 0; q < n * n; ++q) o[q] *= pre;
      }
    });
    out.push_back(std::move(m));
  }
  return out;
}

MatrixVector mead_connection(const MatrixField& rho, double hbar) { return mead_connection(rho, grad_h(rho), hbar); }

MatrixVector cross_geometry(const MatrixVector& gamma, const BracketGeometry& geo) {
  const Grid& g = gamma.front().grid();
  const int n = gamma.front().n();
  const int dim = g.dim();
  MatrixVector out;
  for (int i = 0; i < dim; ++i) out.emplace_back(g, n);
  const std::size_t st = static_cast<std::size_t>(n * n);
  for (std::size_t c = 0; c < g.size(); ++c)
    for (int i = 0; i < dim; ++i) {
      // eps_ijk Gamma_j gb_k with (i, j, k) cyclic minus anticyclic
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      cplx* o = out[static_cast<std::size_t>(i)].at(c);
      if (j < dim) {
        const double w = geo.gb.at(k, c);
        const cplx* s = gamma[static_cast<std::size_t>(j)].at(c);
        for (std::size_t q = 0; q < st; ++q) o[q] += w * s[q];
      }
      if (k < dim) {
        const double w = geo.gb.at(j, c);
        const cplx* s = gamma[static_cast<std::size_t>(k)].at(c);
        for (std::size_t q = 0; q < st; ++q) o[q] -= w * s[q];
      }
    }
  return out;
}

MatrixField von_neumann(const ScalarField& d, const MatrixField& rho, const BracketGeometry& geo, const ScalarField& c,
                        double hbar) {
  MatrixVector y = cross_geometry(mead_connection(rho, hbar), geo);
  for (auto& m : y) m = scale(c, m);
  MatrixField out = div_h(y);
  out += scale(d, rho);
  return out;
}

std::array<std::array<double, 3>, 3> stress_tensor_point(double p, double c, const Vec3& gb, const MatrixGrad& gamma,
                                                         const MatrixGrad& grad_h) {
  double pm[3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) pm[a][b] = inner_re(gamma[a], grad_h[b]);
  double x[3];
  for (int j = 0; j < 3; ++j) {
    const int m = (j + 1) % 3, nn = (j + 2) % 3;
    x[j] = pm[m][nn] - pm[nn][m];
  }
  const double gbx = gb[0] * x[0] + gb[1] * x[1] + gb[2] * x[2];
  std::array<std::array<double, 3>, 3> t{};
  for (int j = 0; j < 3; ++j) {
    const int m = (j + 1) % 3, nn = (j + 2) % 3;
    for (int k = 0; k < 3; ++k) {
      double v = (j == k ? p - c * gbx : 0.0) + c * x[j] * gb[k];
      v += c * (gb[m] * pm[nn][k] - gb[nn] * pm[m][k]);
      v += c * (pm[k][m] * gb[nn] - pm[k][nn] * gb[m]);
      t[j][k] = v;
    }
  }
  return t;
}

StressField stress_tensor(const ScalarField& p, const ScalarField& c, const BracketGeometry& geo,
                          const MatrixVector& gamma, const MatrixVector& grad_h, int flip_term) {
  const Grid& g = p.grid();
  const int n = gamma.front().n();
  const int dim = g.dim();
  check_vector(gamma, g, n, "stress_tensor");
  check_vector(grad_h, g, n, "stress_tensor");
  const double s[5] = {1.0, flip_term == 1 ? -1.0 : 1.0, flip_term == 2 ? -1.0 : 1.0, flip_term == 3 ? -1.0 : 1.0,
                       flip_term == 4 ? -1.0 : 1.0};
  StressField t(g);
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    for (std::size_t cell = 0; cell < g.size(); ++cell) {
      double pm[3][3] = {};
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          pm[a][b] = kern::inner<NN>(gamma[static_cast<std::size_t>(a)].at(cell), grad_h[static_cast<std::size_t>(b)].at(cell), n);
      const double gb[3] = {geo.gb.at(0, cell), geo.gb.at(1, cell), geo.gb.at(2, cell)};
      const double cc = c[cell];
      double x[3];
      for (int j = 0; j < 3; ++j) x[j] = pm[(j + 1) % 3][(j + 2) % 3] - pm[(j + 2) % 3][(j + 1) % 3];
      const double gbx = gb[0] * x[0] + gb[1] * x[1] + gb[2] * x[2];
      for (int j = 0; j < 3; ++j) {
        const int m = (j + 1) % 3, nn = (j + 2) % 3;
        for (int k = 0; k < 3; ++k) {
          double v = j == k ? p[cell] - s[1] * cc * gbx : 0.0;
          v += s[2] * cc * x[j] * gb[k];
          v += s[3] * cc * (gb[m] * pm[nn][k] - gb[nn] * pm[m][k]);
          v += s[4] * cc * (pm[k][m] * gb[nn] - pm[k][nn] * gb[m]);
          t(j, k)[cell] = v;
        }
      }
    }
  });
  return t;
}

void require_normalized(const SpinorField& psi, double tol, const char* what) {
  const double e = norm_error(psi);
  if (e > tol) fail(ErrorKind::unnormalized_state, std::string(what) + ": |psi| deviates from 1 by " + std::to_string(e));
}

VectorField berry_connection(const SpinorField& psi, const std::vector<SpinorField>& gp, double hbar) {
  require_normalized(psi, 1e-8, "berry_connection");
  const Grid& g = psi.grid();
  const int n = psi.n();
  VectorField a(g);
  for (int d = 0; d < g.dim(); ++d)
    for (std::size_t c = 0; c < g.size(); ++c) {
      const cplx* p = psi.at(c);
      const cplx* q = gp[static_cast<std::size_t>(d)].at(c);
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += p[k].real() * q[k].imag() - p[k].imag() * q[k].real();
      a[d][c] = hbar * s;
    }
  return a;
}

VectorField berry_connection(const SpinorField& psi, double hbar) { return berry_connection(psi, grad_psi(psi), hbar); }

MatrixVector fluctuation_force(const SpinorField& psi, const MatrixVector& grad_h) {
  require_normalized(psi, 1e-8, "fluctuation_force");
  const Grid& g = psi.grid();
  const int n = psi.n();
  MatrixVector out;
  for (const auto& hl : grad_h) {
    MatrixField f(g, n);
    for (std::size_t c = 0; c < g.size(); ++c) {
      const cplx* h = hl.at(c);
      const cplx* p = psi.at(c);
      double e = 0.0;
      for (int i = 0; i < n; ++i) {
        cplx row = 0.0;
        for (int j = 0; j < n; ++j) row += h[i * n + j] * p[j];
        e += (std::conj(p[i]) * row).real();
      }
      cplx* o = f.at(c);
      for (int q = 0; q < n * n; ++q) o[q] = -h[q];
      for (int i = 0; i < n; ++i) o[i * n + i] += e;
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace qcf
