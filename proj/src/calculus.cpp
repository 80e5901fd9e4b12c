#include "qcf/calculus.hpp"

#include <cmath>

namespace qcf {

namespace {

std::size_t axis_stride(const Grid& g, int axis) {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(g.n(a));
  return s;
}

// Signed cell offsets of the +-1, +-2 neighbours for each coordinate value.
struct Offsets {
  std::vector<std::ptrdiff_t> p1, m1, p2, m2;
};

Offsets make_offsets(const Grid& g, int axis) {
  const int n = g.n(axis);
  const auto s = static_cast<std::ptrdiff_t>(axis_stride(g, axis));
  Offsets o;
  for (auto* v : {&o.p1, &o.m1, &o.p2, &o.m2}) v->resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto off = [&](int d) { return (static_cast<std::ptrdiff_t>(((i + d) % n + n) % n) - i) * s; };
    o.p1[static_cast<std::size_t>(i)] = off(1);
    o.m1[static_cast<std::size_t>(i)] = off(-1);
    o.p2[static_cast<std::size_t>(i)] = off(2);
    o.m2[static_cast<std::size_t>(i)] = off(-2);
  }
  return o;
}

std::span<const double> as_doubles(std::span<const cplx> v) {
  return {reinterpret_cast<const double*>(v.data()), v.size() * 2};
}
std::span<double> as_doubles(std::span<cplx> v) { return {reinterpret_cast<double*>(v.data()), v.size() * 2}; }

}  // namespace

namespace {

// out[q] = (8 (f[q+a] - f[q-a]) - (f[q+b] - f[q-b])) * inv over one run of len doubles
inline void stencil_run(const double* __restrict f, double* __restrict r, std::size_t len, std::ptrdiff_t m2,
                        std::ptrdiff_t m1, std::ptrdiff_t p1, std::ptrdiff_t p2, double inv) {
  for (std::size_t q = 0; q < len; ++q) {
    const auto i = static_cast<std::ptrdiff_t>(q);
    r[q] = (8.0 * (f[i + p1] - f[i + m1]) - (f[i + p2] - f[i + m2])) * inv;
  }
}

// FD4 along one axis for w interleaved doubles per cell. Rows along x are
// contiguous; for axes 1 and 2 the offsets are constant over a whole row.
void derivative_kernel(const double* f, double* r, std::size_t w, const Grid& g, int axis) {
  const Offsets o = make_offsets(g, axis);
  const double inv = 1.0 / (12.0 * g.h(axis));
  const int nx = g.n(0), ny = g.n(1), nz = g.n(2);
  const auto sw = static_cast<std::ptrdiff_t>(w);
  const std::size_t row = static_cast<std::size_t>(nx) * w;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) {
      const std::size_t start = (static_cast<std::size_t>(k) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)) * row;
      const double* fr = f + start;
      double* rr = r + start;
      if (axis != 0) {
        const auto c = static_cast<std::size_t>(axis == 1 ? j : k);
        stencil_run(fr, rr, row, o.m2[c] * sw, o.m1[c] * sw, o.p1[c] * sw, o.p2[c] * sw, inv);
        continue;
      }
      for (int i = 0; i < nx; ++i) {
        const auto c = static_cast<std::size_t>(i);
        if (i == 2 && nx > 4) {
          // interior cells share the unwrapped offsets
          stencil_run(fr + 2 * w, rr + 2 * w, static_cast<std::size_t>(nx - 4) * w, -2 * sw, -sw, sw, 2 * sw, inv);
          i = nx - 3;
          continue;
        }
        stencil_run(fr + c * w, rr + c * w, w, o.m2[c] * sw, o.m1[c] * sw, o.p1[c] * sw, o.p2[c] * sw, inv);
      }
    }
}

}  // namespace

void derivative(std::span<const double> in, std::span<double> out, int width, const Grid& g, int axis) {
  const std::size_t w = static_cast<std::size_t>(width);
  if (in.size() != g.size() * w || out.size() != in.size())
    fail(ErrorKind::shape_error, "derivative: buffer size does not match grid");
  if (axis >= g.dim()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  derivative_kernel(in.data(), out.data(), w, g, axis);
}

ScalarField derivative(const ScalarField& f, int axis) {
  ScalarField out(f.grid());
  derivative(f.values(), out.values(), 1, f.grid(), axis);
  return out;
}

MatrixField derivative(const MatrixField& f, int axis) {
  MatrixField out(f.grid(), f.n());
  derivative(as_doubles(f.values()), as_doubles(out.values()), static_cast<int>(2 * f.stride()), f.grid(), axis);
  return out;
}

SpinorField derivative(const SpinorField& f, int axis) {
  SpinorField out(f.grid(), f.n());
  derivative(as_doubles(f.values()), as_doubles(out.values()), 2 * f.n(), f.grid(), axis);
  return out;
}

VectorField grad(const ScalarField& f) {
  VectorField v(f.grid());
  for (int d = 0; d < f.grid().dim(); ++d) derivative(f.values(), v[d].values(), 1, f.grid(), d);
  return v;
}

ScalarField div(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g);
  ScalarField tmp(g);
  for (int d = 0; d < std::min(g.dim(), v.ncomp()); ++d) {
    derivative(v[d].values(), tmp.values(), 1, g, d);
    out += tmp;
  }
  return out;
}

VectorField curl(const VectorField& v) {
  const Grid& g = v.grid();
  if (g.dim() != 3 || v.ncomp() != 3)
    fail(ErrorKind::unsupported_operation, "curl needs a 3-component field on a 3D grid; use planar_curl");
  VectorField out(g, 3);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    out[a] = derivative(v[c], b) - derivative(v[b], c);
  }
  return out;
}

ScalarField planar_curl(const VectorField& v) {
  if (v.grid().dim() != 2) fail(ErrorKind::unsupported_operation, "planar_curl needs a 2D grid");
  return derivative(v[1], 0) - derivative(v[0], 1);
}

MatrixVector grad_h(const MatrixField& f) {
  MatrixVector out;
  out.reserve(static_cast<std::size_t>(f.grid().dim()));
  for (int d = 0; d < f.grid().dim(); ++d) out.push_back(derivative(f, d));
  return out;
}

MatrixField div_h(const MatrixVector& v) {
  if (v.empty()) fail(ErrorKind::shape_error, "div_h of an empty matrix vector");
  const Grid& g = v.front().grid();
  MatrixField out(g, v.front().n());
  for (int d = 0; d < std::min<int>(g.dim(), static_cast<int>(v.size())); ++d) out += derivative(v[static_cast<std::size_t>(d)], d);
  return out;
}

std::vector<SpinorField> grad_psi(const SpinorField& f) {
  std::vector<SpinorField> out;
  for (int d = 0; d < f.grid().dim(); ++d) out.push_back(derivative(f, d));
  return out;
}

ScalarField advect(const VectorField& u, const VectorField& grad_f) {
  const Grid& g = u.grid();
  ScalarField out(g);
  for (int d = 0; d < g.dim(); ++d)
    for (std::size_t c = 0; c < g.size(); ++c) out[c] += u.at(d, c) * grad_f.at(d, c);
  return out;
}

MatrixField advect(const VectorField& u, const MatrixVector& grad_f) {
  const Grid& g = u.grid();
  MatrixField out(g, grad_f.front().n());
  const std::size_t st = out.stride();
  for (int d = 0; d < g.dim(); ++d) {
    const cplx* src = grad_f[static_cast<std::size_t>(d)].values().data();
    cplx* dst = out.values().data();
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double w = u.at(d, c);
      for (std::size_t q = 0; q < st; ++q) dst[c * st + q] += w * src[c * st + q];
    }
  }
  return out;
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s * f.grid().cell_volume();
}

Matrix integrate(const MatrixField& f) {
  Matrix m(f.n());
  const std::size_t st = f.stride();
  for (std::size_t c = 0; c < f.cells(); ++c)
    for (std::size_t q = 0; q < st; ++q) m.data()[q] += f.at(c)[q];
  return f.grid().cell_volume() * m;
}

std::array<double, 3> wrap(const Grid& g, std::array<double, 3> x) {
  for (int a = 0; a < g.dim(); ++a) {
    const double l = g.length(a);
    x[static_cast<std::size_t>(a)] -= l * std::floor(x[static_cast<std::size_t>(a)] / l);
    if (x[static_cast<std::size_t>(a)] >= l) x[static_cast<std::size_t>(a)] = 0.0;
  }
  if (g.dim() == 2) x[2] = 0.0;
  return x;
}

double interpolate(const ScalarField& f, std::array<double, 3> x) {
  const Grid& g = f.grid();
  x = wrap(g, x);
  int i0[3] = {0, 0, 0};
  double t[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    const double s = x[static_cast<std::size_t>(a)] / g.h(a) - 0.5;
    const double fl = std::floor(s);
    i0[a] = static_cast<int>(fl);
    t[a] = s - fl;
  }
  auto wrapi = [&](int i, int a) { return ((i % g.n(a)) + g.n(a)) % g.n(a); };
  double acc = 0.0;
  const int kmax = g.dim() == 3 ? 2 : 1;
  for (int dk = 0; dk < kmax; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        const double w = (di ? t[0] : 1.0 - t[0]) * (dj ? t[1] : 1.0 - t[1]) * (g.dim() == 3 ? (dk ? t[2] : 1.0 - t[2]) : 1.0);
        if (w == 0.0) continue;
        acc += w * f[g.index(wrapi(i0[0] + di, 0), wrapi(i0[1] + dj, 1), g.dim() == 3 ? wrapi(i0[2] + dk, 2) : 0)];
      }
  return acc;
}

std::array<double, 3> interpolate(const VectorField& v, std::array<double, 3> x) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int d = 0; d < v.ncomp() && d < 3; ++d) out[static_cast<std::size_t>(d)] = interpolate(v[d], x);
  return out;
}

ScalarField shift(const ScalarField& f, int axis, int offset) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (std::size_t c = 0; c < g.size(); ++c) out[g.shifted(c, axis, offset)] = f[c];
  return out;
}

MatrixField shift(const MatrixField& f, int axis, int offset) {
  const Grid& g = f.grid();
  MatrixField out(g, f.n());
  const std::size_t st = f.stride();
  for (std::size_t c = 0; c < g.size(); ++c) std::copy(f.at(c), f.at(c) + st, out.at(g.shifted(c, axis, offset)));
  return out;
}

}  // namespace qcf
