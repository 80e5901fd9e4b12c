#include "qcf/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "qcf/calculus.hpp"

namespace qcf {

namespace {

// r2c/c2r plans and scratch buffers for one grid shape. ESTIMATE plans are
// deterministic, so repeated runs pick the same algorithm.
struct Plan {
  int nx, ny, nz, dim;
  std::size_t nreal, ncplx;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr, inv = nullptr;

  explicit Plan(const Grid& g) : nx(g.n(0)), ny(g.n(1)), nz(g.n(2)), dim(g.dim()) {
    nreal = g.size();
    ncplx = static_cast<std::size_t>(nz) * ny * (nx / 2 + 1);
    real = fftw_alloc_real(nreal);
    spec = fftw_alloc_complex(ncplx);
    if (dim == 3) {
      fwd = fftw_plan_dft_r2c_3d(nz, ny, nx, real, spec, FFTW_ESTIMATE);
      inv = fftw_plan_dft_c2r_3d(nz, ny, nx, spec, real, FFTW_ESTIMATE);
    } else {
      fwd = fftw_plan_dft_r2c_2d(ny, nx, real, spec, FFTW_ESTIMATE);
      inv = fftw_plan_dft_c2r_2d(ny, nx, spec, real, FFTW_ESTIMATE);
    }
  }
  ~Plan() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
};

Plan& plan_for(const Grid& g) {
  static std::map<std::array<int, 4>, std::unique_ptr<Plan>> cache;
  const std::array<int, 4> key{g.dim(), g.n(0), g.n(1), g.n(2)};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Plan>(g)).first;
  return *it->second;
}

// Per-axis contribution to the Laplacian symbol for integer wavenumber m.
double axis_symbol(const Grid& g, int axis, int m, LaplacianSymbol s) {
  const int n = g.n(axis);
  if (m > n / 2) m -= n;
  const double k = 2.0 * std::numbers::pi * m / g.length(axis);
  if (s == LaplacianSymbol::spectral) return -k * k;
  const double h = g.h(axis);
  const double kt = (8.0 * std::sin(k * h) - std::sin(2.0 * k * h)) / (6.0 * h);
  return -kt * kt;
}

template <class F>
ScalarField spectral_apply(const ScalarField& f, LaplacianSymbol s, F&& op) {
  const Grid& g = f.grid();
  Plan& p = plan_for(g);
  std::copy(f.values().begin(), f.values().end(), p.real);
  fftw_execute(p.fwd);
  const int nxh = p.nx / 2 + 1;
  std::vector<double> sx(static_cast<std::size_t>(nxh)), sy(static_cast<std::size_t>(p.ny)),
      sz(static_cast<std::size_t>(p.nz), 0.0);
  for (int i = 0; i < nxh; ++i) sx[static_cast<std::size_t>(i)] = axis_symbol(g, 0, i, s);
  for (int j = 0; j < p.ny; ++j) sy[static_cast<std::size_t>(j)] = axis_symbol(g, 1, j, s);
  if (p.dim == 3)
    for (int k = 0; k < p.nz; ++k) sz[static_cast<std::size_t>(k)] = axis_symbol(g, 2, k, s);
  const double norm = 1.0 / static_cast<double>(p.nreal);
  std::size_t q = 0;
  for (int k = 0; k < p.nz; ++k)
    for (int j = 0; j < p.ny; ++j)
      for (int i = 0; i < nxh; ++i, ++q) {
        const double sym = sx[static_cast<std::size_t>(i)] + sy[static_cast<std::size_t>(j)] + sz[static_cast<std::size_t>(k)];
        const double factor = op(sym) * norm;
        p.spec[q][0] *= factor;
        p.spec[q][1] *= factor;
      }
  fftw_execute(p.inv);
  ScalarField out(g);
  std::copy(p.real, p.real + p.nreal, out.values().begin());
  return out;
}

}  // namespace

ScalarField poisson_solve(const ScalarField& rhs, LaplacianSymbol symbol) {
  const double vmax = max_abs(rhs);
  double sum = 0.0;
  for (double x : rhs.values()) sum += x;
  const double mean = sum / static_cast<double>(rhs.size());
  if (std::abs(mean) > 1e-8 * vmax) {
    std::ostringstream os;
    os << "periodic Poisson rhs has mean " << mean << " (max |rhs| " << vmax << ")";
    fail(ErrorKind::incompatible_rhs, os.str());
  }
  // Symbols this small are the zero mode or, for the fd4 symbol, modes the
  // stencil cannot see; their coefficients are set to zero.
  const double h = rhs.grid().min_spacing();
  const double tiny = 1e-12 / (h * h);
  return spectral_apply(rhs, symbol, [tiny](double sym) { return std::abs(sym) > tiny ? 1.0 / sym : 0.0; });
}

ScalarField apply_laplacian(const ScalarField& f, LaplacianSymbol symbol) {
  return spectral_apply(f, symbol, [](double sym) { return sym; });
}

VectorField project_divergence_free(const VectorField& v) {
  const ScalarField phi = poisson_solve(div(v), LaplacianSymbol::fd4_composite);
  VectorField out = v;
  const VectorField gp = grad(phi);
  for (int d = 0; d < v.grid().dim(); ++d) out[d] -= gp[d];
  return out;
}

}  // namespace qcf
