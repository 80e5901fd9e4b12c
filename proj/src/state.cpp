#include "qcf/state.hpp"

#include <cmath>
#include <sstream>

#include "qcf/calculus.hpp"
#include "qcf/hamiltonian.hpp"

namespace qcf {

namespace {

template <class T>
bool present(const T& f) {
  return !f.values().empty();
}

void axpy_span(std::span<double> y, double a, std::span<const double> x) {
  if (y.size() != x.size()) fail(ErrorKind::shape_error, "axpy size mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void axpy_span(std::span<cplx> y, double a, std::span<const cplx> x) {
  if (y.size() != x.size()) fail(ErrorKind::shape_error, "axpy size mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

template <class Span>
bool finite_span(Span v, std::size_t width, const Grid& g, const char* name, std::string* where) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool ok;
    if constexpr (std::is_same_v<std::remove_cv_t<typename Span::element_type>, cplx>)
      ok = std::isfinite(v[i].real()) && std::isfinite(v[i].imag());
    else
      ok = std::isfinite(v[i]);
    if (!ok) {
      if (where) {
        const auto c = g.coords(i / width);
        std::ostringstream os;
        os << name << " at cell (" << c[0] << ", " << c[1] << ", " << c[2] << ")";
        *where = os.str();
      }
      return false;
    }
  }
  return true;
}

}  // namespace

void Fields::axpy(double a, const Fields& x) {
  if (present(d)) axpy_span(d.values(), a, x.d.values());
  for (int k = 0; k < u.ncomp(); ++k) axpy_span(u[k].values(), a, x.u[k].values());
  if (present(rho)) axpy_span(rho.values(), a, x.rho.values());
  if (present(psi)) axpy_span(psi.values(), a, x.psi.values());
  if (present(b)) axpy_span(b.values(), a, x.b.values());
  if (present(c)) axpy_span(c.values(), a, x.c.values());
}

Fields Fields::zeros_like() const {
  Fields z;
  if (present(d)) z.d = ScalarField(d.grid());
  if (u.ncomp() > 0) z.u = VectorField(u.grid(), u.ncomp());
  if (present(rho)) z.rho = MatrixField(rho.grid(), rho.n());
  if (present(psi)) z.psi = SpinorField(psi.grid(), psi.n());
  if (present(b)) z.b = ScalarField(b.grid());
  if (present(c)) z.c = ScalarField(c.grid());
  return z;
}

bool Fields::all_finite(std::string* where) const {
  const Grid& g = d.grid();
  if (!finite_span(d.values(), 1, g, "D", where)) return false;
  for (int k = 0; k < u.ncomp(); ++k)
    if (!finite_span(u[k].values(), 1, g, "u", where)) return false;
  if (!finite_span(rho.values(), rho.stride(), g, "rho", where)) return false;
  if (!finite_span(psi.values(), static_cast<std::size_t>(std::max(psi.n(), 1)), g, "psi", where)) return false;
  if (!finite_span(b.values(), 1, g, "b", where)) return false;
  if (!finite_span(c.values(), 1, g, "c", where)) return false;
  return true;
}

MatrixField State::density() const { return mode == StateMode::pure_state ? outer(f.psi) : f.rho; }

ScalarField State::full_b() const {
  if (planar()) fail(ErrorKind::unsupported_operation, "planar states carry no b field");
  ScalarField b = f.b;
  const Grid& g = grid();
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto x = g.center(c);
    b[c] += b_slope[0] * x[0] + b_slope[1] * x[1] + b_slope[2] * x[2];
  }
  return b;
}

void State::validate(double tol) const {
  const Grid& g = grid();
  if (f.u.ncomp() != g.dim()) fail(ErrorKind::shape_error, "velocity must have one component per grid axis");
  require_same_grid(f.u.grid(), g, "velocity");
  // the incompressible model carries no c (c~ = beta D)
  if (!f.c.values().empty()) require_same_grid(f.c.grid(), g, "c");
  if (g.dim() == 3) require_same_grid(f.b.grid(), g, "b");
  require_positive(f.d, "state");
  if (mode == StateMode::density_matrix) {
    require_same_grid(f.rho.grid(), g, "rho");
    const int n = f.rho.n();
    for (std::size_t c = 0; c < g.size(); ++c) {
      const Matrix r = f.rho.get(c);
      const double tr = r.trace().real();
      if (std::abs(tr - 1.0) > tol || hermiticity_error(r) > std::max(tol, 1e-12))
        fail(ErrorKind::precondition, "rho is not a unit-trace Hermitian matrix at cell " + std::to_string(c));
      if (min_eigenvalue(r) < -tol)
        fail(ErrorKind::precondition, "rho has a negative eigenvalue at cell " + std::to_string(c));
    }
    (void)n;
  } else {
    require_same_grid(f.psi.grid(), g, "psi");
    if (norm_error(f.psi) > tol) fail(ErrorKind::unnormalized_state, "psi is not pointwise unit norm");
  }
}

BracketGeometry planar_geometry(const Grid& g, double beta) {
  BracketGeometry geo{VectorField(g, 3)};
  for (auto& x : geo.gb[2].values()) x = beta;
  return geo;
}

BracketGeometry geometry_from_b(const ScalarField& b, std::array<double, 3> slope) {
  const Grid& g = b.grid();
  if (g.dim() != 3) fail(ErrorKind::unsupported_operation, "b geometry needs a 3D grid");
  BracketGeometry geo{VectorField(g, 3)};
  for (int d = 0; d < 3; ++d) {
    derivative(b.values(), geo.gb[d].values(), 1, g, d);
    if (slope[static_cast<std::size_t>(d)] != 0.0)
      for (auto& x : geo.gb[d].values()) x += slope[static_cast<std::size_t>(d)];
  }
  return geo;
}

BracketGeometry make_geometry(const State& s) {
  return s.planar() ? planar_geometry(s.grid()) : geometry_from_b(s.f.b, s.b_slope);
}

}  // namespace qcf
