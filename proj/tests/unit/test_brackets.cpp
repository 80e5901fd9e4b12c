#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qcf/brackets.hpp"
#include "qcf/calculus.hpp"
#include "support.hpp"

using namespace qcf;
using namespace qcf::test;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

template <class F>
ScalarField sample(const Grid& g, F&& f) {
  ScalarField s(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto x = g.center(c);
    s[c] = f(x[0], x[1], x[2]);
  }
  return s;
}

}  // namespace

TEST_CASE("planar bracket of sin x and sin y converges to cos x cos y") {
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const Grid g = Grid::planar(n, n, two_pi, two_pi);
    const ScalarField f = sample(g, [](double x, double, double) { return std::sin(x); });
    const ScalarField h = sample(g, [](double, double y, double) { return std::sin(y); });
    const ScalarField exact = sample(g, [](double x, double y, double) { return std::cos(x) * std::cos(y); });
    err.push_back(max_diff(planar_bracket(f, h), exact));
  }
  CHECK(err[1] < err[0] / 12.0);
  CHECK(err[2] < err[1] / 12.0);
}

TEST_CASE("3D scalar bracket: b = z reduces to the planar bracket, antisymmetry is exact") {
  const Grid g = Grid::cube(16, two_pi);
  const ScalarField f = make_scalar(g, smooth(0.0, 1.0, 3));
  const ScalarField h = make_scalar(g, smooth(0.0, 1.0, 4));
  const BracketGeometry geo = geometry_from_b(ScalarField(g), {0.0, 0.0, 1.0});
  const ScalarField fg = nambu_scalar_field(geo, f, h), gf = nambu_scalar_field(geo, h, f);
  for (std::size_t c = 0; c < g.size(); ++c) CHECK(fg[c] == -gf[c]);
  CHECK(max_abs(nambu_scalar_field(geo, f, f)) == 0.0);
  // direct: dx f dy g - dy f dx g
  const VectorField a = grad(f), b = grad(h);
  double m = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) m = std::max(m, std::abs(fg[c] - (a[0][c] * b[1][c] - a[1][c] * b[0][c])));
  CHECK(m <= 1e-13);
}

TEST_CASE("matrix bracket with commuting factors is the scalar bracket times the matrix product") {
  const Grid g = Grid::cube(12, two_pi);
  const ScalarField f = make_scalar(g, smooth(0.0, 1.0, 5));
  const ScalarField h = make_scalar(g, smooth(0.0, 1.0, 6));
  const BracketGeometry geo = geometry_from_b(make_scalar(g, smooth(0.0, 0.5, 7)), {0.0, 0.0, 0.7});
  const Matrix m = pauli()[0] + 0.5 * pauli()[2];
  const Matrix n = pauli()[1];
  MatrixField fm(g, 2), hn(g, 2);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Matrix a = f[c] * m, b = h[c] * n;
    std::copy(a.data(), a.data() + 4, fm.at(c));
    std::copy(b.data(), b.data() + 4, hn.at(c));
  }
  const MatrixField br = nambu_matrix_field(geo, grad_h(fm), grad_h(hn));
  const ScalarField sc = nambu_scalar_field(geo, f, h);
  const Matrix mn = m * n;
  double worst = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c)
    for (int q = 0; q < 4; ++q) worst = std::max(worst, std::abs(br.at(c)[q] - sc[c] * mn.data()[q]));
  CHECK(worst <= 1e-12);
  // reversed ordering gives n m instead
  const MatrixField rv = nambu_matrix_field(geo, grad_h(fm), grad_h(hn), true);
  const Matrix nm = n * m;
  worst = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c)
    for (int q = 0; q < 4; ++q) worst = std::max(worst, std::abs(rv.at(c)[q] - sc[c] * nm.data()[q]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("Mead connection is traceless, Hermitian and zero for constant rho") {
  const Grid g = Grid::planar(16, 16, two_pi, two_pi);
  const State s = make_state(g, 2, for_grid(smooth_state(11), g));
  const MatrixVector gam = mead_connection(s.f.rho, 0.7);
  for (const auto& gi : gam) {
    double tr = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) tr = std::max(tr, std::abs(gi.at(c)[0] + gi.at(c)[3]));
    CHECK(tr <= 1e-14);
    CHECK(hermiticity_error(gi) <= 1e-14);
  }
  StateSpec flat = for_grid(smooth_state(11), g);
  flat.quantum.theta = ScalarSpec::constant(0.4);
  flat.quantum.phi = ScalarSpec::constant(1.2);
  flat.quantum.radius = ScalarSpec::constant(0.9);
  const State c = make_state(g, 2, flat);
  for (const auto& gi : mead_connection(c.f.rho, 0.7)) CHECK(max_abs(gi) == 0.0);
}

TEST_CASE("von Neumann operator: constant b or constant rho gives D rho, trace integrates to the mass") {
  const Grid g = Grid::cube(12, two_pi);
  StateSpec spec = smooth_state(21);
  State s = make_state(g, 2, spec);
  const BracketGeometry flat = geometry_from_b(ScalarField(g), {0.0, 0.0, 0.0});
  const MatrixField v0 = von_neumann(s.f.d, s.f.rho, flat, s.f.c, 0.7);
  double worst = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c)
    for (int q = 0; q < 4; ++q) worst = std::max(worst, std::abs(v0.at(c)[q] - s.f.d[c] * s.f.rho.at(c)[q]));
  CHECK(worst == 0.0);

  const BracketGeometry geo = make_geometry(s);
  const MatrixField v = von_neumann(s.f.d, s.f.rho, geo, s.f.c, 0.7);
  ScalarField tr(g);
  for (std::size_t c = 0; c < g.size(); ++c) tr[c] = (v.at(c)[0] + v.at(c)[3]).real();
  CHECK(std::abs(integrate(tr) - integrate(s.f.d)) <= 1e-11 * integrate(s.f.d));
  // pointwise trace equals D (the correction is a divergence of traceless terms)
  CHECK(max_diff(tr, s.f.d) <= 1e-12);
}

TEST_CASE("stress tensor for constant rho is p times the identity") {
  const Grid g = Grid::cube(10, two_pi);
  StateSpec spec = smooth_state(31);
  spec.quantum.theta = ScalarSpec::constant(0.3);
  spec.quantum.phi = ScalarSpec::constant(0.2);
  spec.quantum.radius = ScalarSpec::constant(0.85);
  const State s = make_state(g, 2, spec);
  const Hamiltonian h = make_hamiltonian(g, smooth_hamiltonian(33));
  const ScalarField p = pressure(s.f.d, h.eos);
  const StressField t = stress_tensor(p, s.f.c, make_geometry(s), mead_connection(s.f.rho, h.hbar), h.gradient());
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) CHECK(max_diff(t(j, k), j == k ? p : ScalarField(g)) == 0.0);
}

TEST_CASE("Berry connection of a pure phase converges to hbar grad theta") {
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const Grid g = Grid::planar(n, n, two_pi, two_pi);
    SpinorField psi(g, 2);
    for (std::size_t c = 0; c < g.size(); ++c) {
      const auto x = g.center(c);
      const cplx ph = std::polar(1.0, std::sin(x[0]) + 0.5 * std::cos(x[1]));
      psi.at(c)[0] = ph * 0.6;
      psi.at(c)[1] = ph * cplx(0.0, 0.8);
    }
    const VectorField a = berry_connection(psi, 0.7);
    double m = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
      const auto x = g.center(c);
      m = std::max(m, std::abs(a[0][c] - 0.7 * std::cos(x[0])));
      m = std::max(m, std::abs(a[1][c] + 0.7 * 0.5 * std::sin(x[1])));
    }
    err.push_back(m);
  }
  CHECK(err[1] < err[0] / 12.0);
  CHECK(err[2] < err[1] / 12.0);
}

TEST_CASE("matrix bracket rejects mismatched sizes") {
  const Vec3 gb{0.0, 0.0, 1.0};
  const MatrixGrad a{Matrix(2), Matrix(2), Matrix(2)};
  const MatrixGrad b{Matrix(3), Matrix(3), Matrix(3)};
  CHECK_THROWS_WITH_AS(nambu_matrix(gb, a, b), doctest::Contains("shape-error"), Error);
}
