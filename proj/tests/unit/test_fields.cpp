#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qcf/calculus.hpp"
#include "qcf/poisson.hpp"

using namespace qcf;

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

double fitted_order(const std::vector<int>& n, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(static_cast<double>(n[i])), y = std::log(err[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

TEST_CASE("grid validation and indexing") {
  CHECK_THROWS_AS(Grid(4, {8, 8, 8}, {1, 1, 1}), Error);
  CHECK_THROWS_AS(Grid::planar(4, 8, 1, 1), Error);
  CHECK_THROWS_AS(Grid::planar(8, 8, 0.0, 1), Error);
  const Grid g = Grid::cube(8, 2.0);
  CHECK(g.size() == 512);
  CHECK(g.volume() == doctest::Approx(8.0));
  const auto c = g.coords(g.index(3, 5, 7));
  CHECK(c == std::array<int, 3>{3, 5, 7});
  CHECK(g.shifted(g.index(7, 0, 0), 0, 1) == g.index(0, 0, 0));
  CHECK(g.shifted(g.index(0, 0, 0), 2, -1) == g.index(0, 0, 7));
  const Grid p = Grid::planar(8, 16, 1.0, 2.0);
  CHECK(p.n(2) == 1);
  CHECK(p.cell_volume() == doctest::Approx(1.0 / 64.0));
}

TEST_CASE("gradient of a constant is exactly zero") {
  const Grid g = Grid::cube(8, 1.0);
  const VectorField v = grad(ScalarField(g, 3.7));
  for (int d = 0; d < 3; ++d) CHECK(max_abs(v[d]) == 0.0);
  CHECK(max_abs(div(v)) == 0.0);
  const MatrixField m = constant_matrix_field(g, pauli()[1]);
  for (const auto& dm : grad_h(m)) CHECK(max_abs(dm) == 0.0);
}

TEST_CASE("fourth-order gradient on refining grids") {
  std::vector<int> ns{16, 32, 64};
  std::vector<double> err;
  const double L = 3.0;
  for (int n : ns) {
    const Grid g = Grid::planar(n, n, L, L);
    const auto f = sample(g, [&](double x, double, double) { return std::sin(two_pi * x / L); });
    const auto df = grad(f);
    const auto ex = sample(g, [&](double x, double, double) { return two_pi / L * std::cos(two_pi * x / L); });
    err.push_back(max_abs(df[0] - ex));
    CHECK(max_abs(df[1]) == 0.0);
  }
  CHECK(fitted_order(ns, err) > 3.8);
}

TEST_CASE("grad then div converges to the Laplacian at fourth order") {
  std::vector<int> ns{16, 32, 64};
  std::vector<double> err;
  for (int n : ns) {
    const Grid g = Grid::planar(n, n, 1.0, 1.0);
    const auto f = sample(g, [](double x, double y, double) { return std::sin(two_pi * x) * std::sin(two_pi * y); });
    auto ex = f;
    ex *= -2.0 * two_pi * two_pi;
    err.push_back(max_abs(div(grad(f)) - ex));
  }
  CHECK(fitted_order(ns, err) > 3.8);
}

TEST_CASE("curl of a gradient vanishes to roundoff") {
  const Grid g = Grid::cube(16, 1.0);
  const auto f = sample(g, [](double x, double y, double z) {
    return std::sin(two_pi * x) * std::cos(two_pi * 2 * y) + std::exp(std::sin(two_pi * z) * std::cos(two_pi * x));
  });
  const auto gf = grad(f);
  const auto c = curl(gf);
  double gmax = 0;
  for (int d = 0; d < 3; ++d) gmax = std::max(gmax, max_abs(gf[d]));
  for (int d = 0; d < 3; ++d) CHECK(max_abs(c[d]) <= 1e-11 * gmax);
  const Grid p = Grid::planar(8, 8, 1, 1);
  CHECK_THROWS_AS(curl(VectorField(p)), Error);
  CHECK_THROWS_AS(planar_curl(VectorField(g)), Error);
}

TEST_CASE("discrete integration by parts") {
  const Grid g = Grid::planar(32, 24, 1.0, 1.5);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  ScalarField f(g);
  VectorField v(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    f[c] = nd(rng);
    v[0][c] = nd(rng);
    v[1][c] = nd(rng);
  }
  const auto gf = grad(f);
  const double lhs = integrate(f * div(v));
  const double rhs = integrate(gf[0] * v[0]) + integrate(gf[1] * v[1]);
  CHECK(std::abs(lhs + rhs) <= 1e-11 * (std::abs(lhs) + 1.0) * 100);
}

TEST_CASE("integration") {
  const Grid g = Grid::cube(8, 2.0);
  CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(8.0));
  const auto s = sample(g, [](double x, double, double) { return std::sin(two_pi * x / 2.0); });
  CHECK(std::abs(integrate(s)) <= 1e-12 * 8.0);
}

TEST_CASE("gaussian bump mass converges") {
  // periodized gaussian: the image sum integrates to 2 pi s^2 over one cell
  const double s = 0.12, L = 1.0;
  std::vector<int> ns{8, 16, 32};
  std::vector<double> err;
  for (int n : ns) {
    const Grid g = Grid::planar(n, n, L, L);
    const auto f = sample(g, [&](double x, double y, double) {
      double acc = 0;
      for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) {
          const double dx = x - 0.5 + a * L, dy = y - 0.5 + b * L;
          acc += std::exp(-(dx * dx + dy * dy) / (2 * s * s));
        }
      return acc;
    });
    err.push_back(std::abs(integrate(f) - two_pi * s * s));
  }
  CHECK(err.back() < 1e-8);
  CHECK(err[1] < err[0]);
}

TEST_CASE("interpolation") {
  const Grid g = Grid::planar(8, 8, 1.0, 1.0);
  const auto lin = sample(g, [](double x, double y, double) { return 2.0 * x - 3.0 * y; });
  CHECK(interpolate(lin, g.center(g.index(3, 4))) == lin[g.index(3, 4)]);
  CHECK(interpolate(lin, {0.41, 0.52, 0.0}) == doctest::Approx(2 * 0.41 - 3 * 0.52).epsilon(1e-13));
  std::vector<int> ns{16, 32, 64};
  std::vector<double> err;
  for (int n : ns) {
    const Grid h = Grid::planar(n, n, 1.0, 1.0);
    const auto f = sample(h, [](double x, double y, double) { return std::sin(two_pi * x) * std::cos(two_pi * y); });
    double e = 0;
    for (double x : {0.1234, 0.777, 0.5}) e = std::max(e, std::abs(interpolate(f, {x, 0.313, 0}) - std::sin(two_pi * x) * std::cos(two_pi * 0.313)));
    err.push_back(e);
  }
  CHECK(fitted_order(ns, err) > 1.8);
  // periodic wrap
  const auto f3 = sample(Grid::cube(8, 1.0), [](double x, double y, double z) { return x + 0 * y + 0 * z; });
  CHECK(interpolate(f3, {1.3, 2.2, -0.7}) == doctest::Approx(interpolate(f3, {0.3, 0.2, 0.3})));
}

TEST_CASE("translation covariance is bitwise") {
  const Grid g = Grid::cube(8, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-1, 1);
  ScalarField f(g);
  for (auto& x : f.values()) x = ud(rng);
  for (int axis = 0; axis < 3; ++axis) {
    const auto a = shift(derivative(f, axis), 1, 1);
    const auto b = derivative(shift(f, 1, 1), axis);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  }
}

TEST_CASE("poisson solve") {
  const Grid g = Grid::planar(32, 32, 2.0, 2.0);
  CHECK(max_abs(poisson_solve(ScalarField(g))) == 0.0);
  const auto rhs = sample(g, [](double x, double, double) { return std::sin(two_pi * x / 2.0); });
  auto expected = rhs;
  expected *= -(2.0 / two_pi) * (2.0 / two_pi);
  CHECK(max_abs(poisson_solve(rhs) - expected) < 1e-14);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  ScalarField r(g);
  for (auto& x : r.values()) x = nd(rng);
  double mean = 0;
  for (double x : r.values()) mean += x;
  mean /= static_cast<double>(r.size());
  for (auto& x : r.values()) x -= mean;
  const auto phi = poisson_solve(r);
  CHECK(max_abs(apply_laplacian(phi, LaplacianSymbol::spectral) - r) <= 1e-10);

  ScalarField bad(g, 1.0);
  try {
    poisson_solve(bad);
    FAIL("expected incompatible-rhs");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::incompatible_rhs);
  }
}

TEST_CASE("projection leaves a discretely divergence-free field") {
  for (const Grid& g : {Grid::planar(32, 24, 1.0, 1.3), Grid::cube(16, 1.0)}) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    VectorField v(g);
    for (int d = 0; d < g.dim(); ++d)
      for (auto& x : v[d].values()) x = nd(rng);
    const auto p = project_divergence_free(v);
    CHECK(max_abs(div(p)) <= 1e-10);
  }
}
