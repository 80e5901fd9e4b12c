#include <doctest.h>

#include <numbers>

#include "qcf/calculus.hpp"
#include "qcf/diagnostics.hpp"
#include "qcf/integrator.hpp"
#include "support.hpp"

using namespace qcf;
using namespace qcf::test;

namespace {

const double two_pi = 2.0 * std::numbers::pi;

// Central difference of the energy along the right-hand side.
double energy_rate(const State& s, const ModelContext& ctx) {
  const Rhs r = evaluate_rhs(s, ctx);
  const double eps = 1e-5;
  State a = s, b = s;
  a.f.axpy(eps, r.f);
  b.f.axpy(-eps, r.f);
  if (s.mode == StateMode::pure_state) {
    normalize_field(a.f.psi);
    normalize_field(b.f.psi);
  }
  return (energy(a, ctx) - energy(b, ctx)) / (2.0 * eps);
}

}  // namespace

TEST_CASE("energy of a quiescent state with V0 only") {
  const Grid g = Grid::planar(16, 16, two_pi, two_pi);
  StateSpec spec = for_grid(smooth_state(3), g);
  spec.u.components = {ScalarSpec::constant(0.0), ScalarSpec::constant(0.0)};
  spec.quantum.theta = ScalarSpec::constant(0.3);
  spec.quantum.phi = ScalarSpec::constant(0.0);
  const State s = make_state(g, 2, spec);
  HamiltonianSpec hs;
  hs.v0 = smooth(0.2, 0.5, 5);
  const Hamiltonian h = make_hamiltonian(g, hs);
  const ModelContext ctx(h, ModelOptions{ModelKind::qc_planar});
  ScalarField dv = s.f.d;
  dv *= h.v0;
  CHECK(energy(s, ctx) == doctest::Approx(integrate(dv)).epsilon(1e-13));
}

TEST_CASE("constant b gives the Ehrenfest energy") {
  const Grid g = Grid::cube(8, two_pi);
  StateSpec spec = for_grid(smooth_state(7), g);
  spec.b = ScalarSpec::constant(0.3);
  spec.b_slope = {0.0, 0.0, 0.0};
  const State s = make_state(g, 2, spec);
  const Hamiltonian h = make_hamiltonian(g, smooth_hamiltonian(9));
  const ModelContext ctx(h, ModelOptions{ModelKind::qc3d});
  ScalarField w(g);
  const MatrixField hm = h.assemble();
  for (std::size_t c = 0; c < g.size(); ++c) {
    double u2 = 0.0;
    for (int d = 0; d < 3; ++d) u2 += s.f.u[d][c] * s.f.u[d][c];
    const double dd = s.f.d[c];
    w[c] = 0.5 * h.mass * dd * u2 + dd * h.eos.internal_energy(dd) + dd * inner_re(s.f.rho.get(c), hm.get(c));
  }
  CHECK(energy(s, ctx) == doctest::Approx(integrate(w)).epsilon(1e-13));
}

TEST_CASE("energy is stationary along the right-hand side under refinement") {
  for (auto [kind, mode] : {std::pair{ModelKind::qc_planar, StateMode::density_matrix},
                            std::pair{ModelKind::qc_planar, StateMode::pure_state},
                            std::pair{ModelKind::qc_planar_incompressible, StateMode::pure_state},
                            std::pair{ModelKind::qc_planar_incompressible, StateMode::density_matrix}}) {
    std::vector<double> rate;
    for (int n : {16, 32, 64}) {
      const Grid g = Grid::planar(n, n, two_pi, two_pi);
      StateSpec spec = for_grid(smooth_state(11, mode, mode == StateMode::density_matrix), g);
      const bool incomp = kind == ModelKind::qc_planar_incompressible;
      spec.u.project = incomp;
      spec.with_c = !incomp;
      // the constant-coefficient projection conserves the D-weighted
      // energy only for uniform D
      if (incomp) spec.d = ScalarSpec::constant(1.3);
      const State s = make_state(g, 2, spec);
      const ModelContext ctx(make_hamiltonian(g, smooth_hamiltonian(13, !incomp)), ModelOptions{kind, 0.6});
      rate.push_back(std::abs(energy_rate(s, ctx)));
    }
    MESSAGE(to_string(kind) << " mode " << static_cast<int>(mode) << ": " << rate[0] << " " << rate[1] << " " << rate[2]);
    CHECK(rate[1] / rate[2] > 8.0);
  }
}

TEST_CASE("density and pure-state energies agree for pure states") {
  std::vector<double> diff;
  for (int n : {16, 32, 64}) {
    const Grid g = Grid::planar(n, n, two_pi, two_pi);
    const State s = make_state(g, 2, for_grid(smooth_state(17, StateMode::pure_state, false), g));
    State sd = s;
    sd.mode = StateMode::density_matrix;
    sd.f.rho = outer(s.f.psi);
    sd.f.psi = SpinorField();
    const ModelContext ctx(make_hamiltonian(g, smooth_hamiltonian(19)), ModelOptions{ModelKind::qc_planar});
    diff.push_back(std::abs(energy(s, ctx) - energy(sd, ctx)));
  }
  CHECK(diff[1] / diff[2] > 11.0);
}

TEST_CASE("C1, Lambda and totals on simple states") {
  const Grid g = Grid::planar(16, 16, two_pi, two_pi);
  StateSpec spec = for_grid(smooth_state(23, StateMode::density_matrix, false), g);
  const State s = make_state(g, 2, spec);
  const ModelOptions opt{ModelKind::qc_planar};
  CHECK(casimir_c1_trace(s) == doctest::Approx(integrate(s.f.d)).epsilon(1e-13));
  CHECK(casimir_c1_purity(s) == doctest::Approx(integrate(s.f.d)).epsilon(1e-13));
  CHECK(max_abs(lambda_n(s, opt, 1)) <= 1e-12);
  CHECK(max_abs(lambda_n(s, opt, 2)) <= 1e-12);
  CHECK_THROWS_AS(lambda_n(s, opt, 3), Error);

  StateSpec up;
  up.u.components = {ScalarSpec::constant(0.0), ScalarSpec::constant(0.0)};
  const Totals t = totals(make_state(g, 2, up), 1.0);
  CHECK(t.purity == doctest::Approx(1.0));
  CHECK(std::abs(t.rho_tot(0, 0) - 1.0) <= 1e-14);
  CHECK(t.trace_error <= 1e-14);

  // Orthogonal pure states on the two halves of the box
  State half = make_state(g, 2, up);
  for (std::size_t c = 0; c < g.size(); ++c)
    if (g.coords(c)[0] >= 8) half.f.rho.set(c, Matrix::diagonal(std::vector<double>{0.0, 1.0}));
  CHECK(totals(half, 1.0).purity == doctest::Approx(0.5));
  const ScalarField sz = sigma_expectation(half, 2);
  CHECK(sz[g.index(0, 0)] == 1.0);
  CHECK(sz[g.index(9, 0)] == -1.0);
}

TEST_CASE("mixed states have nonzero Lambda") {
  const Grid g = Grid::planar(16, 16, two_pi, two_pi);
  const State s = make_state(g, 2, for_grid(smooth_state(29), g));
  CHECK(max_abs(lambda_n(s, ModelOptions{}, 1)) > 1e-3);
}

TEST_CASE("cross helicity") {
  const Grid g = Grid::cube(8, two_pi);
  StateSpec spec = for_grid(smooth_state(31, StateMode::pure_state, false), g);
  spec.c = ScalarSpec::constant(1.0);
  CHECK(std::abs(cross_helicity(make_state(g, 2, spec), 1.0, 1.0)) <= 1e-12);
  spec.c = smooth(1.0, 0.3, 3);
  spec.quantum.phi = ScalarSpec::constant(0.0);
  // psi real and u = grad(phi) with constant b: integrand vanishes
  spec.b = ScalarSpec::constant(0.0);
  spec.b_slope = {0.0, 0.0, 0.0};
  CHECK(std::abs(cross_helicity(make_state(g, 2, spec), 1.0, 1.0)) <= 1e-12);
  CHECK_THROWS_WITH_AS(cross_helicity(make_state(g, 2, for_grid(smooth_state(31), g)), 1.0, 1.0),
                       doctest::Contains("requires-pure-state"), Error);
}

TEST_CASE("circulation") {
  const Grid g = Grid::planar(64, 64, two_pi, two_pi);
  StateSpec spec;
  spec.mode = StateMode::pure_state;
  spec.u.components = {ScalarSpec::constant(0.0), ScalarSpec::constant(0.0)};
  spec.quantum.theta = smooth(1.0, 0.5, 3);
  const State quiet = make_state(g, 2, spec);
  const TracerLoop loop = TracerLoop::circle(g, {3.0, 3.0, 0.0}, 1.2, 64);
  CHECK(std::abs(circulation(quiet, loop, 1.0, 1.0)) <= 1e-12);

  // closed-loop integral of a gradient: quadrature error only
  ScalarSpec f = ScalarSpec::constant(0.0);
  f.add(1.0, {1, 1, 0}, 0.3);
  std::vector<double> err;
  for (int k : {32, 64, 128}) {
    const VectorField w = grad(make_scalar(g, f));
    err.push_back(std::abs(line_integral(g, w, TracerLoop::circle(g, {3.0, 3.0, 0.0}, 1.2, k))));
  }
  CHECK(err[2] <= 1e-3);

  TracerLoop bad = loop;
  bad.points[5] = bad.points[4];
  CHECK_THROWS_WITH_AS(circulation(quiet, bad, 1.0, 1.0), doctest::Contains("degenerate-loop"), Error);
}

TEST_CASE("loop advection in a uniform flow is a translation") {
  const Grid g = Grid::planar(16, 16, two_pi, two_pi);
  VectorField u(g);
  u[0] = ScalarField(g, 0.5);
  u[1] = ScalarField(g, -0.25);
  const TracerLoop loop = TracerLoop::circle(g, {3.0, 3.0, 0.0}, 1.0, 32);
  const TracerLoop moved = advect_loop(loop, u, 0.4);
  for (std::size_t i = 0; i < loop.points.size(); ++i) {
    CHECK(moved.points[i][0] == doctest::Approx(loop.points[i][0] + 0.2));
    CHECK(moved.points[i][1] == doctest::Approx(loop.points[i][1] - 0.1));
  }
}
