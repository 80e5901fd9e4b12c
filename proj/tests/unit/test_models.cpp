#include <doctest.h>

#include <fstream>
#include <numbers>
#include <sstream>

#include "qcf/calculus.hpp"
#include "support.hpp"

using namespace qcf;
using namespace qcf::test;

namespace {

const double two_pi = 2.0 * std::numbers::pi;

State state3d(const Grid& g, std::uint64_t seed, StateMode mode = StateMode::density_matrix) {
  return make_state(g, 2, for_grid(smooth_state(seed, mode, mode == StateMode::density_matrix), g));
}

double max_trace(const MatrixField& m) {
  double t = 0.0;
  for (std::size_t c = 0; c < m.cells(); ++c) {
    cplx s = 0.0;
    for (int i = 0; i < m.n(); ++i) s += m.at(c)[i * m.n() + i];
    t = std::max(t, std::abs(s));
  }
  return t;
}

}  // namespace

TEST_CASE("constant b without pressure reduces the 3D model to Ehrenfest") {
  const Grid g = Grid::cube(12, two_pi);
  StateSpec spec = for_grid(smooth_state(3), g);
  spec.b = ScalarSpec::constant(0.4);
  spec.b_slope = {0.0, 0.0, 0.0};
  const State s = make_state(g, 2, spec);
  const Hamiltonian h = make_hamiltonian(g, smooth_hamiltonian(5, false));
  const Rhs qc = rhs_qc3d(s, h);
  const Rhs eh = rhs_ehrenfest(s, h);
  CHECK(max_diff(qc.f.d, eh.f.d) <= 1e-12);
  CHECK(max_diff_u(qc.f.u, eh.f.u) <= 1e-12);
  CHECK(max_diff(qc.f.rho, eh.f.rho) <= 1e-12);
  CHECK(max_diff(qc.f.b, eh.f.b) <= 1e-12);
  CHECK(max_diff(qc.f.c, eh.f.c) <= 1e-12);
}

TEST_CASE("quantum right-hand sides are traceless and Hermitian") {
  const Grid g = Grid::cube(12, two_pi);
  const State s = state3d(g, 11);
  const Hamiltonian h = make_hamiltonian(g, smooth_hamiltonian(7));
  for (const Rhs& r : {rhs_qc3d(s, h), rhs_qc3d_stress_form(s, h), rhs_ehrenfest(s, h)}) {
    CHECK(max_trace(r.f.rho) <= 1e-11);
    CHECK(hermiticity_error(r.f.rho) <= 1e-11);
  }
  const Grid p = Grid::planar(16, 16, two_pi, two_pi);
  const State sp = make_state(p, 2, for_grid(smooth_state(13), p));
  const Rhs r = rhs_qc_planar(sp, make_hamiltonian(p, smooth_hamiltonian(9)));
  CHECK(max_trace(r.f.rho) <= 1e-11);
  CHECK(hermiticity_error(r.f.rho) <= 1e-11);
}

TEST_CASE("spatially constant couplings decouple the fluid") {
  const Grid g = Grid::cube(12, two_pi);
  const State s = state3d(g, 17);
  HamiltonianSpec hs = smooth_hamiltonian(19);
  for (auto& c : hs.couplings) c.v = ScalarSpec::constant(c.v.offset);
  HamiltonianSpec classical = hs;
  classical.couplings.clear();
  const Rhs qc = rhs_qc3d(s, make_hamiltonian(g, hs));
  const Rhs cl = rhs_ehrenfest(s, make_hamiltonian(g, classical));
  CHECK(max_diff(qc.f.d, cl.f.d) <= 1e-12);
  CHECK(max_diff_u(qc.f.u, cl.f.u) <= 1e-12);
  // quantum sector: advection plus a commutator with the constant H
  MatrixField adv = advect(s.f.u, grad_h(s.f.rho));
  adv *= -1.0;
  const Hamiltonian h = make_hamiltonian(g, hs);
  const MatrixField hm = h.assemble();
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Matrix expect = commutator(hm.get(c), s.f.rho.get(c)) * cplx(0.0, -1.0 / h.hbar);
    for (int q = 0; q < 4; ++q) adv.at(c)[q] += expect.data()[q];
  }
  CHECK(max_diff(qc.f.rho, adv) <= 1e-12);
}

TEST_CASE("constant unitary conjugation is a symmetry") {
  const Grid g = Grid::cube(10, two_pi);
  const State s = state3d(g, 23);
  const Hamiltonian h = make_hamiltonian(g, smooth_hamiltonian(29));
  const Matrix u = unitary_propagator(pauli()[1], -std::numbers::pi / 4.0);  // exp(i sigma_y pi/4)
  State su = s;
  for (std::size_t c = 0; c < g.size(); ++c) su.f.rho.set(c, u * s.f.rho.get(c) * u.adjoint());
  const Rhs a = rhs_qc3d(s, h);
  const Rhs b = rhs_qc3d(su, h.conjugated(u));
  CHECK(max_diff(a.f.d, b.f.d) <= 1e-12);
  CHECK(max_diff_u(a.f.u, b.f.u) <= 1e-12);
  CHECK(max_diff(a.f.b, b.f.b) <= 1e-12);
  MatrixField rot(g, 2);
  for (std::size_t c = 0; c < g.size(); ++c) rot.set(c, u * a.f.rho.get(c) * u.adjoint());
  CHECK(max_diff(rot, b.f.rho) <= 1e-12);
}

TEST_CASE("constant rho and b: both 3D forms give the classical force") {
  const Grid g = Grid::cube(12, two_pi);
  StateSpec spec = for_grid(smooth_state(31), g);
  spec.quantum.theta = ScalarSpec::constant(0.7);
  spec.quantum.phi = ScalarSpec::constant(0.3);
  spec.quantum.radius = ScalarSpec::constant(0.6);
  spec.b = ScalarSpec::constant(1.0);
  spec.b_slope = {0.0, 0.0, 0.0};
  spec.u.components = {ScalarSpec::constant(0.0), ScalarSpec::constant(0.0), ScalarSpec::constant(0.0)};
  const State s = make_state(g, 2, spec);
  HamiltonianSpec hs = smooth_hamiltonian(37);
  for (auto& c : hs.couplings) c.v = ScalarSpec::constant(c.v.offset);
  const Hamiltonian h = make_hamiltonian(g, hs);
  const Rhs a = rhs_qc3d(s, h);
  const Rhs b = rhs_qc3d_stress_form(s, h);
  const VectorField gp = grad(pressure(s.f.d, h.eos));
  const VectorField gv = grad(h.v0);
  VectorField expect(g);
  for (int l = 0; l < 3; ++l)
    for (std::size_t c = 0; c < g.size(); ++c) expect[l][c] = (-gp[l][c] / s.f.d[c] - gv[l][c]) / h.mass;
  CHECK(max_diff_u(a.f.u, expect) <= 1e-12);
  CHECK(max_diff_u(b.f.u, expect) <= 1e-12);
}

TEST_CASE("planar model with c~ = 0 is the planar Ehrenfest model") {
  const Grid g = Grid::planar(16, 16, two_pi, two_pi);
  StateSpec spec = for_grid(smooth_state(41), g);
  spec.c = ScalarSpec::constant(0.0);
  const State s = make_state(g, 2, spec);
  const Hamiltonian h = make_hamiltonian(g, smooth_hamiltonian(43));
  const Rhs a = rhs_qc_planar(s, h);
  const Rhs b = rhs_ehrenfest(s, h);
  CHECK(max_diff(a.f.d, b.f.d) == 0.0);
  CHECK(max_diff_u(a.f.u, b.f.u) == 0.0);
  CHECK(max_diff(a.f.rho, b.f.rho) == 0.0);
}

TEST_CASE("pure-state planar generator is Hermitian") {
  const Grid g = Grid::planar(16, 16, two_pi, two_pi);
  const State s = make_state(g, 2, for_grid(smooth_state(47, StateMode::pure_state, false), g));
  const Hamiltonian h = make_hamiltonian(g, smooth_hamiltonian(53));
  const Rhs r = rhs_pure_state_planar(s, h);
  const auto gp = grad_psi(s.f.psi);
  double worst = 0.0, tangent = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const cplx* p = s.f.psi.at(c);
    // advection part and its normal component, which the RHS removes
    std::array<cplx, 2> adv{};
    double normal = 0.0, nn = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int d = 0; d < 2; ++d) adv[static_cast<std::size_t>(i)] -= s.f.u[d][c] * gp[static_cast<std::size_t>(d)].at(c)[i];
      normal += std::real(std::conj(p[i]) * adv[static_cast<std::size_t>(i)]);
      nn += std::norm(p[i]);
    }
    cplx acc = 0.0, dot = 0.0;
    for (int i = 0; i < 2; ++i) {
      // -i K psi / hbar alone
      const cplx v = r.f.psi.at(c)[i] - adv[static_cast<std::size_t>(i)] + normal / nn * p[i];
      acc += std::conj(p[i]) * v;
      dot += std::conj(p[i]) * r.f.psi.at(c)[i];
    }
    worst = std::max(worst, std::abs(acc.real()));
    tangent = std::max(tangent, std::abs(dot.real()));
  }
  CHECK(worst <= 1e-12);
  CHECK(tangent <= 1e-12);
}

TEST_CASE("pure-state planar form agrees with the density form under refinement") {
  std::vector<double> eu, er;
  for (int n : {16, 32, 64}) {
    const Grid g = Grid::planar(n, n, two_pi, two_pi);
    const State s = make_state(g, 2, for_grid(smooth_state(59, StateMode::pure_state, false), g));
    const Hamiltonian h = make_hamiltonian(g, smooth_hamiltonian(61));
    State sd = s;
    sd.mode = StateMode::density_matrix;
    sd.f.rho = outer(s.f.psi);
    sd.f.psi = SpinorField();
    const Rhs pure = rhs_pure_state_planar(s, h);
    const Rhs dens = rhs_qc_planar(sd, h);
    eu.push_back(max_diff_u(pure.f.u, dens.f.u));
    er.push_back(max_diff(density_rate(s, pure), dens.f.rho));
    MESSAGE("N=" << n << " du diff " << eu.back() << " drho diff " << er.back());
  }
  CHECK(eu[1] / eu[2] > 11.0);
  CHECK(er[1] / er[2] > 11.0);
  CHECK(eu[2] < 2e-4);
}

TEST_CASE("incompressible model: projected acceleration and uniform-D Ehrenfest reduction") {
  const Grid g = Grid::planar(32, 32, two_pi, two_pi);
  StateSpec spec = for_grid(smooth_state(67), g);
  spec.u.project = true;
  spec.with_c = false;
  const State s = make_state(g, 2, spec);
  const Hamiltonian h = make_hamiltonian(g, smooth_hamiltonian(71, false));
  ModelOptions opt;
  opt.beta = 0.5;
  const Rhs r = rhs_qc_planar_incompressible(s, h, opt);
  CHECK(max_abs(div(r.f.u)) <= 1e-10);
  CHECK(max_trace(r.f.rho) <= 1e-11);

  State bad = s;
  bad.f.u[0] = make_scalar(g, smooth(0.0, 0.3, 5));
  CHECK_THROWS_WITH_AS(rhs_qc_planar_incompressible(bad, h, opt), doctest::Contains("precondition"), Error);
}

TEST_CASE("dephasing law: trivial cases vanish") {
  const Grid g = Grid::planar(16, 16, two_pi, two_pi);
  StateSpec spec = for_grid(smooth_state(73), g);
  HamiltonianSpec hs;
  hs.v0 = smooth(0.0, 0.5, 3);
  hs.couplings = {{pauli()[2], ScalarSpec::constant(0.3)}};
  const State s = make_state(g, 2, spec);
  CHECK(max_abs(dephasing_local_law_residual(s, make_hamiltonian(g, hs))) <= 1e-12);
  // 3D, constant b and c: both sides vanish
  const Grid g3 = Grid::cube(8, two_pi);
  StateSpec s3 = for_grid(smooth_state(75), g3);
  s3.b = ScalarSpec::constant(0.2);
  s3.b_slope = {0.0, 0.0, 0.0};
  s3.c = ScalarSpec::constant(0.8);
  hs.couplings[0].v = smooth(0.0, 0.5, 4);
  CHECK(max_abs(dephasing_local_law_residual(make_state(g3, 2, s3), make_hamiltonian(g3, hs))) <= 1e-12);
  HamiltonianSpec two = smooth_hamiltonian(3);
  CHECK_THROWS_WITH_AS(dephasing_local_law_residual(s, make_hamiltonian(g, two)),
                       doctest::Contains("unsupported-model"), Error);
}

TEST_CASE("dephasing law residual converges for generic fields") {
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const Grid g = Grid::planar(n, n, two_pi, two_pi);
    const State s = make_state(g, 2, for_grid(smooth_state(77, StateMode::density_matrix, false), g));
    HamiltonianSpec hs;
    hs.v0 = smooth(0.0, 0.5, 3);
    hs.couplings = {{pauli()[2], smooth(0.0, 0.5, 4)}};
    err.push_back(max_abs(dephasing_local_law_residual(s, make_hamiltonian(g, hs))));
    MESSAGE("N=" << n << " residual " << err.back());
  }
  CHECK(std::log2(err[1] / err[2]) >= 3.5);
}

TEST_CASE("model errors") {
  const Grid p = Grid::planar(16, 16, two_pi, two_pi);
  const Grid g = Grid::cube(8, two_pi);
  const State sp = make_state(p, 2, for_grid(smooth_state(79), p));
  const Hamiltonian hp = make_hamiltonian(p, smooth_hamiltonian(83));
  CHECK_THROWS_WITH_AS(rhs_qc3d(sp, hp), doctest::Contains("shape-error"), Error);

  State pure = make_state(p, 2, for_grid(smooth_state(79, StateMode::pure_state, false), p));
  pure.f.c *= -1.0;
  CHECK_THROWS_WITH_AS(rhs_pure_state_planar(pure, hp), doctest::Contains("log-domain-error"), Error);
  CHECK_THROWS_WITH_AS(rhs_pure_state_planar(sp, hp), doctest::Contains("requires-pure-state"), Error);

  const State s3 = make_state(g, 2, for_grid(smooth_state(89, StateMode::pure_state, false), g));
  const Hamiltonian h3 = make_hamiltonian(g, smooth_hamiltonian(97));
  CHECK_THROWS_WITH_AS(rhs_qc3d_stress_form(s3, h3), doctest::Contains("unsupported-model"), Error);

  State vac = sp;
  vac.f.d[5] = -0.1;
  CHECK_THROWS_WITH_AS(rhs_qc_planar(vac, hp), doctest::Contains("vacuum-error"), Error);

  HamiltonianSpec three = smooth_hamiltonian(3);
  three.n = 3;
  three.couplings.clear();
  CHECK_THROWS_WITH_AS(rhs_qc_planar(sp, make_hamiltonian(p, three)), doctest::Contains("shape-error"), Error);
}

TEST_CASE("floor activations are counted") {
  const Grid p = Grid::planar(16, 16, two_pi, two_pi);
  const State s = make_state(p, 2, for_grid(smooth_state(101), p));
  ModelOptions opt;
  opt.d_floor = 1.0;
  const Rhs r = rhs_qc_planar(s, make_hamiltonian(p, smooth_hamiltonian(103)), opt);
  std::size_t below = 0;
  for (std::size_t c = 0; c < p.size(); ++c) below += s.f.d[c] < 1.0;
  CHECK(below > 0);
  CHECK(r.floor_hits == below);
}

TEST_CASE("model assembly uses first-order gradients only") {
  for (const char* file : {"/src/models.cpp", "/src/brackets.cpp"}) {
    std::ifstream in(std::string(QCF_SOURCE_DIR) + file);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    CHECK(text.find("apply_laplacian") == std::string::npos);
    CHECK(text.find("poisson_solve") == std::string::npos);
    CHECK(text.find("second_derivative") == std::string::npos);
  }
}
