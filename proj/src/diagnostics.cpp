#include "qcf/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qcf/calculus.hpp"
#include "qcf/integrator.hpp"

namespace qcf {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

bool incompressible(const ModelContext& ctx) { return ctx.options().kind == ModelKind::qc_planar_incompressible; }

BracketGeometry geometry_of(const State& s) { return make_geometry(s); }

double kinetic_and_internal(const State& s, const Hamiltonian& h, bool with_internal, ScalarField& dens) {
  const Grid& g = s.grid();
  for (std::size_t c = 0; c < g.size(); ++c) {
    double u2 = 0.0;
    for (int d = 0; d < s.f.u.ncomp(); ++d) u2 += s.f.u[d][c] * s.f.u[d][c];
    const double dd = s.f.d[c];
    dens[c] = 0.5 * h.mass * dd * u2;
    if (with_internal && h.eos.active()) dens[c] += dd * h.eos.internal_energy(dd);
  }
  return 0.0;
}

// (grad c x gb)_i
VectorField c_cross_b(const ScalarField& c, const BracketGeometry& geo) {
  const Grid& g = c.grid();
  const VectorField gc = grad(c);
  VectorField out(g, 3);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    for (std::size_t q = 0; q < g.size(); ++q)
      out[i][q] = gc.at(j, q) * geo.gb.at(k, q) - gc.at(k, q) * geo.gb.at(j, q);
  }
  return out;
}

ScalarField frobenius(const MatrixField& rho) {
  ScalarField out(rho.grid());
  for (std::size_t c = 0; c < rho.cells(); ++c) {
    double s = 0.0;
    for (std::size_t q = 0; q < rho.stride(); ++q) s += std::norm(rho.at(c)[q]);
    out[c] = std::sqrt(s);
  }
  return out;
}

void require_pure(const State& s, const char* what) {
  if (s.mode != StateMode::pure_state) fail(ErrorKind::requires_pure_state, std::string(what) + " needs a psi field");
}

}  // namespace

double energy(const State& s, const ModelContext& ctx) {
  const Hamiltonian& h = ctx.ham();
  require_positive(s.f.d, "energy");
  const Grid& g = s.grid();
  const int n = s.hilbert_dim();
  const bool incomp = incompressible(ctx);
  ScalarField dens(g);
  kinetic_and_internal(s, h, !incomp, dens);
  const ScalarField c = bracket_c(s, ctx.options());
  const bool with_c = !c.values().empty();
  const BracketGeometry geo = geometry_of(s);
  const MatrixField& hm = ctx.h();
  if (s.mode == StateMode::density_matrix) {
    const MatrixField rt = scale(s.f.d, s.f.rho);
    MatrixField br;
    if (with_c) br = nambu_matrix_field(geo, grad_h(rt), ctx.grad_h());
    dispatch_dim(n, [&](auto N) {
      constexpr int NN = decltype(N)::value;
      for (std::size_t q = 0; q < g.size(); ++q) {
        dens[q] += kern::inner<NN>(rt.at(q), hm.at(q), n);
        if (with_c) {
          const double dd = s.f.d[q];
          dens[q] += h.hbar * c[q] / (dd * dd) * kern::inner_i<NN>(rt.at(q), br.at(q), n);
        }
      }
    });
    return integrate(dens);
  }
  const SpinorField& psi = s.f.psi;
  const auto gp = grad_psi(psi);
  const VectorField a = berry_connection(psi, gp, h.hbar);
  const MatrixVector& gh = ctx.grad_h();
  const int dim = g.dim();
  std::vector<cplx> dpsi(static_cast<std::size_t>(3 * n));
  for (std::size_t q = 0; q < g.size(); ++q) {
    const cplx* p = psi.at(q);
    const cplx* hq = hm.at(q);
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx row = 0.0;
      for (int j = 0; j < n; ++j) row += hq[i * n + j] * p[j];
      e += (std::conj(p[i]) * row).real();
    }
    dens[q] += s.f.d[q] * e;
    if (!with_c) continue;
    // (i hbar d_k + A_k) psi
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < n; ++i)
        dpsi[static_cast<std::size_t>(k * n + i)] =
            k < dim ? cplx(0.0, h.hbar) * gp[static_cast<std::size_t>(k)].at(q)[i] + a[k][q] * p[i] : cplx(0.0);
    cplx acc = 0.0;
    for (int i3 = 0; i3 < 3; ++i3) {
      const double w = geo.gb.at(i3, q);
      if (w == 0.0) continue;
      const int j = (i3 + 1) % 3, k = (i3 + 2) % 3;
      // w (d_j H X_k - d_k H X_j) psi
      for (int r = 0; r < n; ++r) {
        cplx row = 0.0;
        for (int cidx = 0; cidx < n; ++cidx) {
          if (j < dim) row += gh[static_cast<std::size_t>(j)].at(q)[r * n + cidx] * dpsi[static_cast<std::size_t>(k * n + cidx)];
          if (k < dim) row -= gh[static_cast<std::size_t>(k)].at(q)[r * n + cidx] * dpsi[static_cast<std::size_t>(j * n + cidx)];
        }
        acc += w * std::conj(p[r]) * row;
      }
    }
    dens[q] += c[q] * acc.real();
  }
  return integrate(dens);
}

double casimir_c1_trace(const State& s) {
  const MatrixField rho = s.density();
  ScalarField w = trace_real(rho);
  w *= s.f.d;
  return integrate(w);
}

double casimir_c1_purity(const State& s) {
  const ScalarField f = frobenius(s.density());
  ScalarField w(s.grid());
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = s.f.d[c] * f[c] * f[c];
  return integrate(w);
}

ScalarField lambda_n(const State& s, const ModelOptions& opt, int n) {
  if (n < 1 || n > 2) fail(ErrorKind::precondition, "lambda_n needs n in {1, 2}");
  require_positive(s.f.d, "lambda_n");
  const ScalarField c = bracket_c(s, opt);
  const VectorField dir = c_cross_b(c, make_geometry(s));
  ScalarField f = frobenius(s.density());
  for (int k = 0; k < n; ++k) {
    const VectorField gf = grad(f);
    ScalarField next(s.grid());
    for (std::size_t q = 0; q < next.size(); ++q) {
      double v = 0.0;
      for (int d = 0; d < s.grid().dim(); ++d) v += dir[d][q] * gf[d][q];
      next[q] = v / s.f.d[q];
    }
    f = std::move(next);
  }
  return f;
}

double casimir_c2(const State& s, const ModelOptions& opt, C2Kind kind) {
  const ScalarField c = bracket_c(s, opt);
  const bool planar = s.planar();
  const ScalarField b = planar ? c : s.full_b();
  ScalarField w(s.grid());
  ScalarField lam;
  if (kind == C2Kind::c_lambda1) lam = lambda_n(s, opt, 1);
  for (std::size_t q = 0; q < w.size(); ++q) {
    double phi = 0.0;
    switch (kind) {
      case C2Kind::bc: phi = planar ? c[q] : b[q] * c[q]; break;
      case C2Kind::b2: phi = b[q] * b[q]; break;
      case C2Kind::c_lambda1: phi = c[q] * lam[q]; break;
    }
    w[q] = s.f.d[q] * phi;
  }
  return integrate(w);
}

double cross_helicity(const State& s, double mass, double hbar) {
  require_pure(s, "cross_helicity");
  if (s.planar()) fail(ErrorKind::shape_error, "cross_helicity needs a 3D grid");
  const VectorField a = berry_connection(s.f.psi, hbar);
  const VectorField dir = c_cross_b(s.f.c, make_geometry(s));
  ScalarField w(s.grid());
  for (std::size_t q = 0; q < w.size(); ++q) {
    double v = 0.0;
    for (int d = 0; d < 3; ++d) v += (mass * s.f.u[d][q] - a[d][q]) * dir[d][q];
    w[q] = v;
  }
  return integrate(w);
}

ScalarField canonical_vorticity(const State& s, double mass, double hbar) {
  require_pure(s, "canonical_vorticity");
  VectorField p = berry_connection(s.f.psi, hbar);
  for (int d = 0; d < 2; ++d)
    for (std::size_t q = 0; q < p[d].size(); ++q) p[d][q] = mass * s.f.u[d][q] - p[d][q];
  return planar_curl(p);
}

PlanarCasimirs planar_casimirs(const State& s, const ModelContext& ctx) {
  if (!s.planar()) fail(ErrorKind::shape_error, "planar Casimirs need a 2D grid");
  PlanarCasimirs out;
  const ScalarField omega = canonical_vorticity(s, ctx.ham().mass, ctx.ham().hbar);
  const ScalarField theta = incompressible(ctx) ? s.f.d : s.f.c;
  ScalarField w = omega;
  w *= theta;
  out.omega = integrate(omega);
  out.omega_theta = integrate(w);
  ScalarField phi = s.f.d;
  phi *= s.f.d;
  out.d_phi = integrate(phi);
  return out;
}

Totals totals(const State& s, double mass) {
  Totals t;
  t.mass = integrate(s.f.d);
  const MatrixField rho = s.density();
  t.rho_tot = integrate(scale(s.f.d, rho)) * cplx(1.0 / t.mass);
  t.purity = inner_re(t.rho_tot, t.rho_tot);
  cplx tr = 0.0;
  for (int i = 0; i < t.rho_tot.n(); ++i) tr += t.rho_tot(i, i);
  t.trace_error = std::abs(tr - 1.0);
  for (int d = 0; d < s.f.u.ncomp(); ++d) {
    ScalarField m = s.f.u[d];
    m *= s.f.d;
    t.momentum[static_cast<std::size_t>(d)] = mass * integrate(m);
  }
  return t;
}

ScalarField sigma_expectation(const State& s, int k) {
  if (s.hilbert_dim() != 2) fail(ErrorKind::shape_error, "sigma_expectation needs n = 2");
  if (k < 0 || k > 2) fail(ErrorKind::precondition, "sigma index must be 0, 1 or 2");
  const Grid& g = s.grid();
  ScalarField out(g);
  const Matrix& sig = pauli()[k];
  if (s.mode == StateMode::pure_state) {
    for (std::size_t c = 0; c < g.size(); ++c) {
      const cplx* p = s.f.psi.at(c);
      cplx v = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) v += std::conj(p[i]) * sig(i, j) * p[j];
      out[c] = v.real();
    }
    return out;
  }
  for (std::size_t c = 0; c < g.size(); ++c) out[c] = kern::inner<2>(s.f.rho.at(c), sig.data(), 2);
  return out;
}

TracerLoop TracerLoop::circle(const Grid& g, std::array<double, 3> center, double radius, int k, int axis) {
  if (k < 3) fail(ErrorKind::precondition, "a loop needs at least 3 points");
  TracerLoop loop;
  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  for (int i = 0; i < k; ++i) {
    const double th = 2.0 * 3.14159265358979323846 * i / k;
    auto p = center;
    p[static_cast<std::size_t>(a1)] += radius * std::cos(th);
    p[static_cast<std::size_t>(a2)] += radius * std::sin(th);
    loop.points.push_back(wrap(g, p));
  }
  return loop;
}

namespace {

std::array<double, 3> min_image(const Grid& g, std::array<double, 3> a, std::array<double, 3> b) {
  std::array<double, 3> d{0.0, 0.0, 0.0};
  for (int k = 0; k < g.dim(); ++k) {
    const double l = g.length(k);
    double x = b[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)];
    x -= l * std::round(x / l);
    d[static_cast<std::size_t>(k)] = x;
  }
  return d;
}

}  // namespace

double line_integral(const Grid& g, const VectorField& w, const TracerLoop& loop) {
  const std::size_t k = loop.points.size();
  if (k < 3) fail(ErrorKind::degenerate_loop, "loop has fewer than 3 points");
  std::vector<std::array<double, 3>> vals(k);
  for (std::size_t i = 0; i < k; ++i) vals[i] = interpolate(w, loop.points[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = (i + 1) % k;
    const auto d = min_image(g, loop.points[i], loop.points[j]);
    const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    if (len <= 1e-14 * g.min_spacing()) {
      std::ostringstream os;
      os << "loop nodes " << i << " and " << j << " coincide";
      fail(ErrorKind::degenerate_loop, os.str());
    }
    for (int a = 0; a < 3; ++a)
      sum += 0.5 * (vals[i][static_cast<std::size_t>(a)] + vals[j][static_cast<std::size_t>(a)]) * d[static_cast<std::size_t>(a)];
  }
  return sum;
}

double circulation(const State& s, const TracerLoop& loop, double mass, double hbar) {
  require_pure(s, "circulation");
  VectorField w = berry_connection(s.f.psi, hbar);
  for (int d = 0; d < w.ncomp(); ++d)
    for (std::size_t q = 0; q < w[d].size(); ++q) w[d][q] = mass * s.f.u[d][q] - w[d][q];
  return line_integral(s.grid(), w, loop);
}

TracerLoop advect_loop(const TracerLoop& loop, const VectorField& u0, const VectorField& uh, const VectorField& u1,
                       double dt) {
  const Grid& g = u0.grid();
  TracerLoop out = loop;
  auto add = [](std::array<double, 3> p, std::array<double, 3> v, double s) {
    for (int a = 0; a < 3; ++a) p[static_cast<std::size_t>(a)] += s * v[static_cast<std::size_t>(a)];
    return p;
  };
  for (auto& p : out.points) {
    const auto k1 = interpolate(u0, p);
    const auto k2 = interpolate(uh, add(p, k1, 0.5 * dt));
    const auto k3 = interpolate(uh, add(p, k2, 0.5 * dt));
    const auto k4 = interpolate(u1, add(p, k3, dt));
    std::array<double, 3> q = p;
    for (int a = 0; a < 3; ++a) {
      const auto i = static_cast<std::size_t>(a);
      q[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    p = wrap(g, q);
  }
  return out;
}

TracerLoop advect_loop(const TracerLoop& loop, const std::array<const VectorField*, 4>& u, double dt) {
  for (const auto* f : u)
    if (!f) fail(ErrorKind::precondition, "advect_loop: missing stage velocity");
  const Grid& g = u[0]->grid();
  TracerLoop out = loop;
  for (auto& p : out.points) {
    std::array<double, 3> k[4], q = p;
    for (int s = 0; s < 4; ++s) {
      std::array<double, 3> x = p;
      const double cs = s == 0 ? 0.0 : (s == 3 ? dt : 0.5 * dt);
      if (s > 0)
        for (std::size_t a = 0; a < 3; ++a) x[a] += cs * k[s - 1][a];
      k[s] = interpolate(*u[static_cast<std::size_t>(s)], x);
    }
    for (std::size_t a = 0; a < 3; ++a) q[a] += dt / 6.0 * (k[0][a] + 2.0 * k[1][a] + 2.0 * k[2][a] + k[3][a]);
    p = wrap(g, q);
  }
  return out;
}

TracerLoop advect_loop(const TracerLoop& loop, const VectorField& u, double dt) { return advect_loop(loop, u, u, u, dt); }

DiagnosticsRecord diagnose(const State& s, const ModelContext& ctx, const std::vector<TracerLoop>& loops) {
  DiagnosticsRecord r;
  const Hamiltonian& h = ctx.ham();
  const ModelOptions& opt = ctx.options();
  const bool pure = s.mode == StateMode::pure_state;
  r.t = s.t;
  r.h = energy(s, ctx);
  const Totals tot = totals(s, h.mass);
  r.mass = tot.mass;
  r.momentum = tot.momentum;
  if (s.planar()) r.momentum[2] = nan;
  r.rho_tot = tot.rho_tot;
  r.purity = tot.purity;
  r.tr_rho_tot_err = tot.trace_error;
  r.c1_trace = casimir_c1_trace(s);
  r.c1_purity = casimir_c1_purity(s);
  const bool has_c = !bracket_c(s, opt).values().empty();
  if (has_c) {
    r.c2_bc = casimir_c2(s, opt, C2Kind::bc);
    r.c2_b2 = casimir_c2(s, opt, C2Kind::b2);
    r.c2_c_lambda1 = casimir_c2(s, opt, C2Kind::c_lambda1);
    r.lambda1_max = max_abs(lambda_n(s, opt, 1));
    r.lambda2_max = max_abs(lambda_n(s, opt, 2));
  } else {
    r.c2_bc = r.c2_b2 = r.c2_c_lambda1 = r.lambda1_max = r.lambda2_max = nan;
  }
  r.c3 = r.cp_omega = r.cp_omega_theta = r.cp_d_phi = nan;
  if (pure && !s.planar() && has_c) r.c3 = cross_helicity(s, h.mass, h.hbar);
  if (pure && s.planar()) {
    const PlanarCasimirs pc = planar_casimirs(s, ctx);
    r.cp_omega = pc.omega;
    r.cp_omega_theta = pc.omega_theta;
    r.c3 = pc.omega_theta;
    if (opt.kind == ModelKind::qc_planar_incompressible) r.cp_d_phi = pc.d_phi;
  }
  r.min_d = min_value(s.f.d);
  r.min_eig_rho = min_eigenvalue(s);
  r.herm_err = pure ? 0.0 : hermiticity_error(s.f.rho);
  r.norm_err = pure ? norm_error(s.f.psi) : nan;
  for (const auto& l : loops) r.loop_circulation.push_back(pure ? circulation(s, l, h.mass, h.hbar) : nan);
  return r;
}

}  // namespace qcf
