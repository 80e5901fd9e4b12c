#include "qcf/models.hpp"

#include <cmath>
#include <sstream>

#include "qcf/calculus.hpp"
#include "qcf/poisson.hpp"

namespace qcf {

namespace {

const cplx I(0.0, 1.0);

void require_dim(const State& s, int dim, const char* model) {
  if (s.grid().dim() != dim)
    fail(ErrorKind::shape_error, std::string(model) + " needs a " + std::to_string(dim) + "D grid, got " + s.grid().describe());
}

void require_n(const State& s, const ModelContext& ctx) {
  if (s.hilbert_dim() != ctx.ham().n)
    fail(ErrorKind::shape_error, "state Hilbert dimension " + std::to_string(s.hilbert_dim()) +
                                     " differs from the Hamiltonian's " + std::to_string(ctx.ham().n));
  require_same_grid(s.grid(), ctx.h().grid(), "state vs Hamiltonian");
}

// D with the floor applied; counts activations.
ScalarField floored(const ScalarField& d, double d_floor, std::size_t& hits) {
  ScalarField out = d;
  for (auto& x : out.values())
    if (x < d_floor) {
      x = d_floor;
      ++hits;
    }
  return out;
}

// (u . grad) u_l for every component.
VectorField velocity_advection(const VectorField& u) {
  VectorField out(u.grid(), u.ncomp());
  for (int l = 0; l < u.ncomp(); ++l) out[l] = advect(u, grad(u[l]));
  return out;
}

// Classical pieces shared by every model: dD = -div(D u), db, dc advected,
// du initialised with -u.grad u.
void classical_part(const State& s, const BracketGeometry* geo, const ScalarField* advected_c, Fields& r) {
  const Grid& g = s.grid();
  VectorField du = velocity_advection(s.f.u);
  du *= -1.0;
  r.u = std::move(du);
  VectorField flux(g);
  for (int d = 0; d < g.dim(); ++d) flux[d] = s.f.d * s.f.u[d];
  r.d = div(flux);
  r.d *= -1.0;
  if (!s.f.b.values().empty() && geo) {
    r.b = advect(s.f.u, geo->gb);
    r.b *= -1.0;
  }
  const ScalarField& c = advected_c ? *advected_c : s.f.c;
  if (!c.values().empty()) {
    r.c = advect(s.f.u, grad(c));
    r.c *= -1.0;
  }
}

// a_l = -<rho, d_l H>/M - d_l p/(M D)   (returned, caller adds advection)
VectorField mean_force(const MatrixField& rho, const ScalarField& d, const ScalarField* p, const ModelContext& ctx) {
  const Grid& g = rho.grid();
  const int n = rho.n();
  const double inv_m = 1.0 / ctx.ham().mass;
  VectorField a(g);
  VectorField gp;
  if (p) gp = grad(*p);
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    for (int l = 0; l < g.dim(); ++l) {
      const MatrixField& hl = ctx.grad_h()[static_cast<std::size_t>(l)];
      for (std::size_t c = 0; c < g.size(); ++c) {
        double v = -kern::inner<NN>(rho.at(c), hl.at(c), n) * inv_m;
        if (p) v -= gp[l][c] * inv_m / d[c];
        a[l][c] = v;
      }
    }
  });
  return a;
}

struct QcTerms {
  VectorField force;  // f_l, to be divided by M D
  MatrixField k;      // effective Hermitian generator
};

// Backreaction force and the effective generator
// K = H + (i hbar / D)(c{rho,H} + c{H,rho} - 1/2 [{c,H}, rho]).
QcTerms qc_terms(const MatrixField& rho, const MatrixVector& grho, const ScalarField& c, const ScalarField& d_eff,
                 const BracketGeometry& geo, const ModelContext& ctx, bool with_force) {
  const Grid& g = rho.grid();
  const int n = rho.n();
  const int dim = g.dim();
  const double hbar = ctx.ham().hbar;
  const bool rev = ctx.options().mutation == Mutation::nambu_order;
  const MatrixVector& gh = ctx.grad_h();
  const MatrixField crho = scale(c, rho);
  const MatrixVector gcrho = grad_h(crho);
  const VectorField gc = grad(c);

  // {H, rho} = -{rho, H}^dag for Hermitian rho and H, in either product order
  const MatrixField b_rho_h = nambu_matrix_field(geo, grho, gh, rev);
  const MatrixField b_c_h = nambu_matrix_field(geo, gc, gh);

  QcTerms out;
  out.k = ctx.h();
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    cplx x[max_hilbert_dim * max_hilbert_dim], cm[max_hilbert_dim * max_hilbert_dim];
    const int nn = n * n;
    for (std::size_t cell = 0; cell < g.size(); ++cell) {
      const cplx* a = b_rho_h.at(cell);
      kern::comm<NN>(b_c_h.at(cell), rho.at(cell), cm, n);
      const double cc = c[cell];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x[i * n + j] = cc * (a[i * n + j] - std::conj(a[j * n + i])) - 0.5 * cm[i * n + j];
      const cplx pre = I * hbar / d_eff[cell];
      cplx* k = out.k.at(cell);
      for (int q = 0; q < nn; ++q) k[q] += pre * x[q];
    }
  });
  if (!with_force) return out;

  const MatrixField b_crho_h = nambu_matrix_field(geo, gcrho, gh, rev);
  out.force = VectorField(g);
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    for (int l = 0; l < dim; ++l) {
      const MatrixField& gcl = gcrho[static_cast<std::size_t>(l)];
      const MatrixField& grl = grho[static_cast<std::size_t>(l)];
      for (std::size_t cell = 0; cell < g.size(); ++cell)
        out.force[l][cell] = hbar * (kern::inner_i<NN>(gcl.at(cell), b_rho_h.at(cell), n) +
                                     kern::inner_i<NN>(grl.at(cell), b_crho_h.at(cell), n));
    }
  });
  if (dim == 3) {
    // - hbar div(W) gb_l,  W_i = <c rho, i (grad rho x grad H)_i>
    VectorField w(g, 3);
    dispatch_dim(n, [&](auto N) {
      constexpr int NN = decltype(N)::value;
      cplx t1[max_hilbert_dim * max_hilbert_dim];
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        for (std::size_t cell = 0; cell < g.size(); ++cell) {
          kern::mul<NN>(grho[static_cast<std::size_t>(j)].at(cell), gh[static_cast<std::size_t>(k)].at(cell), t1, n);
          kern::mul_acc<NN>(-1.0, grho[static_cast<std::size_t>(k)].at(cell), gh[static_cast<std::size_t>(j)].at(cell), t1, n);
          w[i][cell] = kern::inner_i<NN>(crho.at(cell), t1, n);
        }
      }
    });
    const ScalarField dw = div(w);
    for (int l = 0; l < 3; ++l)
      for (std::size_t cell = 0; cell < g.size(); ++cell) out.force[l][cell] -= hbar * dw[cell] * geo.gb.at(l, cell);
  }
  return out;
}

// d rho = -u.grad rho - (i/hbar)[K, rho]
MatrixField density_evolution(const State& s, const MatrixField& rho, const MatrixVector& grho, const MatrixField& k,
                              double hbar) {
  MatrixField out = advect(s.f.u, grho);
  out *= -1.0;
  const Grid& g = rho.grid();
  const int n = rho.n();
  const cplx pre = -I / hbar;
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    cplx cm[max_hilbert_dim * max_hilbert_dim];
    for (std::size_t cell = 0; cell < g.size(); ++cell) {
      kern::comm<NN>(k.at(cell), rho.at(cell), cm, n);
      cplx* o = out.at(cell);
      for (int q = 0; q < n * n; ++q) o[q] += pre * cm[q];
    }
  });
  return out;
}

// d psi = -u.grad psi - (i/hbar) K psi
SpinorField spinor_evolution(const State& s, const MatrixField& k, double hbar) {
  const SpinorField& psi = s.f.psi;
  const Grid& g = psi.grid();
  const int n = psi.n();
  const auto gp = grad_psi(psi);
  SpinorField out(g, n);
  const cplx pre = -I / hbar;
  for (std::size_t cell = 0; cell < g.size(); ++cell) {
    const cplx* p = psi.at(cell);
    const cplx* km = k.at(cell);
    cplx* o = out.at(cell);
    for (int i = 0; i < n; ++i) {
      cplx acc = 0.0;
      for (int d = 0; d < g.dim(); ++d) acc -= s.f.u[d][cell] * gp[static_cast<std::size_t>(d)].at(cell)[i];
      cplx kp = 0.0;
      for (int j = 0; j < n; ++j) kp += km[i * n + j] * p[j];
      o[i] = acc + pre * kp;
    }
    // Re<psi, u.grad_h psi> is O(h^4) but not zero; drop that normal part so
    // the per-step renormalization does not add an O(dt) error
    double re = 0.0, nn = 0.0;
    for (int i = 0; i < n; ++i) {
      re += std::real(std::conj(p[i]) * o[i]);
      nn += std::norm(p[i]);
    }
    const double w = re / nn;
    for (int i = 0; i < n; ++i) o[i] -= w * p[i];
  }
  return out;
}

void add_scaled_force(VectorField& du, const VectorField& f, const ScalarField& d, double mass) {
  for (int l = 0; l < du.ncomp(); ++l)
    for (std::size_t c = 0; c < d.size(); ++c) du[l][c] += f[l][c] / (mass * d[c]);
}

// Shared assembly of the density-form models. `backreaction` false gives
// Ehrenfest. The momentum includes pressure when `with_pressure`.
Rhs density_form(const State& s, const ModelContext& ctx, const BracketGeometry& geo, const ScalarField& c,
                 bool backreaction, bool with_pressure, const ScalarField* advected_c) {
  require_n(s, ctx);
  require_positive(s.f.d, "model right-hand side");
  Rhs r;
  classical_part(s, &geo, advected_c, r.f);
  const MatrixField rho = s.density();
  ScalarField p;
  if (with_pressure && ctx.ham().eos.active()) p = pressure(s.f.d, ctx.ham().eos);
  const VectorField a = mean_force(rho, s.f.d, p.values().empty() ? nullptr : &p, ctx);
  r.f.u += a;
  const double hbar = ctx.ham().hbar;
  MatrixField k;
  MatrixVector grho;
  if (backreaction || s.mode == StateMode::density_matrix) grho = grad_h(rho);
  if (backreaction) {
    const ScalarField d_eff = floored(s.f.d, ctx.options().d_floor, r.floor_hits);
    QcTerms q = qc_terms(rho, grho, c, d_eff, geo, ctx, true);
    add_scaled_force(r.f.u, q.force, s.f.d, ctx.ham().mass);
    k = std::move(q.k);
  } else {
    k = ctx.h();
  }
  if (s.mode == StateMode::pure_state) r.f.psi = spinor_evolution(s, k, hbar);
  else r.f.rho = density_evolution(s, rho, grho, k, hbar);
  return r;
}

VectorField project(const VectorField& a) { return project_divergence_free(a); }

// Lorentz-form momentum of the pure-state planar equations:
// M Dt v = -E - B v x e3 - grad p / D - grad<H> - f grad c~ / D
// The sign of the last term is the one that matches the density form and
// conserves the energy; the opposite sign fails both checks.
VectorField pure_state_acceleration(const State& s, const ModelContext& ctx, const SpinorField& dpsi,
                                    const ScalarField& ct, const ScalarField* p, bool with_backreaction) {
  const Grid& g = s.grid();
  const SpinorField& psi = s.f.psi;
  const int n = psi.n();
  const double hbar = ctx.ham().hbar;
  const double inv_m = 1.0 / ctx.ham().mass;
  const auto gp = grad_psi(psi);
  const auto gdp = grad_psi(dpsi);

  // g = <psi, i hbar dpsi> = -hbar Im(psi^dag dpsi); <H> = psi^dag H psi
  ScalarField gpot(g), hexp(g), bfield(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const cplx* a = psi.at(c);
    const cplx* da = dpsi.at(c);
    const cplx* h = ctx.h().at(c);
    cplx s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int i = 0; i < n; ++i) {
      s1 += std::conj(a[i]) * da[i];
      cplx row = 0.0;
      for (int j = 0; j < n; ++j) row += h[i * n + j] * a[j];
      s2 += std::conj(a[i]) * row;
      s3 += std::conj(gp[0].at(c)[i]) * gp[1].at(c)[i];
    }
    gpot[c] = -hbar * s1.imag();
    hexp[c] = s2.real();
    bfield[c] = 2.0 * hbar * s3.imag();
  }
  const VectorField ggpot = grad(gpot);
  const VectorField ghexp = grad(hexp);
  VectorField gpress;
  if (p) gpress = grad(*p);

  // f = Re(psi^dag i hbar (F~x dy psi - F~y dx psi))
  ScalarField fscal(g);
  VectorField gct;
  if (with_backreaction) {
    gct = grad(ct);
    const MatrixVector ft = fluctuation_force(psi, ctx.grad_h());
    for (std::size_t c = 0; c < g.size(); ++c) {
      const cplx* a = psi.at(c);
      const cplx* fx = ft[0].at(c);
      const cplx* fy = ft[1].at(c);
      const cplx* dx = gp[0].at(c);
      const cplx* dy = gp[1].at(c);
      cplx acc = 0.0;
      for (int i = 0; i < n; ++i) {
        cplx row = 0.0;
        for (int j = 0; j < n; ++j) row += fx[i * n + j] * dy[j] - fy[i * n + j] * dx[j];
        acc += std::conj(a[i]) * row;
      }
      fscal[c] = (I * hbar * acc).real();
    }
  }

  VectorField a(g);
  for (int l = 0; l < 2; ++l)
    for (std::size_t c = 0; c < g.size(); ++c) {
      // dt A_l = hbar Im(dpsi^dag d_l psi + psi^dag d_l dpsi)
      cplx s1 = 0.0;
      const cplx* ps = psi.at(c);
      const cplx* dps = dpsi.at(c);
      const cplx* gl = gp[static_cast<std::size_t>(l)].at(c);
      const cplx* gdl = gdp[static_cast<std::size_t>(l)].at(c);
      for (int i = 0; i < n; ++i) s1 += std::conj(dps[i]) * gl[i] + std::conj(ps[i]) * gdl[i];
      const double e = -hbar * s1.imag() - ggpot[l][c];
      const double lorentz = l == 0 ? -bfield[c] * s.f.u[1][c] : bfield[c] * s.f.u[0][c];
      double v = -e + lorentz - ghexp[l][c];
      if (p) v -= gpress[l][c] / s.f.d[c];
      if (with_backreaction) v -= fscal[c] * gct[l][c] / s.f.d[c];
      a[l][c] = v * inv_m;
    }
  return a;
}

// psi equation of the pure-state planar form:
// K = H + i hbar (c~/D)({rho,H} + {H,rho} - 1/2 [{ln c~, H}, rho])
MatrixField pure_state_generator(const State& s, const ModelContext& ctx, const ScalarField& ct, const ScalarField& d_eff) {
  const Grid& g = s.grid();
  for (std::size_t c = 0; c < g.size(); ++c)
    if (!(ct[c] > 0.0)) {
      std::ostringstream os;
      os << "ln c~ needs c~ > 0, got " << ct[c] << " at cell " << c;
      fail(ErrorKind::log_domain_error, os.str());
    }
  ScalarField lnc(g);
  for (std::size_t c = 0; c < g.size(); ++c) lnc[c] = std::log(ct[c]);
  ScalarField ratio(g);
  for (std::size_t c = 0; c < g.size(); ++c) ratio[c] = ct[c] / d_eff[c];
  // With c = c~/D and the log-bracket, K has the same algebraic shape as the
  // density form: H + i hbar (c~/D)(X), X = {rho,H} + {H,rho} - 1/2 [{ln c~,H}, rho].
  const MatrixField rho = outer(s.f.psi);
  const MatrixVector grho = grad_h(rho);
  const BracketGeometry geo = planar_geometry(g);
  const bool rev = ctx.options().mutation == Mutation::nambu_order;
  const MatrixField b1 = nambu_matrix_field(geo, grho, ctx.grad_h(), rev);
  const MatrixField b2 = nambu_matrix_field(geo, ctx.grad_h(), grho, rev);
  const MatrixField b3 = nambu_matrix_field(geo, grad(lnc), ctx.grad_h());
  MatrixField k = ctx.h();
  const int n = rho.n();
  const double hbar = ctx.ham().hbar;
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    cplx cm[max_hilbert_dim * max_hilbert_dim];
    for (std::size_t c = 0; c < g.size(); ++c) {
      kern::comm<NN>(b3.at(c), rho.at(c), cm, n);
      const cplx pre = I * hbar * ratio[c];
      const cplx* x1 = b1.at(c);
      const cplx* x2 = b2.at(c);
      cplx* o = k.at(c);
      for (int q = 0; q < n * n; ++q) o[q] += pre * (x1[q] + x2[q] - 0.5 * cm[q]);
    }
  });
  return k;
}

void require_incompressible(const State& s) {
  const double dv = max_abs(div(s.f.u));
  if (dv > 1e-8) fail(ErrorKind::precondition, "incompressible model entered with max |div u| = " + std::to_string(dv));
}

}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::ehrenfest: return "ehrenfest";
    case ModelKind::qc3d: return "qc3d";
    case ModelKind::qc3d_stress: return "qc3d_stress";
    case ModelKind::qc_planar: return "qc_planar";
    case ModelKind::qc_planar_incompressible: return "qc_planar_incompressible";
  }
  return "unknown";
}

ModelKind model_from_string(const std::string& s) {
  for (ModelKind k : {ModelKind::ehrenfest, ModelKind::qc3d, ModelKind::qc3d_stress, ModelKind::qc_planar,
                      ModelKind::qc_planar_incompressible})
    if (to_string(k) == s) return k;
  fail(ErrorKind::unsupported_model, "unknown model '" + s + "'");
}

ModelContext::ModelContext(const Hamiltonian& ham, const ModelOptions& opt) : ham_(ham), opt_(opt) {
  ham_.validate();
  h_ = ham_.assemble();
  gh_ = ham_.gradient();
}

ScalarField bracket_c(const State& s, const ModelOptions& opt) {
  if (opt.kind == ModelKind::qc_planar_incompressible) {
    ScalarField c = s.f.d;
    c *= opt.beta;
    return c;
  }
  return s.f.c;
}

Rhs rhs_ehrenfest(const State& s, const ModelContext& ctx) {
  const BracketGeometry geo = s.planar() ? planar_geometry(s.grid(), 0.0) : geometry_from_b(s.f.b, s.b_slope);
  return density_form(s, ctx, geo, s.f.c, false, true, nullptr);
}

Rhs rhs_qc3d(const State& s, const ModelContext& ctx) {
  require_dim(s, 3, "qc3d");
  return density_form(s, ctx, geometry_from_b(s.f.b, s.b_slope), s.f.c, true, true, nullptr);
}

Rhs rhs_qc_planar(const State& s, const ModelContext& ctx) {
  require_dim(s, 2, "qc_planar");
  if (s.mode == StateMode::pure_state) fail(ErrorKind::precondition, "rhs_qc_planar is the density-matrix form; use rhs_pure_state_planar");
  return density_form(s, ctx, planar_geometry(s.grid()), s.f.c, true, true, nullptr);
}

Rhs rhs_qc3d_stress_form(const State& s, const ModelContext& ctx) {
  require_dim(s, 3, "qc3d_stress");
  if (s.mode == StateMode::pure_state) fail(ErrorKind::unsupported_model, "the stress form is assembled for density matrices only");
  require_n(s, ctx);
  require_positive(s.f.d, "model right-hand side");
  const Grid& g = s.grid();
  const int n = s.f.rho.n();
  const double hbar = ctx.ham().hbar;
  const double mass = ctx.ham().mass;
  const BracketGeometry geo = geometry_from_b(s.f.b, s.b_slope);
  Rhs r;
  classical_part(s, &geo, nullptr, r.f);
  const MatrixField& rho = s.f.rho;
  const ScalarField& c = s.f.c;
  const MatrixVector& gh = ctx.grad_h();
  const MatrixVector grho = grad_h(rho);
  const MatrixVector gamma = mead_connection(rho, grho, hbar);
  // Dcal = D rho + div_h(c Gamma x gb)
  MatrixVector cg = cross_geometry(gamma, geo);
  for (auto& m : cg) m = scale(c, m);
  MatrixField dcal = div_h(cg);
  cg.clear();
  dcal += scale(s.f.d, rho);

  const ScalarField p = pressure(s.f.d, ctx.ham().eos);
  const StressField t =
      stress_tensor(p, c, geo, gamma, gh, ctx.options().mutation == Mutation::stress_sign ? 3 : 0);
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    for (int l = 0; l < 3; ++l) {
      VectorField col(g);
      for (int j = 0; j < 3; ++j) col[j] = t(j, l);
      const ScalarField divt = div(col);
      const MatrixField& hl = gh[static_cast<std::size_t>(l)];
      for (std::size_t cell = 0; cell < g.size(); ++cell)
        r.f.u[l][cell] += (-kern::inner<NN>(dcal.at(cell), hl.at(cell), n) - divt[cell]) / (mass * s.f.d[cell]);
    }
  });

  // Q_i = c eps_ijk gb_j Y_k,  Y_k = [H, Gamma_k] + (i hbar/2)[rho, [rho, d_k H]]
  MatrixVector y;
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    cplx t1[max_hilbert_dim * max_hilbert_dim], t2[max_hilbert_dim * max_hilbert_dim];
    const cplx half = 0.5 * I * hbar;
    for (int k = 0; k < 3; ++k) {
      MatrixField m(g, n);
      for (std::size_t cell = 0; cell < g.size(); ++cell) {
        cplx* o = m.at(cell);
        kern::comm<NN>(ctx.h().at(cell), gamma[static_cast<std::size_t>(k)].at(cell), o, n);
        kern::comm<NN>(rho.at(cell), gh[static_cast<std::size_t>(k)].at(cell), t1, n);
        kern::comm<NN>(rho.at(cell), t1, t2, n);
        for (int q = 0; q < n * n; ++q) o[q] += half * t2[q];
      }
      y.push_back(std::move(m));
    }
  });
  MatrixVector q = cross_geometry(y, geo);  // (Y x gb)_i = -(gb x Y)_i
  y.clear();
  for (auto& m : q) {
    m = scale(c, m);
    m *= -1.0;
  }
  const MatrixField divq = div_h(q);
  q.clear();
  MatrixField drho = advect(s.f.u, grho);
  drho *= -1.0;
  std::size_t hits = 0;
  const ScalarField d_eff = floored(s.f.d, ctx.options().d_floor, hits);
  r.floor_hits = hits;
  dispatch_dim(n, [&](auto N) {
    constexpr int NN = decltype(N)::value;
    cplx cm[max_hilbert_dim * max_hilbert_dim];
    for (std::size_t cell = 0; cell < g.size(); ++cell) {
      kern::comm<NN>(ctx.h().at(cell), dcal.at(cell), cm, n);
      const cplx pre = 1.0 / (I * hbar * d_eff[cell]);
      const cplx* dq = divq.at(cell);
      cplx* o = drho.at(cell);
      for (int qq = 0; qq < n * n; ++qq) o[qq] += pre * (cm[qq] + dq[qq]);
    }
  });
  r.f.rho = std::move(drho);
  return r;
}

Rhs rhs_pure_state_planar(const State& s, const ModelContext& ctx) {
  require_dim(s, 2, "pure-state planar form");
  if (s.mode != StateMode::pure_state) fail(ErrorKind::requires_pure_state, "rhs_pure_state_planar needs a psi field");
  require_n(s, ctx);
  require_positive(s.f.d, "model right-hand side");
  require_normalized(s.f.psi, 1e-6, "rhs_pure_state_planar");
  const bool incompressible = ctx.options().kind == ModelKind::qc_planar_incompressible;
  const ScalarField ct = bracket_c(s, ctx.options());
  Rhs r;
  classical_part(s, nullptr, nullptr, r.f);
  std::size_t hits = 0;
  const ScalarField d_eff = floored(s.f.d, ctx.options().d_floor, hits);
  r.floor_hits = hits;
  const MatrixField k = pure_state_generator(s, ctx, ct, d_eff);
  r.f.psi = spinor_evolution(s, k, ctx.ham().hbar);
  ScalarField p;
  if (!incompressible && ctx.ham().eos.active()) p = pressure(s.f.d, ctx.ham().eos);
  const VectorField a = pure_state_acceleration(s, ctx, r.f.psi, ct, p.values().empty() ? nullptr : &p, true);
  r.f.u += a;
  return r;
}

Rhs rhs_qc_planar_incompressible(const State& s, const ModelContext& ctx) {
  require_dim(s, 2, "qc_planar_incompressible");
  require_incompressible(s);
  Rhs r;
  if (s.mode == StateMode::pure_state) {
    r = rhs_pure_state_planar(s, ctx);
  } else {
    const ScalarField ct = bracket_c(s, ctx.options());
    r = density_form(s, ctx, planar_geometry(s.grid()), ct, true, false, nullptr);
  }
  r.f.u = project(r.f.u);
  // D is advected as a scalar under the constraint
  r.f.d = advect(s.f.u, grad(s.f.d));
  r.f.d *= -1.0;
  return r;
}

Rhs evaluate_rhs(const State& s, const ModelContext& ctx) {
  switch (ctx.options().kind) {
    case ModelKind::ehrenfest: return rhs_ehrenfest(s, ctx);
    case ModelKind::qc3d: return rhs_qc3d(s, ctx);
    case ModelKind::qc3d_stress: return rhs_qc3d_stress_form(s, ctx);
    case ModelKind::qc_planar:
      return s.mode == StateMode::pure_state ? rhs_pure_state_planar(s, ctx) : rhs_qc_planar(s, ctx);
    case ModelKind::qc_planar_incompressible: return rhs_qc_planar_incompressible(s, ctx);
  }
  fail(ErrorKind::unsupported_model, "unknown model kind");
}

#define QCF_RHS_OVERLOAD(name, kind_value)                                  \
  Rhs name(const State& s, const Hamiltonian& h, ModelOptions opt) {       \
    opt.kind = kind_value;                                                  \
    return name(s, ModelContext(h, opt));                                   \
  }
QCF_RHS_OVERLOAD(rhs_ehrenfest, ModelKind::ehrenfest)
QCF_RHS_OVERLOAD(rhs_qc3d, ModelKind::qc3d)
QCF_RHS_OVERLOAD(rhs_qc3d_stress_form, ModelKind::qc3d_stress)
QCF_RHS_OVERLOAD(rhs_qc_planar, ModelKind::qc_planar)
QCF_RHS_OVERLOAD(rhs_qc_planar_incompressible, ModelKind::qc_planar_incompressible)
#undef QCF_RHS_OVERLOAD

Rhs rhs_pure_state_planar(const State& s, const Hamiltonian& h, ModelOptions opt) {
  if (opt.kind != ModelKind::qc_planar_incompressible) opt.kind = ModelKind::qc_planar;
  return rhs_pure_state_planar(s, ModelContext(h, opt));
}

MatrixField density_rate(const State& s, const Rhs& r) {
  if (s.mode == StateMode::density_matrix) return r.f.rho;
  const SpinorField& psi = s.f.psi;
  const SpinorField& dpsi = r.f.psi;
  const int n = psi.n();
  MatrixField out(psi.grid(), n);
  for (std::size_t c = 0; c < psi.grid().size(); ++c) {
    const cplx* a = psi.at(c);
    const cplx* da = dpsi.at(c);
    cplx* o = out.at(c);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) o[i * n + j] = da[i] * std::conj(a[j]) + a[i] * std::conj(da[j]);
  }
  return out;
}

ScalarField dephasing_local_law_residual(const State& s, const Hamiltonian& h, ModelOptions opt) {
  int k = 0;
  if (!h.is_pure_dephasing(&k))
    fail(ErrorKind::unsupported_model, "dephasing law needs H = V0 1 + V_I sigma_k with n = 2");
  const Grid& g = s.grid();
  if (opt.kind != ModelKind::qc_planar_incompressible) opt.kind = g.dim() == 3 ? ModelKind::qc3d : ModelKind::qc_planar;
  const ModelContext ctx(h, opt);
  const Rhs r = evaluate_rhs(s, ctx);
  const MatrixField rho = s.density();
  const MatrixField drho = density_rate(s, r);
  const Matrix& sigma = pauli()[k];
  ScalarField sig(g), dsig(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    sig[c] = kern::inner<2>(rho.at(c), sigma.data(), 2);
    dsig[c] = kern::inner<2>(drho.at(c), sigma.data(), 2);
  }
  const ScalarField transport = advect(s.f.u, grad(sig));
  const ScalarField c = bracket_c(s, opt);
  ScalarField w(g);
  for (std::size_t q = 0; q < g.size(); ++q) w[q] = c[q] * (1.0 - sig[q] * sig[q]);
  const BracketGeometry geo = g.dim() == 3 ? geometry_from_b(s.f.b, s.b_slope) : planar_geometry(g);
  const ScalarField rhs = nambu_scalar_field(geo, h.couplings[0].v, w);
  ScalarField out(g);
  for (std::size_t q = 0; q < g.size(); ++q) out[q] = s.f.d[q] * (dsig[q] + transport[q]) - rhs[q];
  return out;
}

std::array<double, 3> von_neumann_force(const State& s, const ModelContext& ctx) {
  const Grid& g = s.grid();
  const MatrixField rho = s.density();
  const BracketGeometry geo = make_geometry(s);
  const MatrixField dcal = von_neumann(s.f.d, rho, geo, bracket_c(s, ctx.options()), ctx.ham().hbar);
  std::array<double, 3> out{0.0, 0.0, 0.0};
  const int n = rho.n();
  for (int l = 0; l < g.dim(); ++l) {
    ScalarField w(g);
    for (std::size_t c = 0; c < g.size(); ++c)
      w[c] = -kern::inner<0>(dcal.at(c), ctx.grad_h()[static_cast<std::size_t>(l)].at(c), n);
    out[static_cast<std::size_t>(l)] = integrate(w);
  }
  return out;
}

}  // namespace qcf
