#include "qcf/integrator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace qcf {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::config_error, "dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail(ErrorKind::config_error, "t_end must be nonnegative");
  if (cfl_cap && !(*cfl_cap > 0.0 && *cfl_cap <= 1.0)) fail(ErrorKind::config_error, "cfl_cap must lie in (0, 1]");
}

double hermitize_field(MatrixField& rho) {
  const int n = rho.n();
  double worst = 0.0;
  for (std::size_t c = 0; c < rho.cells(); ++c) {
    cplx* a = rho.at(c);
    double norm = 0.0, anti = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const cplx x = a[i * n + j], y = a[j * n + i];
        const cplx m = 0.5 * (x + std::conj(y));
        anti += (i == j ? 1.0 : 2.0) * std::norm(x - m);
        norm += std::norm(x) + (i == j ? 0.0 : std::norm(y));
        a[i * n + j] = m;
        a[j * n + i] = std::conj(m);
      }
    const double e = norm > 0.0 ? std::sqrt(anti / norm) : 0.0;
    if (e > worst) worst = e;
  }
  return worst;
}

double normalize_field(SpinorField& psi) {
  const int n = psi.n();
  double worst = 0.0;
  for (std::size_t c = 0; c < psi.grid().size(); ++c) {
    cplx* p = psi.at(c);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::norm(p[i]);
    const double nrm = std::sqrt(s);
    worst = std::max(worst, std::abs(nrm - 1.0));
    if (nrm > 0.0)
      for (int i = 0; i < n; ++i) p[i] /= nrm;
  }
  return worst;
}

double min_eigenvalue(const State& s) {
  if (s.mode == StateMode::pure_state) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  if (s.f.rho.n() == 2) {
    // closed form for Hermitian 2x2
    for (std::size_t c = 0; c < s.grid().size(); ++c) {
      const cplx* a = s.f.rho.at(c);
      const double mean = 0.5 * (a[0].real() + a[3].real()), half = 0.5 * (a[0].real() - a[3].real());
      m = std::min(m, mean - std::sqrt(half * half + std::norm(a[1])));
    }
    return m;
  }
  for (std::size_t c = 0; c < s.grid().size(); ++c) m = std::min(m, min_eigenvalue(s.f.rho.get(c)));
  return m;
}

namespace {

// Every RHS allocates and frees field-sized temporaries. With glibc defaults
// those come from fresh mmap pages or a trimmed heap top, and the page faults
// cost more than the arithmetic. Keep freed memory in the arena instead.
void keep_field_buffers() {
#if defined(__GLIBC__)
  static const bool once = [] {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
    return true;
  }();
  (void)once;
#endif
}


// Stage bookkeeping: project the stage state back onto the constraint set
// when asked, tracking what was removed.
void clean_stage(State& st, const IntegratorConfig& cfg, StepReport& rep) {
  if (st.mode == StateMode::density_matrix) {
    if (cfg.hermitize_each_stage) rep.hermiticity_drift = std::max(rep.hermiticity_drift, hermitize_field(st.f.rho));
    else rep.hermiticity_drift = std::max(rep.hermiticity_drift, hermiticity_error(st.f.rho));
  } else {
    if (cfg.renormalize_psi) rep.norm_drift = std::max(rep.norm_drift, normalize_field(st.f.psi));
    else rep.norm_drift = std::max(rep.norm_drift, norm_error(st.f.psi));
  }
}

void check_finite(const Fields& f, double t, const char* what) {
  std::string where;
  if (!f.all_finite(&where)) {
    std::ostringstream os;
    os << "non-finite " << what << " at t = " << t << ": " << where;
    fail(ErrorKind::blow_up, os.str());
  }
}

}  // namespace

std::pair<State, StepReport> rk4_step(const State& s, const ModelContext& ctx, double dt, const IntegratorConfig& cfg,
                                      const StageObserver& observer) {
  keep_field_buffers();
  StepReport rep;
  rep.dt_used = dt;
  static constexpr double stage_c[4] = {0.0, 0.5, 0.5, 1.0};
  static constexpr double weight[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};

  State out = s;
  State stage = s;
  for (int k = 0; k < 4; ++k) {
    if (k > 0) clean_stage(stage, cfg, rep);
    stage.t = s.t + stage_c[k] * dt;
    if (observer) observer(k, stage);
    Rhs r = evaluate_rhs(stage, ctx);
    check_finite(r.f, stage.t, "right-hand side");
    rep.vacuum_floor_activations += r.floor_hits;
    out.f.axpy(weight[k] * dt, r.f);
    if (k < 3) {
      stage.f = s.f;
      stage.f.axpy(stage_c[k + 1] * dt, r.f);
    }
  }
  out.t = s.t + dt;
  clean_stage(out, cfg, rep);
  check_finite(out.f, out.t, "state");
  rep.t = out.t;
  rep.min_d = min_value(out.f.d);
  rep.min_eig_rho = min_eigenvalue(out);
  return {std::move(out), rep};
}

double cfl_dt(const State& s, const Hamiltonian& h, const IntegratorConfig& cfg) {
  if (!cfg.cfl_cap) return cfg.dt;
  const Grid& g = s.grid();
  double vmax = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    double u2 = 0.0;
    for (int d = 0; d < s.f.u.ncomp(); ++d) u2 += s.f.u[d][c] * s.f.u[d][c];
    double cs = 0.0;
    if (h.eos.active()) cs = std::sqrt(std::max(0.0, h.eos.sound_speed_squared(s.f.d[c])));
    vmax = std::max(vmax, std::sqrt(u2) + cs);
  }
  if (vmax == 0.0) return cfg.dt;
  return *cfg.cfl_cap * g.min_spacing() / vmax;
}

}  // namespace qcf
