#include "qcf/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "qcf/poisson.hpp"

namespace qcf {

ScalarSpec& ScalarSpec::add(double amp, std::array<int, 3> k, double phase) {
  modes.push_back({amp, k, phase});
  return *this;
}

ScalarSpec& ScalarSpec::add_product(double amp, std::array<int, 3> k) {
  // prod cos(k_d x_d) = 2^-(m-1) sum over sign patterns of cos(sum +-k_d x_d)
  std::vector<int> active;
  for (int d = 0; d < 3; ++d)
    if (k[d] != 0) active.push_back(d);
  if (active.empty()) {
    offset += amp;
    return *this;
  }
  const int m = static_cast<int>(active.size());
  const double w = amp / static_cast<double>(1 << (m - 1));
  for (int mask = 0; mask < (1 << (m - 1)); ++mask) {
    std::array<int, 3> kk{0, 0, 0};
    kk[static_cast<std::size_t>(active[0])] = k[static_cast<std::size_t>(active[0])];
    for (int a = 1; a < m; ++a) {
      const auto d = static_cast<std::size_t>(active[static_cast<std::size_t>(a)]);
      kk[d] = (mask >> (a - 1)) & 1 ? -k[d] : k[d];
    }
    modes.push_back({w, kk, 0.0});
  }
  return *this;
}

ScalarSpec& ScalarSpec::randomize(std::uint64_t s, int count, double amp, int kmax) {
  seed = s;
  random_modes = count;
  random_amp = amp;
  random_kmax = kmax;
  return *this;
}

bool ScalarSpec::is_constant() const noexcept {
  if (scale_density || random_modes > 0) return false;
  for (const auto& m : modes)
    if (m.amp != 0.0 && (m.k[0] != 0 || m.k[1] != 0 || m.k[2] != 0)) return false;
  return true;
}

std::vector<CosineMode> expand_modes(const ScalarSpec& s, int dim) {
  std::vector<CosineMode> out = s.modes;
  if (s.random_modes <= 0) return out;
  std::mt19937_64 rng(s.seed);
  std::uniform_int_distribution<int> kd(-s.random_kmax, s.random_kmax);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  const double a = s.random_amp / s.random_modes;
  for (int i = 0; i < s.random_modes; ++i) {
    CosineMode m;
    for (int d = 0; d < 3; ++d) m.k[static_cast<std::size_t>(d)] = d < dim ? kd(rng) : 0;
    m.amp = a * ud(rng);
    m.phase = ph(rng);
    out.push_back(m);
  }
  return out;
}

namespace {

double eval_modes(const std::vector<CosineMode>& modes, double offset, const Grid& g, std::array<double, 3> x) {
  double v = offset;
  for (const auto& m : modes) {
    double arg = m.phase;
    for (int d = 0; d < g.dim(); ++d)
      arg += 2.0 * std::numbers::pi * m.k[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)] / g.length(d);
    v += m.amp * std::cos(arg);
  }
  return v;
}

}  // namespace

double evaluate(const ScalarSpec& s, const Grid& g, std::array<double, 3> x) {
  if (s.scale_density) fail(ErrorKind::config_error, "a density-scaled spec needs D; use make_state");
  return eval_modes(expand_modes(s, g.dim()), s.offset, g, x);
}

ScalarField make_scalar(const Grid& g, const ScalarSpec& s) {
  if (s.scale_density) fail(ErrorKind::config_error, "a density-scaled spec needs D; use make_state");
  const auto modes = expand_modes(s, g.dim());
  ScalarField f(g);
  for (std::size_t c = 0; c < g.size(); ++c) f[c] = eval_modes(modes, s.offset, g, g.center(c));
  return f;
}

VectorField make_velocity(const Grid& g, const VelocitySpec& v) {
  VectorField u(g);
  if (!v.components.empty() && static_cast<int>(v.components.size()) != g.dim())
    fail(ErrorKind::config_error, "velocity needs " + std::to_string(g.dim()) + " components");
  for (int d = 0; d < static_cast<int>(v.components.size()); ++d)
    u[d] = make_scalar(g, v.components[static_cast<std::size_t>(d)]);
  if (v.project) u = project_divergence_free(u);
  return u;
}

SpinorField make_spinor(const Grid& g, int n, const QuantumSpec& q) {
  SpinorField psi(g, n);
  if (n == 2 && q.amplitudes.empty()) {
    const ScalarField th = make_scalar(g, q.theta);
    const ScalarField ph = make_scalar(g, q.phi);
    for (std::size_t c = 0; c < g.size(); ++c) {
      psi.at(c)[0] = std::cos(0.5 * th[c]);
      psi.at(c)[1] = std::polar(std::sin(0.5 * th[c]), ph[c]);
    }
    return psi;
  }
  if (static_cast<int>(q.amplitudes.size()) != n)
    fail(ErrorKind::config_error, "quantum initial data needs " + std::to_string(n) + " amplitudes");
  std::vector<ScalarField> amp, phs;
  for (int i = 0; i < n; ++i) {
    amp.push_back(make_scalar(g, q.amplitudes[static_cast<std::size_t>(i)]));
    phs.push_back(i < static_cast<int>(q.phases.size()) ? make_scalar(g, q.phases[static_cast<std::size_t>(i)])
                                                        : ScalarField(g));
  }
  for (std::size_t c = 0; c < g.size(); ++c) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += amp[static_cast<std::size_t>(i)][c] * amp[static_cast<std::size_t>(i)][c];
    if (!(s > 0.0)) fail(ErrorKind::config_error, "quantum amplitudes vanish at a cell");
    const double nrm = std::sqrt(s);
    for (int i = 0; i < n; ++i)
      psi.at(c)[i] = std::polar(amp[static_cast<std::size_t>(i)][c] / nrm, phs[static_cast<std::size_t>(i)][c]);
  }
  return psi;
}

MatrixField make_density(const Grid& g, int n, const QuantumSpec& q) {
  MatrixField rho = outer(make_spinor(g, n, q));
  // rho = r psi psi^dag + (1 - r) 1/n
  const ScalarField r = make_scalar(g, q.radius);
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (r[c] == 1.0) continue;
    if (r[c] < 0.0 || r[c] > 1.0) fail(ErrorKind::config_error, "Bloch radius must lie in [0, 1]");
    cplx* a = rho.at(c);
    for (int i = 0; i < n * n; ++i) a[i] *= r[c];
    for (int i = 0; i < n; ++i) a[i * n + i] += (1.0 - r[c]) / n;
  }
  return rho;
}

Matrix named_matrix(const std::string& name, int n) {
  if (name == "identity") return Matrix::identity(n);
  const char* names[] = {"sigma_x", "sigma_y", "sigma_z"};
  for (int k = 0; k < 3; ++k)
    if (name == names[k]) {
      if (n != 2) fail(ErrorKind::config_error, name + " needs n = 2");
      return pauli()[k];
    }
  fail(ErrorKind::config_error, "unknown matrix '" + name + "' (identity, sigma_x, sigma_y, sigma_z)");
}

Hamiltonian make_hamiltonian(const Grid& g, const HamiltonianSpec& h) {
  Hamiltonian out;
  out.mass = h.mass;
  out.hbar = h.hbar;
  out.n = h.n;
  out.v0 = make_scalar(g, h.v0);
  for (const auto& c : h.couplings) out.couplings.push_back({make_scalar(g, c.v), c.b});
  out.eos = h.eos;
  out.validate();
  return out;
}

State make_state(const Grid& g, int n, const StateSpec& s) {
  State st;
  st.mode = s.mode;
  st.f.d = make_scalar(g, s.d);
  st.f.u = make_velocity(g, s.u);
  if (s.mode == StateMode::pure_state) st.f.psi = make_spinor(g, n, s.quantum);
  else st.f.rho = make_density(g, n, s.quantum);
  if (g.dim() == 3) {
    st.f.b = make_scalar(g, s.b);
    st.b_slope = s.b_slope;
  }
  if (s.with_c) {
    if (s.c.scale_density) {
      st.f.c = st.f.d;
      st.f.c *= *s.c.scale_density;
    } else {
      st.f.c = make_scalar(g, s.c);
    }
  }
  return st;
}

}  // namespace qcf
