#include "qcf/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace qcf {

using ojson = nlohmann::ordered_json;

namespace {

int line_of(const std::string& text, std::size_t pos) {
  int line = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Structural scan for duplicate object keys. nlohmann keeps the last value
// silently and reports no positions for keys, so this pass runs first.
void check_duplicate_keys(const std::string& text, const std::string& source) {
  struct Frame {
    bool object;
    std::set<std::string> keys;
  };
  std::vector<Frame> stack;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == '{' || ch == '[') {
      stack.push_back({ch == '{', {}});
      ++i;
    } else if (ch == '}' || ch == ']') {
      if (!stack.empty()) stack.pop_back();
      ++i;
    } else if (ch == '"') {
      const std::size_t start = i++;
      while (i < text.size() && text[i] != '"') i += text[i] == '\\' ? 2 : 1;
      const std::size_t end = std::min(i + 1, text.size());
      i = end;
      std::size_t j = i;
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (stack.empty() || !stack.back().object || j >= text.size() || text[j] != ':') continue;
      std::string key;
      try {
        key = ojson::parse(text.substr(start, end - start)).get<std::string>();
      } catch (const std::exception&) {
        continue;  // malformed; the real parser reports it
      }
      if (!stack.back().keys.insert(key).second) {
        std::ostringstream os;
        os << source << ":" << line_of(text, start) << ": duplicate key \"" << key << "\"";
        fail(ErrorKind::parse_error, os.str());
      }
    } else {
      ++i;
    }
  }
}

// Strict reader: every access marks the key as used, type problems and
// unknown keys are collected instead of thrown.
class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  class Obj {
   public:
    Obj(Reader& r, const ojson* j, std::string path) : r_(r), j_(j), path_(std::move(path)) {
      if (j_ && !j_->is_object()) {
        r_.error(path_, "expected an object");
        j_ = nullptr;
      }
    }
    ~Obj() {
      if (!j_) return;
      for (auto it = j_->begin(); it != j_->end(); ++it)
        if (!used_.count(it.key())) r_.error(sub(it.key()), "unknown key");
    }
    Obj(const Obj&) = delete;
    Obj& operator=(const Obj&) = delete;

    bool present() const { return j_ != nullptr; }
    bool has(const std::string& k) const { return j_ && j_->contains(k); }
    std::string sub(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    const std::string& path() const { return path_; }
    Reader& reader() { return r_; }

    const ojson* raw(const std::string& k) {
      if (!has(k)) return nullptr;
      used_.insert(k);
      return &(*j_)[k];
    }

    double number(const std::string& k, double def) {
      const ojson* v = raw(k);
      if (!v) return def;
      if (!v->is_number()) {
        r_.error(sub(k), "expected a number");
        return def;
      }
      return v->get<double>();
    }
    std::optional<double> maybe_number(const std::string& k) {
      if (!has(k)) {
        return std::nullopt;
      }
      return number(k, 0.0);
    }
    long long integer(const std::string& k, long long def) {
      const ojson* v = raw(k);
      if (!v) return def;
      if (!v->is_number_integer()) {
        r_.error(sub(k), "expected an integer");
        return def;
      }
      return v->get<long long>();
    }
    bool boolean(const std::string& k, bool def) {
      const ojson* v = raw(k);
      if (!v) return def;
      if (!v->is_boolean()) {
        r_.error(sub(k), "expected true or false");
        return def;
      }
      return v->get<bool>();
    }
    std::string string(const std::string& k, const std::string& def) {
      const ojson* v = raw(k);
      if (!v) return def;
      if (!v->is_string()) {
        r_.error(sub(k), "expected a string");
        return def;
      }
      return v->get<std::string>();
    }

   private:
    Reader& r_;
    const ojson* j_;
    std::string path_;
    std::set<std::string> used_;
  };
};

std::uint64_t salted(std::uint64_t seed, const std::string& path) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : path) h = (h ^ ch) * 1099511628211ull;
  return seed * 0x9E3779B97F4A7C15ull ^ h;
}

std::vector<double> number_array(Reader& r, const ojson* v, const std::string& path) {
  std::vector<double> out;
  if (!v) return out;
  if (!v->is_array()) {
    r.error(path, "expected an array of numbers");
    return out;
  }
  for (const auto& x : *v) {
    if (!x.is_number()) {
      r.error(path, "expected an array of numbers");
      return {};
    }
    out.push_back(x.get<double>());
  }
  return out;
}

// number | "D0" | {offset, modes, random, scale_density}
ScalarSpec read_scalar(Reader& r, const ojson* v, const std::string& path, const ScalarSpec& def, std::uint64_t seed,
                       bool allow_density = false) {
  if (!v) return def;
  if (v->is_number()) return ScalarSpec::constant(v->get<double>());
  if (v->is_string()) {
    if (allow_density && v->get<std::string>() == "D0") {
      ScalarSpec s;
      s.scale_density = 1.0;
      return s;
    }
    r.error(path, allow_density ? "expected a number, an object or \"D0\"" : "expected a number or an object");
    return def;
  }
  if (!v->is_object()) {
    r.error(path, "expected a number or an object");
    return def;
  }
  Reader::Obj o(r, v, path);
  ScalarSpec s = ScalarSpec::constant(o.number("offset", 0.0));
  if (const ojson* modes = o.raw("modes")) {
    if (!modes->is_array()) {
      r.error(o.sub("modes"), "expected an array");
    } else {
      for (std::size_t m = 0; m < modes->size(); ++m) {
        Reader::Obj mo(r, &(*modes)[m], o.sub("modes") + "[" + std::to_string(m) + "]");
        CosineMode cm;
        cm.amp = mo.number("amp", 0.0);
        cm.phase = mo.number("phase", 0.0);
        const auto k = number_array(r, mo.raw("k"), mo.sub("k"));
        if (k.size() > 3) r.error(mo.sub("k"), "at most three wave numbers");
        for (std::size_t a = 0; a < std::min<std::size_t>(3, k.size()); ++a) {
          if (k[a] != std::floor(k[a])) r.error(mo.sub("k"), "wave numbers must be integers");
          cm.k[a] = static_cast<int>(k[a]);
        }
        s.modes.push_back(cm);
      }
    }
  }
  if (const ojson* rnd = o.raw("random")) {
    Reader::Obj ro(r, rnd, o.sub("random"));
    const long long count = ro.integer("count", 0);
    const double amp = ro.number("amp", 0.0);
    const long long kmax = ro.integer("kmax", 2);
    const auto sd = static_cast<std::uint64_t>(ro.integer("seed", static_cast<long long>(salted(seed, path) >> 1)));
    if (count < 0) r.error(ro.sub("count"), "must be >= 0");
    if (kmax < 1) r.error(ro.sub("kmax"), "must be >= 1");
    if (count > 0 && kmax >= 1) s.randomize(sd, static_cast<int>(count), amp, static_cast<int>(kmax));
  }
  if (o.has("scale_density")) {
    if (!allow_density) {
      o.raw("scale_density");
      r.error(o.sub("scale_density"), "only the c field can be scaled from D0");
    } else {
      s.scale_density = o.number("scale_density", 1.0);
    }
  }
  return s;
}

Matrix read_matrix(Reader& r, const ojson* v, const std::string& path, int n) {
  if (!v) {
    r.error(path, "missing coupling matrix");
    return Matrix(n);
  }
  if (v->is_string()) {
    try {
      return named_matrix(v->get<std::string>(), n);
    } catch (const Error& e) {
      r.error(path, e.what());
      return Matrix(n);
    }
  }
  Matrix m(n);
  if (!v->is_array() || static_cast<int>(v->size()) != n) {
    r.error(path, "expected a matrix name or " + std::to_string(n) + " rows");
    return m;
  }
  for (int i = 0; i < n; ++i) {
    const ojson& row = (*v)[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      r.error(path, "each row needs " + std::to_string(n) + " entries");
      return m;
    }
    for (int j = 0; j < n; ++j) {
      const ojson& e = row[static_cast<std::size_t>(j)];
      if (e.is_number()) {
        m(i, j) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, j) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        r.error(path, "entries are numbers or [re, im] pairs");
        return m;
      }
    }
  }
  return m;
}

bool planar_kind(ModelKind k) { return k == ModelKind::qc_planar || k == ModelKind::qc_planar_incompressible; }
bool spatial_kind(ModelKind k) { return k == ModelKind::qc3d || k == ModelKind::qc3d_stress; }

}  // namespace

ojson parse_json_strict(const std::string& text, const std::string& source) {
  check_duplicate_keys(text, source);
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << line_of(text, e.byte == 0 ? 0 : e.byte - 1) << ": " << e.what();
    fail(ErrorKind::parse_error, os.str());
  }
}

namespace {
std::vector<std::string> cross_field_violations(const RunConfig& c);
}

RunConfig config_from_json(const ojson& doc) {
  Reader r;
  RunConfig cfg;
  cfg.echo = doc;
  if (!doc.is_object()) fail(ErrorKind::config_error, "the configuration must be a JSON object");
  {
    Reader::Obj root(r, &doc, "");
    cfg.seed = static_cast<std::uint64_t>(root.integer("seed", 0));

    // grid
    int dim = 2;
    {
      Reader::Obj g(r, root.raw("grid"), "grid");
      if (!g.present()) r.error("grid", "missing");
      const auto n = number_array(r, g.raw("n"), "grid.n");
      if (g.present() && (n.size() < 2 || n.size() > 3)) r.error("grid.n", "needs two or three cell counts");
      dim = n.size() == 3 ? 3 : 2;
      std::array<int, 3> cells{1, 1, 1};
      for (std::size_t a = 0; a < std::min<std::size_t>(3, n.size()); ++a) {
        if (n[a] != std::floor(n[a]) || n[a] < Grid::min_cells)
          r.error("grid.n", "cell counts must be integers >= " + std::to_string(Grid::min_cells));
        cells[a] = static_cast<int>(n[a]);
      }
      std::array<double, 3> len{2.0 * std::numbers::pi, 2.0 * std::numbers::pi, dim == 3 ? 2.0 * std::numbers::pi : 1.0};
      if (const ojson* l = g.raw("length")) {
        if (l->is_number()) {
          for (int a = 0; a < dim; ++a) len[static_cast<std::size_t>(a)] = l->get<double>();
        } else {
          const auto lv = number_array(r, l, "grid.length");
          if (static_cast<int>(lv.size()) != dim) r.error("grid.length", "needs one length per axis of grid.n");
          for (std::size_t a = 0; a < std::min<std::size_t>(lv.size(), 3); ++a) len[a] = lv[a];
        }
      }
      for (int a = 0; a < dim; ++a)
        if (!(len[static_cast<std::size_t>(a)] > 0.0)) r.error("grid.length", "lengths must be positive");
      if (r.errors.empty()) cfg.grid = Grid(dim, cells, len);
    }

    // model
    {
      Reader::Obj m(r, root.raw("model"), "model");
      if (!m.present()) r.error("model", "missing");
      const std::string kind = m.string("kind", "qc_planar");
      try {
        cfg.model.kind = model_from_string(kind);
      } catch (const Error&) {
        r.error("model.kind", "unknown model '" + kind +
                                  "' (ehrenfest, qc3d, qc3d_stress, qc_planar, qc_planar_incompressible)");
      }
      cfg.model.beta = m.number("beta", 1.0);
      cfg.model.d_floor = m.number("d_floor", 0.0);
      if (cfg.model.d_floor < 0.0) r.error("model.d_floor", "must be >= 0");
    }

    // hamiltonian
    {
      Reader::Obj h(r, root.raw("hamiltonian"), "hamiltonian");
      HamiltonianSpec& hs = cfg.hamiltonian;
      hs.mass = h.number("mass", 1.0);
      hs.hbar = h.number("hbar", 1.0);
      hs.n = static_cast<int>(h.integer("n", 2));
      if (!(hs.mass > 0.0)) r.error("hamiltonian.mass", "must be positive");
      if (!(hs.hbar > 0.0)) r.error("hamiltonian.hbar", "must be positive");
      if (hs.n < 2 || hs.n > max_hilbert_dim)
        r.error("hamiltonian.n", "must be between 2 and " + std::to_string(max_hilbert_dim));
      const int n = std::clamp(hs.n, 2, max_hilbert_dim);
      hs.v0 = read_scalar(r, h.raw("v0"), "hamiltonian.v0", ScalarSpec::constant(0.0), cfg.seed);
      if (const ojson* cs = h.raw("couplings")) {
        if (!cs->is_array()) r.error("hamiltonian.couplings", "expected an array");
        else
          for (std::size_t i = 0; i < cs->size(); ++i) {
            const std::string p = "hamiltonian.couplings[" + std::to_string(i) + "]";
            Reader::Obj co(r, &(*cs)[i], p);
            CouplingSpec c;
            c.b = read_matrix(r, co.raw("matrix"), co.sub("matrix"), n);
            c.v = read_scalar(r, co.raw("v"), co.sub("v"), ScalarSpec::constant(0.0), cfg.seed);
            hs.couplings.push_back(c);
          }
      }
      if (const ojson* e = h.raw("eos")) {
        Reader::Obj eo(r, e, "hamiltonian.eos");
        const std::string kind = eo.string("kind", "none");
        if (kind == "polytropic") {
          const double kappa = eo.number("kappa", 1.0), gamma = eo.number("gamma", 2.0);
          if (!(kappa > 0.0)) r.error("hamiltonian.eos.kappa", "must be positive");
          if (!(gamma > 1.0)) r.error("hamiltonian.eos.gamma", "must exceed 1");
          if (kappa > 0.0 && gamma > 1.0) hs.eos = EquationOfState::polytropic(kappa, gamma);
        } else if (kind != "none") {
          r.error("hamiltonian.eos.kind", "expected none or polytropic");
        }
      }
    }

    // initial state
    {
      Reader::Obj in(r, root.raw("initial"), "initial");
      StateSpec& st = cfg.initial;
      const std::string mode = in.string("mode", "density_matrix");
      if (mode == "density_matrix") st.mode = StateMode::density_matrix;
      else if (mode == "pure_state") st.mode = StateMode::pure_state;
      else r.error("initial.mode", "expected density_matrix or pure_state");
      st.d = read_scalar(r, in.raw("D"), "initial.D", ScalarSpec::constant(1.0), cfg.seed);
      if (const ojson* u = in.raw("u")) {
        const ojson* comps = u;
        std::optional<Reader::Obj> uo;
        if (u->is_object()) {
          uo.emplace(r, u, "initial.u");
          st.u.project = uo->boolean("project", false);
          comps = uo->raw("components");
        }
        if (comps && comps->is_array()) {
          if (static_cast<int>(comps->size()) != dim) r.error("initial.u", "needs one component per grid axis");
          for (std::size_t a = 0; a < comps->size(); ++a)
            st.u.components.push_back(read_scalar(r, &(*comps)[a], "initial.u[" + std::to_string(a) + "]",
                                                  ScalarSpec::constant(0.0), cfg.seed));
        } else if (comps) {
          r.error("initial.u", "expected an array of components or {components, project}");
        }
      }
      {
        Reader::Obj q(r, in.raw("quantum"), "initial.quantum");
        st.quantum.theta = read_scalar(r, q.raw("theta"), "initial.quantum.theta", ScalarSpec::constant(0.0), cfg.seed);
        st.quantum.phi = read_scalar(r, q.raw("phi"), "initial.quantum.phi", ScalarSpec::constant(0.0), cfg.seed);
        st.quantum.radius =
            read_scalar(r, q.raw("radius"), "initial.quantum.radius", ScalarSpec::constant(1.0), cfg.seed);
        for (const char* key : {"amplitudes", "phases"}) {
          const ojson* v = q.raw(key);
          if (!v) continue;
          auto& dst = std::string(key) == "amplitudes" ? st.quantum.amplitudes : st.quantum.phases;
          if (!v->is_array()) {
            r.error(q.sub(key), "expected an array");
            continue;
          }
          for (std::size_t i = 0; i < v->size(); ++i)
            dst.push_back(read_scalar(r, &(*v)[i], q.sub(key) + "[" + std::to_string(i) + "]",
                                      ScalarSpec::constant(0.0), cfg.seed));
        }
      }
      st.b = read_scalar(r, in.raw("b"), "initial.b", ScalarSpec::constant(0.0), cfg.seed);
      const auto slope = number_array(r, in.raw("b_slope"), "initial.b_slope");
      if (in.has("b_slope") && slope.size() != 3) r.error("initial.b_slope", "needs three components");
      for (std::size_t a = 0; a < std::min<std::size_t>(3, slope.size()); ++a) st.b_slope[a] = slope[a];
      st.c = read_scalar(r, in.raw("c"), "initial.c", ScalarSpec::constant(0.0), cfg.seed, true);
      if (in.has("c") && cfg.model.kind == ModelKind::qc_planar_incompressible)
        r.error("initial.c", "the incompressible model uses c~ = model.beta * D and takes no c field");
      st.with_c = cfg.model.kind != ModelKind::qc_planar_incompressible;
    }

    // integrator
    {
      Reader::Obj it(r, root.raw("integrator"), "integrator");
      IntegratorConfig& ic = cfg.integrator;
      ic.dt = it.number("dt", ic.dt);
      ic.t_end = it.number("t_end", ic.t_end);
      if (it.has("steps")) {
        if (it.has("t_end")) r.error("integrator.steps", "give either t_end or steps");
        const long long steps = it.integer("steps", 0);
        if (steps < 0) r.error("integrator.steps", "must be >= 0");
        ic.t_end = static_cast<double>(steps) * ic.dt;
      }
      ic.cfl_cap = it.maybe_number("cfl_cap");
      ic.hermitize_each_stage = it.boolean("hermitize_each_stage", true);
      ic.renormalize_psi = it.boolean("renormalize_psi", true);
      ic.deterministic = it.boolean("deterministic", true);
      try {
        ic.validate();
      } catch (const Error& e) {
        r.error("integrator", e.what());
      }
    }

    // diagnostics, snapshots, output
    {
      Reader::Obj d(r, root.raw("diagnostics"), "diagnostics");
      cfg.diagnostics_every = static_cast<int>(d.integer("every", 1));
      if (cfg.diagnostics_every < 1) r.error("diagnostics.every", "must be >= 1");
      if (const ojson* loops = d.raw("loops")) {
        if (!loops->is_array()) r.error("diagnostics.loops", "expected an array");
        else
          for (std::size_t i = 0; i < loops->size(); ++i) {
            const std::string p = "diagnostics.loops[" + std::to_string(i) + "]";
            Reader::Obj lo(r, &(*loops)[i], p);
            LoopSpec ls;
            const auto c = number_array(r, lo.raw("center"), lo.sub("center"));
            if (c.size() < 2 || c.size() > 3) r.error(lo.sub("center"), "needs two or three coordinates");
            for (std::size_t a = 0; a < std::min<std::size_t>(3, c.size()); ++a) ls.center[a] = c[a];
            ls.radius = lo.number("radius", 0.0);
            ls.points = static_cast<int>(lo.integer("points", 64));
            ls.axis = static_cast<int>(lo.integer("axis", 2));
            if (!(ls.radius > 0.0)) r.error(lo.sub("radius"), "must be positive");
            if (ls.points < 32) r.error(lo.sub("points"), "a loop needs at least 32 points");
            if (ls.axis < 0 || ls.axis > 2) r.error(lo.sub("axis"), "must be 0, 1 or 2");
            cfg.loops.push_back(ls);
          }
      }
    }
    {
      Reader::Obj s(r, root.raw("snapshots"), "snapshots");
      cfg.snapshot_every = static_cast<int>(s.integer("every", 0));
      if (cfg.snapshot_every < 0) r.error("snapshots.every", "must be >= 0 (0 disables)");
    }
    {
      Reader::Obj o(r, root.raw("output"), "output");
      cfg.output_dir = o.string("dir", "");
    }
  }  // unknown keys of the root are reported here
  // cross-field problems join the same report once the grid itself is usable
  if (!r.errors.empty() && cfg.grid.dim() > 0)
    for (auto& e : cross_field_violations(cfg)) r.errors.push_back(std::move(e));
  if (!r.errors.empty()) {
    std::string msg = std::to_string(r.errors.size()) + " configuration error(s):";
    for (const auto& e : r.errors) msg += "\n  " + e;
    fail(ErrorKind::config_error, msg);
  }
  cfg.validate();
  return cfg;
}

namespace {

std::vector<std::string> cross_field_violations(const RunConfig& c) {
  const Grid& grid = c.grid;
  const ModelOptions& model = c.model;
  const HamiltonianSpec& hamiltonian = c.hamiltonian;
  const StateSpec& initial = c.initial;
  const auto& loops = c.loops;
  std::vector<std::string> errs;
  const int dim = grid.dim();
  if (planar_kind(model.kind) && dim != 2)
    errs.push_back("model.kind = " + to_string(model.kind) + " requires a 2D grid, but grid.n has " +
                   std::to_string(dim) + " entries");
  if (spatial_kind(model.kind) && dim != 3)
    errs.push_back("model.kind = " + to_string(model.kind) + " requires a 3D grid, but grid.n has " +
                   std::to_string(dim) + " entries");
  if (!loops.empty() && initial.mode != StateMode::pure_state)
    errs.push_back("diagnostics.loops needs initial.mode = pure_state (circulation uses the Berry connection)");
  if (initial.mode == StateMode::pure_state && !initial.quantum.radius.is_constant())
    errs.push_back("initial.quantum.radius must be 1 for initial.mode = pure_state");
  else if (initial.mode == StateMode::pure_state && initial.quantum.radius.offset != 1.0)
    errs.push_back("initial.quantum.radius must be 1 for initial.mode = pure_state");
  if (hamiltonian.n != 2 && static_cast<int>(initial.quantum.amplitudes.size()) != hamiltonian.n)
    errs.push_back("initial.quantum.amplitudes needs hamiltonian.n = " + std::to_string(hamiltonian.n) + " entries");
  if (!initial.quantum.phases.empty() && initial.quantum.phases.size() != initial.quantum.amplitudes.size())
    errs.push_back("initial.quantum.phases must match initial.quantum.amplitudes");
  if (!initial.u.components.empty() && static_cast<int>(initial.u.components.size()) != dim)
    errs.push_back("initial.u needs one component per grid axis");
  if (dim == 2 && (initial.b_slope != std::array<double, 3>{0.0, 0.0, 0.0} || !initial.b.is_constant() ||
                   initial.b.offset != 0.0))
    errs.push_back("initial.b and initial.b_slope apply to 3D grids only (planar runs use initial.c as c~)");
  if (model.kind == ModelKind::qc3d_stress && initial.mode == StateMode::pure_state)
    errs.push_back("model.kind = qc3d_stress needs initial.mode = density_matrix");
  return errs;
}

}  // namespace

void RunConfig::validate() const {
  const auto errs = cross_field_violations(*this);
  if (!errs.empty()) {
    std::string msg = std::to_string(errs.size()) + " configuration error(s):";
    for (const auto& e : errs) msg += "\n  " + e;
    fail(ErrorKind::config_error, msg);
  }
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  return config_from_json(parse_json_strict(text, source));
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

}  // namespace qcf
