#include "qcf/runner.hpp"

#include <cmath>
#include <cstdio>

#include "qcf/output.hpp"

namespace qcf {

namespace fs = std::filesystem;

State initial_state(const RunConfig& cfg) {
  State s = make_state(cfg.grid, cfg.hamiltonian.n, cfg.initial);
  s.validate();
  return s;
}

ModelContext make_context(const RunConfig& cfg) {
  return ModelContext(make_hamiltonian(cfg.grid, cfg.hamiltonian), cfg.model);
}

namespace {

std::string snapshot_stem(long long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%08lld", step);
  return buf;
}

}  // namespace

RunResult run(const RunConfig& cfg, const fs::path& out_dir, const std::function<void(long long, double)>& progress) {
  cfg.validate();
  cfg.integrator.validate();
  fs::create_directories(out_dir);
  RunManifest manifest(out_dir, cfg.echo);
  manifest.start();

  RunResult res;
  const fs::path csv_path = out_dir / "invariants.csv";
  const fs::path snap_dir = out_dir / "snapshots";
  std::vector<fs::path> snaps;
  std::unique_ptr<InvariantsWriter> csv;

  auto finish = [&](const std::string& status, const std::string& msg) {
    res.status = status;
    res.message = msg;
    if (csv) manifest.add_file(csv->path());
    for (const auto& p : snaps) manifest.add_file(p);
    manifest.finish(status, msg, res.steps, res.t_final);
  };

  bool stepping = false;
  try {
    State s = initial_state(cfg);
    const ModelContext ctx = make_context(cfg);
    std::vector<TracerLoop> loops;
    for (const auto& l : cfg.loops) loops.push_back(TracerLoop::circle(cfg.grid, l.center, l.radius, l.points, l.axis));
    csv = std::make_unique<InvariantsWriter>(csv_path, loops.size(), cfg.hamiltonian.n);

    // drifts accumulated between records
    double herm = 0.0, norm = 0.0;
    std::size_t floors = 0;
    double last_dt = 0.0;
    auto record = [&]() {
      DiagnosticsRecord r = diagnose(s, ctx, loops);
      r.dt = last_dt;
      if (s.mode == StateMode::density_matrix) r.herm_err = std::max(r.herm_err, herm);
      else r.norm_err = std::max(r.norm_err, norm);
      r.floor_hits = floors;
      csv->write(r);
      ++res.records;
      herm = norm = 0.0;
      floors = 0;
    };
    auto snapshot = [&](long long step) {
      for (auto& p : write_snapshot(snap_dir, snapshot_stem(step), s)) snaps.push_back(p);
    };

    const double t_end = cfg.integrator.t_end;
    const double tiny = 1e-12 * std::max(1.0, t_end);
    record();
    if (cfg.snapshot_every > 0) snapshot(0);

    std::array<VectorField, 4> stage_u;
    StageObserver observer;
    if (!loops.empty()) observer = [&](int k, const State& st) { stage_u[static_cast<std::size_t>(k)] = st.f.u; };

    long long step = 0;
    bool recorded_last = true;
    stepping = true;
    while (s.t < t_end - tiny) {
      double dt = std::min(cfg.integrator.dt, cfl_dt(s, ctx.ham(), cfg.integrator));
      if (s.t + dt > t_end - tiny) dt = t_end - s.t;
      auto [next, rep] = rk4_step(s, ctx, dt, cfg.integrator, observer);
      if (!loops.empty())
        for (auto& l : loops) l = advect_loop(l, {&stage_u[0], &stage_u[1], &stage_u[2], &stage_u[3]}, dt);
      s = std::move(next);
      ++step;
      res.steps = step;
      res.t_final = s.t;
      last_dt = dt;
      herm = std::max(herm, rep.hermiticity_drift);
      norm = std::max(norm, rep.norm_drift);
      floors += rep.vacuum_floor_activations;
      recorded_last = step % cfg.diagnostics_every == 0;
      if (recorded_last) record();
      if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) snapshot(step);
      if (progress) progress(step, s.t);
    }
    if (!recorded_last) record();
    res.t_final = s.t;
    finish("completed", "");
  } catch (const Error& e) {
    const bool blow = stepping && (e.kind() == ErrorKind::blow_up || e.kind() == ErrorKind::vacuum_error);
    finish(blow ? "blow_up" : "failed", e.what());
    if (blow) return res;
    // problems with the initial data are configuration problems
    if (!stepping && e.kind() != ErrorKind::io_error) fail(ErrorKind::config_error, std::string("initial state: ") + e.what());
    throw;
  }
  return res;
}

}  // namespace qcf
