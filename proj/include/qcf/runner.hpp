#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "qcf/config.hpp"

namespace qcf {

struct RunResult {
  /// completed, blow_up or failed
  std::string status = "completed";
  std::string message;
  long long steps = 0;
  double t_final = 0.0;
  std::size_t records = 0;
};

/// Builds the initial state and context from the config.
State initial_state(const RunConfig& cfg);
ModelContext make_context(const RunConfig& cfg);

/// Executes the time loop: invariants.csv every `diagnostics_every` steps
/// (and at the final time), snapshots every `snapshot_every` steps, tracer
/// loops advected with the stage velocities, manifest before and after.
/// Blow-ups end the run with status blow_up after flushing what exists.
/// `progress` is called after each step when set.
RunResult run(const RunConfig& cfg, const std::filesystem::path& out_dir,
              const std::function<void(long long, double)>& progress = {});

}  // namespace qcf
