#pragma once

#include <functional>
#include <optional>

#include "qcf/models.hpp"

namespace qcf {

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 0.0;
  std::optional<double> cfl_cap;
  bool hermitize_each_stage = true;
  bool renormalize_psi = true;
  bool deterministic = true;

  /// config-error on dt <= 0, t_end < 0 or a cap outside (0, 1].
  void validate() const;
};

struct StepReport {
  double t = 0.0;
  double dt_used = 0.0;
  /// Largest anti-Hermitian residue of rho over the stages, before hermitize.
  double hermiticity_drift = 0.0;
  /// Largest | |psi| - 1 | over the stages, before renormalization.
  double norm_drift = 0.0;
  std::size_t vacuum_floor_activations = 0;
  double min_d = 0.0;
  double min_eig_rho = 0.0;
};

/// Called with (stage index 0..3, stage state) before each RHS evaluation.
using StageObserver = std::function<void(int, const State&)>;

/// Replace rho by its Hermitian part cellwise; returns the largest residue removed.
double hermitize_field(MatrixField& rho);
/// Rescale psi to unit norm cellwise; returns the largest deviation removed.
double normalize_field(SpinorField& psi);
/// Smallest eigenvalue of rho (or 0 for pure states) over all cells.
double min_eigenvalue(const State& s);

/// Classical RK4 on the full field bundle. Throws blow-up on NaN/Inf.
std::pair<State, StepReport> rk4_step(const State& s, const ModelContext& ctx, double dt,
                                      const IntegratorConfig& cfg = {}, const StageObserver& observer = {});

/// cap * dx_min / max(|u| + c_s); the configured dt when no cap is set or
/// the signal speed vanishes. The run loop steps with min(dt, cfl_dt).
double cfl_dt(const State& s, const Hamiltonian& h, const IntegratorConfig& cfg);

}  // namespace qcf
