#pragma once

// Oracle harness: continuum-identity residuals under grid refinement,
// pointwise algebra on injected gradients, reductions, equivariance and the
// dephasing study. Every check is deterministic in its seed.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcf/config.hpp"
#include "qcf/models.hpp"
#include "qcf/presets.hpp"

namespace qcf {

/// Least-squares slope of log(residual) against log(N) with sign flipped,
/// i.e. the order p in residual ~ N^-p. Needs two or more positive entries.
double fitted_order(const std::vector<int>& grids, const std::vector<double>& residuals);

struct ConvergenceReport {
  std::string name;
  std::vector<int> grids;
  std::vector<double> residuals;
  double order = 0.0;
  double threshold = 3.5;
  /// Residuals at or below this count as exact agreement (order not fitted).
  double exact_floor = 0.0;
  bool monotone = true;
  bool pass = false;
  std::uint64_t seed = 0;
  std::string note;

  /// Fills order, monotone and pass from grids/residuals. `expect_fail`
  /// marks a mutation run: pass then means the order collapsed below 1.
  void finalize(bool expect_fail = false);
  nlohmann::ordered_json to_json() const;
};

struct ResidualReport {
  std::string name;
  double max_residual = 0.0;
  double l2_residual = 0.0;
  double threshold = 0.0;
  std::size_t samples = 0;
  bool pass = false;
  std::uint64_t seed = 0;
  /// Where a failing input was saved, empty otherwise.
  std::string snapshot;
  std::string note;

  nlohmann::ordered_json to_json() const;
};

/// Smooth verification presets: random low modes around fixed offsets.
ScalarSpec smooth_spec(double offset, double amp, std::uint64_t seed, int count = 4);
StateSpec smooth_state_spec(std::uint64_t seed, int dim, StateMode mode = StateMode::density_matrix,
                            bool mixed = true);
HamiltonianSpec smooth_hamiltonian_spec(std::uint64_t seed, bool eos = true);

/// ||rhs_qc3d - rhs_qc3d_stress_form||_max over N^3 grids. `constant_rho`
/// uses a spatially constant density matrix and b (the forms then agree exactly).
ConvergenceReport check_form_equivalence(const std::vector<int>& grids, std::uint64_t seed,
                                         Mutation mutation = Mutation::none, bool constant_rho = false);

/// The divergence identity
///   i hbar div([grad H, rho] x c grad b) = -i hbar c ({rho,H} + {H,rho}) + i hbar [{c,H}, rho]
/// and the two equalities used to reach the momentum equation. Three
/// reports in that order.
std::vector<ConvergenceReport> check_appendix_identities(const std::vector<int>& grids, std::uint64_t seed,
                                                         Mutation mutation = Mutation::none,
                                                         bool constant_b = false);

/// Stress symmetry, Nambu antisymmetry, matrix-bracket dagger identity, the
/// bracket/commutator identity and the Pauli table on `samples` random
/// points with analytic gradients.
std::vector<ResidualReport> check_pointwise_algebra(std::size_t samples, std::uint64_t seed);

/// Reference pure-dephasing preset on an N x N planar grid: H = V0 + V_I sigma_z
/// with spatially varying V_I, varying c~, uniform psi0 = (1, 1)/sqrt 2.
struct DephasingPreset {
  Grid grid;
  HamiltonianSpec ham;
  StateSpec state;
  double dt = 0.0;
  long long steps = 0;
};
DephasingPreset dephasing_preset(int n, long long steps = 2000, double dt = 2e-3);

struct DephasingReport {
  /// (a) Ehrenfest keeps <sigma_z> at zero, (b) Ehrenfest (D, u) equal the
  /// V_I = 0 classical run, (c) QC <sigma_z> exceeds Ehrenfest by 10^3,
  /// (d) the local transport law residual converges.
  ResidualReport ehrenfest_sigma, ehrenfest_vs_classical, qc_vs_ehrenfest;
  ConvergenceReport local_law;
  /// b-constant negative control: (c) is expected to fail.
  ResidualReport negative_control;
  /// purity of rho_tot over the first steps of the QC run
  std::vector<double> qc_purity;
  bool pass() const;
  nlohmann::ordered_json to_json() const;
};
DephasingReport check_dephasing(const DephasingPreset& preset, const std::vector<int>& law_grids);

/// Ehrenfest reduction, decoupling, unitary covariance, translation
/// covariance (bitwise) and the planar embedding over `embed_steps` steps.
std::vector<ResidualReport> check_reductions_and_equivariance(std::uint64_t seed, int embed_n = 64,
                                                              int embed_steps = 100);

/// CLI suites: algebra, convergence, dephasing, reductions, all. Writes one
/// JSON report per suite into `out_dir` (when not empty) and returns the
/// combined pass flag; `log` receives the summary table.
bool run_verification_suite(const std::string& suite, const std::filesystem::path& out_dir, std::ostream& log,
                            bool quick = false);

}  // namespace qcf
