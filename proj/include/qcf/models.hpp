#pragma once

#include <string>

#include "qcf/brackets.hpp"
#include "qcf/hamiltonian.hpp"
#include "qcf/state.hpp"

namespace qcf {

enum class ModelKind { ehrenfest, qc3d, qc3d_stress, qc_planar, qc_planar_incompressible };

std::string to_string(ModelKind k);
ModelKind model_from_string(const std::string& s);

/// Deliberate defects used by the mutation checks.
enum class Mutation {
  none,
  stress_sign,   ///< negate the third stress-tensor term
  nambu_order,   ///< multiply bracket factors as dG dF
};

struct ModelOptions {
  ModelKind kind = ModelKind::qc_planar;
  /// Incompressible planar model: c~ = beta D.
  double beta = 1.0;
  /// Floor applied to D inside the D^-1 factors of the quantum equation.
  double d_floor = 0.0;
  Mutation mutation = Mutation::none;
};

/// Time derivatives plus bookkeeping from one evaluation.
struct Rhs {
  Fields f;
  std::size_t floor_hits = 0;
};

/// Potentials are static, so H and grad H are assembled once per context.
class ModelContext {
 public:
  ModelContext(const Hamiltonian& ham, const ModelOptions& opt);

  const Hamiltonian& ham() const noexcept { return ham_; }
  const ModelOptions& options() const noexcept { return opt_; }
  const MatrixField& h() const noexcept { return h_; }
  const MatrixVector& grad_h() const noexcept { return gh_; }
  void set_floor(double d_floor) noexcept { opt_.d_floor = d_floor; }

 private:
  Hamiltonian ham_;
  ModelOptions opt_;
  MatrixField h_;
  MatrixVector gh_;
};

/// Dispatch on options().kind and the state mode.
Rhs evaluate_rhs(const State& s, const ModelContext& ctx);

Rhs rhs_ehrenfest(const State& s, const ModelContext& ctx);
Rhs rhs_qc3d(const State& s, const ModelContext& ctx);
Rhs rhs_qc3d_stress_form(const State& s, const ModelContext& ctx);
Rhs rhs_qc_planar(const State& s, const ModelContext& ctx);
Rhs rhs_qc_planar_incompressible(const State& s, const ModelContext& ctx);
Rhs rhs_pure_state_planar(const State& s, const ModelContext& ctx);

/// Convenience overloads building a temporary context.
Rhs rhs_ehrenfest(const State& s, const Hamiltonian& h, ModelOptions opt = {});
Rhs rhs_qc3d(const State& s, const Hamiltonian& h, ModelOptions opt = {});
Rhs rhs_qc3d_stress_form(const State& s, const Hamiltonian& h, ModelOptions opt = {});
Rhs rhs_qc_planar(const State& s, const Hamiltonian& h, ModelOptions opt = {});
Rhs rhs_qc_planar_incompressible(const State& s, const Hamiltonian& h, ModelOptions opt = {});
Rhs rhs_pure_state_planar(const State& s, const Hamiltonian& h, ModelOptions opt = {});

/// The c-like field entering the brackets: c~ = beta D for the
/// incompressible model, the stored c otherwise.
ScalarField bracket_c(const State& s, const ModelOptions& opt);

/// D (dt + u.grad) <sigma_k> - {V_I, c (1 - <sigma_k>^2)}_b evaluated with
/// the QC right-hand side of the state's geometry. Requires a pure-dephasing
/// Hamiltonian (unsupported-model otherwise).
ScalarField dephasing_local_law_residual(const State& s, const Hamiltonian& h, ModelOptions opt = {});

/// d rho implied by a right-hand side: the rho slot, or dpsi psi^dag + psi dpsi^dag.
MatrixField density_rate(const State& s, const Rhs& r);

/// Momentum-balance pieces: -int <Dcal, d_l H> for the current state.
std::array<double, 3> von_neumann_force(const State& s, const ModelContext& ctx);

}  // namespace qcf
