#pragma once

#include <optional>
#include <vector>

#include "qcf/models.hpp"

namespace qcf {

/// Hamiltonian functional. Density-matrix mode:
///   int (M D |u|^2 / 2 + D E(D) + <rho~, H + (i hbar / D^2) c {rho~, H}>),  rho~ = D rho.
/// Pure-state mode:
///   int (M D |u|^2 / 2 + D E(D) + <psi, D H psi + c gb . grad H x (i hbar grad + A) psi>).
/// Planar grids use c~ with the planar bracket; the incompressible model
/// uses c~ = beta D and drops the internal energy.
double energy(const State& s, const ModelContext& ctx);

/// C1 with F = trace (gives the mass) and F = squared Frobenius norm.
double casimir_c1_trace(const State& s);
double casimir_c1_purity(const State& s);

/// Lambda_n = L^n |rho|, L f = D^-1 (grad c x gb) . grad f, n in {1, 2}.
ScalarField lambda_n(const State& s, const ModelOptions& opt, int n);

enum class C2Kind { bc, b2, c_lambda1 };
/// int D Phi. 3D: Phi(b, c, Lambda1) with the full b (slope included).
/// Planar: the b slot is replaced by c~ (bc -> c~, b2 -> c~^2).
double casimir_c2(const State& s, const ModelOptions& opt, C2Kind kind);

/// int (M u - A) . (grad c x grad b); pure-state mode on a 3D grid.
double cross_helicity(const State& s, double mass, double hbar);

/// Omega = e3 . curl(M v - A) on planar pure-state grids.
ScalarField canonical_vorticity(const State& s, double mass, double hbar);
/// Planar Casimirs: int Omega, int Omega Theta (Theta = id of c~, or of D
/// for the incompressible model), int Phi(D) with Phi(D) = D^2.
struct PlanarCasimirs {
  double omega = 0.0;
  double omega_theta = 0.0;
  double d_phi = 0.0;
};
PlanarCasimirs planar_casimirs(const State& s, const ModelContext& ctx);

struct Totals {
  Matrix rho_tot;
  double purity = 0.0;
  double trace_error = 0.0;
  std::array<double, 3> momentum{0.0, 0.0, 0.0};
  double mass = 0.0;
};
/// rho_tot = int D rho / int D, purity |rho_tot|^2, int M D u.
Totals totals(const State& s, double mass);

/// <sigma_k> field for n = 2, k = 0, 1, 2.
ScalarField sigma_expectation(const State& s, int k);

/// Closed polyline of tracer positions.
struct TracerLoop {
  std::vector<std::array<double, 3>> points;

  /// Circle of `k` points in the plane normal to `axis` (z for planar).
  static TracerLoop circle(const Grid& g, std::array<double, 3> center, double radius, int k, int axis = 2);
};

/// Trapezoid quadrature of (M u - A) . dq with minimum-image segments.
/// Throws degenerate-loop on coincident nodes, requires-pure-state without psi.
double circulation(const State& s, const TracerLoop& loop, double mass, double hbar);
/// Same quadrature for an arbitrary vector field sampled at the nodes.
double line_integral(const Grid& g, const VectorField& w, const TracerLoop& loop);
/// One RK4 step of dq/dt = u(q) with the velocity at the three times
/// t, t + dt/2, t + dt given as fields.
TracerLoop advect_loop(const TracerLoop& loop, const VectorField& u0, const VectorField& u_half,
                       const VectorField& u1, double dt);
/// RK4 step coupled to the flow integrator: stage k of the loop uses the
/// velocity of PDE stage k (times t, t + dt/2, t + dt/2, t + dt).
TracerLoop advect_loop(const TracerLoop& loop, const std::array<const VectorField*, 4>& stages, double dt);
/// Frozen-velocity convenience overload.
TracerLoop advect_loop(const TracerLoop& loop, const VectorField& u, double dt);

/// One row of the invariants table. NaN marks not-applicable entries.
struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double h = 0.0;
  double mass = 0.0;
  std::array<double, 3> momentum{0.0, 0.0, 0.0};
  double c1_trace = 0.0;
  double c1_purity = 0.0;
  double c2_bc = 0.0;
  double c2_b2 = 0.0;
  double c2_c_lambda1 = 0.0;
  double lambda1_max = 0.0;
  double lambda2_max = 0.0;
  double c3 = 0.0;
  double cp_omega = 0.0;
  double cp_omega_theta = 0.0;
  double cp_d_phi = 0.0;
  Matrix rho_tot;
  double purity = 0.0;
  double tr_rho_tot_err = 0.0;
  double min_d = 0.0;
  double min_eig_rho = 0.0;
  double herm_err = 0.0;
  double norm_err = 0.0;
  std::size_t floor_hits = 0;
  std::vector<double> loop_circulation;
};

DiagnosticsRecord diagnose(const State& s, const ModelContext& ctx, const std::vector<TracerLoop>& loops = {});

}  // namespace qcf
