#pragma once

// Nambu brackets and the geometric objects built from them. Gradients are
// always passed in (or taken with the fourth-order stencil), so the same
// kernels serve analytic-gradient injection and grid assembly.

#include <array>

#include "qcf/state.hpp"

namespace qcf {

using Vec3 = std::array<double, 3>;
using MatrixGrad = std::array<Matrix, 3>;

/// gb . (gF x gG)
double nambu_scalar(const Vec3& gb, const Vec3& gF, const Vec3& gG) noexcept;

/// sum eps_ijk gb_i dF_j dG_k with the matrix product in the written order
/// (F factor on the left). Throws shape-error on dimension mismatch.
Matrix nambu_matrix(const Vec3& gb, const MatrixGrad& gF, const MatrixGrad& gG);

/// Nambu bracket of two scalar fields, gradients taken with the FD4 stencil.
ScalarField nambu_scalar_field(const BracketGeometry& geo, const ScalarField& f, const ScalarField& g);
ScalarField nambu_scalar_field(const ScalarField& b, const ScalarField& f, const ScalarField& g);

/// {F, G}_b for matrix fields given their per-axis gradients. With
/// `reversed` the factors are multiplied as dG dF (mutation hook for the
/// ordering checks).
MatrixField nambu_matrix_field(const BracketGeometry& geo, const MatrixVector& gF, const MatrixVector& gG,
                               bool reversed = false);
/// {f, G}_b with scalar f.
MatrixField nambu_matrix_field(const BracketGeometry& geo, const VectorField& gf, const MatrixVector& gG);
/// {F, g}_b with scalar g.
MatrixField nambu_matrix_field(const BracketGeometry& geo, const MatrixVector& gF, const VectorField& gg);

/// dx F dy G - dy F dx G on a planar grid; unsupported-operation in 3D.
ScalarField planar_bracket(const ScalarField& f, const ScalarField& g);
MatrixField planar_bracket(const MatrixField& f, const MatrixField& g);

/// Gamma_i = (i hbar / 2) [rho, d_i rho].
MatrixVector mead_connection(const MatrixField& rho, const MatrixVector& grad_rho, double hbar);
MatrixVector mead_connection(const MatrixField& rho, double hbar);

/// (Gamma x gb)_i = eps_ijk Gamma_j gb_k.
MatrixVector cross_geometry(const MatrixVector& gamma, const BracketGeometry& geo);

/// D rho + div_h(c Gamma x grad b).
MatrixField von_neumann(const ScalarField& d, const MatrixField& rho, const BracketGeometry& geo,
                        const ScalarField& c, double hbar);

/// T_jk = (p - c gb.X) delta_jk + c X_j gb_k + c <(gb x Gamma)_j, d_k H>
///        + c <(grad H x gb)_j, Gamma_k>,   X = <Gamma, x grad H>.
/// `flip_term` in 1..4 negates that term (mutation hook); 0 leaves it intact.
StressField stress_tensor(const ScalarField& p, const ScalarField& c, const BracketGeometry& geo,
                          const MatrixVector& gamma, const MatrixVector& grad_h, int flip_term = 0);

/// Pointwise stress tensor for analytic-gradient injection.
std::array<std::array<double, 3>, 3> stress_tensor_point(double p, double c, const Vec3& gb, const MatrixGrad& gamma,
                                                         const MatrixGrad& grad_h);

/// A_l = <psi, -i hbar d_l psi> = hbar Im(psi^dagger d_l psi).
VectorField berry_connection(const SpinorField& psi, double hbar);
VectorField berry_connection(const SpinorField& psi, const std::vector<SpinorField>& grad_psi, double hbar);

/// F~_l = -(d_l H - <psi, d_l H psi>).
MatrixVector fluctuation_force(const SpinorField& psi, const MatrixVector& grad_h);

/// Throws unnormalized-state when |psi| deviates from one by more than tol.
void require_normalized(const SpinorField& psi, double tol, const char* what);

}  // namespace qcf
