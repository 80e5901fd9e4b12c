#pragma once

// Fourth-order centered finite differences, quadrature and interpolation on
// the periodic box. Every operator here is first order: the model assembly
// only ever composes these.

#include <array>

#include "qcf/fields.hpp"

namespace qcf {

/// d/dx_axis of `width` interleaved doubles per cell:
/// (8 (f[+1] - f[-1]) - (f[+2] - f[-2])) / (12 h).
void derivative(std::span<const double> in, std::span<double> out, int width, const Grid& g, int axis);

ScalarField derivative(const ScalarField& f, int axis);
MatrixField derivative(const MatrixField& f, int axis);
SpinorField derivative(const SpinorField& f, int axis);

VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);
/// Curl of a 3-component field on a 3D grid; unsupported-operation on planar grids.
VectorField curl(const VectorField& v);
/// e3 . curl(v) on a planar grid; unsupported-operation on 3D grids.
ScalarField planar_curl(const VectorField& v);

MatrixVector grad_h(const MatrixField& f);
MatrixField div_h(const MatrixVector& v);
std::vector<SpinorField> grad_psi(const SpinorField& f);

/// u . grad f for precomputed gradients.
ScalarField advect(const VectorField& u, const VectorField& grad_f);
MatrixField advect(const VectorField& u, const MatrixVector& grad_f);

/// Cell sum times cell volume, in fixed index order.
double integrate(const ScalarField& f);
/// Cellwise integral of a matrix field.
Matrix integrate(const MatrixField& f);

/// Multilinear interpolation from cell centers; `x` is wrapped into the box.
double interpolate(const ScalarField& f, std::array<double, 3> x);
std::array<double, 3> interpolate(const VectorField& v, std::array<double, 3> x);

/// Wrap a position into [0, L) on every active axis.
std::array<double, 3> wrap(const Grid& g, std::array<double, 3> x);

/// Circular shift by `offset` cells along `axis` (out[i] = in[i - offset]).
ScalarField shift(const ScalarField& f, int axis, int offset);
MatrixField shift(const MatrixField& f, int axis, int offset);

}  // namespace qcf
