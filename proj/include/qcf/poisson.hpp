#pragma once

#include "qcf/fields.hpp"

namespace qcf {

/// Fourier symbol used for the periodic Laplacian.
enum class LaplacianSymbol {
  /// -|k|^2: the continuum operator, spectrally accurate.
  spectral,
  /// The symbol of div(grad(.)) built from the fourth-order stencils, so that
  /// a projection with it leaves an exactly (to roundoff) discretely
  /// divergence-free field.
  fd4_composite,
};

/// Solve Lap(phi) = rhs with zero mean. The rhs mean must vanish to 1e-8
/// relative to its max norm, otherwise incompatible-rhs is thrown.
ScalarField poisson_solve(const ScalarField& rhs, LaplacianSymbol symbol = LaplacianSymbol::spectral);

/// Apply the Laplacian with the given symbol through the Fourier transform.
ScalarField apply_laplacian(const ScalarField& f, LaplacianSymbol symbol);

/// v - grad(phi) with div(grad(phi)) = div(v), using the fd4 composite symbol.
VectorField project_divergence_free(const VectorField& v);

}  // namespace qcf
