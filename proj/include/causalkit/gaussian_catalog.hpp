#pragma once

// Named linear-Gaussian models used by the tests, the corpus and the CLI.

#include "causalkit/gaussian.hpp"

namespace causalkit::gaussian::catalog {

/// X1 = N1, X2 = N2, Y1 = 3 X1 + X2 + U1, Y2 = X2 + U2, all noises standard.
LinearGaussianSCM abstraction_source();
/// X ~ N(0, 2), Y = 3 X + U with U ~ N(0, 5).
LinearGaussianSCM abstraction_target();
/// F = [[1,1,0,0],[0,0,1,2]], i.e. (x1 + x2, y1 + 2 y2).
Matrix abstraction_matrix();
/// rho(X1) = rho(X2) = X, rho(Y1) = rho(Y2) = Y.
std::vector<std::size_t> abstraction_rho();

/// X -> M -> Y with unit coefficients and unit noises.
LinearGaussianSCM chain_scm();
/// X ~ N(0,1); Y1 = X + U1, Y2 = X + U2 with standard U1, U2.
LinearGaussianSCM fork_scm();

/// X1, X2 standard; Y = X1 + X2 + N_Y.
LinearGaussianSCM composition_source();
/// X ~ N(0, 2); Y = X + N(0, 1).
LinearGaussianSCM composition_target();
/// X1 standard; Y = X1 + N(0, 2): the (X1, Y) subsystem of composition_source.
LinearGaussianSCM composition_subsystem();

/// The inclusion (x1, y) -> (x1, E[X2 | x1, y] + noise, y) of the (X1, Y)
/// subsystem, the sum map onto (X, Y), and their composite.
struct CompositionCase {
  GaussianTransformation inclusion;
  GaussianTransformation sum;
  GaussianTransformation composite;
};
CompositionCase composition_case();

}  // namespace causalkit::gaussian::catalog
