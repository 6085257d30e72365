#pragma once

// Small named models used throughout the tests, the corpus and the CLI.

#include "causalkit/scm.hpp"

namespace causalkit::catalog {

/// X fair; Y = X xor N_Y with N_Y ~ Bernoulli(1/4).
FiniteSCM xor_scm();
/// X, Z fair and independent; Y = X xor Z. Variable order X, Z, Y.
FiniteSCM parity_scm();
/// X fair; Y1 = X xor U1, Y2 = X xor U2 with U1, U2 fair.
FiniteSCM fork_scm();
/// X1, X2 fair; Y = X1 xor X2.
FiniteSCM collider_scm();
/// H -> X -> M -> Y with H -> Y: H fair, X = H xor N_X (N_X ~ B(1/4)),
/// M = X xor N_M (N_M ~ B(1/3)), Y = (M or H) xor N_Y (N_Y ~ B(1/5)).
FiniteSCM mediator_chain_scm();
/// X1, X2 fair; Y = X1 xor X2 xor N_Y with N_Y ~ Bernoulli(1/4).
FiniteSCM composition_scm();
/// Four bits: X1, X2 fair; Y1 = (X1 xor X2) flipped by B(1/4) noise,
/// Y2 = (X1 and X2) flipped by B(1/3) noise. Both depend on (X1, X2) only
/// through X1 + X2, so abstraction_map pushes it forward.
FiniteSCM abstraction_scm();

/// f(x1, x2, y1, y2) = (x1 + x2, y1 + 2 y2) onto X in {0,1,2}, Y in {0..3},
/// with rho(X1) = rho(X2) = X and rho(Y1) = rho(Y2) = Y.
struct AbstractionMap {
  CoordinateSpace target;
  std::vector<std::size_t> f;
  IndexMap rho;
};
AbstractionMap abstraction_map(const CoordinateSpace& source);

}  // namespace causalkit::catalog
