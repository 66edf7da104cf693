#pragma once

#include "entrocap/states.hpp"

namespace entrocap {

// Fidelity F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1^2 (squared convention;
// F = |<psi|phi>|^2 on pure states).
double fidelity(const Matrix& rho, const Matrix& sigma);
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

// Generalized fidelity for subnormalized states:
// ( sqrt(F(rho,sigma)) + sqrt((1-tr rho)(1-tr sigma)) )^2, clamped to [0,1].
double generalized_fidelity(const Matrix& rho, const Matrix& sigma);
double generalized_fidelity(const DensityOperator& rho, const DensityOperator& sigma);

// Half trace norm of the difference of the trace-completed embeddings
// rho (+) [1 - tr rho]; equals the usual trace distance on normalized states.
double trace_distance(const Matrix& rho, const Matrix& sigma);
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

// Purified (sine) distance: sqrt(1 - generalized fidelity).
double purified_distance(const Matrix& rho, const Matrix& sigma);
double purified_distance(const DensityOperator& rho, const DensityOperator& sigma);

// Membership of `candidate` in the purified-distance ball of radius eps
// around `center` (both possibly subnormalized), with slack `slack` on the
// radius comparison.
bool in_epsilon_ball(const DensityOperator& candidate, const DensityOperator& center, double eps,
                     double slack = 1e-9);

}  // namespace entrocap
