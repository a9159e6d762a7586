#pragma once

#include <vector>

#include "mpqec/linalg.hpp"

namespace mpqec {

// minimise q . y  subject to  F(y) = F[0] + sum_k y_k F[k+1]  positive definite,
// with every F[k] Hermitian of the same size.
struct LmiProblem {
  std::vector<CMatrix> F;
  RVector q;
};

struct LmiResult {
  RVector y;
  CMatrix Z;           // approximate dual: Tr(F_k Z) = q_k, Z >= 0
  double gap = 0.0;    // barrier duality gap (size / s at the last centring)
  int newton_steps = 0;
};

// Log-barrier path following with damped Newton centring. y0 must be strictly
// feasible. Throws OptimizerStalled when the Newton budget runs out.
LmiResult solve_lmi(const LmiProblem& prob, RVector y0, double gap_tol, int max_newton = 5000);

}  // namespace mpqec
