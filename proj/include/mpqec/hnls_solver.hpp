#pragma once

#include <vector>

#include "mpqec/noise_model.hpp"

namespace mpqec {

// Operator-norm distance from H to the Lindblad span, with a primal point and a
// dual pair (rho0, rho1) certifying it:
//   Tr((rho0 - rho1) H) = 2 * value,   Tr((rho0 - rho1) S) = 0 for S in the span.
struct HnlsSolution {
  double value = 0.0;
  CMatrix S_star;
  CMatrix rho0, rho1;
  // Columns |i>_P: the first d0 diagonalise rho0 with weights lambdas(i), the
  // next ones diagonalise rho1, any remaining columns carry zero weight.
  CMatrix basis;
  RVector lambdas;
  int d0 = 0;
  int d1 = 0;
  double dual_value = 0.0;
  double gap = 0.0;   // value - dual_value
  int iterations = 0;
};

HnlsSolution solve_hnls(const NoiseModel& model, const Tolerance& tol = {});

// Standard-limit coefficient alpha = min ||sum_i K_i^dag K_i||, K_i = h_i 1 + sum_j hh_ij L_j,
// over (h, hh) with H - sum_j (h_j^* L_j + h_j L_j^dag) - sum_ij hh_ij L_i^dag L_j prop. to 1.
struct SqlCoefficient {
  double alpha = 0.0;
  std::vector<cplx> h;
  CMatrix hh;             // r x r Hermitian
  double offset = 0.0;    // the identity coefficient absorbed by the constraint
  double residual = 0.0;  // constraint residual at the optimum
  double gap = 0.0;
  int iterations = 0;
};

SqlCoefficient solve_sql_alpha(const NoiseModel& model, const Tolerance& tol = {});

}  // namespace mpqec
