#pragma once
// Effective logical channel under infinitely fast error correction: the
// logical qubit sees a Z rotation and a Z dephasing at rate gamma_L.

#include <array>
#include <vector>

#include "mpqec/code_factory.hpp"
#include "mpqec/code_view.hpp"
#include "mpqec/noise_model.hpp"

namespace mpqec {

struct LogicalDynamics {
  int m = 0;
  int r = 0;
  double signal = 0.0;           // <0|sum_l H^(l)|0> - <1|sum_l H^(l)|1>
  double offset_rotation = 0.0;  // the same difference for the gauge Hamiltonian shift
  double gamma_L = 0.0;
  double beta_L = 0.0;
  double term1 = 0.0;            // -sum Re[b0 b1^*]
  double term2 = 0.0;            // (1/2) sum (<0|L^dag L|0> + <1|L^dag L|1>)
  double trace_norm_B = 0.0;
  // Columns indexed p = l * r + i.
  std::array<CVector, 2> b;                  // <k|L_i^(l)|k>
  std::array<std::vector<CMatrix>, 2> a;     // per site: <k|L_i^dag L_j|k> - mu_i delta_ij
  std::array<std::vector<CMatrix>, 2> eta;   // per site pair: <k|L_i^(x)dag L_j^(y)|k>
  RVector mu;
  CMatrix gram_X, gram_Y;
};

// Requires L0 perp L1; the StructuredCode and DenseCode overloads check it and
// throw OrthogonalityViolated. The view overload trusts the caller.
LogicalDynamics logical_rates(const CodeView& view, const GaugedModel& gauged, const Tolerance& tol = {},
                              kernels::Exec exec = kernels::Exec::Parallel);
LogicalDynamics logical_rates(const StructuredCode& code, const GaugedModel& gauged, const Tolerance& tol = {},
                              kernels::Exec exec = kernels::Exec::Parallel);
LogicalDynamics logical_rates(const DenseCode& code, const GaugedModel& gauged, const Tolerance& tol = {},
                              kernels::Exec exec = kernels::Exec::Parallel);

// Kraus operators |0_L><R_p| + |1_L><S_p|. Columns of R and S are orthonormal
// and together span the whole space; a column of S may be zero when the
// dimension is odd.
struct RecoveryChannel {
  CVector ket0, ket1;
  CMatrix R, S;

  int kraus_count() const { return static_cast<int>(R.cols()); }
  // Returns the 2 x 2 logical block of the recovered state.
  CMatrix apply(const CMatrix& rho) const;
  CMatrix completeness() const;  // sum_p K_p^dag K_p
};

RecoveryChannel build_optimal_recovery(const DenseCode& code, const GaugedModel& gauged, const Tolerance& tol = {});

// gamma(R) and beta(R) for an arbitrary recovery of the above form.
std::pair<double, double> recovery_rates(const DenseCode& code, const GaugedModel& gauged, const RecoveryChannel& rec);

struct LowerBoundReport {
  double bound = 0.0;
  int skipped_X = 0;
  int skipped_Y = 0;
};

// |sum_p <e_p|B|f_p>| with e_p, f_p Gram-Schmidt orthonormalised from the X and
// Y columns in index order; a lower bound on the trace norm of B.
LowerBoundReport trace_norm_lower_bound_check(const CodeView& view, const GaugedModel& gauged,
                                              const Tolerance& tol = {});

// n^2 signal^2 t^2 exp(-2 n gamma_L t) for n logical qubits in a GHZ state.
double predicted_qfi(const LogicalDynamics& dyn, int n, double t);

// Same, with the logical qubit count derived from a unit budget.
double resource_qfi(const LogicalDynamics& dyn, int units_per_block, int units, double t);

}  // namespace mpqec
