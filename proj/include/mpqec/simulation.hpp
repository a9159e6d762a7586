#pragma once
// Dense reference dynamics: RK4 integration of the master equation, error
// correction interleaved after every step, and QFI from the spectrum.

#include <functional>
#include <string>
#include <vector>

#include "mpqec/kernels.hpp"
#include "mpqec/logical_dynamics.hpp"

namespace mpqec {

struct LocalOp {
  int site = 0;
  CMatrix op;
};

// Generator on a product space: omega * sum(signal) + sum(drift) as the
// Hamiltonian, and one dissipator per jump operator.
struct Generator {
  std::vector<int> dims;
  std::vector<LocalOp> signal;
  std::vector<LocalOp> drift;
  std::vector<LocalOp> jumps;

  long dim() const { return product(dims); }
};

// The single-probe model copied onto the first `probes` subsystems of `dims`;
// later subsystems (the ancilla) are noiseless.
Generator probe_generator(const NoiseModel& model, const std::vector<int>& dims, int probes);

struct EvolutionSpec {
  Generator gen;
  double t = 0.0;
  double dt = 1e-3;
  double omega = 0.0;
  const RecoveryChannel* recovery = nullptr;

  int steps() const;  // validates dt > 0, t >= 0 and t/dt integral
};

CMatrix lindblad_rhs(const Generator& gen, double omega, const CMatrix& rho,
                     kernels::Exec exec = kernels::Exec::Parallel);
CMatrix rk4_step(const Generator& gen, double omega, double dt, const CMatrix& rho,
                 kernels::Exec exec = kernels::Exec::Parallel);

// Throws PositivityLost if the final state has an eigenvalue below -tol.pos.
DensityMatrix evolve_lindblad(const DensityMatrix& rho0, const EvolutionSpec& spec, const Tolerance& tol = {},
                              kernels::Exec exec = kernels::Exec::Parallel);

// One step (RK4, then recovery) as a 4 x 4 map on the logical block, acting on
// the row-major vectorisation (00, 01, 10, 11).
CMatrix logical_step_map(const EvolutionSpec& spec, kernels::Exec exec = kernels::Exec::Parallel);

// The logical block after spec.steps() interleaved steps. The first step acts
// on the full state, so rho0 need not lie in the code space.
CMatrix evolve_with_qec_logical(const DensityMatrix& rho0, const EvolutionSpec& spec, const Tolerance& tol = {},
                                kernels::Exec exec = kernels::Exec::Parallel);

// Same, embedded back into the full space.
DensityMatrix evolve_with_qec(const DensityMatrix& rho0, const EvolutionSpec& spec, const Tolerance& tol = {},
                              kernels::Exec exec = kernels::Exec::Parallel);

// Applies a one-block logical map to block `block` of an n-block logical
// state (block 0 most significant).
CMatrix apply_block_map(const CMatrix& step, const CMatrix& rho, int block, int blocks);

// rho_01 * exp(-i (omega signal + offset_rotation + beta_L) t - gamma_L t).
CMatrix predicted_logical_state(const CMatrix& rho_logical, const LogicalDynamics& dyn, double omega, double t);

enum class QfiMethod { ClosedForm, SldSpectral, FiniteDifference };
std::string method_name(QfiMethod m);

struct QfiResult {
  double value = 0.0;
  QfiMethod method = QfiMethod::SldSpectral;
  double omega_step = 0.0;
};

// Throws IllConditioned when more than 1e-6 of |drho|^2 falls on eigenvalue
// pairs below tol.eig.
QfiResult qfi(const DensityMatrix& rho, const HermitianMatrix& drho, const Tolerance& tol = {});

using StateFamily = std::function<CMatrix(double omega)>;

// SLD formula with a central difference for the derivative.
QfiResult qfi_central(const StateFamily& family, double omega = 0.0, double h = 1e-5, const Tolerance& tol = {});

// 8 (1 - sqrt F(rho_{omega-h}, rho_{omega+h})) / (2h)^2, computed on the joint
// support of the two states.
QfiResult qfi_fidelity(const StateFamily& family, double omega = 0.0, double h = 1e-4);

double ghz_dephasing_qfi(int n, double gamma, double t);

// (|0...0> + |1...1>)/sqrt 2 on n qubits.
CVector ghz_state(int n);

struct TrajectoryPoint {
  double t = 0.0;
  double p0 = 0.0, p1 = 0.0;
  double coherence = 0.0;
  double qfi = 0.0;
};

// Logical trajectory sampled every `stride` steps; QFI from central
// differences of the step map in omega.
std::vector<TrajectoryPoint> logical_trajectory(const EvolutionSpec& spec, const CMatrix& rho_logical, int stride,
                                                double h = 1e-5, const Tolerance& tol = {},
                                                kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace mpqec
