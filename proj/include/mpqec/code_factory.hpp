#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpqec/hnls_solver.hpp"
#include "mpqec/noise_model.hpp"

namespace mpqec {

enum class CodeFamily { AncillaAssisted, SmallAncilla, RandomFree, SqlSmall, SqlRandom };

std::string family_name(CodeFamily f);
CodeFamily family_from_name(const std::string& name);

// Explicit codewords. Subsystems are the m probes in order, then one ancilla
// register (dimension 1 when absent).
struct DenseCode {
  int m = 1;
  int d = 0;
  int ancilla_dim = 1;
  CVector ket0, ket1;

  std::vector<int> dims() const;
  long dim() const;
};

struct PhaseSpec {
  std::uint64_t seed = 0;
  // Optional explicit phases per codeword, indexed by lexicographic rank in W_k.
  std::array<std::vector<double>, 2> table;
  bool has_table() const { return !table[0].empty() || !table[1].empty(); }
};

// Codewords described by letter counts: |k> is the normalised sum over all
// strings w with counts[k], written in the probe basis bases[k], carrying an
// ancilla colour (small-ancilla families) or a phase (random families).
struct StructuredCode {
  CodeFamily family = CodeFamily::SmallAncilla;
  int m = 0;
  int d = 0;
  std::array<std::vector<int>, 2> counts;
  std::array<CMatrix, 2> bases;
  std::optional<PhaseSpec> phases;
  std::array<std::vector<int>, 2> coloring;  // empty until enumerated
  int palette = 0;                           // colour register size (0 for ancilla-free)
  bool tagged = false;                       // extra qubit register holding k

  bool colored() const { return family == CodeFamily::SmallAncilla || family == CodeFamily::SqlSmall; }
  int ancilla_dim() const;
  double string_count(int k) const;
  double phase(int k, const std::vector<int>& word) const;
  double phase_packed(int k, std::uint64_t packed) const;
};

struct SmallAncillaOptions {
  long eager_coloring_cap = 20'000;  // colour at construction when every |W_k| is at most this
};

DenseCode build_ancilla_assisted(const HnlsSolution& sol);
StructuredCode build_small_ancilla(const HnlsSolution& sol, int m, const SmallAncillaOptions& opt = {});
StructuredCode build_random_free(const HnlsSolution& sol, int m, std::uint64_t seed);

// Single-probe input for the standard-limit codes: strictly positive weights
// and a basis per codeword.
struct SqlProbeInput {
  RVector lambda0, lambda1;
  CMatrix basis0, basis1;
};

StructuredCode build_sql_small(const SqlProbeInput& in, int m, const SmallAncillaOptions& opt = {});
StructuredCode build_sql_random(const SqlProbeInput& in, int m, std::uint64_t seed);

// Greedy colouring of both codeword string sets; fills coloring and palette.
void color_ancilla(StructuredCode& code, long cap = 10'000'000);

// Greedy bound on the colour register: max_k (swap degree of W_k) + 1.
long palette_bound(const StructuredCode& code);

DenseCode materialize(const StructuredCode& code);

struct OrthogonalityReport {
  bool orthogonal = false;
  double max_overlap = 0.0;
  std::string method;
};

// Checks span{|0>, L_i^(l)|0>} is orthogonal to span{|1>, L_i^(l)|1>}.
OrthogonalityReport check_L0_perp_L1(const DenseCode& code, const NoiseModel& model, double tol = 1e-9);
OrthogonalityReport check_L0_perp_L1(const StructuredCode& code, const NoiseModel& model, double tol = 1e-9);

struct QecPairResidual {
  int x = 0, y = 0;
  double residual0 = 0.0, residual1 = 0.0, cross = 0.0;
};

// Two-site reduced operators Tr_{rest}(|k><k'|) against delta_kk' (rho_k (x) rho_k - Q_k (x) Q_k).
// rho_k are the supplied reference states (normally the certificate pair);
// without them the code's own one-site marginals are used. Accepted when every
// residual is at most 10 tol and Q_k is traceless and HS-orthogonal to every L_i.
struct QecReport {
  bool satisfied = false;
  std::array<std::optional<CMatrix>, 2> Q;
  std::vector<QecPairResidual> pairs;
  double max_residual = 0.0;
  std::string note;
};

class CodeView;
QecReport check_qec_condition(const CodeView& view, const NoiseModel& model,
                              const std::optional<std::array<CMatrix, 2>>& reference = std::nullopt,
                              double tol = 1e-9);

}  // namespace mpqec
