#pragma once
// Uniform access to the reduced operators of a code, which is all that the
// logical-rate formula and the error-correction checks need.

#include <memory>
#include <vector>

#include "mpqec/code_factory.hpp"
#include "mpqec/kernels.hpp"

namespace mpqec {

class CodeView {
 public:
  virtual ~CodeView() = default;
  virtual int probes() const = 0;
  virtual int probe_dim() const = 0;
  // Tr_{not site}(|k><k'|), physical probe basis.
  virtual CMatrix site_rdm(int k, int kp, int site) const = 0;
  // Tr_{not {x,y}}(|k><k'|) for all x < y in kernels::pair_index order; the
  // first tensor factor is site x.
  virtual std::vector<CMatrix> pair_rdms(int k, int kp) const = 0;
  // True when every pair carries the same reduced operator.
  virtual bool symmetric() const { return false; }
};

std::unique_ptr<CodeView> make_view(const DenseCode& code, kernels::Exec exec = kernels::Exec::Parallel);
// For structured codes the view keeps a reference: the code must outlive it.
std::unique_ptr<CodeView> make_view(const StructuredCode& code, kernels::Exec exec = kernels::Exec::Parallel);

// Letter-basis pair table of the random families: for each pair, the swap sums
// of kernels::swap_phase_sums over W_k.
std::vector<CMatrix> random_swap_tables(const StructuredCode& code, int k, kernels::Exec exec);

}  // namespace mpqec
