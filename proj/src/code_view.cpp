#include "mpqec/code_view.hpp"

#include <algorithm>
#include <mutex>

#include "mpqec/multiset.hpp"

namespace mpqec {

namespace {

class DenseView final : public CodeView {
 public:
  DenseView(const DenseCode& c, kernels::Exec exec) : c_(c), dims_(c.dims()), exec_(exec) {}

  int probes() const override { return c_.m; }
  int probe_dim() const override { return c_.d; }

  CMatrix site_rdm(int k, int kp, int site) const override {
    return reduced_outer(ket(k), ket(kp), dims_, {site});
  }

  std::vector<CMatrix> pair_rdms(int k, int kp) const override {
    return kernels::pair_reduced_outers(ket(k), ket(kp), dims_, c_.m, exec_);
  }

 private:
  const CVector& ket(int k) const { return k == 0 ? c_.ket0 : c_.ket1; }

  DenseCode c_;
  std::vector<int> dims_;
  kernels::Exec exec_;
};

class StructuredView final : public CodeView {
 public:
  StructuredView(const StructuredCode& c, kernels::Exec exec) : c_(c), exec_(exec) {
    int shared = 0;
    for (int i = 0; i < c.d; ++i) shared += std::min(c.counts[0][i], c.counts[1][i]);
    distance_ = c.m - shared;
    same_basis_ = max_abs(c.bases[0] - c.bases[1]) == 0.0;
  }

  int probes() const override { return c_.m; }
  int probe_dim() const override { return c_.d; }
  bool symmetric() const override { return !random(); }

  CMatrix site_rdm(int k, int kp, int site) const override {
    if (k != kp) {
      if (cross_vanishes(1)) return CMatrix::Zero(c_.d, c_.d);
      return dense().site_rdm(k, kp, site);
    }
    RVector w(c_.d);
    for (int i = 0; i < c_.d; ++i) w(i) = c_.counts[k][i] / static_cast<double>(c_.m);
    const CMatrix& u = c_.bases[k];
    return u * w.cast<cplx>().asDiagonal() * u.adjoint();
  }

  std::vector<CMatrix> pair_rdms(int k, int kp) const override {
    const int m = c_.m, d = c_.d, npairs = m * (m - 1) / 2;
    if (k != kp) {
      if (cross_vanishes(2)) return std::vector<CMatrix>(npairs, CMatrix::Zero(d * d, d * d));
      return dense().pair_rdms(k, kp);
    }
    const auto& n = c_.counts[k];
    const double norm = m * (m - 1.0);
    CMatrix diag = CMatrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        diag(i * d + j, i * d + j) = (i == j ? n[i] * (n[i] - 1.0) : double(n[i]) * n[j]) / norm;
    CMatrix uu = kron(c_.bases[k], c_.bases[k]);
    if (!random()) {
      CMatrix r = uu * diag * uu.adjoint();
      return std::vector<CMatrix>(npairs, r);
    }
    auto tables = random_swap_tables(c_, k, exec_);
    std::vector<CMatrix> out(npairs);
    for (int p = 0; p < npairs; ++p) {
      CMatrix t = diag;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (i != j) t(i * d + j, j * d + i) = std::conj(tables[p](i, j));
      out[p] = uu * t * uu.adjoint();
    }
    return out;
  }

 private:
  bool random() const { return c_.family == CodeFamily::RandomFree || c_.family == CodeFamily::SqlRandom; }

  // Cross terms on `sites` sites vanish when the tag separates the codewords or
  // when the supports are farther apart than `sites` letters.
  bool cross_vanishes(int sites) const { return c_.tagged || (same_basis_ && distance_ > sites); }

  const CodeView& dense() const {
    std::call_once(dense_once_, [&] {
      dense_code_ = materialize(c_);
      dense_view_ = std::make_unique<DenseView>(dense_code_, exec_);
    });
    return *dense_view_;
  }

  const StructuredCode& c_;
  kernels::Exec exec_;
  int distance_ = 0;
  bool same_basis_ = false;
  mutable std::once_flag dense_once_;
  mutable DenseCode dense_code_;
  mutable std::unique_ptr<DenseView> dense_view_;
};

}  // namespace

std::unique_ptr<CodeView> make_view(const DenseCode& code, kernels::Exec exec) {
  if (code.ket0.size() != code.dim() || code.ket1.size() != code.dim())
    throw ShapeError("dense code vector length does not match its dimensions");
  return std::make_unique<DenseView>(code, exec);
}

std::unique_ptr<CodeView> make_view(const StructuredCode& code, kernels::Exec exec) {
  for (int k = 0; k < 2; ++k)
    if (static_cast<int>(code.counts[k].size()) != code.d) throw ShapeError("letter counts do not match d");
  return std::make_unique<StructuredView>(code, exec);
}

std::vector<CMatrix> random_swap_tables(const StructuredCode& code, int k, kernels::Exec exec) {
  const int bits = kernels::bits_for(code.d);
  std::vector<std::uint64_t> packed;
  packed.reserve(static_cast<std::size_t>(code.string_count(k)));
  multiset::for_each_string(code.counts[k], [&](const std::vector<int>& w) { packed.push_back(kernels::pack(w, bits)); });
  return kernels::swap_phase_sums(packed, code.m, code.d, bits,
                                  [&](std::uint64_t c) { return code.phase_packed(k, c); }, exec);
}

}  // namespace mpqec
