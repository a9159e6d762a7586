#include "mpqec/code_factory.hpp"

#include <algorithm>
#include <cmath>

#include "mpqec/code_view.hpp"
#include "mpqec/kernels.hpp"
#include "mpqec/multiset.hpp"

namespace mpqec {

std::string family_name(CodeFamily f) {
  switch (f) {
    case CodeFamily::AncillaAssisted: return "ancilla_assisted";
    case CodeFamily::SmallAncilla: return "small_ancilla";
    case CodeFamily::RandomFree: return "random_free";
    case CodeFamily::SqlSmall: return "sql_small";
    case CodeFamily::SqlRandom: return "sql_random";
  }
  return "unknown";
}

CodeFamily family_from_name(const std::string& name) {
  for (auto f : {CodeFamily::AncillaAssisted, CodeFamily::SmallAncilla, CodeFamily::RandomFree, CodeFamily::SqlSmall,
                 CodeFamily::SqlRandom})
    if (family_name(f) == name) return f;
  throw InvalidInput("unknown code family '" + name + "'");
}

std::vector<int> DenseCode::dims() const {
  std::vector<int> out(m, d);
  out.push_back(ancilla_dim);
  return out;
}

long DenseCode::dim() const { return product(dims()); }

int StructuredCode::ancilla_dim() const {
  int base = colored() ? std::max(palette, 1) : 1;
  return tagged ? 2 * base : base;
}

double StructuredCode::string_count(int k) const { return multiset::string_count(counts[k]); }

namespace {

std::uint64_t phase_key(std::uint64_t seed, int k) {
  return kernels::splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1)));
}

}  // namespace

double StructuredCode::phase(int k, const std::vector<int>& word) const {
  if (!phases) return 0.0;
  if (phases->has_table()) {
    const auto& t = phases->table[k];
    long r = multiset::rank(word, counts[k]);
    if (r >= static_cast<long>(t.size())) throw ShapeError("phase table shorter than the string set");
    return t[r];
  }
  return kernels::hashed_phase(phase_key(phases->seed, k), kernels::pack(word, kernels::bits_for(d)));
}

double StructuredCode::phase_packed(int k, std::uint64_t packed) const {
  if (!phases) return 0.0;
  if (phases->has_table()) {
    int bits = kernels::bits_for(d);
    std::vector<int> word(m);
    for (int p = 0; p < m; ++p) word[p] = kernels::letter(packed, p, bits);
    return phase(k, word);
  }
  return kernels::hashed_phase(phase_key(phases->seed, k), packed);
}

namespace {

void check_probes(int m) {
  if (m < 3) throw InvalidInput("multi-probe codes need m >= 3");
}

void check_solution(const HnlsSolution& sol) {
  const int d = static_cast<int>(sol.basis.rows());
  if (d == 0 || sol.basis.cols() != d || sol.lambdas.size() < sol.d0 + sol.d1 || sol.d0 < 1 || sol.d1 < 1)
    throw InvalidInput("incomplete HNLS solution");
}

std::vector<int> block_counts(const HnlsSolution& sol, int k, int m) {
  const int d = static_cast<int>(sol.basis.rows());
  int lo = k == 0 ? 0 : sol.d0, n = k == 0 ? sol.d0 : sol.d1;
  std::vector<double> w(sol.lambdas.data() + lo, sol.lambdas.data() + lo + n);
  auto c = multiset::round_counts(w, m);
  std::vector<int> out(d, 0);
  std::copy(c.begin(), c.end(), out.begin() + lo);
  return out;
}

StructuredCode hl_skeleton(const HnlsSolution& sol, int m, CodeFamily f) {
  check_probes(m);
  check_solution(sol);
  StructuredCode c;
  c.family = f;
  c.m = m;
  c.d = static_cast<int>(sol.basis.rows());
  for (int k = 0; k < 2; ++k) {
    c.counts[k] = block_counts(sol, k, m);
    c.bases[k] = sol.basis;
  }
  return c;
}

void validate_sql(const SqlProbeInput& in) {
  const long d = in.lambda0.size();
  if (d < 1 || in.lambda1.size() != d || in.basis0.rows() != d || in.basis0.cols() != d ||
      in.basis1.rows() != d || in.basis1.cols() != d)
    throw InvalidInput("single-probe input has inconsistent sizes");
  for (const RVector* l : {&in.lambda0, &in.lambda1}) {
    if (l->minCoeff() <= 0.0) throw InvalidInput("single-probe weights must be strictly positive");
    if (std::abs(l->sum() - 1.0) > 1e-9) throw InvalidInput("single-probe weights must sum to 1");
  }
  for (const CMatrix* b : {&in.basis0, &in.basis1})
    if (max_abs(b->adjoint() * *b - CMatrix::Identity(d, d)) > 1e-9)
      throw InvalidInput("single-probe basis is not orthonormal");
}

StructuredCode sql_skeleton(const SqlProbeInput& in, int m, CodeFamily f) {
  check_probes(m);
  validate_sql(in);
  StructuredCode c;
  c.family = f;
  c.m = m;
  c.d = static_cast<int>(in.lambda0.size());
  c.tagged = true;
  const RVector* l[2] = {&in.lambda0, &in.lambda1};
  for (int k = 0; k < 2; ++k)
    c.counts[k] = multiset::round_counts(std::vector<double>(l[k]->data(), l[k]->data() + c.d), m);
  c.bases = {in.basis0, in.basis1};
  return c;
}

void maybe_color(StructuredCode& c, const SmallAncillaOptions& opt) {
  if (c.string_count(0) <= opt.eager_coloring_cap && c.string_count(1) <= opt.eager_coloring_cap) color_ancilla(c);
}

void check_packable(const StructuredCode& c) {
  if (c.m * kernels::bits_for(c.d) > 64) throw InvalidInput("random codes pack strings into 64 bits");
}

}  // namespace

DenseCode build_ancilla_assisted(const HnlsSolution& sol) {
  check_solution(sol);
  const int d = static_cast<int>(sol.basis.rows());
  DenseCode c;
  c.m = 1;
  c.d = d;
  c.ancilla_dim = d;
  for (int k = 0; k < 2; ++k) {
    CVector v = CVector::Zero(d * d);
    int lo = k == 0 ? 0 : sol.d0, n = k == 0 ? sol.d0 : sol.d1;
    for (int i = lo; i < lo + n; ++i) {
      CVector p = sol.basis.col(i);
      // |i>_A carries the same coordinates as |i>_P.
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) v(a * d + b) += std::sqrt(sol.lambdas(i)) * p(a) * p(b);
    }
    v /= v.norm();
    (k == 0 ? c.ket0 : c.ket1) = v;
  }
  return c;
}

StructuredCode build_small_ancilla(const HnlsSolution& sol, int m, const SmallAncillaOptions& opt) {
  StructuredCode c = hl_skeleton(sol, m, CodeFamily::SmallAncilla);
  maybe_color(c, opt);
  return c;
}

StructuredCode build_random_free(const HnlsSolution& sol, int m, std::uint64_t seed) {
  StructuredCode c = hl_skeleton(sol, m, CodeFamily::RandomFree);
  check_packable(c);
  c.phases = PhaseSpec{seed, {}};
  return c;
}

StructuredCode build_sql_small(const SqlProbeInput& in, int m, const SmallAncillaOptions& opt) {
  StructuredCode c = sql_skeleton(in, m, CodeFamily::SqlSmall);
  maybe_color(c, opt);
  return c;
}

StructuredCode build_sql_random(const SqlProbeInput& in, int m, std::uint64_t seed) {
  StructuredCode c = sql_skeleton(in, m, CodeFamily::SqlRandom);
  check_packable(c);
  c.phases = PhaseSpec{seed, {}};
  return c;
}

void color_ancilla(StructuredCode& code, long cap) {
  code.palette = 0;
  for (int k = 0; k < 2; ++k) {
    auto col = multiset::greedy_coloring(code.counts[k], cap);
    code.coloring[k] = std::move(col.colors);
    code.palette = std::max(code.palette, col.palette);
  }
}

long palette_bound(const StructuredCode& code) {
  return std::max(multiset::swap_degree(code.counts[0]), multiset::swap_degree(code.counts[1])) + 1;
}

DenseCode materialize(const StructuredCode& code) {
  long probe_dim = 1;
  for (int s = 0; s < code.m; ++s) {
    probe_dim *= code.d;
    check_dim(probe_dim, "materialize");
  }
  StructuredCode c = code;
  if (c.colored() && (c.coloring[0].empty() || c.coloring[1].empty())) color_ancilla(c);
  DenseCode out;
  out.m = c.m;
  out.d = c.d;
  out.ancilla_dim = c.ancilla_dim();
  auto dims = out.dims();
  long dim = 1;
  for (int x : dims) {
    dim *= x;
    check_dim(dim, "materialize");
  }
  for (int k = 0; k < 2; ++k) {
    CVector v = CVector::Zero(dim);
    long r = 0;
    double norm = 1.0 / std::sqrt(c.string_count(k));
    multiset::for_each_string(c.counts[k], [&](const std::vector<int>& w) {
      long idx = 0;
      for (int x : w) idx = idx * c.d + x;
      int anc = c.colored() ? c.coloring[k][r] : 0;
      if (c.tagged) anc = anc * 2 + k;
      idx = idx * out.ancilla_dim + anc;
      v(idx) += norm * std::polar(1.0, c.phase(k, w));
      ++r;
    });
    if (max_abs(c.bases[k] - CMatrix::Identity(c.d, c.d)) > 0.0)
      for (int s = 0; s < c.m; ++s) v = kernels::apply_site(c.bases[k], s, dims, v);
    (k == 0 ? out.ket0 : out.ket1) = std::move(v);
  }
  if (std::abs(out.ket0.dot(out.ket1)) > 1e-9) throw OrthogonalityViolated("codewords are not orthogonal");
  return out;
}

OrthogonalityReport check_L0_perp_L1(const DenseCode& code, const NoiseModel& model, double tol) {
  if (model.d != code.d) throw ShapeError("check_L0_perp_L1: probe dimension mismatch");
  auto dims = code.dims();
  std::vector<CVector> sets[2];
  const CVector* kets[2] = {&code.ket0, &code.ket1};
  for (int k = 0; k < 2; ++k) {
    sets[k].push_back(*kets[k]);
    for (int s = 0; s < code.m; ++s)
      for (const auto& l : model.lindblads) sets[k].push_back(kernels::apply_site(l, s, dims, *kets[k]));
  }
  OrthogonalityReport rep;
  for (const auto& x : sets[0])
    for (const auto& y : sets[1]) rep.max_overlap = std::max(rep.max_overlap, std::abs(x.dot(y)));
  rep.orthogonal = rep.max_overlap <= tol;
  rep.method = "dense";
  return rep;
}

OrthogonalityReport check_L0_perp_L1(const StructuredCode& code, const NoiseModel& model, double tol) {
  if (model.d != code.d) throw ShapeError("check_L0_perp_L1: probe dimension mismatch");
  OrthogonalityReport rep;
  if (code.tagged) {
    rep.orthogonal = true;
    rep.method = "tag";
    return rep;
  }
  // Single-site operators connect strings at Hamming distance <= 2 only.
  if (max_abs(code.bases[0] - code.bases[1]) == 0.0) {
    int shared = 0;
    for (int i = 0; i < code.d; ++i) shared += std::min(code.counts[0][i], code.counts[1][i]);
    if (code.m - shared >= 3) {
      rep.orthogonal = true;
      rep.method = "support distance";
      return rep;
    }
  }
  rep = check_L0_perp_L1(materialize(code), model, tol);
  return rep;
}

QecReport check_qec_condition(const CodeView& view, const NoiseModel& model,
                              const std::optional<std::array<CMatrix, 2>>& reference, double tol) {
  const int m = view.probes(), d = view.probe_dim();
  if (model.d != d) throw ShapeError("check_qec_condition: probe dimension mismatch");
  if (m < 2) throw InvalidInput("check_qec_condition needs at least two probes");
  const auto basis = hermitian_basis(d);
  const int nb = static_cast<int>(basis.size());
  QecReport rep;
  rep.satisfied = true;
  const int npairs = m * (m - 1) / 2;
  rep.pairs.resize(npairs);
  for (int x = 0; x < m; ++x)
    for (int y = x + 1; y < m; ++y) {
      auto& p = rep.pairs[kernels::pair_index(x, y, m)];
      p.x = x;
      p.y = y;
    }
  const double accept = 10.0 * tol;
  for (int k = 0; k < 2; ++k) {
    CMatrix rho = reference ? (*reference)[k] : view.site_rdm(k, k, 0);
    if (rho.rows() != d) throw ShapeError("check_qec_condition: reference state has the wrong size");
    double site_mismatch = 0.0;
    for (int s = 0; s < m; ++s) site_mismatch = std::max(site_mismatch, max_abs(view.site_rdm(k, k, s) - rho));
    auto pairs = view.pair_rdms(k, k);
    CMatrix rr = kron(rho, rho);
    // Realign the first pair's residual as a real matrix over basis products.
    CMatrix res = pairs[0] - rr;
    RMatrix coef(nb, nb);
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b) coef(a, b) = (res * kron(basis[a], basis[b])).trace().real();
    RMatrix sym = (coef + coef.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
    CMatrix q = CMatrix::Zero(d, d);
    if (es.eigenvalues()(0) < 0.0) {
      RVector v = es.eigenvectors().col(0) * std::sqrt(-es.eigenvalues()(0));
      for (int a = 0; a < nb; ++a) q += v(a) * basis[a];
    }
    // Fix the sign: first entry of largest magnitude on the diagonal is positive.
    int piv = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(q(i, i)) > std::abs(q(piv, piv)) + 1e-12) piv = i;
    if (q(piv, piv).real() < 0) q = -q;
    CMatrix qq = kron(q, q);
    double worst = site_mismatch;
    for (int p = 0; p < npairs; ++p) {
      double r = max_abs(pairs[p] - rr + qq);
      (k == 0 ? rep.pairs[p].residual0 : rep.pairs[p].residual1) = r;
      worst = std::max(worst, r);
    }
    rep.max_residual = std::max(rep.max_residual, worst);
    bool admissible = std::abs(q.trace()) <= accept;
    for (const auto& l : model.lindblads)
      admissible = admissible && std::abs((q * l).trace()) <= accept * std::max(1.0, l.norm());
    if (worst > accept) rep.satisfied = false;
    if (!admissible) {
      rep.satisfied = false;
      rep.note += "Q" + std::to_string(k) + " not orthogonal to the noise; ";
    }
    if (site_mismatch > accept) rep.note += "site marginals of codeword " + std::to_string(k) + " differ; ";
    rep.Q[k] = q;
  }
  auto cross = view.pair_rdms(0, 1);
  for (int p = 0; p < npairs; ++p) {
    rep.pairs[p].cross = max_abs(cross[p]);
    rep.max_residual = std::max(rep.max_residual, rep.pairs[p].cross);
    if (rep.pairs[p].cross > accept) rep.satisfied = false;
  }
  if (!rep.satisfied) rep.Q = {};
  return rep;
}

}  // namespace mpqec
