#include "mpqec/logical_dynamics.hpp"

#include <cmath>

#include "mpqec/multiset.hpp"

namespace mpqec {

namespace {

// Tr(R (A (x) B)) for a d^2 x d^2 operator R.
cplx pair_expectation(const CMatrix& r, const CMatrix& a, const CMatrix& b) {
  const int d = static_cast<int>(a.rows());
  cplx s = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) s += r(i * d + j, k * d + l) * a(k, i) * b(l, j);
  return s;
}

struct Moments {
  CVector b;                    // p = l r + i
  std::vector<CMatrix> a;       // per site, raw second moments
  std::vector<CMatrix> eta;     // per pair (x < y): <L_i^(x)dag L_j^(y)>
  CMatrix gram;
  double hdiag = 0.0;           // sum_l Tr(rho~ H)
  double shift = 0.0;           // sum_l Tr(rho~ K)
};

Moments moments(const CodeView& view, int k, const GaugedModel& g, kernels::Exec exec) {
  const int m = view.probes();
  const auto& ls = g.model.lindblads;
  const int r = static_cast<int>(ls.size());
  Moments mo;
  mo.b = CVector::Zero(m * r);
  mo.a.resize(m);
  std::vector<CMatrix> site(m);
  for (int s = 0; s < m; ++s) {
    site[s] = view.site_rdm(k, k, s);
    mo.hdiag += (site[s] * g.model.H).trace().real();
    mo.shift += (site[s] * g.hamiltonian_shift).trace().real();
    mo.a[s] = CMatrix(r, r);
    for (int i = 0; i < r; ++i) {
      mo.b(s * r + i) = (site[s] * ls[i]).trace();
      for (int j = 0; j < r; ++j) mo.a[s](i, j) = (site[s] * ls[i].adjoint() * ls[j]).trace();
    }
  }
  const int npairs = m * (m - 1) / 2;
  std::vector<CMatrix> pairs = npairs > 0 ? view.pair_rdms(k, k) : std::vector<CMatrix>{};
  std::vector<CMatrix> ldag(r);
  for (int i = 0; i < r; ++i) ldag[i] = ls[i].adjoint();
  mo.eta.assign(npairs, CMatrix(r, r));
  // Each pair table is written by one iteration; order of evaluation inside
  // an entry is fixed, so serial and parallel results coincide bitwise.
#pragma omp parallel for schedule(static) if (exec == kernels::Exec::Parallel)
  for (int p = 0; p < npairs; ++p)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) mo.eta[p](i, j) = pair_expectation(pairs[p], ldag[i], ls[j]);
  mo.gram = CMatrix(m * r, m * r);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
          cplx e;
          if (x == y) e = mo.a[x](i, j);
          else if (x < y) e = mo.eta[kernels::pair_index(x, y, m)](i, j);
          else e = std::conj(mo.eta[kernels::pair_index(y, x, m)](j, i));
          mo.gram(x * r + i, y * r + j) = e - std::conj(mo.b(x * r + i)) * mo.b(y * r + j);
        }
  mo.gram = (mo.gram + mo.gram.adjoint()).eval() / 2.0;
  return mo;
}

CMatrix safe_factor(const CMatrix& g, double tol) { return g.rows() == 0 ? g : gram_factor(g, tol); }

}  // namespace

LogicalDynamics logical_rates(const CodeView& view, const GaugedModel& gauged, const Tolerance& tol,
                              kernels::Exec exec) {
  if (view.probe_dim() != gauged.model.d) throw ShapeError("logical_rates: probe dimension mismatch");
  const int m = view.probes(), r = gauged.model.r();
  LogicalDynamics dyn;
  dyn.m = m;
  dyn.r = r;
  dyn.mu = gauged.mu;
  Moments mo[2] = {moments(view, 0, gauged, exec), moments(view, 1, gauged, exec)};
  dyn.signal = mo[0].hdiag - mo[1].hdiag;
  dyn.offset_rotation = mo[0].shift - mo[1].shift;
  cplx x = 0;
  double second = 0;
  for (int p = 0; p < m * r; ++p) x += mo[0].b(p) * std::conj(mo[1].b(p));
  for (int s = 0; s < m; ++s)
    for (int i = 0; i < r; ++i) second += 0.5 * (mo[0].a[s](i, i) + mo[1].a[s](i, i)).real();
  dyn.term1 = -x.real();
  dyn.term2 = second;
  dyn.beta_L = -x.imag();
  dyn.gram_X = mo[0].gram;
  dyn.gram_Y = mo[1].gram;
  CMatrix rx = safe_factor(dyn.gram_X, tol.tau), ry = safe_factor(dyn.gram_Y, tol.tau);
  dyn.trace_norm_B = m * r > 0 ? trace_norm(rx * ry.adjoint()) : 0.0;
  dyn.gamma_L = dyn.term1 + dyn.term2 - dyn.trace_norm_B;
  for (int k = 0; k < 2; ++k) {
    dyn.b[k] = mo[k].b;
    dyn.a[k] = mo[k].a;
    for (auto& a : dyn.a[k])
      for (int i = 0; i < r; ++i) a(i, i) -= gauged.mu(i);
    dyn.eta[k] = std::move(mo[k].eta);
  }
  return dyn;
}

LogicalDynamics logical_rates(const StructuredCode& code, const GaugedModel& gauged, const Tolerance& tol,
                              kernels::Exec exec) {
  for (int k = 0; k < 2; ++k)
    if (code.string_count(k) > multiset::kEnumerationCap && !code.colored() && code.phases)
      throw WSetTooLarge("random code string set exceeds the enumeration cap");
  auto orth = check_L0_perp_L1(code, gauged.model, tol.tau);
  if (!orth.orthogonal) throw OrthogonalityViolated("error spaces of the two codewords overlap");
  return logical_rates(*make_view(code, exec), gauged, tol, exec);
}

LogicalDynamics logical_rates(const DenseCode& code, const GaugedModel& gauged, const Tolerance& tol,
                              kernels::Exec exec) {
  auto orth = check_L0_perp_L1(code, gauged.model, tol.tau);
  if (!orth.orthogonal) throw OrthogonalityViolated("error spaces of the two codewords overlap");
  return logical_rates(*make_view(code, exec), gauged, tol, exec);
}

CMatrix RecoveryChannel::apply(const CMatrix& rho) const {
  CMatrix out(2, 2);
  out(0, 0) = (R.adjoint() * rho * R).trace();
  out(0, 1) = (R.adjoint() * rho * S).trace();
  out(1, 0) = (S.adjoint() * rho * R).trace();
  out(1, 1) = (S.adjoint() * rho * S).trace();
  return out;
}

CMatrix RecoveryChannel::completeness() const { return R * R.adjoint() + S * S.adjoint(); }

namespace {

struct ErrorColumns {
  CMatrix X, Y;
  cplx x_local = 0;  // sum b0 b1^* - (1/2)(<L^dag L>_0 + <L^dag L>_1)
};

ErrorColumns error_columns(const DenseCode& code, const GaugedModel& g) {
  auto dims = code.dims();
  const auto& ls = g.model.lindblads;
  const int r = static_cast<int>(ls.size());
  ErrorColumns ec;
  ec.X.resize(code.dim(), code.m * r);
  ec.Y.resize(code.dim(), code.m * r);
  for (int s = 0; s < code.m; ++s)
    for (int i = 0; i < r; ++i) {
      CVector l0 = kernels::apply_site(ls[i], s, dims, code.ket0);
      CVector l1 = kernels::apply_site(ls[i], s, dims, code.ket1);
      cplx b0 = code.ket0.dot(l0), b1 = code.ket1.dot(l1);
      ec.x_local += b0 * std::conj(b1) - 0.5 * (l0.squaredNorm() + l1.squaredNorm());
      ec.X.col(s * r + i) = l0 - b0 * code.ket0;
      ec.Y.col(s * r + i) = l1 - b1 * code.ket1;
    }
  return ec;
}

// Orthonormal basis of the complement of span(occupied); columns of occupied are orthonormal.
CMatrix complement(const CMatrix& occupied, long dim) {
  Eigen::HouseholderQR<CMatrix> qr(occupied);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  return q.rightCols(dim - occupied.cols());
}

}  // namespace

RecoveryChannel build_optimal_recovery(const DenseCode& code, const GaugedModel& gauged, const Tolerance& tol) {
  const long dim = code.dim();
  check_dim(dim, "build_optimal_recovery");
  auto orth = check_L0_perp_L1(code, gauged.model, tol.tau);
  if (!orth.orthogonal) throw OrthogonalityViolated("error spaces of the two codewords overlap");
  ErrorColumns ec = error_columns(code, gauged);
  const double scale = std::max(1.0, max_abs(ec.X) + max_abs(ec.Y));
  // Orthonormal bases of the two error ranges.
  CMatrix ux = ec.X.cols() ? orthonormal_columns(ec.X, tol.rank * scale) : CMatrix(dim, 0);
  CMatrix uy = ec.Y.cols() ? orthonormal_columns(ec.Y, tol.rank * scale) : CMatrix(dim, 0);
  // B restricted to those ranges; its SVD pairs R_p with S_p.
  CMatrix bsmall = (ux.adjoint() * ec.X) * (ec.Y.adjoint() * uy);
  CMatrix rx = ux, sy = uy;
  if (bsmall.size() > 0) {
    Eigen::BDCSVD<CMatrix> svd(bsmall, Eigen::ComputeFullU | Eigen::ComputeFullV);
    rx = ux * svd.matrixU();
    sy = uy * svd.matrixV();
  }
  const long nx = rx.cols(), ny = sy.cols();
  // Pair the leading singular directions, then absorb the spare range vectors
  // and the rest of the space.
  CMatrix occupied(dim, 2 + nx + ny);
  occupied << code.ket0, code.ket1, rx, sy;
  CMatrix rest = complement(occupied, dim);
  const long npair = std::max(nx, ny);
  long spare = rest.cols();
  long extra_r = npair - nx, extra_s = npair - ny;
  long leftover = spare - extra_r - extra_s;
  if (leftover < 0) throw NumericalFailure("recovery completion ran out of basis vectors");
  long tail = (leftover + 1) / 2;
  RecoveryChannel rec;
  rec.ket0 = code.ket0;
  rec.ket1 = code.ket1;
  rec.R = CMatrix::Zero(dim, 1 + npair + tail);
  rec.S = CMatrix::Zero(dim, 1 + npair + tail);
  rec.R.col(0) = code.ket0;
  rec.S.col(0) = code.ket1;
  long next = 0;
  for (long p = 0; p < npair; ++p) {
    rec.R.col(1 + p) = p < nx ? CVector(rx.col(p)) : CVector(rest.col(next++));
    rec.S.col(1 + p) = p < ny ? CVector(sy.col(p)) : CVector(rest.col(next++));
  }
  for (long t = 0; t < tail; ++t) {
    rec.R.col(1 + npair + t) = rest.col(next++);
    if (next < spare) rec.S.col(1 + npair + t) = rest.col(next++);
  }
  return rec;
}

std::pair<double, double> recovery_rates(const DenseCode& code, const GaugedModel& gauged,
                                         const RecoveryChannel& rec) {
  ErrorColumns ec = error_columns(code, gauged);
  // sum_p <R_p| X Y^dag |S_p>
  CMatrix rx = rec.R.adjoint() * ec.X, sy = rec.S.adjoint() * ec.Y;
  cplx t = (rx.array() * sy.conjugate().array()).sum();
  cplx x = ec.x_local + t;
  return {-x.real(), -x.imag()};
}

LowerBoundReport trace_norm_lower_bound_check(const CodeView& view, const GaugedModel& gauged,
                                              const Tolerance& tol) {
  Moments mo[2] = {moments(view, 0, gauged, kernels::Exec::Serial), moments(view, 1, gauged, kernels::Exec::Serial)};
  LowerBoundReport rep;
  // Gram-Schmidt in Gram coordinates: rows of the upper-triangular factor are
  // the overlaps <e_p|x_q>; degenerate columns leave a zero row.
  auto gs = [&](const CMatrix& g, int& skipped) {
    const long n = g.rows();
    CMatrix rmat = CMatrix::Zero(n, n);
    const double scale = std::max(1.0, max_abs(g));
    for (long p = 0; p < n; ++p) {
      cplx diag = g(p, p);
      for (long q = 0; q < p; ++q) diag -= std::norm(rmat(q, p));
      if (diag.real() <= tol.rank * scale) {
        ++skipped;
        continue;
      }
      double rpp = std::sqrt(diag.real());
      rmat(p, p) = rpp;
      for (long q = p + 1; q < n; ++q) {
        cplx v = g(p, q);
        for (long s = 0; s < p; ++s) v -= std::conj(rmat(s, p)) * rmat(s, q);
        rmat(p, q) = v / rpp;
      }
    }
    return rmat;
  };
  CMatrix rxm = gs(mo[0].gram, rep.skipped_X), rym = gs(mo[1].gram, rep.skipped_Y);
  cplx s = 0;
  for (long p = 0; p < rxm.rows(); ++p)
    for (long q = 0; q < rxm.cols(); ++q) s += rxm(p, q) * std::conj(rym(p, q));
  rep.bound = std::abs(s);
  return rep;
}

double predicted_qfi(const LogicalDynamics& dyn, int n, double t) {
  if (n < 1) throw InvalidInput("predicted_qfi: n must be at least 1");
  if (t < 0) throw InvalidInput("predicted_qfi: t must be nonnegative");
  return double(n) * n * dyn.signal * dyn.signal * t * t * std::exp(-2.0 * n * dyn.gamma_L * t);
}

double resource_qfi(const LogicalDynamics& dyn, int units_per_block, int units, double t) {
  if (units_per_block < 1 || units % units_per_block != 0)
    throw InvalidInput("resource_qfi: unit budget is not a multiple of the block size");
  return predicted_qfi(dyn, units / units_per_block, t);
}

}  // namespace mpqec
