#include "mpqec/hnls_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpqec/lmi.hpp"

namespace mpqec {

namespace {

RVector realvec(const CMatrix& h) {
  RVector v(2 * h.size());
  for (long k = 0; k < h.size(); ++k) {
    v(2 * k) = h.data()[k].real();
    v(2 * k + 1) = h.data()[k].imag();
  }
  return v;
}

RMatrix pinv(const RMatrix& a, double rel) {
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  RVector inv = RVector::Zero(s.size());
  double top = s.size() ? s(0) : 0.0;
  for (long k = 0; k < s.size(); ++k)
    if (s(k) > rel * top) inv(k) = 1.0 / s(k);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

CMatrix from_coords(const std::vector<CMatrix>& basis, const RVector& x, long offset) {
  CMatrix m = CMatrix::Zero(basis[0].rows(), basis[0].cols());
  for (std::size_t a = 0; a < basis.size(); ++a) m += x(offset + a) * basis[a];
  return m;
}

struct Weighted {
  double weight;
  CVector vec;
};

// Eigenvectors of V A V^dag. Inside each degenerate cluster the basis is the
// Gram-Schmidt image of the computational basis vectors with the largest
// projections, listed by index, so that exact multiplicities come out in the
// computational basis whenever that is possible.
std::vector<Weighted> aligned_eigvecs(const CMatrix& v, const CMatrix& a, double cluster_tol) {
  std::vector<Weighted> out;
  const long d = v.rows();
  Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) / 2.0);
  const RVector& lam = es.eigenvalues();
  long k = lam.size() - 1;
  while (k >= 0) {
    long lo = k;
    while (lo - 1 >= 0 && std::abs(lam(lo - 1) - lam(k)) <= cluster_tol) --lo;
    const long kc = k - lo + 1;
    CMatrix u = v * es.eigenvectors().middleCols(lo, kc);
    CMatrix proj = u * u.adjoint();
    std::vector<long> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](long x, long y) { return proj(x, x).real() > proj(y, y).real() + 1e-12; });
    std::vector<std::pair<long, CVector>> picked;
    for (long j : order) {
      if (static_cast<long>(picked.size()) == kc) break;
      CVector c = proj.col(j);
      for (int pass = 0; pass < 2; ++pass)
        for (auto& p : picked) c -= p.second * p.second.dot(c);
      if (c.norm() < 1e-6) continue;
      picked.emplace_back(j, c / c.norm());
    }
    std::sort(picked.begin(), picked.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    double w = lam.segment(lo, kc).mean();
    for (auto& p : picked) out.push_back({w, p.second});
    k = lo - 1;
  }
  return out;
}

// Finds PSD A, B with unit trace on the extremal eigenspaces such that
// Tr((V+ A V+^dag - V- B V-^dag) S_b) = 0 for all span elements, starting from
// the barrier dual estimate. Alternating projections between the affine
// constraint set and the PSD cone.
std::pair<CMatrix, CMatrix> repair_dual(const CMatrix& vp, const CMatrix& vm, const CMatrix& a0, const CMatrix& b0,
                                        const LindbladSpan& span, double tol) {
  const int kp = static_cast<int>(vp.cols()), km = static_cast<int>(vm.cols());
  auto hp = hermitian_basis(kp), hm = hermitian_basis(km);
  const long nx = kp * kp + km * km;
  RMatrix c(span.dim() + 2, nx);
  RVector e = RVector::Zero(span.dim() + 2);
  for (int b = 0; b < span.dim(); ++b) {
    for (int x = 0; x < kp * kp; ++x) c(b, x) = (vp * hp[x] * vp.adjoint() * span.basis[b]).trace().real();
    for (int x = 0; x < km * km; ++x)
      c(b, kp * kp + x) = -(vm * hm[x] * vm.adjoint() * span.basis[b]).trace().real();
  }
  c.row(span.dim()).setZero();
  c.row(span.dim() + 1).setZero();
  for (int x = 0; x < kp * kp; ++x) c(span.dim(), x) = hp[x].trace().real();
  for (int x = 0; x < km * km; ++x) c(span.dim() + 1, kp * kp + x) = hm[x].trace().real();
  e(span.dim()) = e(span.dim() + 1) = 1.0;
  RMatrix cp = pinv(c, 1e-12);

  auto coords = [&](const CMatrix& a, const CMatrix& b) {
    RVector x(nx);
    for (int k = 0; k < kp * kp; ++k) x(k) = hs_inner(hp[k], a).real();
    for (int k = 0; k < km * km; ++k) x(kp * kp + k) = hs_inner(hm[k], b).real();
    return x;
  };
  RVector x = coords(a0, b0);
  CMatrix a, b;
  for (int it = 0; it < 5000; ++it) {
    x -= cp * (c * x - e);
    a = psd_part(from_coords(hp, x, 0));
    b = psd_part(from_coords(hm, x, kp * kp));
    RVector xc = coords(a, b);
    if ((c * xc - e).cwiseAbs().maxCoeff() <= tol) break;
    x = xc;
  }
  return {a / a.trace().real(), b / b.trace().real()};
}

}  // namespace

HnlsSolution solve_hnls(const NoiseModel& model, const Tolerance& tol) {
  if (!hnls_holds(model, tol)) throw HnlsViolated("Hamiltonian lies in the Lindblad span (" + model.label + ")");
  const int d = model.d;
  const double scale = std::max(1.0, operator_norm(model.H));
  LindbladSpan span = build_span(model, tol);
  const int nb = span.dim();

  LmiProblem prob;
  CMatrix zero = CMatrix::Zero(d, d);
  auto blockdiag = [&](const CMatrix& x, const CMatrix& y) {
    CMatrix out = CMatrix::Zero(2 * d, 2 * d);
    out.topLeftCorner(d, d) = x;
    out.bottomRightCorner(d, d) = y;
    return out;
  };
  prob.F.push_back(blockdiag(-model.H, model.H));
  prob.F.push_back(CMatrix::Identity(2 * d, 2 * d));
  for (const auto& s : span.basis) prob.F.push_back(blockdiag(s, -s));
  prob.q = RVector::Zero(nb + 1);
  prob.q(0) = 1.0;
  RVector y0 = RVector::Zero(nb + 1);
  y0(0) = operator_norm(model.H) + 1.0;
  LmiResult lmi = solve_lmi(prob, y0, 0.1 * tol.tau * scale);

  HnlsSolution sol;
  sol.iterations = lmi.newton_steps;
  sol.S_star = span.combine(lmi.y.tail(nb));
  CMatrix diff = model.H - sol.S_star;
  diff = (diff + diff.adjoint()) / 2.0;
  EigH eh = eig_hermitian(diff, tol.tau);
  sol.value = std::max(eh.values.maxCoeff(), -eh.values.minCoeff());

  const double cluster = std::max(10.0 * tol.tau * scale, 10.0 * lmi.gap);
  const double top = eh.values.maxCoeff(), bottom = eh.values.minCoeff();
  std::vector<long> ip, im;
  for (long k = 0; k < d; ++k) {
    if (eh.values(k) >= top - cluster) ip.push_back(k);
    if (eh.values(k) <= bottom + cluster) im.push_back(k);
  }
  CMatrix vp(d, ip.size()), vm(d, im.size());
  for (std::size_t k = 0; k < ip.size(); ++k) vp.col(k) = eh.vectors.col(ip[k]);
  for (std::size_t k = 0; k < im.size(); ++k) vm.col(k) = eh.vectors.col(im[k]);
  CMatrix p = lmi.Z.topLeftCorner(d, d), q = lmi.Z.bottomRightCorner(d, d);
  auto [a, b] = repair_dual(vp, vm, 2.0 * vp.adjoint() * p * vp, 2.0 * vm.adjoint() * q * vm, span, 0.1 * tol.tau);

  sol.rho0 = vp * a * vp.adjoint();
  sol.rho1 = vm * b * vm.adjoint();
  sol.dual_value = 0.5 * ((sol.rho0 - sol.rho1) * model.H).trace().real();
  sol.gap = sol.value - sol.dual_value;
  if (sol.gap > 100.0 * tol.tau * scale)
    throw OptimizerStalled("duality gap " + std::to_string(sol.gap) + " above target");

  const double supp = 10.0 * tol.tau;
  auto w0 = aligned_eigvecs(vp, a, 1e-8), w1 = aligned_eigvecs(vm, b, 1e-8);
  std::vector<CVector> cols;
  std::vector<double> lam;
  double s0 = 0.0, s1 = 0.0;
  for (auto& w : w0)
    if (w.weight > supp) s0 += w.weight;
  for (auto& w : w1)
    if (w.weight > supp) s1 += w.weight;
  for (auto& w : w0)
    if (w.weight > supp) {
      cols.push_back(w.vec);
      lam.push_back(w.weight / s0);
    }
  sol.d0 = static_cast<int>(cols.size());
  for (auto& w : w1)
    if (w.weight > supp) {
      cols.push_back(w.vec);
      lam.push_back(w.weight / s1);
    }
  sol.d1 = static_cast<int>(cols.size()) - sol.d0;
  CMatrix used(d, cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) used.col(k) = cols[k];
  const long rest = d - static_cast<long>(cols.size());
  if (rest > 0) {
    CMatrix comp = CMatrix::Identity(d, d) - used * used.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> ec((comp + comp.adjoint()) / 2.0);
    CMatrix vr = ec.eigenvectors().rightCols(rest);
    for (auto& w : aligned_eigvecs(vr, CMatrix::Identity(rest, rest), 1.0)) {
      cols.push_back(w.vec);
      lam.push_back(0.0);
    }
  }
  sol.basis.resize(d, d);
  sol.lambdas.resize(d);
  for (long k = 0; k < d; ++k) {
    sol.basis.col(k) = cols[k];
    sol.lambdas(k) = lam[k];
  }
  return sol;
}

SqlCoefficient solve_sql_alpha(const NoiseModel& model, const Tolerance& tol) {
  const int d = model.d, r = model.r();
  const cplx I(0, 1);
  auto hb = hermitian_basis(std::max(r, 1));
  // Variables: Re h (r), Im h (r), hh in Hermitian-basis coordinates (r^2), offset (1).
  const int nx = 2 * r + r * r + 1;
  std::vector<CMatrix> gens;
  for (int j = 0; j < r; ++j) gens.push_back(model.lindblads[j] + model.lindblads[j].adjoint());
  for (int j = 0; j < r; ++j) gens.push_back(I * (model.lindblads[j].adjoint() - model.lindblads[j]));
  for (int a = 0; a < r * r; ++a) {
    CMatrix g = CMatrix::Zero(d, d);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) g += hb[a](i, j) * model.lindblads[i].adjoint() * model.lindblads[j];
    gens.push_back(g);
  }
  gens.push_back(CMatrix::Identity(d, d));
  RMatrix acon(2 * d * d, nx);
  for (int k = 0; k < nx; ++k) acon.col(k) = realvec(gens[k]);
  RVector target = realvec(model.H);
  Eigen::JacobiSVD<RMatrix> svd(acon, Eigen::ComputeFullV);
  RVector xp = pinv(acon, 1e-12) * target;
  const double scale = std::max(1.0, model.H.norm());
  double res0 = (acon * xp - target).norm();
  if (res0 > tol.rank * scale)
    throw ConstraintInfeasible("no multiplier reproduces H up to identity (residual " + std::to_string(res0) + ")");
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (long k = 0; k < sv.size(); ++k)
    if (sv(k) > 1e-12 * sv(0)) ++rank;
  RMatrix null = svd.matrixV().rightCols(nx - rank);

  auto stacked = [&](const RVector& x) {
    CMatrix a = CMatrix::Zero(r * d, d);
    CMatrix hh = from_coords(hb, x, 2 * r);
    for (int i = 0; i < r; ++i) {
      CMatrix k = cplx(x(i), x(r + i)) * CMatrix::Identity(d, d);
      for (int j = 0; j < r; ++j) k += hh(i, j) * model.lindblads[j];
      a.block(i * d, 0, d, d) = k;
    }
    return a;
  };
  CMatrix a0 = stacked(xp);
  // Drop null directions that leave the stacked operator unchanged.
  RMatrix effect(2 * r * d * d, null.cols());
  for (long k = 0; k < null.cols(); ++k) {
    RVector xk = null.col(k);
    xk(nx - 1) = 0.0;
    effect.col(k) = realvec(stacked(xk) - stacked(RVector::Zero(nx)));
  }
  RMatrix dirs(nx, 0);
  if (effect.cols() > 0) {
    Eigen::JacobiSVD<RMatrix> es(effect, Eigen::ComputeFullV);
    int er = 0;
    for (long k = 0; k < es.singularValues().size(); ++k)
      if (es.singularValues()(k) > 1e-12 * std::max(1.0, es.singularValues()(0))) ++er;
    dirs = null * es.matrixV().leftCols(er);
  }
  const long nw = dirs.cols();
  const long p = r * d + d;
  auto lift = [&](const CMatrix& a, bool with_t) {
    CMatrix f = CMatrix::Zero(p, p);
    f.topRightCorner(r * d, d) = a;
    f.bottomLeftCorner(d, r * d) = a.adjoint();
    if (with_t) f += CMatrix::Identity(p, p);
    return f;
  };
  LmiProblem prob;
  prob.F.push_back(lift(a0, false));
  prob.F.push_back(CMatrix::Identity(p, p));
  for (long k = 0; k < nw; ++k) prob.F.push_back(lift(stacked(dirs.col(k)), false));
  prob.q = RVector::Zero(nw + 1);
  prob.q(0) = 1.0;
  RVector y0 = RVector::Zero(nw + 1);
  y0(0) = operator_norm(a0) + 1.0;
  LmiResult lmi = solve_lmi(prob, y0, 0.1 * tol.tau);

  RVector x = xp + dirs * lmi.y.tail(nw);
  SqlCoefficient out;
  CMatrix a = stacked(x);
  double norm = operator_norm(a);
  out.alpha = norm * norm;
  out.gap = 2.0 * norm * lmi.gap + lmi.gap * lmi.gap;
  out.iterations = lmi.newton_steps;
  out.h.resize(r);
  for (int i = 0; i < r; ++i) out.h[i] = cplx(x(i), x(r + i));
  out.hh = from_coords(hb, x, 2 * r).topLeftCorner(r, r);
  out.offset = x(nx - 1);
  out.residual = (acon * x - target).norm();
  return out;
}

}  // namespace mpqec
