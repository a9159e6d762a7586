#include "mpqec/noise_model.hpp"

#include <algorithm>
#include <cmath>

namespace mpqec {

NoiseModel make_model(CMatrix H, std::vector<CMatrix> lindblads, std::string label, const Tolerance& tol) {
  NoiseModel m;
  check_square(H, "make_model(H)");
  check_dim(H.rows(), "make_model");
  m.d = static_cast<int>(H.rows());
  if (!is_hermitian(H, tol.tau)) throw ShapeError("make_model: H is not Hermitian");
  for (const auto& l : lindblads)
    if (l.rows() != m.d || l.cols() != m.d) throw ShapeError("make_model: Lindblad operator shape mismatch");
  m.H = std::move(H);
  m.lindblads = std::move(lindblads);
  m.label = std::move(label);
  return m;
}

std::vector<CMatrix> span_generators(const NoiseModel& model) {
  const cplx I(0, 1);
  std::vector<CMatrix> gens{CMatrix::Identity(model.d, model.d)};
  for (const auto& l : model.lindblads) {
    gens.push_back(l + l.adjoint());
    gens.push_back(I * (l - l.adjoint()));
  }
  for (int i = 0; i < model.r(); ++i)
    for (int j = i; j < model.r(); ++j) {
      CMatrix x = model.lindblads[i].adjoint() * model.lindblads[j];
      gens.push_back((x + x.adjoint()) / 2.0);
      if (i != j) gens.push_back(I * (x - x.adjoint()) / 2.0);
    }
  return gens;
}

LindbladSpan build_span(const NoiseModel& model, const Tolerance& tol) {
  auto gens = span_generators(model);
  const int n = static_cast<int>(gens.size());
  RMatrix gram(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) gram(a, b) = gram(b, a) = hs_inner(gens[a], gens[b]).real();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(gram);
  if (es.info() != Eigen::Success) throw NumericalFailure("build_span: Gram eigensolver failed");
  const double top = es.eigenvalues().maxCoeff();
  LindbladSpan span;
  span.d = model.d;
  for (int k = n - 1; k >= 0; --k) {
    const double lam = es.eigenvalues()(k);
    if (lam <= tol.rank * top) continue;
    CMatrix b = CMatrix::Zero(model.d, model.d);
    for (int a = 0; a < n; ++a) b += es.eigenvectors()(a, k) * gens[a];
    b /= std::sqrt(lam);
    span.basis.push_back((b + b.adjoint()) / 2.0);
  }
  // One re-orthonormalisation sweep against rounding.
  for (std::size_t k = 0; k < span.basis.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) span.basis[k] -= hs_inner(span.basis[j], span.basis[k]).real() * span.basis[j];
    span.basis[k] /= span.basis[k].norm();
  }
  return span;
}

RVector LindbladSpan::coords(const CMatrix& x) const {
  RVector c(dim());
  for (int b = 0; b < dim(); ++b) c(b) = hs_inner(basis[b], x).real();
  return c;
}

CMatrix LindbladSpan::combine(const RVector& c) const {
  CMatrix out = CMatrix::Zero(d, d);
  for (int b = 0; b < dim(); ++b) out += c(b) * basis[b];
  return out;
}

CMatrix LindbladSpan::project(const CMatrix& x) const { return combine(coords(x)); }

double LindbladSpan::residual(const CMatrix& x) const { return (x - project(x)).norm(); }

double hnls_residual(const NoiseModel& model, const Tolerance& tol) {
  return build_span(model, tol).residual(model.H);
}

bool hnls_holds(const NoiseModel& model, const Tolerance& tol) {
  return hnls_residual(model, tol) > tol.rank * std::max(1.0, model.H.norm());
}

GaugedModel apply_gauge(const NoiseModel& model, const CMatrix& rho0, const CMatrix& rho1, const Tolerance& tol) {
  const int r = model.r(), d = model.d;
  const cplx I(0, 1);
  double scale = 1.0;
  for (const auto& l : model.lindblads) scale = std::max(scale, l.squaredNorm());
  const double check = 10.0 * tol.tau * scale;

  GaugedModel gm;
  gm.rho0 = rho0;
  gm.rho1 = rho1;
  gm.shifts.resize(r);
  std::vector<CMatrix> shifted(r);
  gm.hamiltonian_shift = CMatrix::Zero(d, d);
  for (int i = 0; i < r; ++i) {
    const CMatrix& l = model.lindblads[i];
    cplx x0 = (rho0 * l).trace(), x1 = (rho1 * l).trace();
    if (std::abs(x0 - x1) > check) throw GaugeFailure("first moments of rho0 and rho1 differ");
    gm.shifts[i] = x0;
    shifted[i] = l - x0 * CMatrix::Identity(d, d);
    // D[L] = D[L - x] + i[K, .] with K = (i/2)(x L^dag - x^* L).
    CMatrix k = (I / 2.0) * (x0 * l.adjoint() - std::conj(x0) * l);
    gm.hamiltonian_shift -= k;
  }
  CMatrix m0(r, r), m1(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      CMatrix x = shifted[i].adjoint() * shifted[j];
      m0(i, j) = (rho0 * x).trace();
      m1(i, j) = (rho1 * x).trace();
    }
  if (max_abs(m0 - m1) > check) throw GaugeFailure("second moments of rho0 and rho1 differ");
  CMatrix herm = (m0 + m0.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  if (es.info() != Eigen::Success) throw GaugeFailure("moment eigensolver failed");
  // Descending mu so the dominant channel comes first.
  gm.mu.resize(r);
  gm.mixing.resize(r, r);
  for (int k = 0; k < r; ++k) {
    int src = r - 1 - k;
    gm.mu(k) = std::max(0.0, es.eigenvalues()(src));
    gm.mixing.row(k) = es.eigenvectors().col(src).transpose();
  }
  gm.model = model;
  for (int k = 0; k < r; ++k) {
    CMatrix lk = CMatrix::Zero(d, d);
    for (int j = 0; j < r; ++j) lk += gm.mixing(k, j) * shifted[j];
    gm.model.lindblads[k] = lk;
  }
  for (int i = 0; i < r; ++i) {
    if (std::abs((rho0 * gm.model.lindblads[i]).trace()) > check) throw GaugeFailure("gauge shift check failed");
    for (int j = 0; j < r; ++j) {
      cplx v = (rho0 * gm.model.lindblads[i].adjoint() * gm.model.lindblads[j]).trace();
      if (std::abs(v - cplx(i == j ? gm.mu(i) : 0.0)) > check) throw GaugeFailure("gauge diagonalisation failed");
    }
  }
  return gm;
}

}  // namespace mpqec
