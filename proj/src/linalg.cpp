#include "mpqec/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

namespace mpqec {

void check_dim(long dim, const char* where) {
  if (dim > kMaxDim)
    throw DimensionTooLarge(std::string(where) + ": dimension " + std::to_string(dim) + " exceeds " +
                            std::to_string(kMaxDim));
}

void check_square(const CMatrix& a, const char* where) {
  if (a.rows() != a.cols())
    throw ShapeError(std::string(where) + ": expected square matrix, got " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()));
}

bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return max_abs(a - a.adjoint()) <= tol * std::max(1.0, max_abs(a));
}

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

cplx hs_inner(const CMatrix& a, const CMatrix& b) { return (a.adjoint() * b).trace(); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix kron_all(const std::vector<CMatrix>& ops) {
  if (ops.empty()) return CMatrix::Identity(1, 1);
  CMatrix out = ops.front();
  for (std::size_t i = 1; i < ops.size(); ++i) out = kron(out, ops[i]);
  return out;
}

long product(const std::vector<int>& dims) {
  long p = 1;
  for (int d : dims) p *= d;
  return p;
}

CMatrix embed_local(const CMatrix& op, int site, const std::vector<int>& dims) {
  check_square(op, "embed_local");
  if (site < 0 || site >= static_cast<int>(dims.size()) || op.rows() != dims[site])
    throw ShapeError("embed_local: operator does not fit site " + std::to_string(site));
  long total = product(dims);
  check_dim(total, "embed_local");
  long before = 1, after = 1;
  for (int s = 0; s < site; ++s) before *= dims[s];
  for (std::size_t s = site + 1; s < dims.size(); ++s) after *= dims[s];
  return kron(kron(CMatrix::Identity(before, before), op), CMatrix::Identity(after, after));
}

namespace {

struct TraceLayout {
  std::vector<long> keep_stride;   // stride in the kept index, per subsystem (0 if traced)
  std::vector<long> trace_stride;  // stride in the traced index, per subsystem (0 if kept)
  long keep_dim = 1, trace_dim = 1;
};

TraceLayout layout(const std::vector<int>& dims, const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  TraceLayout lay;
  lay.keep_stride.assign(n, 0);
  lay.trace_stride.assign(n, 0);
  std::vector<bool> kept(n, false);
  for (int s : keep) {
    if (s < 0 || s >= n || kept[s]) throw ShapeError("partial_trace: bad keep list");
    kept[s] = true;
  }
  for (auto it = keep.rbegin(); it != keep.rend(); ++it) {
    lay.keep_stride[*it] = lay.keep_dim;
    lay.keep_dim *= dims[*it];
  }
  for (int s = n - 1; s >= 0; --s)
    if (!kept[s]) {
      lay.trace_stride[s] = lay.trace_dim;
      lay.trace_dim *= dims[s];
    }
  return lay;
}

// Maps each full index to (kept index, traced index).
void split_indices(const std::vector<int>& dims, const TraceLayout& lay, std::vector<long>& kidx,
                   std::vector<long>& tidx) {
  long total = product(dims);
  kidx.assign(total, 0);
  tidx.assign(total, 0);
  const int n = static_cast<int>(dims.size());
  std::vector<int> dig(n, 0);
  for (long idx = 0; idx < total; ++idx) {
    long k = 0, t = 0;
    for (int s = 0; s < n; ++s) {
      k += dig[s] * lay.keep_stride[s];
      t += dig[s] * lay.trace_stride[s];
    }
    kidx[idx] = k;
    tidx[idx] = t;
    for (int s = n - 1; s >= 0; --s) {
      if (++dig[s] < dims[s]) break;
      dig[s] = 0;
    }
  }
}

}  // namespace

CMatrix partial_trace(const CMatrix& rho, const std::vector<int>& dims, const std::vector<int>& keep) {
  check_square(rho, "partial_trace");
  if (rho.rows() != product(dims)) throw ShapeError("partial_trace: dims do not match matrix size");
  TraceLayout lay = layout(dims, keep);
  std::vector<long> kidx, tidx;
  split_indices(dims, lay, kidx, tidx);
  // Regroup into a (keep x trace) index table, then contract over the traced index.
  std::vector<long> table(rho.rows());
  for (long idx = 0; idx < rho.rows(); ++idx) table[kidx[idx] * lay.trace_dim + tidx[idx]] = idx;
  CMatrix out = CMatrix::Zero(lay.keep_dim, lay.keep_dim);
  for (long a = 0; a < lay.keep_dim; ++a)
    for (long b = 0; b < lay.keep_dim; ++b) {
      cplx acc = 0.0;
      for (long t = 0; t < lay.trace_dim; ++t)
        acc += rho(table[a * lay.trace_dim + t], table[b * lay.trace_dim + t]);
      out(a, b) = acc;
    }
  return out;
}

CMatrix reduced_outer(const CVector& a, const CVector& b, const std::vector<int>& dims,
                      const std::vector<int>& keep) {
  if (a.size() != product(dims) || b.size() != a.size()) throw ShapeError("reduced_outer: size mismatch");
  TraceLayout lay = layout(dims, keep);
  std::vector<long> kidx, tidx;
  split_indices(dims, lay, kidx, tidx);
  CMatrix ma = CMatrix::Zero(lay.keep_dim, lay.trace_dim), mb = CMatrix::Zero(lay.keep_dim, lay.trace_dim);
  for (long idx = 0; idx < a.size(); ++idx) {
    ma(kidx[idx], tidx[idx]) = a(idx);
    mb(kidx[idx], tidx[idx]) = b(idx);
  }
  return ma * mb.adjoint();
}

EigH eig_hermitian(const CMatrix& a, double tol) {
  check_square(a, "eig_hermitian");
  if (!is_hermitian(a, tol)) throw ShapeError("eig_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw NumericalFailure("eig_hermitian: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

RVector singular_values(const CMatrix& a) {
  if (a.size() == 0) return RVector();
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues();
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

double trace_norm(const CMatrix& a) { return a.size() == 0 ? 0.0 : singular_values(a).sum(); }

CMatrix gram_factor(const CMatrix& g, double tol) {
  check_square(g, "gram_factor");
  const long n = g.rows();
  if (n == 0) return CMatrix(0, 0);
  CMatrix herm = (g + g.adjoint()) / 2.0;
  Eigen::LLT<CMatrix> llt(herm);
  if (llt.info() == Eigen::Success) {
    CMatrix r = llt.matrixU();
    return r;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  if (es.info() != Eigen::Success) throw NumericalFailure("gram_factor: eigensolver failed");
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -tol * scale)
    throw CholeskyFailure("Gram matrix indefinite: min eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
  RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix psd_part(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) / 2.0);
  RVector v = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * v.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix orthonormal_columns(const CMatrix& a, double tol) {
  std::vector<CVector> kept;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    CVector v = a.col(j);
    double n0 = v.norm();
    if (n0 <= tol) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : kept) v -= q * q.dot(v);
    if (v.norm() <= tol * std::max(1.0, n0)) continue;
    kept.push_back(v / v.norm());
  }
  CMatrix out(a.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) out.col(j) = kept[j];
  return out;
}

std::vector<CMatrix> hermitian_basis(int d) {
  std::vector<CMatrix> out;
  out.push_back(CMatrix::Identity(d, d) / std::sqrt(double(d)));
  // Traceless diagonal generators.
  for (int k = 1; k < d; ++k) {
    CMatrix m = CMatrix::Zero(d, d);
    for (int i = 0; i < k; ++i) m(i, i) = 1.0;
    m(k, k) = -double(k);
    out.push_back(m / std::sqrt(double(k) * (k + 1)));
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      CMatrix re = CMatrix::Zero(d, d), im = CMatrix::Zero(d, d);
      re(i, j) = re(j, i) = 1.0 / std::sqrt(2.0);
      im(i, j) = cplx(0, -1.0 / std::sqrt(2.0));
      im(j, i) = cplx(0, 1.0 / std::sqrt(2.0));
      out.push_back(re);
      out.push_back(im);
    }
  return out;
}

HermitianMatrix::HermitianMatrix(CMatrix m, double tol) : m_(std::move(m)) {
  check_square(m_, "HermitianMatrix");
  check_dim(m_.rows(), "HermitianMatrix");
  if (!is_hermitian(m_, tol)) throw ShapeError("HermitianMatrix: input is not Hermitian");
}

DensityMatrix::DensityMatrix(CMatrix m, double tol) : m_(std::move(m)) {
  check_square(m_, "DensityMatrix");
  check_dim(m_.rows(), "DensityMatrix");
  if (!is_hermitian(m_, tol)) throw ShapeError("DensityMatrix: input is not Hermitian");
  if (std::abs(m_.trace() - cplx(1.0)) > tol * std::max<double>(1.0, m_.rows()))
    throw ShapeError("DensityMatrix: trace is not 1");
  if (eig_hermitian(m_, tol).values.minCoeff() < -tol) throw ShapeError("DensityMatrix: not positive semidefinite");
}

double fidelity(const CMatrix& rho, const CMatrix& sigma) {
  EigH er = eig_hermitian(rho, 1e-8);
  RVector s = er.values.cwiseMax(0.0).cwiseSqrt();
  CMatrix sq = er.vectors * s.cast<cplx>().asDiagonal() * er.vectors.adjoint();
  CMatrix inner = sq * sigma * sq;
  EigH ei = eig_hermitian((inner + inner.adjoint()) / 2.0, 1e-8);
  double f = ei.values.cwiseMax(0.0).cwiseSqrt().sum();
  return f * f;
}

}  // namespace mpqec
