#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

#include "mpqec/errors.hpp"

namespace mpqec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Largest Hilbert-space dimension any routine will touch.
inline constexpr long kMaxDim = 1L << 14;

struct Tolerance {
  double tau = 1e-9;   // default numerical tolerance
  double rank = 1e-8;  // span rank cutoff, relative to the largest Gram eigenvalue
  double pos = 1e-7;   // positivity check on evolved states
  double eig = 1e-10;  // SLD eigenvalue cutoff

  Tolerance scaled(double s) const { return {tau * s, rank * s, pos * s, eig * s}; }
};

void check_dim(long dim, const char* where);
void check_square(const CMatrix& a, const char* where);

bool is_hermitian(const CMatrix& a, double tol);
double max_abs(const CMatrix& a);

// Hilbert-Schmidt inner product Tr(a^dagger b).
cplx hs_inner(const CMatrix& a, const CMatrix& b);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix kron_all(const std::vector<CMatrix>& ops);

// Embeds a single-site operator into the full tensor product space.
CMatrix embed_local(const CMatrix& op, int site, const std::vector<int>& dims);

long product(const std::vector<int>& dims);

// Tr over all subsystems not in `keep`. The kept subsystems appear in the
// order listed in `keep`.
CMatrix partial_trace(const CMatrix& rho, const std::vector<int>& dims, const std::vector<int>& keep);

// Tr_{not keep}(|a><b|) without forming the outer product.
CMatrix reduced_outer(const CVector& a, const CVector& b, const std::vector<int>& dims,
                      const std::vector<int>& keep);

struct EigH {
  RVector values;  // ascending
  CMatrix vectors;
};

// Hermitian eigendecomposition; rejects inputs that are not Hermitian within tol.
EigH eig_hermitian(const CMatrix& a, double tol = 1e-9);

double operator_norm(const CMatrix& a);
double trace_norm(const CMatrix& a);
RVector singular_values(const CMatrix& a);

// Any R with R^dagger R = g for a PSD Gram matrix g. Cholesky first, eigen-based
// square root when Cholesky fails. Throws CholeskyFailure when g is indefinite
// beyond tol (relative to its largest eigenvalue).
CMatrix gram_factor(const CMatrix& g, double tol);

// Projects a Hermitian matrix on the PSD cone.
CMatrix psd_part(const CMatrix& a);

// Orthonormal basis of the column span, columns with residual below tol dropped.
CMatrix orthonormal_columns(const CMatrix& a, double tol);

// Orthonormal Hermitian basis of the d x d Hermitian matrices (identity/sqrt(d) first).
std::vector<CMatrix> hermitian_basis(int d);

class HermitianMatrix {
 public:
  explicit HermitianMatrix(CMatrix m, double tol = 1e-9);
  const CMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  CMatrix m_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m, double tol = 1e-9);
  const CMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  CMatrix m_;
};

double fidelity(const CMatrix& rho, const CMatrix& sigma);

}  // namespace mpqec
