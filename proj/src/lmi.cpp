#include "mpqec/lmi.hpp"

#include <cmath>
#include <limits>

namespace mpqec {

namespace {

CMatrix assemble(const LmiProblem& p, const RVector& y) {
  CMatrix f = p.F[0];
  for (long k = 0; k < y.size(); ++k) f += y(k) * p.F[k + 1];
  return f;
}

// -log det F, or +inf outside the cone.
double barrier(const CMatrix& f) {
  Eigen::LLT<CMatrix> llt(f);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (long i = 0; i < f.rows(); ++i) {
    double v = l(i, i).real();
    if (!(v > 0)) return std::numeric_limits<double>::infinity();
    s -= 2.0 * std::log(v);
  }
  return s;
}

}  // namespace

LmiResult solve_lmi(const LmiProblem& prob, RVector y, double gap_tol, int max_newton) {
  const long n = y.size();
  const double size = static_cast<double>(prob.F[0].rows());
  if (static_cast<long>(prob.F.size()) != n + 1 || prob.q.size() != n)
    throw ShapeError("solve_lmi: inconsistent problem size");
  if (!std::isfinite(barrier(assemble(prob, y)))) throw InvalidInput("solve_lmi: start point not strictly feasible");

  LmiResult res;
  double s = 1.0;
  std::vector<CMatrix> g(n);
  for (;;) {
    // Centring for the current s.
    for (int inner = 0;; ++inner) {
      if (res.newton_steps >= max_newton) throw OptimizerStalled("barrier method exceeded Newton budget");
      CMatrix f = assemble(prob, y);
      Eigen::LLT<CMatrix> llt(f);
      if (llt.info() != Eigen::Success) throw NumericalFailure("solve_lmi: lost feasibility");
      CMatrix linv = llt.matrixL().solve(CMatrix::Identity(f.rows(), f.cols()));
      for (long k = 0; k < n; ++k) g[k] = linv * prob.F[k + 1] * linv.adjoint();
      RVector grad(n);
      RMatrix hess(n, n);
      for (long k = 0; k < n; ++k) {
        grad(k) = s * prob.q(k) - g[k].trace().real();
        for (long l = 0; l <= k; ++l) hess(k, l) = hess(l, k) = (g[k].cwiseProduct(g[l].conjugate())).sum().real();
      }
      // Small ridge keeps the step defined when some direction leaves F unchanged.
      double ridge = 1e-14 * std::max(1.0, hess.diagonal().maxCoeff());
      RVector step = (hess + ridge * RMatrix::Identity(n, n)).ldlt().solve(-grad);
      double dec = -grad.dot(step);
      ++res.newton_steps;
      if (dec / 2.0 < 1e-8 || inner >= 200) break;
      double phi0 = s * prob.q.dot(y) + barrier(f);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls, t *= 0.5) {
        RVector cand = y + t * step;
        double phi = s * prob.q.dot(cand) + barrier(assemble(prob, cand));
        if (std::isfinite(phi) && phi <= phi0 - 0.25 * t * dec) {
          y = cand;
          moved = true;
          break;
        }
      }
      if (!moved) break;  // decrement below rounding resolution
    }
    if (size / s < gap_tol) break;
    s *= 8.0;
  }
  CMatrix f = assemble(prob, y);
  res.y = y;
  res.Z = f.inverse() / s;
  res.Z = (res.Z + res.Z.adjoint()) / 2.0;
  res.gap = size / s;
  return res;
}

}  // namespace mpqec
