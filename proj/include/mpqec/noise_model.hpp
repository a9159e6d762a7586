#pragma once

#include <string>
#include <vector>

#include "mpqec/linalg.hpp"

namespace mpqec {

// Single-probe generator: rate-normalised Hamiltonian H (the signal couples as
// omega * H) and Lindblad operators L_i, all d x d.
struct NoiseModel {
  int d = 0;
  CMatrix H;
  std::vector<CMatrix> lindblads;
  std::string label;

  int r() const { return static_cast<int>(lindblads.size()); }
};

// Validates shapes and Hermiticity of H; never symmetrises silently.
NoiseModel make_model(CMatrix H, std::vector<CMatrix> lindblads, std::string label,
                      const Tolerance& tol = {});

// Real span of the Hermitian operators {1, L_i + L_i^dag, i(L_i - L_i^dag),
// Hermitian and anti-Hermitian parts of L_i^dag L_j}, HS-orthonormal basis.
struct LindbladSpan {
  int d = 0;
  std::vector<CMatrix> basis;

  int dim() const { return static_cast<int>(basis.size()); }
  CMatrix project(const CMatrix& x) const;
  RVector coords(const CMatrix& x) const;
  CMatrix combine(const RVector& c) const;
  double residual(const CMatrix& x) const;  // HS norm of x minus its projection
};

std::vector<CMatrix> span_generators(const NoiseModel& model);
LindbladSpan build_span(const NoiseModel& model, const Tolerance& tol = {});

double hnls_residual(const NoiseModel& model, const Tolerance& tol = {});
bool hnls_holds(const NoiseModel& model, const Tolerance& tol = {});

// Model with Lindblad operators shifted and remixed so that, for the supplied
// state pair, Tr(rho_k L_i) = 0 and Tr(rho_k L_i^dag L_j) = mu_i delta_ij.
struct GaugedModel {
  NoiseModel model;            // gauged Lindblad operators, original H
  std::vector<cplx> shifts;    // x_i = Tr(rho0 L_i) in the input frame
  CMatrix mixing;              // gauged L_k = sum_j mixing(k, j) (L_j - x_j)
  RVector mu;                  // diagonal second moments
  CMatrix hamiltonian_shift;   // H + shift with gauged L reproduces the input dynamics
  CMatrix rho0, rho1;
};

GaugedModel apply_gauge(const NoiseModel& model, const CMatrix& rho0, const CMatrix& rho1,
                        const Tolerance& tol = {});

}  // namespace mpqec
