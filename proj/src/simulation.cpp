#include "mpqec/simulation.hpp"

#include <cmath>

namespace mpqec {

Generator probe_generator(const NoiseModel& model, const std::vector<int>& dims, int probes) {
  if (probes < 0 || probes > static_cast<int>(dims.size())) throw ShapeError("probe_generator: too many probes");
  Generator gen;
  gen.dims = dims;
  for (int s = 0; s < probes; ++s) {
    if (dims[s] != model.d) throw ShapeError("probe_generator: probe dimension does not match the model");
    gen.signal.push_back({s, model.H});
    for (const auto& l : model.lindblads) gen.jumps.push_back({s, l});
  }
  return gen;
}

int EvolutionSpec::steps() const {
  if (!(dt > 0)) throw InvalidInput("time step must be positive");
  if (t < 0) throw InvalidInput("evolution time must be nonnegative");
  const double n = std::round(t / dt);
  if (std::abs(n * dt - t) > 1e-9 * std::max(1.0, t)) throw InvalidInput("t is not an integer multiple of dt");
  return static_cast<int>(n);
}

CMatrix lindblad_rhs(const Generator& gen, double omega, const CMatrix& rho, kernels::Exec exec) {
  const int ns = static_cast<int>(gen.dims.size());
  const cplx i(0, 1);
  // Per-site effective generator K = -i h - (1/2) sum L^dag L, so that the
  // no-jump part is K rho + rho K^dag.
  std::vector<CMatrix> k(ns);
  auto add = [&](int site, const CMatrix& op) {
    if (site < 0 || site >= ns) throw ShapeError("generator term on a missing site");
    if (k[site].size() == 0) k[site] = CMatrix::Zero(gen.dims[site], gen.dims[site]);
    k[site] += op;
  };
  for (const auto& h : gen.signal) add(h.site, -i * omega * h.op);
  for (const auto& h : gen.drift) add(h.site, -i * h.op);
  for (const auto& l : gen.jumps) add(l.site, -0.5 * l.op.adjoint() * l.op);
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  CMatrix tmp, tmp2;
  for (int s = 0; s < ns; ++s) {
    if (k[s].size() == 0) continue;
    kernels::left_apply(k[s], s, gen.dims, rho, tmp, exec);
    out += tmp;
    kernels::right_apply(rho, k[s].adjoint(), s, gen.dims, tmp, exec);
    out += tmp;
  }
  for (const auto& l : gen.jumps) {
    kernels::right_apply(rho, l.op.adjoint(), l.site, gen.dims, tmp, exec);
    kernels::left_apply(l.op, l.site, gen.dims, tmp, tmp2, exec);
    out += tmp2;
  }
  return out;
}

CMatrix rk4_step(const Generator& gen, double omega, double dt, const CMatrix& rho, kernels::Exec exec) {
  CMatrix k1 = lindblad_rhs(gen, omega, rho, exec);
  CMatrix k2 = lindblad_rhs(gen, omega, rho + (dt / 2) * k1, exec);
  CMatrix k3 = lindblad_rhs(gen, omega, rho + (dt / 2) * k2, exec);
  CMatrix k4 = lindblad_rhs(gen, omega, rho + dt * k3, exec);
  return rho + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

void check_positive(const CMatrix& rho, const Tolerance& tol) {
  EigH e = eig_hermitian((rho + rho.adjoint()) / 2.0, 1.0);
  if (e.values.minCoeff() < -tol.pos)
    throw PositivityLost("eigenvalue " + std::to_string(e.values.minCoeff()) + " after integration; reduce dt");
}

}  // namespace

DensityMatrix evolve_lindblad(const DensityMatrix& rho0, const EvolutionSpec& spec, const Tolerance& tol,
                              kernels::Exec exec) {
  if (rho0.dim() != spec.gen.dim()) throw ShapeError("evolve_lindblad: state dimension does not match generator");
  const int steps = spec.steps();
  CMatrix rho = rho0.matrix();
  for (int k = 0; k < steps; ++k) rho = rk4_step(spec.gen, spec.omega, spec.dt, rho, exec);
  check_positive(rho, tol);
  return DensityMatrix((rho + rho.adjoint()) / 2.0, 1.0);
}

namespace {

const RecoveryChannel& recovery_of(const EvolutionSpec& spec) {
  if (!spec.recovery) throw InvalidInput("evolution spec has no recovery channel");
  if (spec.recovery->R.rows() != spec.gen.dim()) throw ShapeError("recovery channel does not match the generator");
  return *spec.recovery;
}

CVector vec2(const CMatrix& m) {
  CVector v(4);
  v << m(0, 0), m(0, 1), m(1, 0), m(1, 1);
  return v;
}

CMatrix mat2(const CVector& v) {
  CMatrix m(2, 2);
  m << v(0), v(1), v(2), v(3);
  return m;
}

}  // namespace

CMatrix logical_step_map(const EvolutionSpec& spec, kernels::Exec exec) {
  const RecoveryChannel& rec = recovery_of(spec);
  const CVector* kets[2] = {&rec.ket0, &rec.ket1};
  CMatrix t(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) {
      CMatrix rho = *kets[a] * kets[b]->adjoint();
      CMatrix out = rec.apply(rk4_step(spec.gen, spec.omega, spec.dt, rho, exec));
      t.col(a * 2 + b) = vec2(out);
      // The step is Hermiticity preserving: E_ba maps to the adjoint image.
      if (a != b) t.col(b * 2 + a) = vec2(out.adjoint());
    }
  return t;
}

CMatrix evolve_with_qec_logical(const DensityMatrix& rho0, const EvolutionSpec& spec, const Tolerance& tol,
                                kernels::Exec exec) {
  const RecoveryChannel& rec = recovery_of(spec);
  if (rho0.dim() != spec.gen.dim()) throw ShapeError("evolve_with_qec: state dimension does not match generator");
  const int steps = spec.steps();
  if (steps == 0) {
    CMatrix out(2, 2);
    const CVector* kets[2] = {&rec.ket0, &rec.ket1};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out(a, b) = kets[a]->dot(rho0.matrix() * *kets[b]);
    return out;
  }
  CMatrix logical = rec.apply(rk4_step(spec.gen, spec.omega, spec.dt, rho0.matrix(), exec));
  if (steps > 1) {
    CMatrix t = logical_step_map(spec, exec);
    CVector v = vec2(logical);
    for (int k = 1; k < steps; ++k) v = t * v;
    logical = mat2(v);
  }
  check_positive(logical, tol);
  return logical;
}

DensityMatrix evolve_with_qec(const DensityMatrix& rho0, const EvolutionSpec& spec, const Tolerance& tol,
                              kernels::Exec exec) {
  CMatrix logical = evolve_with_qec_logical(rho0, spec, tol, exec);
  const RecoveryChannel& rec = *spec.recovery;
  CMatrix v(rec.ket0.size(), 2);
  v.col(0) = rec.ket0;
  v.col(1) = rec.ket1;
  CMatrix full = v * logical * v.adjoint();
  return DensityMatrix((full + full.adjoint()) / 2.0, 1.0);
}

CMatrix apply_block_map(const CMatrix& step, const CMatrix& rho, int block, int blocks) {
  const long n = 1L << blocks;
  if (step.rows() != 4 || step.cols() != 4 || rho.rows() != n || rho.cols() != n)
    throw ShapeError("apply_block_map: shape mismatch");
  if (block < 0 || block >= blocks) throw ShapeError("apply_block_map: block out of range");
  const long bit = 1L << (blocks - 1 - block);
  CMatrix out = CMatrix::Zero(n, n);
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) {
      const int ai = (a & bit) ? 1 : 0, bi = (b & bit) ? 1 : 0;
      cplx acc = 0;
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          const long ac = c ? (a | bit) : (a & ~bit), bd = d ? (b | bit) : (b & ~bit);
          acc += step(ai * 2 + bi, c * 2 + d) * rho(ac, bd);
        }
      out(a, b) = acc;
    }
  return out;
}

CMatrix predicted_logical_state(const CMatrix& rho_logical, const LogicalDynamics& dyn, double omega, double t) {
  if (rho_logical.rows() != 2 || rho_logical.cols() != 2) throw ShapeError("logical state must be 2 x 2");
  const cplx rate(-dyn.gamma_L, -(omega * dyn.signal + dyn.offset_rotation + dyn.beta_L));
  CMatrix out = rho_logical;
  out(0, 1) *= std::exp(rate * t);
  out(1, 0) *= std::exp(std::conj(rate) * t);
  return out;
}

std::string method_name(QfiMethod m) {
  switch (m) {
    case QfiMethod::ClosedForm: return "closed-form";
    case QfiMethod::SldSpectral: return "sld-spectral";
    case QfiMethod::FiniteDifference: return "finite-difference";
  }
  return "unknown";
}

QfiResult qfi(const DensityMatrix& rho, const HermitianMatrix& drho, const Tolerance& tol) {
  if (rho.dim() != drho.dim()) throw ShapeError("qfi: state and derivative differ in size");
  EigH e = eig_hermitian(rho.matrix(), 1.0);
  RVector lam = e.values.cwiseMax(0.0);
  CMatrix dk = e.vectors.adjoint() * drho.matrix() * e.vectors;
  double f = 0, lost = 0;
  for (int j = 0; j < rho.dim(); ++j)
    for (int k = 0; k < rho.dim(); ++k) {
      const double w = std::norm(dk(j, k)), s = lam(j) + lam(k);
      if (s > tol.eig) f += 2.0 * w / s;
      else lost += w;
    }
  if (lost > 1e-6) throw IllConditioned("derivative has weight " + std::to_string(lost) + " outside the support");
  return {f, QfiMethod::SldSpectral, 0.0};
}

QfiResult qfi_central(const StateFamily& family, double omega, double h, const Tolerance& tol) {
  if (!(h > 0)) throw InvalidInput("finite-difference step must be positive");
  CMatrix rho = family(omega);
  CMatrix d = (family(omega + h) - family(omega - h)) / (2 * h);
  QfiResult r = qfi(DensityMatrix((rho + rho.adjoint()) / 2.0, 1e-6), HermitianMatrix((d + d.adjoint()) / 2.0), tol);
  r.omega_step = h;
  return r;
}

QfiResult qfi_fidelity(const StateFamily& family, double omega, double h) {
  if (!(h > 0)) throw InvalidInput("finite-difference step must be positive");
  CMatrix a = family(omega - h), b = family(omega + h);
  a = (a + a.adjoint()) / 2.0;
  b = (b + b.adjoint()) / 2.0;
  // Restrict both states to the joint support so that roundoff eigenvalues do
  // not enter the square roots.
  EigH e = eig_hermitian((a + b) / 2.0, 1e-8);
  const double top = e.values.maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < e.values.size(); ++i)
    if (e.values(i) > 1e-12 * top) keep.push_back(i);
  CMatrix p(a.rows(), static_cast<long>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) p.col(i) = e.vectors.col(keep[i]);
  const double root = std::sqrt(fidelity(p.adjoint() * a * p, p.adjoint() * b * p));
  return {8.0 * (1.0 - root) / (4 * h * h), QfiMethod::FiniteDifference, h};
}

double ghz_dephasing_qfi(int n, double gamma, double t) {
  if (n < 1 || gamma < 0 || t < 0) throw InvalidInput("ghz_dephasing_qfi: need n >= 1, gamma >= 0, t >= 0");
  return double(n) * n * t * t * std::exp(-2.0 * n * gamma * t);
}

CVector ghz_state(int n) {
  if (n < 1 || n > 20) throw InvalidInput("ghz_state: n out of range");
  CVector v = CVector::Zero(1L << n);
  v(0) = v((1L << n) - 1) = 1.0 / std::sqrt(2.0);
  return v;
}

std::vector<TrajectoryPoint> logical_trajectory(const EvolutionSpec& spec, const CMatrix& rho_logical, int stride,
                                                double h, const Tolerance& tol, kernels::Exec exec) {
  if (stride < 1) throw InvalidInput("trajectory stride must be positive");
  const int steps = spec.steps();
  CMatrix maps[3];
  for (int k = 0; k < 3; ++k) {
    EvolutionSpec s = spec;
    s.omega = spec.omega + (k - 1) * h;
    maps[k] = logical_step_map(s, exec);
  }
  CVector v[3] = {vec2(rho_logical), vec2(rho_logical), vec2(rho_logical)};
  std::vector<TrajectoryPoint> out;
  for (int step = 0; step <= steps; ++step) {
    if (step % stride == 0 || step == steps) {
      CMatrix rho = mat2(v[1]);
      CMatrix d = (mat2(v[2]) - mat2(v[0])) / (2 * h);
      TrajectoryPoint p;
      p.t = step * spec.dt;
      p.p0 = rho(0, 0).real();
      p.p1 = rho(1, 1).real();
      p.coherence = std::abs(rho(0, 1));
      p.qfi = qfi(DensityMatrix((rho + rho.adjoint()) / 2.0, 1e-6), HermitianMatrix((d + d.adjoint()) / 2.0), tol).value;
      out.push_back(p);
    }
    if (step < steps)
      for (int k = 0; k < 3; ++k) v[k] = maps[k] * v[k];
  }
  return out;
}

}  // namespace mpqec
