#include "doctest.h"
#include "mpqec/fixtures.hpp"
#include "mpqec/hnls_solver.hpp"
#include "oracles.hpp"

using namespace mpqec;

namespace {

double spread(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  return (es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff()) / 2.0;
}

// min over S in span of ||H - S||, by Nelder-Mead on the spectral spread with
// restarts. Span generators are written out directly.
double brute_distance(const CMatrix& h, const std::vector<CMatrix>& ls) {
  const cplx I(0, 1);
  std::vector<CMatrix> gens;
  for (const auto& l : ls) {
    gens.push_back(l + l.adjoint());
    gens.push_back(I * (l - l.adjoint()));
  }
  for (const auto& a : ls)
    for (const auto& b : ls) {
      CMatrix x = a.adjoint() * b;
      gens.push_back(x + x.adjoint());
      gens.push_back(I * (x - x.adjoint()));
    }
  auto f = [&](const std::vector<double>& c) {
    CMatrix s = h;
    for (std::size_t k = 0; k < gens.size(); ++k) s -= c[k] * gens[k];
    return spread(s);
  };
  std::vector<double> x(gens.size(), 0.0);
  double best = f(x);
  for (int restart = 0; restart < 12; ++restart) {
    x = oracle::nelder_mead(f, x, restart < 6 ? 0.3 : 0.01, 6000);
    best = std::min(best, f(x));
  }
  return best;
}

double state_fidelity(const CMatrix& a, const CMatrix& b) {
  // Both arguments here are proportional to projectors or diagonal, so
  // (Tr sqrt(sqrt a b sqrt a))^2 reduces to an eigenvalue sum.
  Eigen::SelfAdjointEigenSolver<CMatrix> ea(a);
  CMatrix sa = ea.eigenvectors() * ea.eigenvalues().cwiseMax(0).cwiseSqrt().cast<cplx>().asDiagonal() *
               ea.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> ei(sa * b * sa);
  double f = ei.eigenvalues().cwiseMax(0).cwiseSqrt().sum();
  return f * f;
}

}  // namespace

TEST_CASE("qutrit distance, certificate and state ordering") {
  NoiseModel m = fixtures::qutrit_model();
  HnlsSolution sol = solve_hnls(m);
  CHECK(sol.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.gap <= 1e-7);
  CMatrix r0 = CMatrix::Zero(3, 3), r1 = CMatrix::Zero(3, 3);
  r0(0, 0) = r0(2, 2) = 0.5;
  r1(1, 1) = 1.0;
  CHECK(state_fidelity(sol.rho0, r0) >= 1 - 1e-8);
  CHECK(state_fidelity(sol.rho1, r1) >= 1 - 1e-8);
  CHECK(sol.d0 == 2);
  REQUIRE(sol.lambdas.size() == 3);
  CHECK(sol.lambdas(0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.lambdas(1) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.lambdas(2) == doctest::Approx(1.0).epsilon(1e-8));
  // Canonical basis: |0>, |2> for the first block, |1> for the second.
  CHECK(std::abs(std::abs(sol.basis(0, 0)) - 1.0) < 1e-8);
  CHECK(std::abs(std::abs(sol.basis(2, 1)) - 1.0) < 1e-8);
  CHECK(std::abs(std::abs(sol.basis(1, 2)) - 1.0) < 1e-8);
  // H - S* = diag(1/2, -1/2, 1/2) for the known optimal S* = 1/2 - L^dag L.
  CMatrix ref = m.H - (0.5 * CMatrix::Identity(3, 3) - m.lindblads[0].adjoint() * m.lindblads[0]);
  CHECK(std::abs(oracle::operator_norm(ref) - 0.5) < 1e-14);
  CHECK(std::abs(oracle::operator_norm(m.H - sol.S_star) - sol.value) < 1e-9);
}

TEST_CASE("dual certificate satisfies the optimality relations") {
  for (const NoiseModel& m : {fixtures::qutrit_model(), fixtures::generic_hl_model(), fixtures::qubit_zx_model()}) {
    HnlsSolution sol = solve_hnls(m);
    LindbladSpan span = build_span(m);
    CMatrix diff = sol.rho0 - sol.rho1;
    CHECK(std::abs((diff * m.H).trace().real() - 2 * sol.value) <= 1e-8);
    for (const auto& s : span.basis) CHECK(std::abs((diff * s).trace()) <= 1e-8);
    CHECK(std::abs((sol.rho0 * sol.rho1).trace()) < 1e-8);  // orthogonal supports
    CHECK(sol.rho0.trace().real() == doctest::Approx(1.0));
    CHECK(eig_hermitian(sol.rho0).values.minCoeff() > -1e-9);
    CHECK(sol.basis.adjoint().isApprox(sol.basis.inverse(), 1e-10));
  }
}

TEST_CASE("generic fixture matches the codimension-one closed form") {
  NoiseModel m = fixtures::generic_hl_model();
  auto [pos, neg, n] = oracle::codim1_normal(m.lindblads);
  double expected = std::abs((n * m.H).trace().real()) / oracle::trace_norm(n);
  HnlsSolution sol = solve_hnls(m);
  CHECK(sol.value == doctest::Approx(expected).epsilon(1e-8));
  // The optimal pair is unique here: the normalised parts of the normal.
  bool aligned = (n * m.H).trace().real() > 0;
  CHECK(max_abs(sol.rho0 - (aligned ? pos : neg)) < 1e-7);
  CHECK(max_abs(sol.rho1 - (aligned ? neg : pos)) < 1e-7);
}

TEST_CASE("random qutrit models agree with a direct minimiser") {
  auto& g = oracle::rng_for(31);
  for (int trial = 0; trial < 6; ++trial) {
    CMatrix h = oracle::random_hermitian(3, g);
    CMatrix l = 0.6 * oracle::random_complex(3, 3, g);
    NoiseModel m = make_model(h, {l}, "rand");
    HnlsSolution sol = solve_hnls(m);
    double brute = brute_distance(h, {l});
    CHECK(sol.value <= brute + 1e-9);
    CHECK(sol.value == doctest::Approx(brute).epsilon(1e-4));
  }
}

TEST_CASE("monotone under adding noise and scale covariant") {
  auto& g = oracle::rng_for(32);
  for (int trial = 0; trial < 4; ++trial) {
    CMatrix h = oracle::random_hermitian(3, g);
    CMatrix l1 = oracle::random_complex(3, 3, g);
    CMatrix l2 = CMatrix::Zero(3, 3);
    l2(0, 0) = 1.0;
    l2(1, 1) = -0.4;
    double one = solve_hnls(make_model(h, {l1}, "a")).value;
    double two = solve_hnls(make_model(h, {l1, l2}, "b")).value;
    CHECK(two <= one + 1e-9);
    double scaled = solve_hnls(make_model(3.0 * h, {0.5 * l1}, "c")).value;
    CHECK(scaled == doctest::Approx(3.0 * one).epsilon(1e-7));
  }
}

TEST_CASE("solver refuses models whose Hamiltonian lies in the span") {
  CHECK_THROWS_AS(solve_hnls(fixtures::qubit_dephasing_model(1.0)), HnlsViolated);
}

TEST_CASE("standard-limit coefficient for qubit dephasing") {
  for (double gamma : {0.5, 1.0, 2.0}) {
    NoiseModel m = fixtures::qubit_dephasing_model(gamma);
    SqlCoefficient sql = solve_sql_alpha(m);
    // Oracle: the constraint fixes Re h = 1/(2 sqrt(2 gamma)); minimise the
    // norm of K^dag K, K = h + hh L, over the two free reals (Im h, hh).
    const double reh = 1.0 / (2.0 * std::sqrt(2.0 * gamma));
    CMatrix l = m.lindblads[0];
    auto f = [&](const std::vector<double>& x) {
      CMatrix k = cplx(reh, x[0]) * CMatrix::Identity(2, 2) + x[1] * l;
      return oracle::operator_norm(k.adjoint() * k);
    };
    double best = 1e300;
    std::vector<double> arg{0, 0};
    for (double a = -1; a <= 1; a += 0.05)
      for (double b = -1; b <= 1; b += 0.05) {
        double v = f({a, b});
        if (v < best) {
          best = v;
          arg = {a, b};
        }
      }
    arg = oracle::nelder_mead(f, arg, 0.02, 3000);
    double oracle_alpha = f(arg);
    CHECK(oracle_alpha == doctest::Approx(1.0 / (8.0 * gamma)).epsilon(1e-6));
    CHECK(std::abs(sql.alpha - oracle_alpha) <= 1e-4);
    CHECK(sql.alpha == doctest::Approx(1.0 / (8.0 * gamma)).epsilon(1e-6));
    CHECK(sql.residual < 1e-9);
    CHECK(std::abs(sql.h[0].real() - reh) < 1e-5);
  }
}

TEST_CASE("standard-limit coefficient with a uniquely determined multiplier") {
  // H = c L^dag L with L = |0><1|: the constraint forces h = 0, hh = c.
  CMatrix l = CMatrix::Zero(2, 2);
  l(0, 1) = 1.0;
  const double c = 0.8;
  SqlCoefficient sql = solve_sql_alpha(make_model(c * l.adjoint() * l, {l}, "amp"));
  CMatrix k = c * l;
  CHECK(sql.alpha == doctest::Approx(oracle::operator_norm(k.adjoint() * k)).epsilon(1e-7));
}

TEST_CASE("standard-limit coefficient rejects Heisenberg-limited models") {
  CHECK_THROWS_AS(solve_sql_alpha(fixtures::qutrit_model()), ConstraintInfeasible);
}
