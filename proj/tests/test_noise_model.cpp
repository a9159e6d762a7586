#include <Eigen/QR>
#include <fstream>

#include "doctest.h"
#include "mpqec/fixtures.hpp"
#include "mpqec/io.hpp"
#include "mpqec/noise_model.hpp"
#include "oracles.hpp"

using namespace mpqec;

namespace {

// Real coordinates of a Hermitian matrix (Re and Im of every entry).
Eigen::VectorXd realvec(const CMatrix& h) {
  Eigen::VectorXd v(2 * h.size());
  for (long k = 0; k < h.size(); ++k) {
    v(2 * k) = h.data()[k].real();
    v(2 * k + 1) = h.data()[k].imag();
  }
  return v;
}

// Hermitian generators written out directly from the definition.
std::vector<CMatrix> generators_by_hand(const CMatrix& l1) {
  const cplx I(0, 1);
  CMatrix one = CMatrix::Identity(l1.rows(), l1.cols());
  CMatrix ll = l1.adjoint() * l1;
  return {one, l1 + l1.adjoint(), I * (l1 - l1.adjoint()), ll};
}

double ls_residual(const std::vector<CMatrix>& gens, const CMatrix& h) {
  Eigen::MatrixXd a(2 * h.size(), gens.size());
  for (std::size_t k = 0; k < gens.size(); ++k) a.col(k) = realvec(gens[k]);
  Eigen::VectorXd b = realvec(h);
  Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  return (a * x - b).norm();
}

int numeric_rank(const std::vector<CMatrix>& gens) {
  Eigen::MatrixXd a(2 * gens[0].size(), gens.size());
  for (std::size_t k = 0; k < gens.size(); ++k) a.col(k) = realvec(gens[k]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  int r = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > 1e-9 * svd.singularValues()(0)) ++r;
  return r;
}

// Dense Lindbladian, written independently of the library.
CMatrix lind(const CMatrix& h, const std::vector<CMatrix>& ls, const CMatrix& rho) {
  const cplx I(0, 1);
  CMatrix out = -I * (h * rho - rho * h);
  for (const auto& l : ls) {
    CMatrix ll = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll);
  }
  return out;
}

}  // namespace

TEST_CASE("qutrit span has dimension 4 and excludes H") {
  NoiseModel m = fixtures::qutrit_model();
  LindbladSpan span = build_span(m);
  CHECK(span.dim() == 4);
  auto gens = generators_by_hand(m.lindblads[0]);
  CHECK(numeric_rank(gens) == 4);
  CHECK(span.residual(m.H) == doctest::Approx(ls_residual(gens, m.H)).epsilon(1e-10));
  CHECK(hnls_holds(m));
  for (const auto& g : gens) CHECK(span.residual(g) < 1e-12);
}

TEST_CASE("span basis is orthonormal and the projector is idempotent") {
  auto& g = oracle::rng_for(21);
  for (int trial = 0; trial < 10; ++trial) {
    int d = 2 + trial % 3;
    NoiseModel m = make_model(oracle::random_hermitian(d, g), {oracle::random_complex(d, d, g)}, "rand");
    LindbladSpan span = build_span(m);
    for (int a = 0; a < span.dim(); ++a)
      for (int b = 0; b < span.dim(); ++b)
        CHECK(std::abs(hs_inner(span.basis[a], span.basis[b]) - cplx(a == b)) < 1e-10);
    CMatrix x = oracle::random_hermitian(d, g);
    CMatrix p = span.project(x);
    CHECK(max_abs(span.project(p) - p) < 1e-10);
    CHECK(span.dim() == numeric_rank([&] {
            auto gens = span_generators(m);
            return gens;
          }()));
  }
}

TEST_CASE("rank threshold ignores redundant Lindblad operators") {
  NoiseModel m = fixtures::qutrit_model();
  CMatrix l = m.lindblads[0];
  NoiseModel twice = make_model(m.H, {l, 2.0 * l}, "dup");
  CHECK(build_span(twice).dim() == 4);
}

TEST_CASE("HNLS verdicts on the bundled qubit fixtures") {
  CHECK(hnls_holds(fixtures::qubit_zx_model()));
  CHECK_FALSE(hnls_holds(fixtures::qubit_dephasing_model(1.0)));
  CHECK(hnls_holds(fixtures::generic_hl_model()));
  // H proportional to L^dagger L lies in the span.
  CMatrix l = CMatrix::Zero(2, 2);
  l(0, 1) = 1.0;
  CHECK_FALSE(hnls_holds(make_model(0.7 * l.adjoint() * l, {l}, "amp")));
}

TEST_CASE("generic fixture span is a hyperplane of the Hermitian space") {
  NoiseModel m = fixtures::generic_hl_model();
  CHECK(m.d == 3);
  CHECK(m.r() == 2);
  CHECK(build_span(m).dim() == 8);
}

TEST_CASE("scale covariance of the span residual") {
  NoiseModel m = fixtures::qutrit_model();
  double base = build_span(m).residual(m.H);
  NoiseModel scaled = make_model(2.5 * m.H, {std::sqrt(3.0) * m.lindblads[0]}, "s");
  CHECK(build_span(scaled).residual(scaled.H) == doctest::Approx(2.5 * base).epsilon(1e-10));
}

TEST_CASE("gauge removes first moments and diagonalises second moments") {
  auto& g = oracle::rng_for(22);
  NoiseModel m = fixtures::generic_hl_model();
  auto ref = oracle::codim1_states(m.lindblads);
  GaugedModel gm = apply_gauge(m, ref.first, ref.second);
  for (int i = 0; i < m.r(); ++i) {
    CHECK(std::abs((ref.first * gm.model.lindblads[i]).trace()) < 1e-8);
    CHECK(std::abs((ref.second * gm.model.lindblads[i]).trace()) < 1e-8);
    for (int j = 0; j < m.r(); ++j) {
      cplx v0 = (ref.first * gm.model.lindblads[i].adjoint() * gm.model.lindblads[j]).trace();
      cplx v1 = (ref.second * gm.model.lindblads[i].adjoint() * gm.model.lindblads[j]).trace();
      CHECK(std::abs(v0 - cplx(i == j ? gm.mu(i) : 0.0)) < 1e-8);
      CHECK(std::abs(v1 - v0) < 1e-8);
    }
  }
  // Same dynamics up to the recorded parameter-independent Hamiltonian shift.
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix rho = oracle::random_density(3, g);
    CMatrix a = lind(m.H, m.lindblads, rho);
    CMatrix b = lind(m.H + gm.hamiltonian_shift, gm.model.lindblads, rho);
    CHECK(max_abs(a - b) < 1e-12);
  }
  CHECK(is_hermitian(gm.hamiltonian_shift, 1e-12));
}

TEST_CASE("gauge rejects states violating the span relations") {
  NoiseModel m = fixtures::qutrit_model();
  CMatrix r0 = CMatrix::Zero(3, 3), r1 = CMatrix::Zero(3, 3);
  r0(0, 0) = 1.0;  // Tr(r0 L^dag L) = 0 but Tr(r1 L^dag L) = 1
  r1(1, 1) = 1.0;
  CHECK_THROWS_AS(apply_gauge(m, r0, r1), GaugeFailure);
}

TEST_CASE("model JSON round trip and validation") {
  NoiseModel m = fixtures::generic_hl_model();
  auto j = io::model_to_json(m);
  NoiseModel back = io::model_from_json(j);
  CHECK(back.d == m.d);
  CHECK(back.label == m.label);
  CHECK(max_abs(back.H - m.H) == 0.0);
  CHECK(max_abs(back.lindblads[1] - m.lindblads[1]) == 0.0);

  auto bad = j;
  bad["H"][0][1][1] = 0.5;  // breaks Hermiticity
  CHECK_THROWS_AS(io::model_from_json(bad), ShapeError);
  auto wrong = j;
  wrong["d"] = 4;
  CHECK_THROWS_AS(io::model_from_json(wrong), ShapeError);
  auto missing = j;
  missing.erase("lindblads");
  CHECK_THROWS_AS(io::model_from_json(missing), InvalidInput);
}

TEST_CASE("bundled fixture files load and agree with the built-in constructors") {
  std::string dir = MPQEC_FIXTURE_DIR;
  CHECK(max_abs(io::load_model(dir + "/qutrit.json").H - fixtures::qutrit_model().H) == 0.0);
  NoiseModel gen = io::load_model(dir + "/generic_d3_r2.json");
  CHECK(max_abs(gen.lindblads[0] - fixtures::generic_hl_model().lindblads[0]) < 1e-15);
  CHECK_FALSE(hnls_holds(io::load_model(dir + "/qubit_dephasing.json")));
  CHECK(hnls_holds(io::load_model(dir + "/qubit_zx.json")));
}
