#include "doctest.h"
#include "mpqec/linalg.hpp"
#include "oracles.hpp"

using namespace mpqec;

TEST_CASE("kron matches element-wise oracle") {
  auto& g = oracle::rng_for(1);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix a = oracle::random_complex(2 + trial % 2, 3, g);
    CMatrix b = oracle::random_complex(3, 2 + trial % 3, g);
    CHECK(max_abs(kron(a, b) - oracle::kron(a, b)) < 1e-14);
  }
}

TEST_CASE("partial trace agrees with brute-force index sum") {
  auto& g = oracle::rng_for(2);
  std::vector<int> dims{2, 3, 2};
  CMatrix rho = oracle::random_density(12, g);
  for (auto keep : std::vector<std::vector<int>>{{0}, {1}, {2}, {0, 2}, {2, 0}, {1, 2}, {0, 1, 2}}) {
    CMatrix ours = partial_trace(rho, dims, keep);
    CMatrix ref = oracle::partial_trace(rho, dims, keep);
    CHECK(max_abs(ours - ref) < 1e-13);
  }
}

TEST_CASE("reduced_outer equals partial trace of the outer product") {
  auto& g = oracle::rng_for(3);
  std::vector<int> dims{3, 2, 3, 2};
  CVector a = oracle::random_state(36, g), b = oracle::random_state(36, g);
  CMatrix outer = a * b.adjoint();
  for (auto keep : std::vector<std::vector<int>>{{1}, {0, 2}, {3, 1}}) {
    CHECK(max_abs(reduced_outer(a, b, dims, keep) - oracle::partial_trace(outer, dims, keep)) < 1e-13);
  }
}

TEST_CASE("partial trace preserves trace and positivity") {
  auto& g = oracle::rng_for(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> dims{2, 2, 3};
    CMatrix rho = oracle::random_density(12, g, 1 + trial % 4);
    CMatrix red = partial_trace(rho, dims, {trial % 3});
    CHECK(std::abs(red.trace() - cplx(1.0)) < 1e-12);
    CHECK(eig_hermitian(red).values.minCoeff() > -1e-12);
  }
}

TEST_CASE("norms match one-sided Jacobi oracle") {
  auto& g = oracle::rng_for(5);
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix a = oracle::random_complex(2 + trial % 4, 1 + trial % 5, g);
    CHECK(std::abs(trace_norm(a) - oracle::trace_norm(a)) < 1e-10);
    CHECK(std::abs(operator_norm(a) - oracle::operator_norm(a)) < 1e-10);
  }
}

TEST_CASE("trace norm of a Hermitian matrix is the absolute eigenvalue sum") {
  CMatrix h = CMatrix::Zero(3, 3);
  h.diagonal() << 0.5, -2.0, 1.25;
  CHECK(trace_norm(h) == doctest::Approx(3.75).epsilon(1e-14));
  CHECK(operator_norm(h) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("eig_hermitian reconstructs and rejects non-Hermitian input") {
  auto& g = oracle::rng_for(6);
  CMatrix h = oracle::random_hermitian(5, g);
  EigH e = eig_hermitian(h);
  CMatrix back = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
  CHECK(max_abs(back - h) < 1e-12);
  CHECK(e.values(0) <= e.values(4));
  CMatrix bad = h;
  bad(0, 1) += 1e-3;
  CHECK_THROWS_AS(eig_hermitian(bad), ShapeError);
}

TEST_CASE("gram_factor reproduces PSD Gram matrices including singular ones") {
  auto& g = oracle::rng_for(7);
  CMatrix x = oracle::random_complex(6, 3, g);
  CMatrix cols(6, 5);
  cols << x, x.col(0) * cplx(0.3, 0.1), x.col(1) - x.col(2);
  CMatrix gram = cols.adjoint() * cols;
  CMatrix r = gram_factor(gram, 1e-9);
  CHECK(max_abs(r.adjoint() * r - gram) < 1e-10);
  CMatrix indefinite = CMatrix::Identity(2, 2);
  indefinite(1, 1) = -0.5;
  CHECK_THROWS_AS(gram_factor(indefinite, 1e-9), CholeskyFailure);
}

TEST_CASE("embed_local agrees with explicit Kronecker chain") {
  auto& g = oracle::rng_for(8);
  CMatrix op = oracle::random_complex(3, 3, g);
  std::vector<int> dims{2, 3, 2};
  CMatrix ref = oracle::kron(oracle::kron(CMatrix::Identity(2, 2), op), CMatrix::Identity(2, 2));
  CHECK(max_abs(embed_local(op, 1, dims) - ref) < 1e-14);
}

TEST_CASE("hermitian basis is orthonormal and complete") {
  for (int d : {2, 3, 4}) {
    auto basis = hermitian_basis(d);
    REQUIRE(basis.size() == static_cast<std::size_t>(d * d));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      CHECK(is_hermitian(basis[i], 1e-14));
      for (std::size_t j = 0; j < basis.size(); ++j)
        CHECK(std::abs(hs_inner(basis[i], basis[j]) - cplx(i == j ? 1.0 : 0.0)) < 1e-13);
    }
  }
}

TEST_CASE("dimension guard and typed wrappers") {
  CHECK_THROWS_AS(check_dim(kMaxDim + 1, "test"), DimensionTooLarge);
  CMatrix notpsd = CMatrix::Identity(2, 2);
  notpsd(1, 1) = -0.1;
  notpsd(0, 0) = 1.1;
  CHECK_THROWS_AS(DensityMatrix{notpsd}, ShapeError);
  CHECK_THROWS_AS(HermitianMatrix{CMatrix::Zero(2, 3)}, ShapeError);
  CHECK_NOTHROW(DensityMatrix{CMatrix::Identity(3, 3) / 3.0});
}

TEST_CASE("fidelity of identical and orthogonal states") {
  auto& g = oracle::rng_for(9);
  CMatrix rho = oracle::random_density(4, g);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
  CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  CHECK(fidelity(p0, p1) == doctest::Approx(0.0));
}
