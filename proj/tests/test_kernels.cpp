#include <omp.h>

#include <map>

#include "doctest.h"
#include "mpqec/kernels.hpp"
#include "mpqec/linalg.hpp"
#include "oracles.hpp"

using namespace mpqec;
using kernels::Exec;

TEST_CASE("site application matches embedded operator product") {
  auto& g = oracle::rng_for(11);
  std::vector<int> dims{3, 2, 3};
  CMatrix m = oracle::random_complex(18, 18, g);
  for (int site = 0; site < 3; ++site) {
    CMatrix op = oracle::random_complex(dims[site], dims[site], g);
    CMatrix full = embed_local(op, site, dims);
    CMatrix left(18, 18), right(18, 18);
    kernels::left_apply(op, site, dims, m, left, Exec::Serial);
    kernels::right_apply(m, op, site, dims, right, Exec::Serial);
    CHECK(max_abs(left - full * m) < 1e-12);
    CHECK(max_abs(right - m * full) < 1e-12);
    CVector v = m.col(0);
    CHECK(max_abs(kernels::apply_site(op, site, dims, v) - oracle::apply_site(op, site, dims, v)) < 1e-12);
  }
}

TEST_CASE("parallel site application is bitwise identical to serial") {
  auto& g = oracle::rng_for(12);
  std::vector<int> dims{3, 3, 3, 2};
  CMatrix m = oracle::random_complex(54, 54, g);
  CMatrix op = oracle::random_complex(3, 3, g);
  omp_set_num_threads(4);
  for (int site = 0; site < 3; ++site) {
    CMatrix a(54, 54), b(54, 54), c(54, 54), e(54, 54);
    kernels::left_apply(op, site, dims, m, a, Exec::Serial);
    kernels::left_apply(op, site, dims, m, b, Exec::Parallel);
    kernels::right_apply(m, op, site, dims, c, Exec::Serial);
    kernels::right_apply(m, op, site, dims, e, Exec::Parallel);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((c - e).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pair reduced operators match single-pair partial traces") {
  auto& g = oracle::rng_for(13);
  std::vector<int> dims{2, 3, 2, 3};
  CVector a = oracle::random_state(36, g), b = oracle::random_state(36, g);
  auto serial = kernels::pair_reduced_outers(a, b, dims, 3, Exec::Serial);
  auto par = kernels::pair_reduced_outers(a, b, dims, 3, Exec::Parallel);
  REQUIRE(serial.size() == 3u);
  int p = 0;
  for (int x = 0; x < 3; ++x)
    for (int y = x + 1; y < 3; ++y, ++p) {
      CMatrix ref = oracle::partial_trace(a * b.adjoint(), dims, {x, y});
      CHECK(max_abs(serial[p] - ref) < 1e-13);
      CHECK((serial[p] - par[p]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("hashed phases are deterministic and roughly uniform") {
  CHECK(kernels::hashed_phase(7, 12345) == kernels::hashed_phase(7, 12345));
  CHECK(kernels::hashed_phase(7, 12345) != kernels::hashed_phase(8, 12345));
  double mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double th = kernels::hashed_phase(3, static_cast<std::uint64_t>(i));
    CHECK(th >= 0.0);
    CHECK(th < 2 * M_PI);
    mean += th / n;
  }
  CHECK(std::abs(mean - M_PI) < 0.05);
}

TEST_CASE("swap phase sums against brute-force string pairing") {
  // All strings of length 5 with letter counts (2, 2, 1) over letters {0,1,2}.
  const int m = 5, d = 3, bits = 2;
  std::vector<int> word{0, 0, 1, 1, 2};
  std::vector<std::uint64_t> codes;
  std::vector<std::vector<int>> words;
  do {
    words.push_back(word);
    codes.push_back(kernels::pack(word, bits));
  } while (std::next_permutation(word.begin(), word.end()));
  auto phase = [](std::uint64_t c) { return kernels::hashed_phase(99, c); };
  auto sums = kernels::swap_phase_sums(codes, m, d, bits, phase, Exec::Serial);
  auto psums = kernels::swap_phase_sums(codes, m, d, bits, phase, Exec::Parallel);
  std::map<std::vector<int>, double> theta;
  for (auto& w : words) theta[w] = phase(kernels::pack(w, bits));
  int p = 0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b, ++p) {
      CMatrix ref = CMatrix::Zero(d, d);
      for (auto& w : words) {
        if (w[a] == w[b]) continue;
        auto s = w;
        std::swap(s[a], s[b]);
        ref(w[a], w[b]) += std::exp(cplx(0, theta[s] - theta[w])) / double(words.size());
      }
      CHECK(max_abs(sums[p] - ref) < 1e-13);
      CHECK((sums[p] - psums[p]).cwiseAbs().maxCoeff() == 0.0);
    }
}
