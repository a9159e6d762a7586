// Serial reference against the OpenMP path for the hot kernels. The second
// argument selects the path: 0 serial, 1 parallel.
#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "mpqec/fixtures.hpp"
#include "mpqec/kernels.hpp"
#include "mpqec/simulation.hpp"

namespace {

using namespace mpqec;

kernels::Exec exec_of(const benchmark::State& s) { return s.range(1) ? kernels::Exec::Parallel : kernels::Exec::Serial; }

CVector random_vector(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVector v(n);
  for (long i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v.normalized();
}

void BM_LeftApply(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::vector<int> dims(m, 3);
  const long n = product(dims);
  CMatrix rho = random_vector(n, 1) * random_vector(n, 2).adjoint();
  CMatrix op = fixtures::qutrit_model().lindblads[0], out;
  for (auto _ : state) {
    kernels::left_apply(op, m / 2, dims, rho, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_PairReducedOuters(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::vector<int> dims(m, 3);
  const long n = product(dims);
  CVector a = random_vector(n, 3), b = random_vector(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pair_reduced_outers(a, b, dims, m, exec_of(state)));
}

void BM_SwapPhaseSums(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0)), d = 3, bits = kernels::bits_for(d);
  std::vector<std::uint64_t> codes;
  std::vector<int> w(m);
  for (int k = 0; k < m; ++k) w[k] = k % d;
  std::sort(w.begin(), w.end());
  do codes.push_back(kernels::pack(w, bits));
  while (std::next_permutation(w.begin(), w.end()) && codes.size() < 20000);
  auto phase = [](std::uint64_t c) { return kernels::hashed_phase(11, c); };
  for (auto _ : state) benchmark::DoNotOptimize(kernels::swap_phase_sums(codes, m, d, bits, phase, exec_of(state)));
}

void BM_LindbladRhs(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::vector<int> dims(m, 3);
  Generator gen = probe_generator(fixtures::generic_hl_model(), dims, m);
  const long n = gen.dim();
  CVector v = random_vector(n, 5);
  CMatrix rho = v * v.adjoint();
  for (auto _ : state) benchmark::DoNotOptimize(lindblad_rhs(gen, 1.0, rho, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_LeftApply)->ArgsProduct({{4, 6}, {0, 1}});
BENCHMARK(BM_PairReducedOuters)->ArgsProduct({{6, 8}, {0, 1}});
BENCHMARK(BM_SwapPhaseSums)->ArgsProduct({{8, 10}, {0, 1}});
BENCHMARK(BM_LindbladRhs)->ArgsProduct({{3, 4}, {0, 1}});

BENCHMARK_MAIN();
