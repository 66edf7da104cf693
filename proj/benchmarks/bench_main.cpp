#include <benchmark/benchmark.h>

#include "entrocap/linalg.hpp"
#include "entrocap/random.hpp"

using namespace entrocap;

static void BM_HermEig(benchmark::State& state) {
  const long d = state.range(0);
  CounterRng rng(1);
  Matrix g = rng.gaussian_matrix(d, d);
  Matrix h = 0.5 * (g + g.adjoint());
  for (auto _ : state) {
    HermEig e = herm_eig(h);
    benchmark::DoNotOptimize(e.values.data());
  }
}
BENCHMARK(BM_HermEig)->Arg(16)->Arg(64)->Arg(128);

static void BM_Kron(benchmark::State& state) {
  const long d = state.range(0);
  CounterRng rng(2);
  Matrix a = rng.gaussian_matrix(d, d), b = rng.gaussian_matrix(d, d);
  for (auto _ : state) {
    Matrix k = kron(a, b);
    benchmark::DoNotOptimize(k.data());
  }
}
BENCHMARK(BM_Kron)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
