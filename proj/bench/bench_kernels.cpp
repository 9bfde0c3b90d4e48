#include <benchmark/benchmark.h>

#include <map>

#include "bosegas/fock.hpp"
#include "bosegas/kernels.hpp"

namespace {

using namespace bosegas;

const CsrMatrix& hamiltonian(int N) {
  static std::map<int, CsrMatrix> cache;
  auto it = cache.find(N);
  if (it == cache.end()) {
    const ModeSet ms = build_mode_set_count(13);
    FockBasis basis(ms, N);
    ScaledVhat vn(RadialPotential::soft_sphere(50.0, 0.2), N, 0.04, 4 * ms.max_nsq());
    it = cache.emplace(N, build_hamiltonian(basis, vn)).first;
  }
  return it->second;
}

template <bool Parallel>
void BM_Matvec(benchmark::State& state) {
  const CsrMatrix& H = hamiltonian(static_cast<int>(state.range(0)));
  StateVector x = random_state(H.n, 1), y(H.n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::matvec(H, x.data(), y.data());
    } else {
      kernels::serial::matvec(H, x.data(), y.data());
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(H.nnz()));
}

template <bool Parallel>
void BM_Dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  StateVector x = random_state(n, 1), y = random_state(n, 2);
  for (auto _ : state) {
    double d = Parallel ? kernels::omp::dot(x.data(), y.data(), n) : kernels::serial::dot(x.data(), y.data(), n);
    benchmark::DoNotOptimize(d);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * sizeof(double)));
}

template <bool Parallel>
void BM_GroundState(benchmark::State& state) {
  const CsrMatrix& H = hamiltonian(static_cast<int>(state.range(0)));
  LanczosOptions opts;
  opts.parallel = Parallel;
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(H, opts).energy);
}

}  // namespace

BENCHMARK(BM_Matvec<false>)->Arg(4)->Arg(6);
BENCHMARK(BM_Matvec<true>)->Arg(4)->Arg(6);
BENCHMARK(BM_Dot<false>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Dot<true>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_GroundState<false>)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GroundState<true>)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
