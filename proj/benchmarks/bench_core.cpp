#include <benchmark/benchmark.h>

#include <nlskam/hamops.hpp>
#include <nlskam/projections.hpp>
#include <nlskam/smalldiv.hpp>

#include "random_ham.hpp"

using namespace nlskam;

namespace
{

void BM_Poisson(benchmark::State &state)
{
    const HamParams hp{static_cast<int>(state.range(0)), 2, 0.1, 1.0};
    const auto terms = static_cast<std::size_t>(state.range(1));
    const auto F = fixtures::random_hamiltonian(hp, 1, 0, {.terms = terms});
    const auto G = fixtures::random_hamiltonian(hp, 2, 0, {.terms = terms});
    for (auto _ : state) {
        benchmark::DoNotOptimize(poisson(F, G));
    }
    state.counters["terms"] = static_cast<double>(terms);
}
BENCHMARK(BM_Poisson)->Args({4, 20})->Args({8, 20})->Args({8, 80});

void BM_ProjectDegree(benchmark::State &state)
{
    const Torus torus({1, 2, 4}, {{1, 1.0 / 64}, {2, 1.0 / 256}, {4, 1.0 / 1024}});
    const HamParams hp{5, static_cast<int>(state.range(0)), 1.0, 1.0};
    const auto H = fixtures::random_hamiltonian(hp, 3, 0, {.terms = 60});
    for (auto _ : state) {
        for (int d = -2; d <= hp.max_degree(); ++d) {
            benchmark::DoNotOptimize(project_degree(H, d, torus));
        }
    }
}
BENCHMARK(BM_ProjectDegree)->Arg(2)->Arg(3);

void BM_EnumerateA(benchmark::State &state)
{
    const auto sched = power2_schedule();
    const int J = static_cast<int>(state.range(0));
    std::size_t count = 0;
    for (auto _ : state) {
        const auto A = enumerate_A(J, 6, sched);
        count = A.size();
        benchmark::DoNotOptimize(A.data());
    }
    state.counters["size"] = static_cast<double>(count);
}
BENCHMARK(BM_EnumerateA)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
