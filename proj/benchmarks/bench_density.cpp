#include <benchmark/benchmark.h>

#include <numeric>

#include "perturb/cycles.hpp"
#include "perturb/density.hpp"
#include "perturb/generators.hpp"

using namespace perturb;

static void BM_m1_clique(benchmark::State& state) {
    Hypergraph f = Hypergraph::complete(2, int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(m1(f).enumerated);
}
BENCHMARK(BM_m1_clique)->Arg(7)->Arg(10);

static void BM_m1_path_component(benchmark::State& state) {
    // a tight-path component of the size the section-5 grid produces
    Hypergraph path = build_ell_path(3, 2, int(state.range(0)));
    M1Options opts;
    opts.max_component_vertices = 64;
    for (auto _ : state) benchmark::DoNotOptimize(m1(path, opts).enumerated);
}
BENCHMARK(BM_m1_path_component)->Arg(10)->Arg(15);

static void BM_m1_banded_dp(benchmark::State& state) {
    Hypergraph path = build_ell_path(4, 3, int(state.range(0)));
    std::vector<int> order(path.n());
    std::iota(order.begin(), order.end(), 0);
    for (auto _ : state) benchmark::DoNotOptimize(m1_banded(path, order).enumerated);
}
BENCHMARK(BM_m1_banded_dp)->Arg(28)->Arg(60);

static void BM_phi_subset_enumeration(benchmark::State& state) {
    Hypergraph host = gen_random(int(state.range(0)), 2, 0.4, 11);
    for (auto _ : state) benchmark::DoNotOptimize(phi(host, 1e4, 0.01).enumerated);
}
BENCHMARK(BM_phi_subset_enumeration)->Arg(16)->Arg(20);
