#include <benchmark/benchmark.h>

#include "perturb/gadgets.hpp"
#include "perturb/generators.hpp"
#include "perturb/solvers.hpp"

using namespace perturb;

static void BM_factor_absorber(benchmark::State& state) {
    auto bundle = build_absorber(named_pattern(state.range(0) == 3 ? "k3" : "c4"), 2);
    Hypergraph bd = absorber_union(bundle);
    for (auto _ : state) {
        auto res = has_factor(bd, bundle.base);
        benchmark::DoNotOptimize(res.status);
    }
}
BENCHMARK(BM_factor_absorber)->Arg(3)->Arg(4);

static void BM_factor_perturbed_bipartite(benchmark::State& state) {
    // the criterion-9 workload: triangle factor in K_{n/2,n/2} u G(n, p)
    const int n = int(state.range(0));
    Hypergraph base = gen_family("complete-bipartite", n, 2, {});
    Hypergraph host = union_of(base, gen_random(n, 2, 2.0 * std::pow(n, -2.0 / 3), 5));
    Hypergraph k3 = Hypergraph::complete(2, 3);
    for (auto _ : state) {
        auto res = has_factor(host, k3);
        benchmark::DoNotOptimize(res.status);
    }
}
BENCHMARK(BM_factor_perturbed_bipartite)->Arg(18)->Arg(24);

static void BM_tight_hamilton_complete(benchmark::State& state) {
    Hypergraph host = Hypergraph::complete(3, int(state.range(0)));
    CycleOptions opts;
    for (auto _ : state) {
        auto res = has_hamilton_ell_cycle(host, 2, opts);
        benchmark::DoNotOptimize(res.status);
    }
}
BENCHMARK(BM_tight_hamilton_complete)->Arg(8)->Arg(10);

static void BM_block_enumeration(benchmark::State& state) {
    const int n = int(state.range(0));
    Hypergraph host = union_of(gen_family("complete-bipartite", n, 2, {}),
                               gen_random(n, 2, 0.2, 6));
    Hypergraph k3 = Hypergraph::complete(2, 3);
    for (auto _ : state) {
        auto blocks = enumerate_pattern_blocks(host, k3);
        benchmark::DoNotOptimize(blocks.size());
    }
}
BENCHMARK(BM_block_enumeration)->Arg(24)->Arg(30);
