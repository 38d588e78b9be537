#include <benchmark/benchmark.h>

#include "perturb/generators.hpp"
#include "perturb/spread.hpp"

using namespace perturb;

static void BM_gen_random_enumerate(benchmark::State& state) {
    for (auto _ : state) {
        auto g = gen_random_enumerate(int(state.range(0)), 2, 0.1, 77);
        benchmark::DoNotOptimize(g.edge_count());
    }
}
BENCHMARK(BM_gen_random_enumerate)->Arg(50)->Arg(200);

static void BM_gen_random_skip(benchmark::State& state) {
    for (auto _ : state) {
        auto g = gen_random_skip(int(state.range(0)), 3, 0.001, 77);
        benchmark::DoNotOptimize(g.edge_count());
    }
}
BENCHMARK(BM_gen_random_skip)->Arg(100)->Arg(400);

static void BM_anchored_sample(benchmark::State& state) {
    Hypergraph host = gen_family("complete-bipartite", 60, 2, {});
    auto filt = LinkFiltration::tight(host, 0.2);
    // warm the memoized level sets once
    sample_anchored_embedding(filt, 10, 1);
    uint64_t seed = 0;
    for (auto _ : state) {
        auto s = sample_anchored_embedding(filt, 10, ++seed);
        benchmark::DoNotOptimize(s.image.data());
    }
}
BENCHMARK(BM_anchored_sample);
