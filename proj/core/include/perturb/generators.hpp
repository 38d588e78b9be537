#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "perturb/hypergraph.hpp"

namespace perturb {

// --- seeding and portable sampling -----------------------------------------
//
// All randomized code in the project goes through these helpers so results
// are reproducible bit for bit: std::uniform_int_distribution and friends are
// implementation-defined, rejection sampling on top of mt19937_64 is not.

uint64_t splitmix64(uint64_t& state);

/// Deterministic per-task seed from (root, a, b).
uint64_t derive_seed(uint64_t root, uint64_t a, uint64_t b = 0);

class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    /// Uniform in [0, m), m > 0, via rejection.
    uint64_t bounded(uint64_t m);

    /// Uniform in [0, 1).
    double real();

    /// Bernoulli(p).
    bool coin(double p) { return real() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[bounded(i)]);
    }

    /// k distinct values from [0, m), sorted.
    std::vector<int> sample_without_replacement(int m, int k);

private:
    std::mt19937_64 eng_;
};

/// C(n, k), throws on overflow past 2^62 (outside desk scale).
uint64_t binomial_coefficient(int n, int k);

// --- random and deterministic hypergraph families --------------------------

/// Binomial random k-graph: every k-set is an edge independently with
/// probability p. Identical (n, k, p, seed) give identical edge lists.
/// Dispatches between full enumeration and geometric skip sampling based on
/// (C(n,k), p); both regimes are exposed for distribution tests.
Hypergraph gen_random(int n, int k, double p, uint64_t seed);
Hypergraph gen_random_enumerate(int n, int k, double p, uint64_t seed);
Hypergraph gen_random_skip(int n, int k, double p, uint64_t seed);

struct FamilyParams {
    double alpha = 0.5;   // part balance for bipartite-style families
    double eps = 0.2;     // density promise: e >= eps * n^k
    int clique = 0;       // clique-plus-isolated clique size
    int parts = 0;        // dense-k-partite part count (0 -> k)
    uint64_t seed = 0;    // dense-random
};

/// Deterministic dense families used as the perturbed base graph:
///   complete | complete-bipartite | dense-random | clique-plus-isolated |
///   dense-k-partite.
/// Families that promise density assert e >= eps * n^k at construction.
Hypergraph gen_family(const std::string& name, int n, int k, const FamilyParams& params = {});

/// Small named 2-graph patterns: "triangle"/"k3", "k4", "k5", "c4", "c5",
/// "k4me" (K4 minus an edge), "path<N>", "cycle<N>", "edge", "matching<N>".
Hypergraph named_pattern(const std::string& name);

/// "3*k3+path9" -> disjoint union on a fresh vertex set.
Hypergraph parse_pattern_sum(const std::string& expr);

}  // namespace perturb
