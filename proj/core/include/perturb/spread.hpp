#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "perturb/hypergraph.hpp"

namespace perturb {

/// Nested candidate-set oracle over a dense host: level i offers the vertices
/// whose (co)degree, resp. pinned pattern count, clears eps * n^{len-i} / 2^i.
/// Completing a chain y_1 in L_1, ..., y_len in L_len(...) lands on a host
/// edge (tight variant) or on a labelled ell-path copy (path variant); each
/// returned level set carries the proof's cardinality floor, asserted.
class LinkFiltration {
public:
    /// Tight-edge chains of length k. Requires e(H) >= eps * n^k.
    static LinkFiltration tight(const Hypergraph& host, double eps);

    /// Chains of length k' tracing a labelled ell-path with ceil(k/(k-ell))
    /// edges. eps_prime = 0 calibrates the exact copy density from the host
    /// (the paper's constant is non-constructive).
    static LinkFiltration ell_path(const Hypergraph& host, int ell, double eps_prime = 0);

    int chain_length() const;
    double eps() const { return eps_; }
    const Hypergraph& host() const { return host_; }
    const Hypergraph& path_pattern() const { return pattern_; }

    /// L_{i+1}(prefix) for |prefix| = i < chain_length(), sorted ascending.
    /// Memoized; asserts |L| >= eps * n / 2^{i+1} for valid prefixes.
    const std::vector<int>& level_set(const std::vector<int>& prefix) const;

    double level_threshold(int level) const;  // level in [1, chain_length()]
    double step_floor() const;                // eps * n / 2^{chain_length()+1}

private:
    LinkFiltration(Hypergraph host, Hypergraph pattern, double eps, int length, bool tight);

    Hypergraph host_;
    Hypergraph pattern_;  // the ell-path Q; empty in the tight variant
    double eps_;
    int length_;
    bool tight_;
    mutable std::map<std::vector<int>, std::vector<int>> memo_;
};

struct EmbeddingTraceStep {
    int block;       // anchor block index
    int level;       // 1-based level within the chain
    int candidates;  // |L_level minus already-used| at the moment of sampling
};

struct AnchoredSample {
    std::vector<int> image;  // image[position] = host vertex, a bijection
    std::vector<EmbeddingTraceStep> trace;
};

/// The randomized embedding process: anchor blocks at positions jM..jM+len-1
/// walk the filtration chains (so they land on host edges / path copies), the
/// remaining positions get a uniformly random assignment of the remaining
/// vertices. Every chain step must clear the per-step floor; a shortfall
/// throws with the failing step (possible only when the preconditions on
/// n, M, eps are violated).
AnchoredSample sample_anchored_embedding(const LinkFiltration& filt, int big_m, uint64_t seed);

/// Residual structure edges pushed through an embedding image.
std::vector<Hypergraph::Edge> image_of_structure(const Hypergraph& structure,
                                                 const std::vector<int>& image);

// --- empirical spread estimation ------------------------------------------------

struct SpreadProbe {
    std::vector<int> xs, ys;                    // vertex pins (vertex-spread)
    std::vector<Hypergraph::Edge> edge_probe;   // edge pins (edge-spread)
    uint64_t hits = 0;
    double freq = 0, cp_lo = 0, cp_hi = 1;
    bool flagged = false;  // statistically significant excess over the bound
};

struct SpreadReport {
    uint64_t trials = 0;
    int s = 0;
    double q = 0;           // claimed per-pin rate
    double bound = 0;       // q^s
    double confidence = 0;  // Clopper-Pearson level used for the slack
    double max_freq = 0;
    bool any_flagged = false;
    std::vector<SpreadProbe> probes;
};

std::string to_json(const SpreadReport& report);

using InjectionSampler = std::function<std::vector<int>(uint64_t trial_seed)>;

/// s = 1 probes every (position, host vertex) pair; s = 2 needs an explicit
/// probe list. A probe is flagged when its Clopper-Pearson lower bound at the
/// given confidence exceeds q^s.
SpreadReport estimate_vertex_spread(
    const InjectionSampler& sampler, int positions, int host_n, int s, uint64_t trials,
    uint64_t seed, double q, double confidence = 0.99,
    const std::vector<std::pair<std::vector<int>, std::vector<int>>>* pair_probes = nullptr);

using SubgraphSampler = std::function<std::vector<Hypergraph::Edge>(uint64_t trial_seed)>;

/// Edge-spread of a random-subgraph distribution: per probe set S of host
/// edges, the empirical mu({A : S subset of A}) against q^{|S|}.
SpreadReport estimate_edge_spread(const SubgraphSampler& sampler,
                                  const std::vector<std::vector<Hypergraph::Edge>>& probes,
                                  uint64_t trials, uint64_t seed, double q,
                                  double confidence = 0.99);

}  // namespace perturb
