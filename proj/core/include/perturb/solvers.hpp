#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "perturb/hypergraph.hpp"

namespace perturb {

enum class SearchStatus { found, absent, timeout };

const char* to_string(SearchStatus s);

constexpr uint64_t kDefaultBudget = 100'000'000;  // search nodes

// --- pattern embedding -------------------------------------------------------

struct EmbedOptions {
    uint64_t budget = kDefaultBudget;
    // (pattern vertex, host vertex) pairs fixed up front.
    std::vector<std::pair<int, int>> pins;
    // Host vertices usable for the non-pinned pattern vertices; null = all.
    const VertexSet* allowed = nullptr;
};

struct EmbeddingResult {
    SearchStatus status;
    std::vector<int> map;  // map[pattern vertex] = host vertex (when found)
    uint64_t nodes = 0;
};

/// First injective edge-preserving map of `pattern` into `host` in a fixed
/// deterministic search order.
EmbeddingResult find_embedding(const Hypergraph& host, const Hypergraph& pattern,
                               const EmbedOptions& opts = {});

/// Exact number of labelled copies (injective edge-preserving maps) of
/// `pattern` in `host`. Patterns are capped at 12 vertices.
uint64_t count_labelled_copies(const Hypergraph& host, const Hypergraph& pattern,
                               const EmbedOptions& opts = {});

/// Two graphs on the same number of vertices with the same edge count are
/// isomorphic iff an embedding exists.
bool isomorphic(const Hypergraph& a, const Hypergraph& b, uint64_t budget = kDefaultBudget);

// --- F-factors ----------------------------------------------------------------

struct FactorBlock {
    std::vector<int> host_vertices;  // sorted
    std::vector<int> iso;            // iso[pattern vertex] = host vertex
};

struct FactorCertificate {
    std::vector<FactorBlock> blocks;
};

struct FactorResult {
    SearchStatus status;
    FactorCertificate certificate;  // valid when status == found
    uint64_t nodes = 0;
};

/// Complete backtracking search for a spanning collection of vertex-disjoint
/// pattern copies. Blocks branch on the lowest uncovered vertex; `absent` is
/// returned only after exhausting the search space within budget.
FactorResult has_factor(const Hypergraph& host, const Hypergraph& pattern,
                        uint64_t budget = kDefaultBudget);

/// Independent certificate check: re-reads host edges, verifies the blocks
/// partition the vertex set and every block carries a pattern copy.
bool verify_factor(const Hypergraph& host, const Hypergraph& pattern,
                   const FactorCertificate& cert);

struct GreedyCover {
    FactorCertificate partial;
    VertexSet leftover;  // vertices not covered (forbidden ones included)
};

/// Single ascending pass: for each uncovered vertex, grab the first pattern
/// copy through it that avoids forbidden and already-used vertices.
GreedyCover greedy_cover(const Hypergraph& host, const Hypergraph& pattern,
                         const VertexSet& forbidden, uint64_t budget = kDefaultBudget);

// --- Hamilton structures -------------------------------------------------------

struct CycleCertificate {
    std::vector<int> order;  // cyclic vertex order, order[0] == 0
    int k = 0;
    int ell = 0;  // overlap for ell-cycles
    int r = 0;    // power for r-th powers (0 when not a power certificate)
};

struct CycleResult {
    SearchStatus status;
    CycleCertificate certificate;
    uint64_t nodes = 0;
};

struct CycleOptions {
    uint64_t budget = kDefaultBudget;
    bool symmetry_reduction = true;  // pin vertex 0 to position 0, fix direction
};

/// Hamilton ell-cycle: cyclic order where edge {x_{(k-l)i+1..(k-l)i+k}} exists
/// for every i. Requires (k - ell) | n.
CycleResult has_hamilton_ell_cycle(const Hypergraph& host, int ell,
                                   const CycleOptions& opts = {});

/// r-th power of a tight Hamilton cycle: every k+r-1 consecutive vertices span
/// a complete k-graph.
CycleResult has_power_tight_hamilton(const Hypergraph& host, int r,
                                     const CycleOptions& opts = {});

bool verify_ell_cycle(const Hypergraph& host, int ell, const std::vector<int>& order);
bool verify_power_cycle(const Hypergraph& host, int r, const std::vector<int>& order);

// --- block enumeration (shared with the factor search) --------------------------

/// All distinct vertex sets of pattern copies in the host, each with one
/// witness isomorphism, sorted lexicographically.
std::vector<FactorBlock> enumerate_pattern_blocks(const Hypergraph& host,
                                                  const Hypergraph& pattern,
                                                  uint64_t budget = kDefaultBudget);

}  // namespace perturb
