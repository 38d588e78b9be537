#pragma once

#include <bit>
#include <boost/rational.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "perturb/hypergraph.hpp"

namespace perturb {

using Rational = boost::rational<long long>;

std::string to_string(const Rational& r);

/// e_F / (v_F - 1), exact. Requires v_F >= 2.
Rational one_density(const Hypergraph& f);

struct DensityReport {
    Rational value;
    VertexSet witness;    // vertex set achieving the optimum; re-evaluates to value
    uint64_t enumerated;  // candidate subsets inspected
};

struct M1Options {
    // Connected-subset enumeration refuses above this size instead of
    // approximating; raise explicitly for larger structured components.
    int max_component_vertices = 24;
};

/// m1(F) = max { e'/(v'-1) : F' subgraph of F, v' >= 2 }, exact.
///
/// Enumerates connected vertex subsets per component (the induced subgraph
/// maximizes the edge count on a fixed vertex set, and a disconnected
/// subgraph is never denser than its densest component) and evaluates the
/// induced density of each. Witness ties break to the lexicographically
/// smallest subset. Requires e_F >= 1.
DensityReport m1(const Hypergraph& f, const M1Options& opts = {});

/// Exact m1 for hosts whose edges sit inside short windows of a known linear
/// order (the reduced Hamilton structures): parametric search over a profile
/// DP instead of subset enumeration, so component size is not limited to the
/// enumeration cap. `order[i]` is the vertex at position i and must cover all
/// n vertices; every edge must span at most 16 consecutive positions.
DensityReport m1_banded(const Hypergraph& h, const std::vector<int>& order);

// --- expected-copy-count functionals ----------------------------------------

struct PhiReport {
    double log_value;     // log of min over edged subgraphs of n^a * p^e
    int min_vertices;     // a = vertices (minus rooted vertices, if any)
    int min_edges;
    VertexSet witness;
    uint64_t enumerated;
    double value() const;
};

/// Phi_F(n, p) = min { n^v' p^e' : F' subgraph of F, e' > 0 }, evaluated in
/// the log domain over induced subgraphs (for a fixed vertex set the induced
/// subgraph minimizes n^v p^e when p <= 1). Requires e_F >= 1, n >= v_F,
/// p in (0, 1].
PhiReport phi(const Hypergraph& f, double n, double p);

/// Rooted variant: exponent of n drops the vertices mapped into the root set
/// W, which must be independent. Asserts Phi_{F,empty} = Phi_F shape and
/// Phi_{F minus W} >= Phi_{F,W}.
PhiReport phi_rooted(const RootedGraph& f, double n, double p);

/// F2 glued onto F1 by identifying v2 with v1; remaining F2 vertices are
/// appended fresh, so the parts share exactly one vertex.
Hypergraph glue_at_vertex(const Hypergraph& f1, int v1, const Hypergraph& f2, int v2);

struct GlueCheckResult {
    bool holds;
    double log_union;      // log Phi_{F1 u F2}
    double log_bound;      // log min{Phi_F1, Phi_F2, Phi_F1 Phi_F2 / n}
    PhiReport phi1, phi2, phi_union;
};

/// Checks Phi_{F1 u F2} >= min{Phi_F1, Phi_F2, Phi_F1 Phi_F2 n^-1} by direct
/// enumeration of both sides. Used as a test oracle; expected to always hold.
GlueCheckResult glue_check(const Hypergraph& f1, int v1, const Hypergraph& f2, int v2,
                           double n, double p);

// --- connected-subset enumeration -------------------------------------------
//
// Shared engine for the exact density checks. Works on one component of at
// most 64 vertices in local index space.

struct ComponentView {
    std::vector<int> global;                      // local index -> original vertex
    std::vector<uint64_t> adj;                    // Gaifman adjacency, local bits
    std::vector<std::vector<uint64_t>> incident;  // per local vertex: edge masks containing it
    int edge_total = 0;
};

ComponentView component_view(const Hypergraph& h, const VertexSet& comp);

/// Visits every nonempty subset of the component that is connected in the
/// Gaifman graph, with its vertex count and induced edge count; at most
/// max_size vertices per subset. fn(mask, vcount, ecount).
template <typename F>
void for_each_connected_subset(const ComponentView& view, int max_size, F&& fn) {
    const int L = int(view.global.size());
    struct Frame { uint64_t mask, ext, banned; int v, e; };
    std::vector<Frame> stack;
    stack.reserve(size_t(L) + 1);
    for (int r = 0; r < L; ++r) {
        uint64_t above = (r + 1 < 64) ? ~((uint64_t(2) << r) - 1) : 0;
        stack.push_back({uint64_t(1) << r, view.adj[r] & above, 0, 1, 0});
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            if (f.v <= max_size) fn(f.mask, f.v, f.e);
            if (f.v >= max_size) continue;
            uint64_t ext = f.ext, banned = f.banned;
            while (ext) {
                int w = std::countr_zero(ext);
                uint64_t wbit = uint64_t(1) << w;
                ext &= ~wbit;
                uint64_t nmask = f.mask | wbit;
                int ne = f.e;
                for (uint64_t em : view.incident[w])
                    if ((em & ~nmask) == 0) ++ne;
                uint64_t next = (ext | (view.adj[w] & above)) & ~nmask & ~banned;
                stack.push_back({nmask, next, banned, f.v + 1, ne});
                banned |= wbit;
            }
        }
    }
}

}  // namespace perturb
