#pragma once

#include <cstdint>
#include <vector>

#include "perturb/density.hpp"
#include "perturb/hypergraph.hpp"

namespace perturb {

/// Labelled Hamilton ell-cycle on n vertices in cyclic order: edge
/// {x_{gi}, ..., x_{gi+k-1}} for every i in [n/g], g = k - ell.
Hypergraph build_hc_ell(int n, int k, int ell);

/// r-th power of a tight Hamilton cycle: every k+r-1 consecutive vertices
/// span a complete k-graph.
Hypergraph build_hc_power(int n, int k, int r);

/// ell-path on `edges` edges: edge windows {gi, ..., gi+k-1} along a line.
Hypergraph build_ell_path(int k, int ell, int edges);

struct ReducedCycle {
    Hypergraph full;
    Hypergraph residual;
    std::vector<Hypergraph::Edge> removed;
    int n = 0, k = 0, ell = 0, r = 0, big_m = 0;
    int kprime = 0;                 // vertices per removed block (ell variant)
    std::vector<int> block_starts;  // 0-based start positions jM, j < floor(n/M)
};

/// Removes the edges of the short ell-paths P_j sitting on
/// {x_{jM}, ..., x_{jM+k'-1}} for each block j. Asserts that each removed
/// block is an ell-path with ceil(k/(k-ell)) edges and that every residual
/// component with an edge is an ell-path on at most 2M vertices.
ReducedCycle build_reduced_hc_ell(int n, int k, int ell, int big_m);

/// Removes the single tight edges {x_{jM}, ..., x_{jM+k-1}}; the residual
/// stays connected for r >= 2 (asserted).
ReducedCycle build_reduced_hc_power(int n, int k, int r, int big_m);

struct ComponentDensity {
    VertexSet component;
    DensityReport report;
    bool banded;  // true when the banded DP was used instead of enumeration
};

struct M1CheckReport {
    Rational max_density;       // exact m1 of the residual
    Rational bound;             // 1/(k - ell + 1/(2M)) resp. binom - 1/(2M)
    bool holds;
    std::vector<ComponentDensity> per_component;
};

/// Exact component-wise m1 of the section-5 residual against
/// 1/(k - ell + 1/(2M)). Components over the enumeration cap use the banded
/// DP along their cyclic order (and both paths are cross-checked below cap).
M1CheckReport check_m1_reduced_ell(const ReducedCycle& rc, int enumeration_cap = 24);

struct FactNumberViolation {
    VertexSet subgraph;
    int w, edges;
    bool tight_path_case;
};

struct FactNumberReport {
    uint64_t subgraphs_checked = 0;
    int max_w = 0;
    Rational max_density{0};
    bool density_bound_holds = true;   // d <= binom(k+r-2, k-1) - 1/(2M)
    bool edge_bounds_hold = true;      // per-subgraph edge-count bounds
    std::vector<FactNumberViolation> violations;
};

/// Enumerates connected induced subgraphs of the section-6 residual with
/// k+r-1 <= w <= w_max vertices and checks both edge-count bounds
/// (the tight-path refinement applies when the subgraph spans a cyclic gap
/// larger than k+r-1); also tracks the maximum density over all connected
/// subgraphs of <= w_max vertices.
FactNumberReport check_factnumber(const ReducedCycle& rc, int w_max);

}  // namespace perturb
