#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "perturb/density.hpp"
#include "perturb/hypergraph.hpp"
#include "perturb/solvers.hpp"

namespace perturb {

// --- minimal densest subgraphs through a vertex -------------------------------

struct MinimalFamily {
    int u = -1;
    Rational m1_value{0};
    // Inclusion-minimal vertex sets containing u whose induced density equals
    // m1 exactly. Checked on construction: distinct members intersect only in
    // {u}; at a minimum-degree u there is at most one member; none is a tree
    // when the base graph is not a forest.
    std::vector<VertexSet> members;
};

MinimalFamily minimal_family(const Hypergraph& f, int u);

// --- the F+/F'/F* decomposition ------------------------------------------------

enum class GadgetCase {
    edge_off_neighborhood,   // an edge with an end outside N[u] goes into F'
    edge_inside_neighborhood // both ends of the special edge are neighbours of u
};

struct GadgetBundle {
    Hypergraph base;  // F
    int u = -1;       // minimum-degree vertex (lowest index among minima)
    int u_prime = -1; // the clone, index v_F in f_plus/f_star
    GadgetCase kind = GadgetCase::edge_off_neighborhood;
    std::array<int, 2> special_edge{-1, -1};  // u1 < u2
    int outside_end = -1;  // which special-edge end lies outside N[u] (case-off only)

    Hypergraph f_plus;   // F plus a false twin u' of u
    Hypergraph f_prime;  // spanning forest of F: star at u (+/- one leaf) plus the special edge
    Hypergraph f_star;   // f_plus minus the edges of f_prime

    int m = 0;             // v_F
    Rational m1_value{0};
    Rational eps0{0};      // 1/(m1 * m^2)
    int t = 0;             // chain length; default ceil(1/eps0)
    long long c1 = 0;      // t * m^2

    // Absorber part (present after build_absorber):
    Hypergraph b_graph, d_graph;  // on the common vertex set S u A_{i,j}
    std::vector<int> s_vertices;  // |S| = m
    // block_vertex[i][j][q] = vertex id of v_{i,j}^q (0-based i, j, q);
    // q = m-1 plays the role of u in every block.
    std::vector<std::vector<std::vector<int>>> block_vertex;
    std::vector<int> a0;  // the m vertices carrying the plain F-copy
};

/// Resolves the case split at the minimum-degree vertex and emits F+, F', F*.
/// Requires a connected 2-graph that is not a forest.
GadgetBundle build_gadgets(const Hypergraph& f);

/// Extends a bundle with the B and D graphs on m + t*m^2 vertices
/// (chains of F* copies hanging off S, F' copies on every block).
GadgetBundle build_absorber(const Hypergraph& f, int t);

struct AbsorberCertificates {
    FactorCertificate with_s;     // factor of B u D
    FactorCertificate without_s;  // factor of (B u D) minus S
    uint64_t nodes = 0;
};

/// Checks the absorber property with the independent factor solver; throws
/// std::runtime_error when a factor is missing and TimeoutError when the
/// search budget runs out.
struct TimeoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
AbsorberCertificates verify_absorber(const GadgetBundle& bundle,
                                     uint64_t budget = kDefaultBudget);

/// B u D as one hypergraph.
Hypergraph absorber_union(const GadgetBundle& bundle);

// --- rooted embeddings -----------------------------------------------------------

struct RootedEmbedRequest {
    std::vector<int> target;  // ordered images for the roots (ascending root order)
    // Allowed ordered tuples for the non-root vertices (ascending vertex
    // order). Empty means unrestricted search.
    std::vector<std::vector<int>> family;
};

struct RootedEmbedding {
    int request_index;
    std::vector<int> map;  // map[pattern vertex] = host vertex
};

/// Greedy pass over the requests: embeds the rooted pattern with roots on the
/// target tuple, non-root image inside the request's family (or anywhere),
/// pairwise disjoint from earlier bodies and from all targets. Partial
/// success is a normal return.
std::vector<RootedEmbedding> rooted_embed(const Hypergraph& host, const RootedGraph& pattern,
                                          const std::vector<RootedEmbedRequest>& requests,
                                          uint64_t budget_per_request = kDefaultBudget);

// --- bipartite template ------------------------------------------------------------

struct BipartiteTemplate {
    int b = 0;
    int x_size = 0, y_size = 0, z_size = 0;
    // left vertices 0..x+y-1 (X first), right vertices 0..z-1
    std::vector<std::pair<int, int>> edges;
    int max_degree = 0;
    uint64_t attempts = 0;  // randomized search attempts spent
};

/// Random search for a template: bipartite graph on (X u Y, Z) with
/// |X| = b + ceil(beta*b), |Y| = 2b, |Z| = 3b, max degree <= 40, such that
/// every b-subset X' of X leaves a perfect matching in B[X' u Y, Z].
/// Verification is exhaustive over all X'; b <= 5.
BipartiteTemplate find_template(int b, double beta, uint64_t seed = 1,
                                uint64_t max_attempts = 200000);

/// Exhaustive Hall-condition check over every X' (primary verifier).
bool verify_template_hall(const BipartiteTemplate& t);
/// Independent re-verification with an augmenting-path matcher.
bool verify_template_matching(const BipartiteTemplate& t);

/// Proper edge colouring of a bipartite 2-graph with exactly max-degree
/// colours; returns the colour classes (each a matching).
std::vector<std::vector<Hypergraph::Edge>> edge_color_bipartite(const Hypergraph& g);

// --- absorbing-set assembly (toy scale) -----------------------------------------------

struct AbsorberSupplyResult {
    bool ok = false;
    // absorbers[i] is a vertex set that absorbs m_sets[i]; pairwise disjoint,
    // disjoint from every requested m-set and from `forbidden`.
    std::vector<std::vector<int>> absorbers;
    int failed_index = -1;
    std::string reason;
};

using AbsorberSupply = std::function<AbsorberSupplyResult(
    const std::vector<std::vector<int>>& m_sets, const VertexSet& forbidden)>;

struct AbsorbingSet {
    VertexSet v0;
    std::vector<int> x, y;                  // flexible and fixed left parts
    std::vector<std::vector<int>> z_parts;  // 3b parts of size m-1
    BipartiteTemplate tmpl;
    std::vector<std::vector<int>> m_set_of_edge;    // phi'(e) per template edge
    std::vector<std::vector<int>> absorber_of_edge; // A_e per template edge
    int m = 0;
};

struct AssembleResult {
    bool ok = false;
    AbsorbingSet set;
    std::vector<int> failed_m_set;  // on supply failure
    std::string reason;
};

/// Appendix-style layout: X u Y u Z inside the host, m-sets from template
/// edges, absorbers from the supply, V0 = X u Y u Z u union of A_e.
AssembleResult assemble_absorbing_set(const Hypergraph& host, const Hypergraph& f,
                                      const BipartiteTemplate& tmpl,
                                      const std::vector<int>& xyz_vertices,
                                      const AbsorberSupply& supply);

struct AbsorptionOutcome {
    bool ok = false;
    FactorCertificate factor;  // on V0 u R
    std::string failure;
};

/// The absorption oracle: given leftover R with m | (|V0| + |R|), looks for a
/// flexible set Q with a factor on Q u R, completes X' u Y u Z through the
/// template matching and the A_e absorbers. Structured failure, not a crash.
AbsorptionOutcome absorb_leftover(const Hypergraph& host, const Hypergraph& f,
                                  const AbsorbingSet& set, const std::vector<int>& leftover,
                                  uint64_t budget = kDefaultBudget);

/// Supply backed by rooted search for B u D in the host plus an independent
/// factor check of both absorber conditions.
AbsorberSupply host_search_supply(const Hypergraph& host, const GadgetBundle& bundle,
                                  uint64_t budget = kDefaultBudget);

}  // namespace perturb
