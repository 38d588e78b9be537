#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "perturb/vertex_set.hpp"

namespace perturb {

/// Immutable k-uniform hypergraph on vertex set {0, ..., n-1}.
///
/// Every edge is a strictly increasing k-tuple of vertex indices; the edge
/// list is kept lexicographically sorted and duplicate-free, so equal graphs
/// have byte-equal representations.
class Hypergraph {
public:
    using Edge = std::vector<int>;

    /// Edgeless 2-graph on no vertices.
    Hypergraph() : k_(2), n_(0) {}

    /// Canonicalizes (sorts each edge, sorts and dedups the list) and
    /// validates: k >= 2, n >= k unless the edge list is empty, k distinct
    /// vertices per edge, all indices in [0, n).
    Hypergraph(int k, int n, std::vector<Edge> edges);

    static Hypergraph empty(int k, int n) { return Hypergraph(k, n, {}); }
    static Hypergraph complete(int k, int n);

    int k() const { return k_; }
    int n() const { return n_; }
    int edge_count() const { return int(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int i) const { return edges_[i]; }

    /// `e` must be sorted.
    bool has_edge(const Edge& e) const;

    const std::vector<int>& incident_edges(int v) const { return incident_[v]; }
    int vertex_degree(int v) const { return int(incident_[v].size()); }

    bool operator==(const Hypergraph& o) const {
        return k_ == o.k_ && n_ == o.n_ && edges_ == o.edges_;
    }

private:
    int k_, n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> incident_;
};

/// Labelled hypergraph with a designated root set W.
struct RootedGraph {
    Hypergraph graph;
    VertexSet roots;

    RootedGraph(Hypergraph g, VertexSet w);

    /// No edge lies entirely inside the root set.
    bool roots_independent() const;
};

struct InducedSubgraph {
    Hypergraph graph;
    std::vector<int> vertex_map;  // vertex_map[new index] = original index
};

/// Subgraph induced on S, relabelled to 0..|S|-1 in increasing order.
InducedSubgraph induced(const Hypergraph& h, const VertexSet& s);

/// Number of edges containing S; |S| must lie in [1, k-1].
long long degree(const Hypergraph& h, const VertexSet& s);

/// Minimum of degree() over all d-subsets of the vertex set.
long long min_degree(const Hypergraph& h, int d);

/// Connected components under the walk relation (vertices adjacent when some
/// edge contains both). Isolated vertices come back as singleton sets.
std::vector<VertexSet> components(const Hypergraph& h);

bool is_connected(const Hypergraph& h);

/// Edge-set union of two hypergraphs on the same (k, n).
Hypergraph union_of(const Hypergraph& a, const Hypergraph& b);

/// True when the graph is acyclic. 2-graphs only.
bool is_forest(const Hypergraph& h);

// --- edge-list text format ------------------------------------------------
//
// First line "k n", then one edge per line as k space-separated 0-based
// indices. Lines starting with '#' are comments. Writing always emits the
// canonical form, so write(read(write(x))) == write(x) byte for byte.

Hypergraph read_edge_list(std::istream& in);
Hypergraph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Hypergraph& h);
void write_edge_list_file(const std::string& path, const Hypergraph& h);
std::string to_edge_list_string(const Hypergraph& h);

}  // namespace perturb
