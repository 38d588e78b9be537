#include "perturb/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace perturb {

Hypergraph::Hypergraph(int k, int n, std::vector<Edge> edges) : k_(k), n_(n) {
    if (k < 2) throw std::invalid_argument("Hypergraph: k must be >= 2");
    if (n < 0) throw std::invalid_argument("Hypergraph: n must be >= 0");
    if (!edges.empty() && n < k)
        throw std::invalid_argument("Hypergraph: n < k with nonempty edge set");
    for (auto& e : edges) {
        if (int(e.size()) != k)
            throw std::invalid_argument("Hypergraph: edge of wrong arity");
        std::sort(e.begin(), e.end());
        for (int i = 0; i < k; ++i) {
            if (e[i] < 0 || e[i] >= n)
                throw std::invalid_argument("Hypergraph: vertex index out of range");
            if (i > 0 && e[i] == e[i - 1])
                throw std::invalid_argument("Hypergraph: repeated vertex in edge");
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    incident_.assign(n_, {});
    for (int i = 0; i < int(edges_.size()); ++i)
        for (int v : edges_[i]) incident_[v].push_back(i);
}

Hypergraph Hypergraph::complete(int k, int n) {
    if (n < k) throw std::invalid_argument("complete: n < k");
    std::vector<Edge> edges;
    Edge e(k);
    std::iota(e.begin(), e.end(), 0);
    while (true) {
        edges.push_back(e);
        int i = k - 1;
        while (i >= 0 && e[i] == n - k + i) --i;
        if (i < 0) break;
        ++e[i];
        for (int j = i + 1; j < k; ++j) e[j] = e[j - 1] + 1;
    }
    return Hypergraph(k, n, std::move(edges));
}

bool Hypergraph::has_edge(const Edge& e) const {
    return std::binary_search(edges_.begin(), edges_.end(), e);
}

RootedGraph::RootedGraph(Hypergraph g, VertexSet w) : graph(std::move(g)), roots(std::move(w)) {
    if (roots.capacity() != graph.n())
        throw std::invalid_argument("RootedGraph: root set capacity mismatch");
}

bool RootedGraph::roots_independent() const {
    for (const auto& e : graph.edges()) {
        bool all = true;
        for (int v : e)
            if (!roots.test(v)) { all = false; break; }
        if (all) return false;
    }
    return true;
}

InducedSubgraph induced(const Hypergraph& h, const VertexSet& s) {
    if (s.capacity() != h.n())
        throw std::invalid_argument("induced: vertex set capacity mismatch");
    std::vector<int> map = s.vertices();
    std::vector<int> inv(h.n(), -1);
    for (int i = 0; i < int(map.size()); ++i) inv[map[i]] = i;

    std::vector<Hypergraph::Edge> edges;
    for (const auto& e : h.edges()) {
        bool inside = true;
        for (int v : e)
            if (!s.test(v)) { inside = false; break; }
        if (!inside) continue;
        Hypergraph::Edge f(e.size());
        for (size_t i = 0; i < e.size(); ++i) f[i] = inv[e[i]];
        edges.push_back(std::move(f));
    }
    return InducedSubgraph{Hypergraph(h.k(), int(map.size()), std::move(edges)), std::move(map)};
}

long long degree(const Hypergraph& h, const VertexSet& s) {
    int d = s.count();
    if (d < 1 || d >= h.k())
        throw std::invalid_argument("degree: |S| must lie in [1, k-1]");
    // Walk the incident list of one member and test containment.
    auto vs = s.vertices();
    long long cnt = 0;
    for (int idx : h.incident_edges(vs[0])) {
        const auto& e = h.edge(idx);
        bool all = true;
        for (int v : vs)
            if (!std::binary_search(e.begin(), e.end(), v)) { all = false; break; }
        if (all) ++cnt;
    }
    return cnt;
}

long long min_degree(const Hypergraph& h, int d) {
    if (d < 1 || d >= h.k())
        throw std::invalid_argument("min_degree: d must lie in [1, k-1]");
    long long best = -1;
    std::vector<int> sel(d);
    std::iota(sel.begin(), sel.end(), 0);
    if (h.n() < d) throw std::invalid_argument("min_degree: n < d");
    while (true) {
        VertexSet s(h.n());
        for (int v : sel) s.set(v);
        long long deg = degree(h, s);
        if (best < 0 || deg < best) best = deg;
        int i = d - 1;
        while (i >= 0 && sel[i] == h.n() - d + i) --i;
        if (i < 0) break;
        ++sel[i];
        for (int j = i + 1; j < d; ++j) sel[j] = sel[j - 1] + 1;
    }
    return best;
}

namespace {
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a); b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};
}  // namespace

std::vector<VertexSet> components(const Hypergraph& h) {
    UnionFind uf(h.n());
    for (const auto& e : h.edges())
        for (size_t i = 1; i < e.size(); ++i) uf.unite(e[0], e[i]);
    std::vector<int> root_to_idx(h.n(), -1);
    std::vector<VertexSet> out;
    for (int v = 0; v < h.n(); ++v) {
        int r = uf.find(v);
        if (root_to_idx[r] < 0) {
            root_to_idx[r] = int(out.size());
            out.emplace_back(h.n());
        }
        out[root_to_idx[r]].set(v);
    }
    return out;
}

bool is_connected(const Hypergraph& h) { return components(h).size() <= 1; }

Hypergraph union_of(const Hypergraph& a, const Hypergraph& b) {
    if (a.k() != b.k()) throw std::invalid_argument("union_of: uniformity mismatch");
    if (a.n() != b.n()) throw std::invalid_argument("union_of: vertex count mismatch");
    std::vector<Hypergraph::Edge> edges = a.edges();
    edges.insert(edges.end(), b.edges().begin(), b.edges().end());
    return Hypergraph(a.k(), a.n(), std::move(edges));
}

bool is_forest(const Hypergraph& h) {
    if (h.k() != 2) throw std::invalid_argument("is_forest: defined for 2-graphs");
    UnionFind uf(h.n());
    for (const auto& e : h.edges())
        if (!uf.unite(e[0], e[1])) return false;
    return true;
}

Hypergraph read_edge_list(std::istream& in) {
    std::string line;
    int k = -1, n = -1;
    std::vector<Hypergraph::Edge> edges;
    while (std::getline(in, line)) {
        size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        std::istringstream ls(line);
        if (k < 0) {
            if (!(ls >> k >> n)) throw std::runtime_error("edge list: bad header line");
            continue;
        }
        Hypergraph::Edge e(k);
        for (int i = 0; i < k; ++i)
            if (!(ls >> e[i])) throw std::runtime_error("edge list: short edge line");
        int extra;
        if (ls >> extra) throw std::runtime_error("edge list: long edge line");
        edges.push_back(std::move(e));
    }
    if (k < 0) throw std::runtime_error("edge list: missing header");
    return Hypergraph(k, n, std::move(edges));
}

Hypergraph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Hypergraph& h) {
    out << h.k() << ' ' << h.n() << '\n';
    for (const auto& e : h.edges()) {
        for (size_t i = 0; i < e.size(); ++i) {
            if (i) out << ' ';
            out << e[i];
        }
        out << '\n';
    }
}

void write_edge_list_file(const std::string& path, const Hypergraph& h) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_edge_list(out, h);
}

std::string to_edge_list_string(const Hypergraph& h) {
    std::ostringstream ss;
    write_edge_list(ss, h);
    return ss.str();
}

}  // namespace perturb
