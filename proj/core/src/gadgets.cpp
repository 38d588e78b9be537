#include "perturb/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "perturb/generators.hpp"

namespace perturb {

namespace {

std::vector<VertexSet> neighborhoods(const Hypergraph& f) {
    std::vector<VertexSet> nbr(f.n(), VertexSet(f.n()));
    for (const auto& e : f.edges()) {
        nbr[e[0]].set(e[1]);
        nbr[e[1]].set(e[0]);
    }
    return nbr;
}

int induced_edge_count(const Hypergraph& f, const VertexSet& s) {
    int cnt = 0;
    for (const auto& e : f.edges()) {
        bool inside = true;
        for (int v : e)
            if (!s.test(v)) { inside = false; break; }
        if (inside) ++cnt;
    }
    return cnt;
}

bool induced_is_tree(const Hypergraph& f, const VertexSet& s) {
    auto sub = induced(f, s);
    return is_connected(sub.graph) && sub.graph.edge_count() == sub.graph.n() - 1;
}

}  // namespace

MinimalFamily minimal_family(const Hypergraph& f, int u) {
    if (f.k() != 2) throw std::invalid_argument("minimal_family: 2-graphs only");
    if (f.edge_count() == 0) throw std::invalid_argument("minimal_family: edgeless graph");
    if (f.n() > 24) throw std::invalid_argument("minimal_family: beyond the enumeration cap");
    if (u < 0 || u >= f.n()) throw std::invalid_argument("minimal_family: bad vertex");

    DensityReport dm = m1(f);
    const long long num = dm.value.numerator(), den = dm.value.denominator();

    // All vertex sets through u whose induced density equals m1 exactly.
    // Only induced subgraphs can achieve the maximum, so subsets suffice, and
    // inclusion-minimality reduces to set inclusion.
    std::vector<uint64_t> achievers;
    const int n = f.n();
    for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
        if (!((mask >> u) & 1)) continue;
        int v = std::popcount(mask);
        if (v < 2) continue;
        VertexSet s(n);
        for (int i = 0; i < n; ++i)
            if ((mask >> i) & 1) s.set(i);
        long long e = induced_edge_count(f, s);
        if (e * den == num * (v - 1)) achievers.push_back(mask);
    }
    MinimalFamily fam;
    fam.u = u;
    fam.m1_value = dm.value;
    for (uint64_t a : achievers) {
        bool minimal = true;
        for (uint64_t b : achievers)
            if (b != a && (b & ~a) == 0) { minimal = false; break; }
        if (!minimal) continue;
        VertexSet s(n);
        for (int i = 0; i < n; ++i)
            if ((a >> i) & 1) s.set(i);
        fam.members.push_back(std::move(s));
    }
    std::sort(fam.members.begin(), fam.members.end(), VertexSet::lex_less);

    // Structural facts about minimal densest subgraphs; a violation here is
    // an implementation bug, not a data error.
    for (size_t i = 0; i < fam.members.size(); ++i)
        for (size_t j = i + 1; j < fam.members.size(); ++j) {
            VertexSet inter = fam.members[i] & fam.members[j];
            if (inter != VertexSet::of(n, {u}))
                throw std::logic_error("minimal_family: members overlap beyond {u}");
        }
    bool min_degree_u = true;
    for (int v = 0; v < n; ++v)
        if (f.vertex_degree(v) < f.vertex_degree(u)) { min_degree_u = false; break; }
    if (min_degree_u && fam.members.size() > 1)
        throw std::logic_error("minimal_family: several members at a minimum-degree vertex");
    if (min_degree_u && fam.members.empty()) {
        auto nbr = neighborhoods(f);
        VertexSet closed = nbr[u];
        closed.set(u);
        bool found = false;
        for (const auto& e : f.edges())
            if (!closed.test(e[0]) || !closed.test(e[1])) { found = true; break; }
        if (!found)
            throw std::logic_error("minimal_family: empty family but every edge inside N[u]");
    }
    if (!is_forest(f))
        for (const auto& s : fam.members)
            if (induced_is_tree(f, s))
                throw std::logic_error("minimal_family: tree member in a non-forest graph");
    return fam;
}

GadgetBundle build_gadgets(const Hypergraph& f) {
    if (f.k() != 2) throw std::invalid_argument("build_gadgets: 2-graphs only");
    if (!is_connected(f)) throw std::invalid_argument("build_gadgets: F must be connected");
    if (is_forest(f)) throw std::invalid_argument("build_gadgets: F must not be a forest");

    GadgetBundle bundle;
    bundle.base = f;
    const int n = f.n();

    int u = 0;
    for (int v = 1; v < n; ++v)
        if (f.vertex_degree(v) < f.vertex_degree(u)) u = v;
    bundle.u = u;
    bundle.u_prime = n;

    MinimalFamily fam = minimal_family(f, u);
    bundle.m1_value = fam.m1_value;

    auto nbr = neighborhoods(f);
    VertexSet closed_nbr = nbr[u];
    closed_nbr.set(u);

    int u1 = -1, u2 = -1;
    if (fam.members.empty()) {
        bundle.kind = GadgetCase::edge_off_neighborhood;
        for (const auto& e : f.edges()) {
            if (!closed_nbr.test(e[0]) || !closed_nbr.test(e[1])) {
                u1 = e[0]; u2 = e[1];
                break;
            }
        }
        if (u1 < 0) throw std::logic_error("build_gadgets: case (i) edge missing");
        bundle.outside_end = !closed_nbr.test(u1) ? u1 : u2;
    } else {
        if (fam.members.size() != 1)
            throw std::logic_error("build_gadgets: minimum-degree vertex with several members");
        const VertexSet& fu = fam.members[0];
        // Edges of the (induced) member F_u.
        std::vector<Hypergraph::Edge> fu_edges;
        for (const auto& e : f.edges())
            if (fu.test(e[0]) && fu.test(e[1])) fu_edges.push_back(e);
        // Prefer the off-neighborhood branch when any member edge qualifies.
        for (const auto& e : fu_edges) {
            if (!closed_nbr.test(e[0]) || !closed_nbr.test(e[1])) {
                u1 = e[0]; u2 = e[1];
                break;
            }
        }
        if (u1 >= 0) {
            bundle.kind = GadgetCase::edge_off_neighborhood;
            bundle.outside_end = !closed_nbr.test(u1) ? u1 : u2;
        } else {
            bundle.kind = GadgetCase::edge_inside_neighborhood;
            for (const auto& e : fu_edges) {
                if (e[0] != u && e[1] != u) {
                    u1 = e[0]; u2 = e[1];
                    break;
                }
            }
            if (u1 < 0) throw std::logic_error("build_gadgets: member is a star");
            if (!nbr[u].test(u1) || !nbr[u].test(u2))
                throw std::logic_error("build_gadgets: case (ii) edge not inside N(u)");
        }
    }
    bundle.special_edge = {u1, u2};

    // F' on V(F): the star at u (dropping u1 in the inside case) plus u1u2.
    std::vector<Hypergraph::Edge> fprime_edges;
    for (int x : nbr[u].vertices()) {
        if (bundle.kind == GadgetCase::edge_inside_neighborhood && x == u1) continue;
        fprime_edges.push_back({std::min(u, x), std::max(u, x)});
    }
    fprime_edges.push_back({u1, u2});
    bundle.f_prime = Hypergraph(2, n, std::move(fprime_edges));
    if (!is_forest(bundle.f_prime)) throw std::logic_error("build_gadgets: F' is not a forest");

    // F+ adds a false twin u' of u.
    std::vector<Hypergraph::Edge> fplus_edges = f.edges();
    for (int x : nbr[u].vertices()) fplus_edges.push_back({x, bundle.u_prime});
    bundle.f_plus = Hypergraph(2, n + 1, std::move(fplus_edges));

    // F* = F+ minus E(F').
    std::set<Hypergraph::Edge> prime_set(bundle.f_prime.edges().begin(),
                                         bundle.f_prime.edges().end());
    std::vector<Hypergraph::Edge> fstar_edges;
    for (const auto& e : bundle.f_plus.edges())
        if (!prime_set.count(e)) fstar_edges.push_back(e);
    bundle.f_star = Hypergraph(2, n + 1, std::move(fstar_edges));

    if (bundle.f_star.edge_count() + bundle.f_prime.edge_count() != bundle.f_plus.edge_count())
        throw std::logic_error("build_gadgets: E(F') and E(F*) do not partition E(F+)");

    bundle.m = n;
    // eps0 = 1 / (m1 * m^2)
    bundle.eps0 = Rational(bundle.m1_value.denominator(),
                           bundle.m1_value.numerator() * (long long)n * n);
    Rational inv = Rational(1) / bundle.eps0;
    long long t0 = inv.numerator() / inv.denominator();
    if (t0 * inv.denominator() < inv.numerator()) ++t0;  // ceil
    bundle.t = int(t0);
    bundle.c1 = (long long)bundle.t * n * n;
    return bundle;
}

GadgetBundle build_absorber(const Hypergraph& f, int t) {
    if (t < 1) throw std::invalid_argument("build_absorber: t must be >= 1");
    GadgetBundle bundle = build_gadgets(f);
    const int m = bundle.m;
    bundle.t = t;
    bundle.c1 = (long long)t * m * m;

    // Canonical labelling of V(F): u gets label m-1, the rest keep their
    // relative order. label_of[original] / orig_of[label].
    std::vector<int> orig_of;
    for (int v = 0; v < m; ++v)
        if (v != bundle.u) orig_of.push_back(v);
    orig_of.push_back(bundle.u);
    std::vector<int> label_of(m);
    for (int q = 0; q < m; ++q) label_of[orig_of[q]] = q;

    const int total = m + t * m * m;
    bundle.s_vertices.resize(m);
    std::iota(bundle.s_vertices.begin(), bundle.s_vertices.end(), 0);
    bundle.block_vertex.assign(m, std::vector<std::vector<int>>(t, std::vector<int>(m)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < t; ++j)
            for (int q = 0; q < m; ++q)
                bundle.block_vertex[i][j][q] = m + (i * t + j) * m + q;
    bundle.a0.resize(m);
    for (int i = 0; i < m; ++i) bundle.a0[i] = bundle.block_vertex[i][t - 1][m - 1];

    // B: one F-copy on A0 and a chain of F* copies per i, each sharing only
    // its u' vertex with the previous block (s_i for j = 0).
    std::vector<Hypergraph::Edge> b_edges;
    for (const auto& e : bundle.base.edges())
        b_edges.push_back({bundle.a0[label_of[e[0]]], bundle.a0[label_of[e[1]]]});
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < t; ++j) {
            int uprime_host = (j == 0) ? bundle.s_vertices[i]
                                       : bundle.block_vertex[i][j - 1][m - 1];
            auto place = [&](int fstar_vertex) {
                if (fstar_vertex == bundle.u_prime) return uprime_host;
                return bundle.block_vertex[i][j][label_of[fstar_vertex]];
            };
            for (const auto& e : bundle.f_star.edges())
                b_edges.push_back({place(e[0]), place(e[1])});
        }
    }
    bundle.b_graph = Hypergraph(2, total, std::move(b_edges));

    // D: an F'-copy on every block.
    std::vector<Hypergraph::Edge> d_edges;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < t; ++j)
            for (const auto& e : bundle.f_prime.edges())
                d_edges.push_back({bundle.block_vertex[i][j][label_of[e[0]]],
                                   bundle.block_vertex[i][j][label_of[e[1]]]});
    bundle.d_graph = Hypergraph(2, total, std::move(d_edges));
    if (!is_forest(bundle.d_graph)) throw std::logic_error("build_absorber: D is not a forest");

    // (B u D)[A_{i,j}] must be exactly an F-copy under the block labelling.
    Hypergraph bd = union_of(bundle.b_graph, bundle.d_graph);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < t; ++j) {
            VertexSet blk(total);
            for (int q = 0; q < m; ++q) blk.set(bundle.block_vertex[i][j][q]);
            int expect = bundle.base.edge_count();
            if (induced_edge_count(bd, blk) != expect)
                throw std::logic_error("build_absorber: block does not induce F");
            for (const auto& e : bundle.base.edges()) {
                Hypergraph::Edge img{bundle.block_vertex[i][j][label_of[e[0]]],
                                     bundle.block_vertex[i][j][label_of[e[1]]]};
                std::sort(img.begin(), img.end());
                if (!bd.has_edge(img))
                    throw std::logic_error("build_absorber: block misses an F edge");
            }
        }
    return bundle;
}

Hypergraph absorber_union(const GadgetBundle& bundle) {
    return union_of(bundle.b_graph, bundle.d_graph);
}

AbsorberCertificates verify_absorber(const GadgetBundle& bundle, uint64_t budget) {
    if (bundle.b_graph.n() == 0)
        throw std::invalid_argument("verify_absorber: bundle has no absorber part");
    Hypergraph bd = absorber_union(bundle);

    AbsorberCertificates certs;
    FactorResult with_s = has_factor(bd, bundle.base, budget);
    certs.nodes += with_s.nodes;
    if (with_s.status == SearchStatus::timeout)
        throw TimeoutError("verify_absorber: factor search on B u D timed out");
    if (with_s.status == SearchStatus::absent)
        throw std::runtime_error("verify_absorber: B u D has no F-factor");
    if (!verify_factor(bd, bundle.base, with_s.certificate))
        throw std::logic_error("verify_absorber: invalid certificate on B u D");
    certs.with_s = with_s.certificate;

    VertexSet keep = VertexSet::full(bd.n());
    for (int s : bundle.s_vertices) keep.reset(s);
    auto sub = induced(bd, keep);
    FactorResult without_s = has_factor(sub.graph, bundle.base, budget);
    certs.nodes += without_s.nodes;
    if (without_s.status == SearchStatus::timeout)
        throw TimeoutError("verify_absorber: factor search on (B u D) - S timed out");
    if (without_s.status == SearchStatus::absent)
        throw std::runtime_error("verify_absorber: (B u D) - S has no F-factor");
    if (!verify_factor(sub.graph, bundle.base, without_s.certificate))
        throw std::logic_error("verify_absorber: invalid certificate on (B u D) - S");
    // Map the certificate back into B u D labels.
    certs.without_s = without_s.certificate;
    for (auto& blk : certs.without_s.blocks) {
        for (int& v : blk.host_vertices) v = sub.vertex_map[v];
        for (int& v : blk.iso) v = sub.vertex_map[v];
        std::sort(blk.host_vertices.begin(), blk.host_vertices.end());
    }
    return certs;
}

std::vector<RootedEmbedding> rooted_embed(const Hypergraph& host, const RootedGraph& pattern,
                                          const std::vector<RootedEmbedRequest>& requests,
                                          uint64_t budget_per_request) {
    std::vector<int> roots = pattern.roots.vertices();
    std::vector<int> body;
    for (int v = 0; v < pattern.graph.n(); ++v)
        if (!pattern.roots.test(v)) body.push_back(v);

    VertexSet all_targets(host.n());
    for (const auto& req : requests) {
        if (int(req.target.size()) != int(roots.size()))
            throw std::invalid_argument("rooted_embed: target size does not match root count");
        for (int v : req.target) {
            if (all_targets.test(v))
                throw std::invalid_argument("rooted_embed: targets are not pairwise disjoint");
            all_targets.set(v);
        }
    }

    VertexSet used_bodies(host.n());
    std::vector<RootedEmbedding> out;
    for (int idx = 0; idx < int(requests.size()); ++idx) {
        const auto& req = requests[idx];
        if (req.family.empty()) {
            EmbedOptions opts;
            opts.budget = budget_per_request;
            for (size_t i = 0; i < roots.size(); ++i)
                opts.pins.push_back({roots[i], req.target[i]});
            VertexSet allowed = VertexSet::full(host.n()) - all_targets - used_bodies;
            opts.allowed = &allowed;
            auto res = find_embedding(host, pattern.graph, opts);
            if (res.status == SearchStatus::found) {
                for (int v : body) used_bodies.set(res.map[v]);
                out.push_back(RootedEmbedding{idx, res.map});
            }
            continue;
        }
        for (const auto& tuple : req.family) {
            if (tuple.size() != body.size())
                throw std::invalid_argument("rooted_embed: family tuple of wrong size");
            std::vector<int> map(pattern.graph.n(), -1);
            for (size_t i = 0; i < roots.size(); ++i) map[roots[i]] = req.target[i];
            bool ok = true;
            VertexSet seen(host.n());
            for (size_t i = 0; i < body.size() && ok; ++i) {
                int hv = tuple[i];
                if (hv < 0 || hv >= host.n() || seen.test(hv) || used_bodies.test(hv) ||
                    all_targets.test(hv))
                    ok = false;
                else {
                    seen.set(hv);
                    map[body[i]] = hv;
                }
            }
            if (!ok) continue;
            for (const auto& e : pattern.graph.edges()) {
                Hypergraph::Edge img(e.size());
                for (size_t i = 0; i < e.size(); ++i) img[i] = map[e[i]];
                std::sort(img.begin(), img.end());
                if (!host.has_edge(img)) { ok = false; break; }
            }
            if (!ok) continue;
            for (int v : body) used_bodies.set(map[v]);
            out.push_back(RootedEmbedding{idx, map});
            break;
        }
    }
    return out;
}

// --- bipartite template --------------------------------------------------------

namespace {

std::vector<std::vector<int>> left_adjacency(const BipartiteTemplate& t) {
    std::vector<std::vector<int>> adj(t.z_size);
    for (auto [l, z] : t.edges) adj[z].push_back(l);
    return adj;
}

// Kuhn's augmenting paths: perfect matching of Z into active left vertices.
bool z_saturating_matching(const BipartiteTemplate& t, const std::vector<bool>& left_active) {
    auto adj = left_adjacency(t);
    int left_n = t.x_size + t.y_size;
    std::vector<int> match_left(left_n, -1);
    std::vector<char> visited(left_n);

    std::function<bool(int)> try_z = [&](int z) -> bool {
        for (int l : adj[z]) {
            if (!left_active[l] || visited[l]) continue;
            visited[l] = 1;
            if (match_left[l] < 0 || try_z(match_left[l])) {
                match_left[l] = z;
                return true;
            }
        }
        return false;
    };
    for (int z = 0; z < t.z_size; ++z) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!try_z(z)) return false;
    }
    return true;
}

template <typename Fn>
void for_each_b_subset(int x_size, int b, Fn&& fn) {
    std::vector<int> sel(b);
    std::iota(sel.begin(), sel.end(), 0);
    while (true) {
        fn(sel);
        int i = b - 1;
        while (i >= 0 && sel[i] == x_size - b + i) --i;
        if (i < 0) break;
        ++sel[i];
        for (int j = i + 1; j < b; ++j) sel[j] = sel[j - 1] + 1;
    }
}

}  // namespace

bool verify_template_matching(const BipartiteTemplate& t) {
    bool all = true;
    std::vector<bool> active(t.x_size + t.y_size, false);
    for (int y = 0; y < t.y_size; ++y) active[t.x_size + y] = true;
    for_each_b_subset(t.x_size, t.b, [&](const std::vector<int>& sel) {
        if (!all) return;
        std::vector<bool> act = active;
        for (int x : sel) act[x] = true;
        if (!z_saturating_matching(t, act)) all = false;
    });
    return all;
}

bool verify_template_hall(const BipartiteTemplate& t) {
    if (t.z_size > 20) throw std::invalid_argument("verify_template_hall: Z too large");
    // Neighborhood masks over left vertices for every subset of Z.
    std::vector<uint32_t> nbr(t.z_size, 0);
    for (auto [l, z] : t.edges) nbr[z] |= uint32_t(1) << l;
    std::vector<uint32_t> nbr_of_subset(size_t(1) << t.z_size, 0);
    for (uint32_t s = 1; s < (uint32_t(1) << t.z_size); ++s) {
        uint32_t low = s & ~(s - 1);
        nbr_of_subset[s] = nbr_of_subset[s & (s - 1)] | nbr[std::countr_zero(low)];
    }
    uint32_t y_mask = 0;
    for (int y = 0; y < t.y_size; ++y) y_mask |= uint32_t(1) << (t.x_size + y);

    bool all = true;
    for_each_b_subset(t.x_size, t.b, [&](const std::vector<int>& sel) {
        if (!all) return;
        uint32_t active = y_mask;
        for (int x : sel) active |= uint32_t(1) << x;
        for (uint32_t s = 1; s < (uint32_t(1) << t.z_size); ++s) {
            if (std::popcount(nbr_of_subset[s] & active) < std::popcount(s)) {
                all = false;
                return;
            }
        }
    });
    return all;
}

BipartiteTemplate find_template(int b, double beta, uint64_t seed, uint64_t max_attempts) {
    if (b < 1 || b > 5)
        throw std::invalid_argument("find_template: b must lie in [1, 5] (exhaustive verification)");
    if (beta <= 0 || beta > 1) throw std::invalid_argument("find_template: beta in (0, 1]");

    BipartiteTemplate t;
    t.b = b;
    t.x_size = b + int(std::ceil(beta * b - 1e-12));
    t.y_size = 2 * b;
    t.z_size = 3 * b;
    const int left_n = t.x_size + t.y_size;

    Rng rng(seed);
    for (uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        t.attempts = attempt;
        t.edges.clear();
        std::vector<int> deg_left(left_n, 0), deg_z(t.z_size, 0);
        for (int z = 0; z < t.z_size; ++z) {
            int d = 3 + int(rng.bounded(3));  // degrees 3..5
            d = std::min(d, left_n);
            for (int l : rng.sample_without_replacement(left_n, d)) {
                t.edges.push_back({l, z});
                ++deg_left[l];
                ++deg_z[z];
            }
        }
        // no isolated left vertices (the cover argument needs them all used)
        bool ok = true;
        for (int l = 0; l < left_n && ok; ++l) {
            if (deg_left[l] > 0) continue;
            int z = int(rng.bounded(uint64_t(t.z_size)));
            if (deg_z[z] >= 40) { ok = false; break; }
            t.edges.push_back({l, z});
            ++deg_left[l];
            ++deg_z[z];
        }
        if (!ok) continue;
        t.max_degree = 0;
        for (int d : deg_left) t.max_degree = std::max(t.max_degree, d);
        for (int d : deg_z) t.max_degree = std::max(t.max_degree, d);
        if (t.max_degree > 40) continue;
        std::sort(t.edges.begin(), t.edges.end());
        t.edges.erase(std::unique(t.edges.begin(), t.edges.end()), t.edges.end());

        if (!verify_template_matching(t)) continue;
        if (!verify_template_hall(t))
            throw std::logic_error("find_template: matcher and Hall check disagree");
        return t;
    }
    throw std::runtime_error("find_template: no template found in " +
                             std::to_string(max_attempts) + " attempts (not a disproof)");
}

std::vector<std::vector<Hypergraph::Edge>> edge_color_bipartite(const Hypergraph& g) {
    if (g.k() != 2) throw std::invalid_argument("edge_color_bipartite: 2-graphs only");
    // 2-colour the vertices; reject odd cycles.
    std::vector<int> side(g.n(), -1);
    for (int s = 0; s < g.n(); ++s) {
        if (side[s] >= 0) continue;
        side[s] = 0;
        std::vector<int> queue{s};
        while (!queue.empty()) {
            int v = queue.back();
            queue.pop_back();
            for (int ei : g.incident_edges(v)) {
                const auto& e = g.edge(ei);
                int w = e[0] == v ? e[1] : e[0];
                if (side[w] < 0) {
                    side[w] = 1 - side[v];
                    queue.push_back(w);
                } else if (side[w] == side[v]) {
                    throw std::invalid_argument("edge_color_bipartite: graph is not bipartite");
                }
            }
        }
    }
    int delta = 0;
    for (int v = 0; v < g.n(); ++v) delta = std::max(delta, g.vertex_degree(v));
    if (delta == 0) return {};
    if (delta > 60) throw std::invalid_argument("edge_color_bipartite: degree beyond desk scale");

    const int E = g.edge_count();
    std::vector<int> color(E, -1);
    // at[v][c] = edge currently coloured c at v, or -1
    std::vector<std::vector<int>> at(g.n(), std::vector<int>(delta, -1));
    auto free_mask = [&](int v) {
        uint64_t m = 0;
        for (int c = 0; c < delta; ++c)
            if (at[v][c] < 0) m |= uint64_t(1) << c;
        return m;
    };

    for (int ei = 0; ei < E; ++ei) {
        int u = g.edge(ei)[0], v = g.edge(ei)[1];
        uint64_t common = free_mask(u) & free_mask(v);
        if (common) {
            int c = std::countr_zero(common);
            color[ei] = c;
            at[u][c] = ei;
            at[v][c] = ei;
            continue;
        }
        int cu = std::countr_zero(free_mask(u));  // free at u, used at v
        int cv = std::countr_zero(free_mask(v));  // free at v, used at u
        // Walk the maximal cu/cv-alternating chain from v, then swap the two
        // colours along it; in a bipartite graph the chain never reaches u.
        std::vector<int> chain;
        std::vector<int> chain_vertices{v};
        int w = v, col = cu;
        while (at[w][col] >= 0) {
            int e = at[w][col];
            chain.push_back(e);
            w = g.edge(e)[0] == w ? g.edge(e)[1] : g.edge(e)[0];
            chain_vertices.push_back(w);
            col = (col == cu) ? cv : cu;
        }
        if (w == u) throw std::logic_error("edge_color_bipartite: chain reached u");
        for (int x : chain_vertices) at[x][cu] = at[x][cv] = -1;
        for (int e : chain) {
            color[e] = (color[e] == cu) ? cv : cu;
            at[g.edge(e)[0]][color[e]] = e;
            at[g.edge(e)[1]][color[e]] = e;
        }
        if (at[u][cu] >= 0 || at[v][cu] >= 0)
            throw std::logic_error("edge_color_bipartite: chain swap failed");
        color[ei] = cu;
        at[u][cu] = ei;
        at[v][cu] = ei;
    }

    std::vector<std::vector<Hypergraph::Edge>> classes(delta);
    for (int ei = 0; ei < E; ++ei) classes[color[ei]].push_back(g.edge(ei));
    for (const auto& cls : classes) {
        if (cls.empty()) throw std::logic_error("edge_color_bipartite: unused colour class");
        std::set<int> seen;
        for (const auto& e : cls)
            for (int v : e)
                if (!seen.insert(v).second)
                    throw std::logic_error("edge_color_bipartite: colour class is not a matching");
    }
    return classes;
}

// --- absorbing-set assembly ------------------------------------------------------

AssembleResult assemble_absorbing_set(const Hypergraph& host, const Hypergraph& f,
                                      const BipartiteTemplate& tmpl,
                                      const std::vector<int>& xyz_vertices,
                                      const AbsorberSupply& supply) {
    const int m = f.n();
    const int need = tmpl.x_size + tmpl.y_size + tmpl.z_size * (m - 1);
    if (int(xyz_vertices.size()) != need)
        throw std::invalid_argument("assemble_absorbing_set: expected " + std::to_string(need) +
                                    " X u Y u Z vertices");
    AssembleResult result;
    AbsorbingSet& set = result.set;
    set.m = m;
    set.tmpl = tmpl;

    auto it = xyz_vertices.begin();
    set.x.assign(it, it + tmpl.x_size);
    it += tmpl.x_size;
    set.y.assign(it, it + tmpl.y_size);
    it += tmpl.y_size;
    for (int zi = 0; zi < tmpl.z_size; ++zi) {
        set.z_parts.emplace_back(it, it + (m - 1));
        it += m - 1;
    }

    // phi'(e): the left endpoint's host vertex plus the Z part of the right
    // endpoint.
    std::vector<int> left_host = set.x;
    left_host.insert(left_host.end(), set.y.begin(), set.y.end());
    for (auto [l, z] : tmpl.edges) {
        std::vector<int> mset{left_host[l]};
        mset.insert(mset.end(), set.z_parts[z].begin(), set.z_parts[z].end());
        std::sort(mset.begin(), mset.end());
        set.m_set_of_edge.push_back(std::move(mset));
    }

    // Split template edges into matchings and feed each family of disjoint
    // m-sets to the supply.
    std::vector<Hypergraph::Edge> tedges;
    for (auto [l, z] : tmpl.edges)
        tedges.push_back({l, tmpl.x_size + tmpl.y_size + z});
    Hypergraph tgraph(2, tmpl.x_size + tmpl.y_size + tmpl.z_size, tedges);
    auto classes = edge_color_bipartite(tgraph);

    // Map a template edge back to its index.
    std::map<std::pair<int, int>, int> edge_index;
    for (int i = 0; i < int(tmpl.edges.size()); ++i) edge_index[tmpl.edges[i]] = i;

    set.absorber_of_edge.assign(tmpl.edges.size(), {});
    VertexSet forbidden(host.n());
    for (int v : xyz_vertices) forbidden.set(v);

    for (const auto& cls : classes) {
        std::vector<int> idxs;
        std::vector<std::vector<int>> msets;
        for (const auto& te : cls) {
            int l = te[0], z = te[1] - tmpl.x_size - tmpl.y_size;
            int idx = edge_index.at({l, z});
            idxs.push_back(idx);
            msets.push_back(set.m_set_of_edge[idx]);
        }
        AbsorberSupplyResult sup = supply(msets, forbidden);
        if (!sup.ok) {
            result.ok = false;
            result.failed_m_set = sup.failed_index >= 0 ? msets[sup.failed_index] : std::vector<int>{};
            result.reason = sup.reason.empty() ? "absorber supply failed" : sup.reason;
            return result;
        }
        if (sup.absorbers.size() != msets.size())
            throw std::logic_error("assemble_absorbing_set: supply returned wrong count");
        for (size_t i = 0; i < idxs.size(); ++i) {
            for (int v : sup.absorbers[i]) {
                if (forbidden.test(v))
                    throw std::logic_error("assemble_absorbing_set: supply reused a vertex");
                forbidden.set(v);
            }
            set.absorber_of_edge[idxs[i]] = sup.absorbers[i];
        }
    }

    set.v0 = VertexSet(host.n());
    for (int v : xyz_vertices) set.v0.set(v);
    for (const auto& a : set.absorber_of_edge)
        for (int v : a) set.v0.set(v);
    result.ok = true;
    return result;
}

namespace {

// Factor certificate for an induced sub-host, remapped to global labels.
bool factor_on_subset(const Hypergraph& host, const Hypergraph& f, const VertexSet& subset,
                      uint64_t budget, std::vector<FactorBlock>& out) {
    auto sub = induced(host, subset);
    if (sub.graph.n() % f.n() != 0) return false;
    if (sub.graph.n() == 0) return true;
    FactorResult res = has_factor(sub.graph, f, budget);
    if (res.status != SearchStatus::found) return false;
    for (auto blk : res.certificate.blocks) {
        for (int& v : blk.host_vertices) v = sub.vertex_map[v];
        for (int& v : blk.iso) v = sub.vertex_map[v];
        std::sort(blk.host_vertices.begin(), blk.host_vertices.end());
        out.push_back(std::move(blk));
    }
    return true;
}

}  // namespace

AbsorptionOutcome absorb_leftover(const Hypergraph& host, const Hypergraph& f,
                                  const AbsorbingSet& set, const std::vector<int>& leftover,
                                  uint64_t budget) {
    AbsorptionOutcome out;
    const int m = set.m;
    for (int v : leftover)
        if (set.v0.test(v)) {
            out.failure = "leftover intersects V0";
            return out;
        }
    if ((set.v0.count() + int(leftover.size())) % m != 0) {
        out.failure = "m does not divide |V0| + |R|";
        return out;
    }
    const int q_size = set.tmpl.x_size - set.tmpl.b;
    if ((q_size + int(leftover.size())) % m != 0) {
        out.failure = "flexible budget and leftover are incompatible modulo m";
        return out;
    }

    // Flexible set Q: first subset of X (lex order) of size |X| - b with an
    // F-factor on Q u R.
    std::vector<FactorBlock> q_blocks;
    std::vector<int> q_chosen;
    bool found_q = false;
    for_each_b_subset(int(set.x.size()), q_size, [&](const std::vector<int>& sel) {
        if (found_q) return;
        VertexSet qr(host.n());
        for (int i : sel) qr.set(set.x[i]);
        for (int v : leftover) qr.set(v);
        std::vector<FactorBlock> blocks;
        if (factor_on_subset(host, f, qr, budget, blocks)) {
            found_q = true;
            q_blocks = std::move(blocks);
            q_chosen.assign(sel.begin(), sel.end());
        }
    });
    if (!found_q) {
        out.failure = "no flexible set Q with an F-factor on Q u R";
        return out;
    }

    // X' = X minus Q indexes a template matching.
    std::vector<bool> active(set.tmpl.x_size + set.tmpl.y_size, false);
    for (int y = 0; y < set.tmpl.y_size; ++y) active[set.tmpl.x_size + y] = true;
    std::vector<bool> in_q(set.tmpl.x_size, false);
    for (int i : q_chosen) in_q[i] = true;
    for (int x = 0; x < set.tmpl.x_size; ++x)
        if (!in_q[x]) active[x] = true;

    // Kuhn's matching, remembering the edges.
    std::vector<std::vector<std::pair<int, int>>> adj(set.tmpl.z_size);  // (left, edge idx)
    for (int i = 0; i < int(set.tmpl.edges.size()); ++i)
        adj[set.tmpl.edges[i].second].push_back({set.tmpl.edges[i].first, i});
    std::vector<int> match_left(active.size(), -1), match_edge(set.tmpl.z_size, -1);
    std::vector<char> visited(active.size());
    std::function<bool(int)> try_z = [&](int z) -> bool {
        for (auto [l, ei] : adj[z]) {
            if (!active[l] || visited[l]) continue;
            visited[l] = 1;
            if (match_left[l] < 0 || try_z(match_left[l])) {
                match_left[l] = z;
                match_edge[z] = ei;
                return true;
            }
        }
        return false;
    };
    for (int z = 0; z < set.tmpl.z_size; ++z) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!try_z(z)) {
            out.failure = "template lost its matching (should be impossible)";
            return out;
        }
    }
    std::vector<bool> matched(set.tmpl.edges.size(), false);
    for (int z = 0; z < set.tmpl.z_size; ++z) matched[match_edge[z]] = true;

    // Assemble: Q u R blocks, matched edges absorb phi'(e) u A_e, the rest
    // factor on A_e alone.
    out.factor.blocks = std::move(q_blocks);
    for (int ei = 0; ei < int(set.tmpl.edges.size()); ++ei) {
        VertexSet part(host.n());
        for (int v : set.absorber_of_edge[ei]) part.set(v);
        if (matched[ei])
            for (int v : set.m_set_of_edge[ei]) part.set(v);
        std::vector<FactorBlock> blocks;
        if (!factor_on_subset(host, f, part, budget, blocks)) {
            out.failure = std::string("absorber failed to ") +
                          (matched[ei] ? "absorb its m-set" : "factor on its own");
            return out;
        }
        for (auto& blk : blocks) out.factor.blocks.push_back(std::move(blk));
    }
    out.ok = true;
    return out;
}

AbsorberSupply host_search_supply(const Hypergraph& host, const GadgetBundle& bundle,
                                  uint64_t budget) {
    if (bundle.b_graph.n() == 0)
        throw std::invalid_argument("host_search_supply: bundle has no absorber part");
    Hypergraph bd = absorber_union(bundle);
    VertexSet roots(bd.n());
    for (int s : bundle.s_vertices) roots.set(s);
    RootedGraph pattern(bd, roots);

    Hypergraph base = bundle.base;
    return [host, pattern, base, budget](const std::vector<std::vector<int>>& m_sets,
                                         const VertexSet& forbidden) {
        AbsorberSupplyResult res;
        VertexSet used = forbidden;
        std::vector<int> body;
        for (int v = 0; v < pattern.graph.n(); ++v)
            if (!pattern.roots.test(v)) body.push_back(v);
        auto rts = pattern.roots.vertices();
        for (size_t i = 0; i < m_sets.size(); ++i) {
            if (m_sets[i].size() != rts.size()) {
                res.ok = false;
                res.failed_index = int(i);
                res.reason = "m-set size does not match |S|";
                return res;
            }
            EmbedOptions opts;
            opts.budget = budget;
            for (size_t j = 0; j < rts.size(); ++j) opts.pins.push_back({rts[j], m_sets[i][j]});
            VertexSet allowed = VertexSet::full(host.n()) - used;
            opts.allowed = &allowed;
            auto emb = find_embedding(host, pattern.graph, opts);
            if (emb.status != SearchStatus::found) {
                res.ok = false;
                res.failed_index = int(i);
                res.reason = emb.status == SearchStatus::timeout
                                 ? "absorber search timed out"
                                 : "no B u D copy rooted at the m-set";
                return res;
            }
            std::vector<int> absorber;
            for (int v : body) absorber.push_back(emb.map[v]);
            std::sort(absorber.begin(), absorber.end());
            // Independent check of both absorber conditions in the host.
            VertexSet a_set(host.n()), as_set(host.n());
            for (int v : absorber) { a_set.set(v); as_set.set(v); }
            for (int v : m_sets[i]) as_set.set(v);
            std::vector<FactorBlock> tmp;
            if (!factor_on_subset(host, base, a_set, budget, tmp) ||
                !factor_on_subset(host, base, as_set, budget, tmp)) {
                res.ok = false;
                res.failed_index = int(i);
                res.reason = "embedded B u D copy fails the absorber conditions";
                return res;
            }
            for (int v : absorber) used.set(v);
            res.absorbers.push_back(std::move(absorber));
        }
        res.ok = true;
        return res;
    };
}

}  // namespace perturb
