#include "perturb/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace perturb {

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational one_density(const Hypergraph& f) {
    if (f.n() < 2) throw std::invalid_argument("one_density: fewer than 2 vertices");
    return Rational(f.edge_count(), f.n() - 1);
}

ComponentView component_view(const Hypergraph& h, const VertexSet& comp) {
    auto verts = comp.vertices();
    const int L = int(verts.size());
    if (L > 64) throw std::invalid_argument("component_view: component exceeds 64 vertices");
    std::vector<int> local(h.n(), -1);
    for (int i = 0; i < L; ++i) local[verts[i]] = i;

    ComponentView view;
    view.global = verts;
    view.adj.assign(L, 0);
    view.incident.assign(L, {});

    std::vector<uint64_t> edge_masks;
    for (const auto& e : h.edges()) {
        if (local[e[0]] < 0) continue;  // edge lives in another component
        uint64_t m = 0;
        for (int v : e) m |= uint64_t(1) << local[v];
        edge_masks.push_back(m);
    }
    view.edge_total = int(edge_masks.size());
    for (uint64_t m : edge_masks) {
        uint64_t rest = m;
        while (rest) {
            int v = std::countr_zero(rest);
            rest &= rest - 1;
            view.incident[v].push_back(m);
            view.adj[v] |= m & ~(uint64_t(1) << v);
        }
    }
    return view;
}

namespace {

VertexSet mask_to_global(uint64_t mask, const ComponentView& view, int n) {
    VertexSet s(n);
    while (mask) {
        int v = std::countr_zero(mask);
        mask &= mask - 1;
        s.set(view.global[v]);
    }
    return s;
}

}  // namespace

DensityReport m1(const Hypergraph& f, const M1Options& opts) {
    if (f.edge_count() == 0) throw std::invalid_argument("m1: edgeless graph");
    long long best_e = -1, best_v = 2;
    VertexSet best_set(f.n());
    uint64_t enumerated = 0;

    for (const auto& comp : components(f)) {
        int size = comp.count();
        if (size < 2) continue;
        auto view = component_view(f, comp);
        if (view.edge_total == 0) continue;
        if (size > opts.max_component_vertices)
            throw std::invalid_argument(
                "m1: component with " + std::to_string(size) +
                " vertices exceeds the enumeration cap of " +
                std::to_string(opts.max_component_vertices) +
                "; raise M1Options::max_component_vertices or use m1_banded");
        for_each_connected_subset(view, size, [&](uint64_t mask, int v, int e) {
            if (v < 2) return;
            ++enumerated;
            if (e == 0) return;
            // e/(v-1) vs best_e/(best_v-1), exact
            long long lhs = (long long)e * (best_v - 1);
            long long rhs = best_e * (v - 1);
            if (lhs > rhs) {
                best_e = e;
                best_v = v;
                best_set = mask_to_global(mask, view, f.n());
            } else if (lhs == rhs && best_e >= 0) {
                VertexSet cand = mask_to_global(mask, view, f.n());
                if (VertexSet::lex_less(cand, best_set)) best_set = cand;
            }
        });
    }
    if (best_e < 0) throw std::logic_error("m1: no edged subset found");
    return DensityReport{Rational(best_e, best_v - 1), best_set, enumerated};
}

// --- banded exact m1 ---------------------------------------------------------

namespace {

struct BandedEdge {
    int end;        // last position of the edge
    uint32_t mask;  // bit s set when the edge contains position end - s
};

struct DpCell {
    long long value;
    int e, v;
    int prev_state, prev_flag;
    int8_t took;
};

struct DpOutcome {
    long long value;  // max of e*D - N*v over subsets with >= 1 edge
    int e, v;
    uint64_t mask;    // positions of the maximizer
};

// Maximize e(S)*D - N*|S| over vertex subsets with at least one induced edge.
// State after position i: membership of positions i-bw+2..i plus an
// any-edge-yet flag.
DpOutcome banded_opt(int length, int bw, const std::vector<std::vector<BandedEdge>>& by_end,
                     long long N, long long D) {
    const int states = 1 << (bw - 1);
    const long long NEG = std::numeric_limits<long long>::min() / 4;
    std::vector<DpCell> cur(size_t(states) * 2, DpCell{NEG, 0, 0, -1, -1, 0});
    std::vector<std::vector<DpCell>> table(length);
    cur[0] = DpCell{0, 0, 0, -1, -1, 0};

    for (int i = 0; i < length; ++i) {
        std::vector<DpCell> nxt(size_t(states) * 2, DpCell{NEG, 0, 0, -1, -1, 0});
        for (int st = 0; st < states; ++st) {
            for (int fl = 0; fl < 2; ++fl) {
                const DpCell& c = cur[size_t(st) * 2 + fl];
                if (c.value == NEG) continue;
                for (int take = 0; take < 2; ++take) {
                    int nst = ((st << 1) | take) & (states - 1);
                    int gained = 0;
                    if (take) {
                        for (const auto& be : by_end[i]) {
                            uint32_t need = be.mask >> 1;
                            if ((need & ~uint32_t(st)) == 0) ++gained;
                        }
                    }
                    int nfl = (fl || gained > 0) ? 1 : 0;
                    long long nv = c.value + (long long)gained * D - (take ? N : 0);
                    DpCell& slot = nxt[size_t(nst) * 2 + nfl];
                    if (nv > slot.value) {
                        slot = DpCell{nv, c.e + gained, c.v + take, st, fl, int8_t(take)};
                    }
                }
            }
        }
        table[i] = nxt;
        cur = std::move(nxt);
    }

    DpOutcome out{NEG, 0, 0, 0};
    int arg_state = -1;
    for (int st = 0; st < states; ++st) {
        const DpCell& c = cur[size_t(st) * 2 + 1];
        if (c.value != NEG && c.value > out.value) {
            out.value = c.value;
            out.e = c.e;
            out.v = c.v;
            arg_state = st;
        }
    }
    if (arg_state < 0) return out;

    // Walk parents to recover the subset.
    uint64_t mask = 0;
    int st = arg_state, fl = 1;
    for (int i = length - 1; i >= 0; --i) {
        const DpCell& c = table[i][size_t(st) * 2 + fl];
        if (c.took) mask |= uint64_t(1) << i;
        st = c.prev_state;
        fl = c.prev_flag;
    }
    out.mask = mask;
    return out;
}

}  // namespace

DensityReport m1_banded(const Hypergraph& h, const std::vector<int>& order) {
    if (h.edge_count() == 0) throw std::invalid_argument("m1_banded: edgeless graph");
    if (int(order.size()) != h.n()) throw std::invalid_argument("m1_banded: order must cover all vertices");
    std::vector<int> pos(h.n(), -1);
    for (int i = 0; i < h.n(); ++i) {
        if (order[i] < 0 || order[i] >= h.n() || pos[order[i]] >= 0)
            throw std::invalid_argument("m1_banded: order is not a permutation");
        pos[order[i]] = i;
    }

    int bw = 0;
    std::vector<std::vector<BandedEdge>> by_end(h.n());
    for (const auto& e : h.edges()) {
        int lo = h.n(), hi = -1;
        for (int v : e) {
            lo = std::min(lo, pos[v]);
            hi = std::max(hi, pos[v]);
        }
        bw = std::max(bw, hi - lo + 1);
        uint32_t mask = 0;
        for (int v : e) mask |= uint32_t(1) << (hi - pos[v]);
        by_end[hi].push_back(BandedEdge{hi, mask});
    }
    if (bw > 16)
        throw std::invalid_argument("m1_banded: edge spans " + std::to_string(bw) +
                                    " positions; host is not banded enough");

    // Parametric search: start from an achieved ratio and improve while some
    // subset S with an edge has e(S) - g(|S|-1) > 0.
    long long N = 1, D = h.k() - 1;  // single edge: d = 1/(k-1)
    uint64_t best_mask = 0;
    {
        const auto& e0 = h.edges().front();
        for (int v : e0) best_mask |= uint64_t(1) << pos[v];
    }
    uint64_t rounds = 0;
    for (;;) {
        ++rounds;
        DpOutcome r = banded_opt(h.n(), bw, by_end, N, D);
        if (r.value <= -N) break;  // e*D - N*(v-1) <= 0 for every edged subset
        long long ne = r.e, nv = r.v;
        // New ratio must strictly improve.
        if (ne * D <= N * (nv - 1)) throw std::logic_error("m1_banded: no strict improvement");
        Rational g(ne, nv - 1);
        N = g.numerator();
        D = g.denominator();
        best_mask = r.mask;
        if (rounds > 1000) throw std::logic_error("m1_banded: parametric search did not converge");
    }

    VertexSet witness(h.n());
    uint64_t m = best_mask;
    while (m) {
        int i = std::countr_zero(m);
        m &= m - 1;
        witness.set(order[i]);
    }
    return DensityReport{Rational(N, D), witness, rounds};
}

// --- Phi ---------------------------------------------------------------------

double PhiReport::value() const { return std::exp(log_value); }

namespace {

// {0,1} < {0,1,3} < {0,2} on bitmask subsets.
bool lex_less_mask(uint64_t a, uint64_t b) {
    uint64_t x = a ^ b;
    if (!x) return false;
    uint64_t low = x & ~(x - 1);
    bool a_owns = (a & low) != 0;
    uint64_t above = ~((low << 1) - 1);
    if (low << 1 == 0) above = 0;
    uint64_t rest = a_owns ? b : a;
    if ((rest & above) == 0) return !a_owns;  // rest is a proper prefix
    return a_owns;
}

struct PhiAccum {
    double best = std::numeric_limits<double>::infinity();
    int best_a = 0, best_e = 0;
    uint64_t best_mask = 0;
    uint64_t enumerated = 0;

    void offer(double score, int a, int e, uint64_t mask) {
        ++enumerated;
        constexpr double tol = 1e-12;
        if (!std::isfinite(best) || score < best - tol * (1 + std::abs(best))) {
            best = score;
            best_a = a;
            best_e = e;
            best_mask = mask;
        } else if (score <= best + tol * (1 + std::abs(best))) {
            // numeric tie: prefer fewer vertices, then fewer edges, then lex
            auto key = std::tuple(a, e);
            auto best_key = std::tuple(best_a, best_e);
            if (key < best_key ||
                (key == best_key && lex_less_mask(mask, best_mask))) {
                best_a = a;
                best_e = e;
                best_mask = mask;
            }
        }
    }
};

PhiReport phi_impl(const Hypergraph& f, double n, double p, const VertexSet* roots) {
    if (f.edge_count() == 0) throw std::invalid_argument("phi: edgeless graph");
    if (p <= 0 || p > 1) throw std::invalid_argument("phi: p must lie in (0, 1]");
    if (n < f.n()) throw std::invalid_argument("phi: n below v_F");
    if (f.n() > 24) throw std::invalid_argument("phi: more than 24 vertices is beyond the enumeration cap");

    const int V = f.n();
    const double ln_n = std::log(n), ln_p = std::log(p);

    // Edges grouped by their largest vertex, as bitmasks.
    std::vector<std::vector<uint64_t>> by_max(V);
    for (const auto& e : f.edges()) {
        uint64_t m = 0;
        for (int v : e) m |= uint64_t(1) << v;
        by_max[e.back()].push_back(m);
    }
    uint64_t root_mask = 0;
    if (roots)
        for (int v : roots->vertices()) root_mask |= uint64_t(1) << v;

    PhiAccum acc;
    // Depth-first over include/exclude per vertex with incremental edge count.
    struct Frame { int level; uint64_t mask; int vc, rc, ec; };
    std::vector<Frame> stack{{0, 0, 0, 0, 0}};
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        if (fr.level == V) {
            if (fr.ec >= 1) {
                int a = fr.vc - fr.rc;
                acc.offer(a * ln_n + fr.ec * ln_p, a, fr.ec, fr.mask);
            }
            continue;
        }
        int v = fr.level;
        // exclude v
        stack.push_back({fr.level + 1, fr.mask, fr.vc, fr.rc, fr.ec});
        // include v
        uint64_t nmask = fr.mask | (uint64_t(1) << v);
        int ne = fr.ec;
        for (uint64_t em : by_max[v])
            if ((em & ~nmask) == 0) ++ne;
        stack.push_back({fr.level + 1, nmask, fr.vc + 1,
                         fr.rc + ((root_mask >> v) & 1 ? 1 : 0), ne});
    }

    VertexSet witness(f.n());
    uint64_t m = acc.best_mask;
    while (m) {
        int v = std::countr_zero(m);
        m &= m - 1;
        witness.set(v);
    }
    return PhiReport{acc.best, acc.best_a, acc.best_e, witness, acc.enumerated};
}

}  // namespace

PhiReport phi(const Hypergraph& f, double n, double p) {
    return phi_impl(f, n, p, nullptr);
}

PhiReport phi_rooted(const RootedGraph& f, double n, double p) {
    if (!f.roots_independent())
        throw std::invalid_argument("phi_rooted: root set is not independent");
    PhiReport rooted = phi_impl(f.graph, n, p, &f.roots);

    // Phi_{F \ W} >= Phi_{F,W}: dropping the roots only removes candidate
    // subgraphs while each survivor's exponent is unchanged.
    VertexSet keep = VertexSet::full(f.graph.n()) - f.roots;
    auto sub = induced(f.graph, keep);
    if (sub.graph.edge_count() > 0) {
        PhiReport unrooted = phi(sub.graph, n, p);
        if (unrooted.log_value < rooted.log_value - 1e-9)
            throw std::logic_error("phi_rooted: Phi_{F\\W} < Phi_{F,W}");
    }
    return rooted;
}

Hypergraph glue_at_vertex(const Hypergraph& f1, int v1, const Hypergraph& f2, int v2) {
    if (f1.k() != f2.k()) throw std::invalid_argument("glue_at_vertex: uniformity mismatch");
    if (v1 < 0 || v1 >= f1.n() || v2 < 0 || v2 >= f2.n())
        throw std::invalid_argument("glue_at_vertex: bad vertex");
    int n = f1.n() + f2.n() - 1;
    std::vector<int> map2(f2.n());
    int next = f1.n();
    for (int v = 0; v < f2.n(); ++v) map2[v] = (v == v2) ? v1 : next++;
    std::vector<Hypergraph::Edge> edges = f1.edges();
    for (auto e : f2.edges()) {
        for (int& v : e) v = map2[v];
        edges.push_back(std::move(e));
    }
    return Hypergraph(f1.k(), n, std::move(edges));
}

GlueCheckResult glue_check(const Hypergraph& f1, int v1, const Hypergraph& f2, int v2,
                           double n, double p) {
    Hypergraph u = glue_at_vertex(f1, v1, f2, v2);
    PhiReport pu = phi(u, n, p);
    GlueCheckResult res{false, pu.log_value, 0, {}, {}, pu};
    if (f1.edge_count() == 0 || f2.edge_count() == 0) {
        // A part without edges contributes nothing; the union's Phi equals
        // the other part's and the inequality is immediate.
        const Hypergraph& with_edges = f1.edge_count() ? f1 : f2;
        PhiReport pw = phi(with_edges, n, p);
        res.phi1 = pw;
        res.phi2 = pw;
        res.log_bound = pw.log_value;
        res.holds = pu.log_value >= res.log_bound - 1e-9;
        return res;
    }
    res.phi1 = phi(f1, n, p);
    res.phi2 = phi(f2, n, p);
    res.log_bound = std::min({res.phi1.log_value, res.phi2.log_value,
                              res.phi1.log_value + res.phi2.log_value - std::log(n)});
    res.holds = pu.log_value >= res.log_bound - 1e-9;
    return res;
}

}  // namespace perturb
