#include "perturb/solvers.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace perturb {

const char* to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::found: return "found";
        case SearchStatus::absent: return "absent";
        case SearchStatus::timeout: return "timeout";
    }
    return "?";
}

namespace {

struct BudgetExceeded {};

// Gaifman adjacency of the pattern, used to order vertices and prune.
std::vector<std::vector<int>> gaifman_adjacency(const Hypergraph& g) {
    std::vector<std::set<int>> adj(g.n());
    for (const auto& e : g.edges())
        for (int a : e)
            for (int b : e)
                if (a != b) adj[a].insert(b);
    std::vector<std::vector<int>> out(g.n());
    for (int v = 0; v < g.n(); ++v) out[v].assign(adj[v].begin(), adj[v].end());
    return out;
}

class Embedder {
public:
    Embedder(const Hypergraph& host, const Hypergraph& pattern, const EmbedOptions& opts)
        : host_(host), pattern_(pattern), opts_(opts) {
        if (host.k() != pattern.k())
            throw std::invalid_argument("embedding: uniformity mismatch");
        build_order();
        build_check_edges();
        host_gaifman_.assign(host.n(), VertexSet(host.n()));
        for (const auto& e : host.edges())
            for (int a : e)
                for (int b : e)
                    if (a != b) host_gaifman_[a].set(b);
    }

    // Runs fn(map) on every embedding in deterministic order. fn returns true
    // to stop early.
    template <typename F>
    uint64_t run(F&& fn) {
        nodes_ = 0;
        map_.assign(pattern_.n(), -1);
        used_ = VertexSet(host_.n());
        done_ = false;
        for (auto [pv, hv] : opts_.pins) {
            if (pv < 0 || pv >= pattern_.n() || hv < 0 || hv >= host_.n())
                throw std::invalid_argument("embedding: bad pin");
            if (used_.test(hv) || map_[pv] != -1)
                throw std::invalid_argument("embedding: conflicting pins");
            map_[pv] = hv;
            used_.set(hv);
        }
        // Pinned vertices still must satisfy their mutual edges.
        for (const auto& e : pattern_.edges()) {
            bool all = true;
            for (int v : e)
                if (map_[v] < 0) { all = false; break; }
            if (all && !edge_maps(e)) return nodes_;
        }
        descend(0, fn);
        return nodes_;
    }

private:
    template <typename F>
    void descend(int depth, F&& fn) {
        if (done_) return;
        if (++nodes_ > opts_.budget) throw BudgetExceeded{};
        if (depth == int(order_.size())) {
            if (fn(map_)) done_ = true;
            return;
        }
        int pv = order_[depth];
        // Restrict candidates through one already-assigned Gaifman neighbour
        // when available.
        int anchor = -1;
        for (int nb : pattern_gaifman_[pv])
            if (map_[nb] >= 0) { anchor = map_[nb]; break; }
        if (anchor >= 0) {
            for (int hv : host_gaifman_[anchor].vertices()) {
                try_vertex(depth, pv, hv, fn);
                if (done_) return;
            }
        } else {
            for (int hv = 0; hv < host_.n(); ++hv) {
                try_vertex(depth, pv, hv, fn);
                if (done_) return;
            }
        }
    }

    template <typename F>
    void try_vertex(int depth, int pv, int hv, F&& fn) {
        if (used_.test(hv)) return;
        if (opts_.allowed && !opts_.allowed->test(hv)) return;
        map_[pv] = hv;
        bool ok = true;
        for (int ei : check_edges_[pv])
            if (!edge_maps(pattern_.edge(ei))) { ok = false; break; }
        if (ok) {
            used_.set(hv);
            descend(depth + 1, fn);
            used_.reset(hv);
        }
        map_[pv] = -1;
    }

    bool edge_maps(const Hypergraph::Edge& e) {
        Hypergraph::Edge img(e.size());
        for (size_t i = 0; i < e.size(); ++i) img[i] = map_[e[i]];
        std::sort(img.begin(), img.end());
        return host_.has_edge(img);
    }

    void build_order() {
        pattern_gaifman_ = gaifman_adjacency(pattern_);
        std::vector<bool> placed(pattern_.n(), false);
        for (auto [pv, hv] : opts_.pins) placed[pv] = true;
        while (true) {
            int best = -1, best_score = -1;
            for (int v = 0; v < pattern_.n(); ++v) {
                if (placed[v]) continue;
                int score = 0;
                for (int nb : pattern_gaifman_[v])
                    if (placed[nb]) ++score;
                if (score > best_score) { best = v; best_score = score; }
            }
            if (best < 0) break;
            placed[best] = true;
            order_.push_back(best);
        }
    }

    void build_check_edges() {
        // check_edges_[pv]: pattern edges fully assigned once pv is placed.
        std::vector<int> rank(pattern_.n(), -1);
        int r = 0;
        for (auto [pv, hv] : opts_.pins) rank[pv] = r++;
        for (int v : order_) rank[v] = r++;
        check_edges_.assign(pattern_.n(), {});
        for (int ei = 0; ei < pattern_.edge_count(); ++ei) {
            const auto& e = pattern_.edge(ei);
            int last = e[0];
            for (int v : e)
                if (rank[v] > rank[last]) last = v;
            check_edges_[last].push_back(ei);
        }
    }

    const Hypergraph& host_;
    const Hypergraph& pattern_;
    EmbedOptions opts_;
    std::vector<std::vector<int>> pattern_gaifman_;
    std::vector<VertexSet> host_gaifman_;
    std::vector<int> order_;                    // non-pinned pattern vertices
    std::vector<std::vector<int>> check_edges_;
    std::vector<int> map_;
    VertexSet used_;
    uint64_t nodes_ = 0;
    bool done_ = false;
};

}  // namespace

EmbeddingResult find_embedding(const Hypergraph& host, const Hypergraph& pattern,
                               const EmbedOptions& opts) {
    Embedder emb(host, pattern, opts);
    EmbeddingResult res{SearchStatus::absent, {}, 0};
    try {
        res.nodes = emb.run([&](const std::vector<int>& map) {
            res.status = SearchStatus::found;
            res.map = map;
            return true;
        });
    } catch (const BudgetExceeded&) {
        res.status = SearchStatus::timeout;
        res.nodes = opts.budget;
    }
    return res;
}

uint64_t count_labelled_copies(const Hypergraph& host, const Hypergraph& pattern,
                               const EmbedOptions& opts) {
    if (pattern.n() > 12)
        throw std::invalid_argument("count_labelled_copies: pattern beyond 12 vertices");
    Embedder emb(host, pattern, opts);
    uint64_t count = 0;
    try {
        emb.run([&](const std::vector<int>&) {
            ++count;
            return false;
        });
    } catch (const BudgetExceeded&) {
        throw std::runtime_error("count_labelled_copies: search budget exceeded");
    }
    return count;
}

bool isomorphic(const Hypergraph& a, const Hypergraph& b, uint64_t budget) {
    if (a.n() != b.n() || a.k() != b.k() || a.edge_count() != b.edge_count()) return false;
    EmbedOptions opts;
    opts.budget = budget;
    auto res = find_embedding(a, b, opts);
    if (res.status == SearchStatus::timeout)
        throw std::runtime_error("isomorphic: budget exceeded");
    return res.status == SearchStatus::found;
}

std::vector<FactorBlock> enumerate_pattern_blocks(const Hypergraph& host,
                                                  const Hypergraph& pattern,
                                                  uint64_t budget) {
    EmbedOptions opts;
    opts.budget = budget;
    Embedder emb(host, pattern, opts);
    std::map<std::vector<int>, std::vector<int>> blocks;  // sorted set -> first iso
    try {
        emb.run([&](const std::vector<int>& map) {
            std::vector<int> key = map;
            std::sort(key.begin(), key.end());
            blocks.emplace(std::move(key), map);
            return false;
        });
    } catch (const BudgetExceeded&) {
        throw std::runtime_error("enumerate_pattern_blocks: search budget exceeded");
    }
    std::vector<FactorBlock> out;
    out.reserve(blocks.size());
    for (auto& [k, iso] : blocks) out.push_back(FactorBlock{k, iso});
    return out;
}

namespace {

struct CoverSearch {
    int n;
    const std::vector<FactorBlock>& blocks;
    std::vector<std::vector<int>> by_lowest_free;  // block indices by vertex
    uint64_t budget, nodes = 0;
    VertexSet covered;
    std::vector<int> chosen;

    CoverSearch(int n_, const std::vector<FactorBlock>& b, uint64_t budget_)
        : n(n_), blocks(b), budget(budget_), covered(n_) {
        by_lowest_free.assign(n, {});
        for (int i = 0; i < int(blocks.size()); ++i)
            for (int v : blocks[i].host_vertices) by_lowest_free[v].push_back(i);
    }

    bool block_free(int bi) const {
        for (int w : blocks[bi].host_vertices)
            if (covered.test(w)) return false;
        return true;
    }

    bool solve(int from) {
        if (++nodes > budget) throw BudgetExceeded{};
        int v = from;
        while (v < n && covered.test(v)) ++v;
        if (v == n) return true;
        // Dead-end check: every uncovered vertex still needs a free block.
        for (int w = v; w < n; ++w) {
            if (covered.test(w)) continue;
            bool has = false;
            for (int bi : by_lowest_free[w])
                if (block_free(bi)) { has = true; break; }
            if (!has) return false;
        }
        for (int bi : by_lowest_free[v]) {
            if (!block_free(bi)) continue;
            const auto& blk = blocks[bi].host_vertices;
            for (int w : blk) covered.set(w);
            chosen.push_back(bi);
            if (solve(v + 1)) return true;
            chosen.pop_back();
            for (int w : blk) covered.reset(w);
        }
        return false;
    }
};

}  // namespace

FactorResult has_factor(const Hypergraph& host, const Hypergraph& pattern, uint64_t budget) {
    if (pattern.n() == 0) throw std::invalid_argument("has_factor: empty pattern");
    if (host.n() % pattern.n() != 0)
        throw std::invalid_argument("has_factor: v_F does not divide n");
    FactorResult res{SearchStatus::absent, {}, 0};
    try {
        auto blocks = enumerate_pattern_blocks(host, pattern, budget);
        CoverSearch cover(host.n(), blocks, budget);
        if (cover.solve(0)) {
            res.status = SearchStatus::found;
            for (int bi : cover.chosen)
                res.certificate.blocks.push_back(blocks[bi]);
            std::sort(res.certificate.blocks.begin(), res.certificate.blocks.end(),
                      [](const FactorBlock& a, const FactorBlock& b) {
                          return a.host_vertices < b.host_vertices;
                      });
        }
        res.nodes = cover.nodes;
    } catch (const BudgetExceeded&) {
        res.status = SearchStatus::timeout;
        res.nodes = budget;
    } catch (const std::runtime_error&) {
        res.status = SearchStatus::timeout;  // block enumeration over budget
        res.nodes = budget;
    }
    return res;
}

bool verify_factor(const Hypergraph& host, const Hypergraph& pattern,
                   const FactorCertificate& cert) {
    VertexSet seen(host.n());
    int covered = 0;
    for (const auto& blk : cert.blocks) {
        if (int(blk.host_vertices.size()) != pattern.n()) return false;
        if (int(blk.iso.size()) != pattern.n()) return false;
        std::vector<int> sorted_iso = blk.iso;
        std::sort(sorted_iso.begin(), sorted_iso.end());
        if (sorted_iso != blk.host_vertices) return false;
        for (int v : blk.host_vertices) {
            if (v < 0 || v >= host.n() || seen.test(v)) return false;
            seen.set(v);
            ++covered;
        }
        for (const auto& e : pattern.edges()) {
            Hypergraph::Edge img(e.size());
            for (size_t i = 0; i < e.size(); ++i) img[i] = blk.iso[e[i]];
            std::sort(img.begin(), img.end());
            if (!host.has_edge(img)) return false;
        }
    }
    return covered == host.n();
}

GreedyCover greedy_cover(const Hypergraph& host, const Hypergraph& pattern,
                         const VertexSet& forbidden, uint64_t budget) {
    auto blocks = enumerate_pattern_blocks(host, pattern, budget);
    std::vector<std::vector<int>> by_vertex(host.n());
    for (int i = 0; i < int(blocks.size()); ++i)
        for (int v : blocks[i].host_vertices) by_vertex[v].push_back(i);

    VertexSet used = forbidden;
    GreedyCover out{{}, VertexSet(host.n())};
    for (int v = 0; v < host.n(); ++v) {
        if (used.test(v)) continue;
        int pick = -1;
        for (int bi : by_vertex[v]) {
            bool free = true;
            for (int w : blocks[bi].host_vertices)
                if (used.test(w)) { free = false; break; }
            if (free) { pick = bi; break; }
        }
        if (pick < 0) continue;
        for (int w : blocks[pick].host_vertices) used.set(w);
        out.partial.blocks.push_back(blocks[pick]);
    }
    for (int v = 0; v < host.n(); ++v)
        if (!used.test(v)) out.leftover.set(v);
    return out;
}

// --- Hamilton structures -------------------------------------------------------

namespace {

// Required edge windows bucketed by the largest position they touch.
std::vector<std::vector<std::vector<int>>> window_checks_ell(int n, int k, int ell) {
    int g = k - ell;
    std::set<std::vector<int>> seen;
    std::vector<std::vector<std::vector<int>>> by_max(n);
    for (int s = 0; s < n; s += g) {
        std::vector<int> w(k);
        for (int i = 0; i < k; ++i) w[i] = (s + i) % n;
        std::vector<int> sorted = w;
        std::sort(sorted.begin(), sorted.end());
        if (seen.insert(sorted).second)
            by_max[sorted.back()].push_back(sorted);
    }
    return by_max;
}

std::vector<std::vector<std::vector<int>>> window_checks_power(int n, int k, int r) {
    std::set<std::vector<int>> seen;
    std::vector<std::vector<std::vector<int>>> by_max(n);
    int span = k + r - 1;
    std::vector<int> base(span);
    for (int s = 0; s < n; ++s) {
        for (int i = 0; i < span; ++i) base[i] = (s + i) % n;
        // all k-subsets of the window
        std::vector<int> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            std::vector<int> sub(k);
            for (int i = 0; i < k; ++i) sub[i] = base[idx[i]];
            std::sort(sub.begin(), sub.end());
            if (seen.insert(sub).second) by_max[sub.back()].push_back(sub);
            int i = k - 1;
            while (i >= 0 && idx[i] == span - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return by_max;
}

struct CycleSearch {
    const Hypergraph& host;
    const std::vector<std::vector<std::vector<int>>>& checks;
    uint64_t budget, nodes = 0;
    bool direction_fixed;
    std::vector<int> pos;  // pos[i] = host vertex at position i
    VertexSet used;

    CycleSearch(const Hypergraph& h, const std::vector<std::vector<std::vector<int>>>& c,
                uint64_t b, bool dirfix)
        : host(h), checks(c), budget(b), direction_fixed(dirfix),
          pos(h.n(), -1), used(h.n()) {}

    bool feasible_at(int i) {
        for (const auto& w : checks[i]) {
            Hypergraph::Edge img(w.size());
            for (size_t j = 0; j < w.size(); ++j) img[j] = pos[w[j]];
            std::sort(img.begin(), img.end());
            if (!host.has_edge(img)) return false;
        }
        return true;
    }

    bool extend(int i) {
        if (++nodes > budget) throw BudgetExceeded{};
        int n = host.n();
        if (i == n) return true;
        for (int hv = 0; hv < n; ++hv) {
            if (used.test(hv)) continue;
            if (direction_fixed && i == n - 1 && pos[1] >= 0 && hv < pos[1]) continue;
            pos[i] = hv;
            used.set(hv);
            if (feasible_at(i) && extend(i + 1)) return true;
            used.reset(hv);
            pos[i] = -1;
        }
        return false;
    }
};

CycleResult run_cycle_search(const Hypergraph& host,
                             const std::vector<std::vector<std::vector<int>>>& checks,
                             const CycleOptions& opts, int start_residues) {
    CycleResult res{SearchStatus::absent, {}, 0};
    try {
        if (opts.symmetry_reduction) {
            // Vertex 0 can only be rotated onto positions with its residue
            // modulo the window stride; try each residue class.
            for (int off = 0; off < start_residues; ++off) {
                CycleSearch cs(host, checks, opts.budget - res.nodes, start_residues == 1);
                cs.pos[off] = 0;
                cs.used.set(0);
                bool found;
                if (off == 0) {
                    found = cs.extend(1);
                } else {
                    // fill positions in order, skipping the pinned one
                    struct Helper {
                        CycleSearch& cs;
                        int skip;
                        bool go(int i) {
                            if (i == cs.host.n()) return true;
                            if (i == skip) {
                                if (++cs.nodes > cs.budget) throw BudgetExceeded{};
                                return cs.feasible_at(i) && go(i + 1);
                            }
                            if (++cs.nodes > cs.budget) throw BudgetExceeded{};
                            for (int hv = 0; hv < cs.host.n(); ++hv) {
                                if (cs.used.test(hv)) continue;
                                cs.pos[i] = hv;
                                cs.used.set(hv);
                                if (cs.feasible_at(i) && go(i + 1)) return true;
                                cs.used.reset(hv);
                                cs.pos[i] = -1;
                            }
                            return false;
                        }
                    } helper{cs, off};
                    found = helper.go(0);
                }
                res.nodes += cs.nodes;
                if (found) {
                    res.status = SearchStatus::found;
                    res.certificate.order = cs.pos;
                    return res;
                }
            }
        } else {
            CycleSearch cs(host, checks, opts.budget, false);
            if (cs.extend(0)) {
                res.status = SearchStatus::found;
                res.certificate.order = cs.pos;
            }
            res.nodes = cs.nodes;
        }
    } catch (const BudgetExceeded&) {
        res.status = SearchStatus::timeout;
        res.nodes = opts.budget;
    }
    return res;
}

}  // namespace

CycleResult has_hamilton_ell_cycle(const Hypergraph& host, int ell, const CycleOptions& opts) {
    int k = host.k(), n = host.n();
    if (ell < 1 || ell >= k) throw std::invalid_argument("ell must lie in [1, k-1]");
    if (n % (k - ell) != 0)
        throw std::invalid_argument("has_hamilton_ell_cycle: (k-ell) must divide n");
    auto checks = window_checks_ell(n, k, ell);
    auto res = run_cycle_search(host, checks, opts, opts.symmetry_reduction ? (k - ell) : 1);
    res.certificate.k = k;
    res.certificate.ell = ell;
    return res;
}

CycleResult has_power_tight_hamilton(const Hypergraph& host, int r, const CycleOptions& opts) {
    int k = host.k(), n = host.n();
    if (r < 1) throw std::invalid_argument("r must be >= 1");
    if (n < k + r) throw std::invalid_argument("has_power_tight_hamilton: n < k + r");
    auto checks = window_checks_power(n, k, r);
    auto res = run_cycle_search(host, checks, opts, 1);
    res.certificate.k = k;
    res.certificate.r = r;
    return res;
}

bool verify_ell_cycle(const Hypergraph& host, int ell, const std::vector<int>& order) {
    int k = host.k(), n = host.n();
    if (int(order.size()) != n) return false;
    std::vector<bool> seen(n, false);
    for (int v : order) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = true;
    }
    if (n % (k - ell) != 0) return false;
    for (int s = 0; s < n; s += k - ell) {
        Hypergraph::Edge e(k);
        for (int i = 0; i < k; ++i) e[i] = order[(s + i) % n];
        std::sort(e.begin(), e.end());
        if (!host.has_edge(e)) return false;
    }
    return true;
}

bool verify_power_cycle(const Hypergraph& host, int r, const std::vector<int>& order) {
    int k = host.k(), n = host.n();
    if (int(order.size()) != n) return false;
    std::vector<bool> seen(n, false);
    for (int v : order) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = true;
    }
    int span = k + r - 1;
    for (int s = 0; s < n; ++s) {
        std::vector<int> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            Hypergraph::Edge e(k);
            for (int i = 0; i < k; ++i) e[i] = order[(s + idx[i]) % n];
            std::sort(e.begin(), e.end());
            if (!host.has_edge(e)) return false;
            int i = k - 1;
            while (i >= 0 && idx[i] == span - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return true;
}

}  // namespace perturb
