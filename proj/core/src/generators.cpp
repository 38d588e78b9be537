#include "perturb/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace perturb {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t root, uint64_t a, uint64_t b) {
    uint64_t s = root;
    splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ULL * (a + 1);
    splitmix64(s);
    s ^= 0xc2b2ae3d27d4eb4fULL * (b + 1);
    return splitmix64(s);
}

uint64_t Rng::bounded(uint64_t m) {
    if (m == 0) throw std::invalid_argument("Rng::bounded: m == 0");
    uint64_t threshold = (~m + 1) % m;  // 2^64 mod m
    for (;;) {
        uint64_t r = eng_();
        if (r >= threshold) return r % m;
    }
}

double Rng::real() {
    return double(eng_() >> 11) * 0x1.0p-53;
}

std::vector<int> Rng::sample_without_replacement(int m, int k) {
    if (k > m) throw std::invalid_argument("sample_without_replacement: k > m");
    // Floyd's algorithm.
    std::vector<int> out;
    std::vector<bool> in(m, false);
    for (int j = m - k; j < m; ++j) {
        int t = int(bounded(uint64_t(j) + 1));
        if (in[t]) t = j;
        in[t] = true;
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

uint64_t binomial_coefficient(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    const uint64_t limit = uint64_t(1) << 62;
    uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        uint64_t num = uint64_t(n - k + i);
        if (r > limit / num) throw std::overflow_error("binomial_coefficient: exceeds 2^62");
        r = r * num / uint64_t(i);
    }
    return r;
}

namespace {

// Lexicographic rank <-> k-subset (combinatorial number system, smallest
// element varies slowest).
std::vector<int> unrank_subset(uint64_t rank, int n, int k) {
    std::vector<int> e(k);
    int v = 0;
    for (int i = 0; i < k; ++i) {
        for (;; ++v) {
            uint64_t block = binomial_coefficient(n - v - 1, k - i - 1);
            if (rank < block) break;
            rank -= block;
        }
        e[i] = v++;
    }
    return e;
}

void next_subset(std::vector<int>& e, int n) {
    int k = int(e.size());
    int i = k - 1;
    while (i >= 0 && e[i] == n - k + i) --i;
    if (i < 0) { e.clear(); return; }
    ++e[i];
    for (int j = i + 1; j < k; ++j) e[j] = e[j - 1] + 1;
}

}  // namespace

Hypergraph gen_random_enumerate(int n, int k, double p, uint64_t seed) {
    if (p < 0 || p > 1) throw std::invalid_argument("gen_random: p outside [0,1]");
    std::vector<Hypergraph::Edge> edges;
    if (p > 0) {
        Rng rng(seed);
        std::vector<int> e(k);
        std::iota(e.begin(), e.end(), 0);
        while (!e.empty()) {
            if (rng.coin(p)) edges.push_back(e);
            next_subset(e, n);
        }
    }
    return Hypergraph(k, n, std::move(edges));
}

Hypergraph gen_random_skip(int n, int k, double p, uint64_t seed) {
    if (p < 0 || p > 1) throw std::invalid_argument("gen_random: p outside [0,1]");
    std::vector<Hypergraph::Edge> edges;
    uint64_t total = binomial_coefficient(n, k);
    if (p >= 1.0) return Hypergraph::complete(k, n);
    if (p > 0) {
        Rng rng(seed);
        const double log1mp = std::log1p(-p);
        double idx = -1;
        for (;;) {
            double u = rng.real();
            if (u <= 0) u = 0x1.0p-53;
            idx += 1 + std::floor(std::log(u) / log1mp);
            if (idx >= double(total)) break;
            edges.push_back(unrank_subset(uint64_t(idx), n, k));
        }
    }
    return Hypergraph(k, n, std::move(edges));
}

Hypergraph gen_random(int n, int k, double p, uint64_t seed) {
    uint64_t total = binomial_coefficient(n, k);
    double expected = double(total) * p;
    if (expected > 2e7)
        throw std::invalid_argument("gen_random: expected edge count beyond desk scale");
    if (p < 0.05 && total > 100000)
        return gen_random_skip(n, k, p, seed);
    return gen_random_enumerate(n, k, p, seed);
}

namespace {

double pow_int(double x, int e) {
    double r = 1;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

void assert_density(const Hypergraph& h, double eps, const std::string& name) {
    double need = eps * pow_int(double(h.n()), h.k());
    if (double(h.edge_count()) < need)
        throw std::invalid_argument("gen_family(" + name + "): edge count " +
                                    std::to_string(h.edge_count()) +
                                    " below promised eps*n^k = " + std::to_string(need));
}

}  // namespace

Hypergraph gen_family(const std::string& name, int n, int k, const FamilyParams& params) {
    if (name == "complete") {
        auto h = Hypergraph::complete(k, n);
        assert_density(h, params.eps, name);
        return h;
    }
    if (name == "complete-bipartite") {
        // k-sets meeting both sides of an (alpha n, (1-alpha) n) split.
        int a = int(std::llround(params.alpha * n));
        if (a <= 0 || a >= n) throw std::invalid_argument("complete-bipartite: bad alpha");
        std::vector<Hypergraph::Edge> edges;
        std::vector<int> e(k);
        std::iota(e.begin(), e.end(), 0);
        while (!e.empty()) {
            bool left = e.front() < a, right = e.back() >= a;
            if (left && right) edges.push_back(e);
            next_subset(e, n);
        }
        auto h = Hypergraph(k, n, std::move(edges));
        assert_density(h, params.eps, name);
        return h;
    }
    if (name == "dense-random") {
        uint64_t total = binomial_coefficient(n, k);
        double target = params.eps * pow_int(double(n), k);
        double p = std::min(1.0, 1.25 * target / double(total));
        auto h = gen_random(n, k, p, params.seed);
        assert_density(h, params.eps, name);
        return h;
    }
    if (name == "clique-plus-isolated") {
        int c = params.clique;
        if (c < k || c > n) throw std::invalid_argument("clique-plus-isolated: bad clique size");
        std::vector<Hypergraph::Edge> edges;
        std::vector<int> e(k);
        std::iota(e.begin(), e.end(), 0);
        while (!e.empty()) {
            edges.push_back(e);
            next_subset(e, c);
        }
        auto h = Hypergraph(k, n, std::move(edges));
        assert_density(h, params.eps, name);
        return h;
    }
    if (name == "dense-k-partite") {
        int parts = params.parts > 0 ? params.parts : k;
        if (parts < k) throw std::invalid_argument("dense-k-partite: fewer parts than k");
        // Edges are k-sets with no two vertices in one part; parts are
        // consecutive index ranges of near-equal size.
        std::vector<int> part_of(n);
        for (int v = 0; v < n; ++v) part_of[v] = int((int64_t(v) * parts) / n);
        std::vector<Hypergraph::Edge> edges;
        std::vector<int> e(k);
        std::iota(e.begin(), e.end(), 0);
        while (!e.empty()) {
            bool ok = true;
            for (int i = 1; i < k && ok; ++i)
                for (int j = 0; j < i && ok; ++j)
                    if (part_of[e[i]] == part_of[e[j]]) ok = false;
            if (ok) edges.push_back(e);
            next_subset(e, n);
        }
        auto h = Hypergraph(k, n, std::move(edges));
        assert_density(h, params.eps, name);
        return h;
    }
    throw std::invalid_argument("gen_family: unknown family '" + name + "'");
}

namespace {

Hypergraph path_graph(int n) {
    std::vector<Hypergraph::Edge> e;
    for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    return Hypergraph(2, n, std::move(e));
}

Hypergraph cycle_graph(int n) {
    if (n < 3) throw std::invalid_argument("cycle: n < 3");
    std::vector<Hypergraph::Edge> e;
    for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    return Hypergraph(2, n, std::move(e));
}

Hypergraph matching_graph(int pairs) {
    std::vector<Hypergraph::Edge> e;
    for (int i = 0; i < pairs; ++i) e.push_back({2 * i, 2 * i + 1});
    return Hypergraph(2, 2 * pairs, std::move(e));
}

}  // namespace

Hypergraph named_pattern(const std::string& name) {
    if (name == "edge") return Hypergraph(2, 2, {{0, 1}});
    if (name == "triangle" || name == "k3") return Hypergraph::complete(2, 3);
    if (name == "k4me") {
        return Hypergraph(2, 4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
    }
    if (name.size() > 1 && name[0] == 'k') {
        int n = std::stoi(name.substr(1));
        return Hypergraph::complete(2, n);
    }
    if (name.size() > 1 && name[0] == 'c') return cycle_graph(std::stoi(name.substr(1)));
    if (name.rfind("path", 0) == 0) return path_graph(std::stoi(name.substr(4)));
    if (name.rfind("cycle", 0) == 0) return cycle_graph(std::stoi(name.substr(5)));
    if (name.rfind("matching", 0) == 0) return matching_graph(std::stoi(name.substr(8)));
    throw std::invalid_argument("named_pattern: unknown pattern '" + name + "'");
}

Hypergraph parse_pattern_sum(const std::string& expr) {
    std::vector<Hypergraph> parts;
    size_t pos = 0;
    while (pos < expr.size()) {
        size_t plus = expr.find('+', pos);
        std::string term = expr.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
        pos = plus == std::string::npos ? expr.size() : plus + 1;
        int count = 1;
        size_t star = term.find('*');
        if (star != std::string::npos) {
            count = std::stoi(term.substr(0, star));
            term = term.substr(star + 1);
        }
        for (int i = 0; i < count; ++i) parts.push_back(named_pattern(term));
    }
    if (parts.empty()) throw std::invalid_argument("parse_pattern_sum: empty expression");
    int total = 0;
    for (const auto& p : parts) total += p.n();
    std::vector<Hypergraph::Edge> edges;
    int off = 0;
    for (const auto& p : parts) {
        for (auto e : p.edges()) {
            for (int& v : e) v += off;
            edges.push_back(std::move(e));
        }
        off += p.n();
    }
    return Hypergraph(2, total, std::move(edges));
}

}  // namespace perturb
