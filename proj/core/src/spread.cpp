#include "perturb/spread.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "perturb/cycles.hpp"
#include "perturb/generators.hpp"
#include "perturb/solvers.hpp"
#include "perturb/stats.hpp"

namespace perturb {

namespace {

double pow_int(double x, int e) {
    double r = 1;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

LinkFiltration::LinkFiltration(Hypergraph host, Hypergraph pattern, double eps, int length,
                               bool tight)
    : host_(std::move(host)), pattern_(std::move(pattern)), eps_(eps), length_(length),
      tight_(tight) {}

LinkFiltration LinkFiltration::tight(const Hypergraph& host, double eps) {
    if (eps <= 0) throw std::invalid_argument("LinkFiltration: eps must be positive");
    double need = eps * pow_int(double(host.n()), host.k());
    if (double(host.edge_count()) < need)
        throw std::invalid_argument(
            "LinkFiltration: host density below eps*n^k (" +
            std::to_string(host.edge_count()) + " < " + std::to_string(need) + ")");
    return LinkFiltration(host, Hypergraph(), eps, host.k(), true);
}

LinkFiltration LinkFiltration::ell_path(const Hypergraph& host, int ell, double eps_prime) {
    int k = host.k();
    if (ell < 1 || ell >= k) throw std::invalid_argument("LinkFiltration: ell outside [1, k-1]");
    Hypergraph q = build_ell_path(k, ell, ceil_div(k, k - ell));
    if (eps_prime <= 0) {
        // Calibrate from the exact labelled copy count; the cardinality
        // floors below then hold with this constant by the counting argument.
        uint64_t copies = count_labelled_copies(host, q);
        if (copies == 0)
            throw std::invalid_argument("LinkFiltration: host has no copy of the ell-path");
        eps_prime = double(copies) / pow_int(double(host.n()), q.n());
    }
    return LinkFiltration(host, std::move(q), eps_prime, 0, false);
}

double LinkFiltration::level_threshold(int level) const {
    int len = chain_length();
    double n = double(host_.n());
    return eps_ * pow_int(n, len - level) / pow_int(2.0, level);
}

double LinkFiltration::step_floor() const {
    return eps_ * double(host_.n()) / pow_int(2.0, chain_length() + 1);
}

const std::vector<int>& LinkFiltration::level_set(const std::vector<int>& prefix) const {
    int len = chain_length();
    int level = int(prefix.size()) + 1;
    if (level > len) throw std::invalid_argument("level_set: prefix already complete");
    auto it = memo_.find(prefix);
    if (it != memo_.end()) return it->second;

    const int n = host_.n();
    std::vector<double> score(n, 0.0);
    if (tight_) {
        // score[y] = co-degree of prefix + y (1/0 for a full k-set).
        for (const auto& e : host_.edges()) {
            bool contains = true;
            for (int v : prefix)
                if (!std::binary_search(e.begin(), e.end(), v)) { contains = false; break; }
            if (!contains) continue;
            for (int y : e)
                if (std::find(prefix.begin(), prefix.end(), y) == prefix.end()) score[y] += 1.0;
        }
    } else {
        // score[y] = labelled copies of the path pattern with the first
        // level+1 vertices pinned to prefix + y.
        for (int y = 0; y < n; ++y) {
            if (std::find(prefix.begin(), prefix.end(), y) != prefix.end()) continue;
            EmbedOptions opts;
            for (int i = 0; i < int(prefix.size()); ++i) opts.pins.push_back({i, prefix[i]});
            opts.pins.push_back({level - 1, y});
            score[y] = double(count_labelled_copies(host_, pattern_, opts));
        }
    }

    std::vector<int> out;
    double threshold = level_threshold(level);
    for (int y = 0; y < n; ++y)
        if (score[y] >= threshold) out.push_back(y);

    // The counting floor from the proofs; with the calibrated constant this
    // can only fail on an invalid prefix.
    double floor = eps_ * double(n) / pow_int(2.0, level);
    if (double(out.size()) < floor - 1e-9)
        throw std::logic_error("LinkFiltration: level " + std::to_string(level) + " has " +
                               std::to_string(out.size()) + " candidates, below " +
                               std::to_string(floor));
    return memo_.emplace(prefix, std::move(out)).first->second;
}

int LinkFiltration::chain_length() const { return tight_ ? length_ : pattern_.n(); }

AnchoredSample sample_anchored_embedding(const LinkFiltration& filt, int big_m, uint64_t seed) {
    const int n = filt.host().n();
    const int len = filt.chain_length();
    if (big_m < 1) throw std::invalid_argument("sample_anchored_embedding: M must be positive");

    Rng rng(seed);
    AnchoredSample sample;
    sample.image.assign(n, -1);
    std::vector<bool> host_used(n, false);

    int blocks = n / big_m;
    if (blocks > 0 && len > big_m)
        throw std::invalid_argument("sample_anchored_embedding: chain longer than block stride");
    const double floor = filt.step_floor();

    for (int j = 0; j < blocks; ++j) {
        std::vector<int> chain;
        for (int step = 1; step <= len; ++step) {
            const auto& level = filt.level_set(chain);
            std::vector<int> avail;
            avail.reserve(level.size());
            for (int y : level)
                if (!host_used[y]) avail.push_back(y);
            sample.trace.push_back(EmbeddingTraceStep{j, step, int(avail.size())});
            if (double(avail.size()) < floor - 1e-9)
                throw std::runtime_error(
                    "sample_anchored_embedding: block " + std::to_string(j) + " level " +
                    std::to_string(step) + " has " + std::to_string(avail.size()) +
                    " candidates, below the floor " + std::to_string(floor) +
                    " (n, M, eps preconditions violated)");
            int y = avail[rng.bounded(avail.size())];
            chain.push_back(y);
            host_used[y] = true;
            sample.image[j * big_m + step - 1] = y;
        }
    }

    std::vector<int> rest_hosts;
    for (int y = 0; y < n; ++y)
        if (!host_used[y]) rest_hosts.push_back(y);
    rng.shuffle(rest_hosts);
    int idx = 0;
    for (int pos = 0; pos < n; ++pos)
        if (sample.image[pos] < 0) sample.image[pos] = rest_hosts[idx++];
    return sample;
}

std::vector<Hypergraph::Edge> image_of_structure(const Hypergraph& structure,
                                                 const std::vector<int>& image) {
    std::vector<Hypergraph::Edge> out;
    out.reserve(structure.edge_count());
    for (const auto& e : structure.edges()) {
        Hypergraph::Edge img(e.size());
        for (size_t i = 0; i < e.size(); ++i) img[i] = image[e[i]];
        std::sort(img.begin(), img.end());
        out.push_back(std::move(img));
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void finalize_probe(SpreadProbe& p, uint64_t trials, double bound, double confidence) {
    p.freq = trials ? double(p.hits) / double(trials) : 0.0;
    BinomialCI ci = clopper_pearson(p.hits, trials, confidence);
    p.cp_lo = ci.lo;
    p.cp_hi = ci.hi;
    p.flagged = p.cp_lo > bound;
}

}  // namespace

SpreadReport estimate_vertex_spread(
    const InjectionSampler& sampler, int positions, int host_n, int s, uint64_t trials,
    uint64_t seed, double q, double confidence,
    const std::vector<std::pair<std::vector<int>, std::vector<int>>>* pair_probes) {
    if (s != 1 && s != 2) throw std::invalid_argument("estimate_vertex_spread: s must be 1 or 2");
    if (s == 2 && !pair_probes)
        throw std::invalid_argument("estimate_vertex_spread: s = 2 needs explicit probes");

    SpreadReport report;
    report.trials = trials;
    report.s = s;
    report.q = q;
    report.bound = s == 1 ? q : q * q;
    report.confidence = confidence;

    if (s == 1) {
        std::vector<uint64_t> counts(size_t(positions) * host_n, 0);
        for (uint64_t t = 0; t < trials; ++t) {
            auto image = sampler(derive_seed(seed, t));
            for (int x = 0; x < positions; ++x) ++counts[size_t(x) * host_n + image[x]];
        }
        uint64_t max_hits = 0;
        int max_x = 0, max_y = 0;
        for (int x = 0; x < positions; ++x)
            for (int y = 0; y < host_n; ++y) {
                uint64_t h = counts[size_t(x) * host_n + y];
                if (h > max_hits) { max_hits = h; max_x = x; max_y = y; }
            }
        // Keep the maximum and everything that even nominally exceeds the
        // bound; the full matrix is unhelpful in a report.
        for (int x = 0; x < positions; ++x)
            for (int y = 0; y < host_n; ++y) {
                uint64_t h = counts[size_t(x) * host_n + y];
                bool is_max = (x == max_x && y == max_y);
                if (!is_max && double(h) <= report.bound * double(trials)) continue;
                SpreadProbe p;
                p.xs = {x};
                p.ys = {y};
                p.hits = h;
                finalize_probe(p, trials, report.bound, confidence);
                report.probes.push_back(std::move(p));
            }
    } else {
        report.probes.reserve(pair_probes->size());
        for (const auto& [xs, ys] : *pair_probes) {
            SpreadProbe p;
            p.xs = xs;
            p.ys = ys;
            report.probes.push_back(std::move(p));
        }
        for (uint64_t t = 0; t < trials; ++t) {
            auto image = sampler(derive_seed(seed, t));
            for (auto& p : report.probes) {
                bool all = true;
                for (size_t i = 0; i < p.xs.size() && all; ++i)
                    if (image[p.xs[i]] != p.ys[i]) all = false;
                if (all) ++p.hits;
            }
        }
        for (auto& p : report.probes) finalize_probe(p, trials, report.bound, confidence);
    }

    for (const auto& p : report.probes) {
        report.max_freq = std::max(report.max_freq, p.freq);
        report.any_flagged = report.any_flagged || p.flagged;
    }
    return report;
}

SpreadReport estimate_edge_spread(const SubgraphSampler& sampler,
                                  const std::vector<std::vector<Hypergraph::Edge>>& probes,
                                  uint64_t trials, uint64_t seed, double q, double confidence) {
    SpreadReport report;
    report.trials = trials;
    report.s = 0;  // per-probe exponent varies; bound computed per probe
    report.q = q;
    report.confidence = confidence;

    report.probes.reserve(probes.size());
    for (const auto& pe : probes) {
        SpreadProbe p;
        p.edge_probe = pe;
        for (auto& e : p.edge_probe) std::sort(e.begin(), e.end());
        report.probes.push_back(std::move(p));
    }
    for (uint64_t t = 0; t < trials; ++t) {
        auto edges = sampler(derive_seed(seed, t));  // sorted by contract
        for (auto& p : report.probes) {
            bool all = true;
            for (const auto& e : p.edge_probe)
                if (!std::binary_search(edges.begin(), edges.end(), e)) { all = false; break; }
            if (all) ++p.hits;
        }
    }
    for (auto& p : report.probes) {
        double bound = pow_int(q, int(p.edge_probe.size()));
        finalize_probe(p, trials, bound, confidence);
        report.max_freq = std::max(report.max_freq, p.freq);
        report.any_flagged = report.any_flagged || p.flagged;
        report.bound = bound;  // last probe's bound; per-probe in the JSON
    }
    return report;
}

std::string to_json(const SpreadReport& report) {
    nlohmann::json j;
    j["trials"] = report.trials;
    j["s"] = report.s;
    j["q"] = report.q;
    j["bound"] = report.bound;
    j["confidence"] = report.confidence;
    j["max_freq"] = report.max_freq;
    j["any_flagged"] = report.any_flagged;
    j["probes"] = nlohmann::json::array();
    for (const auto& p : report.probes) {
        nlohmann::json pj;
        if (!p.xs.empty()) {
            pj["xs"] = p.xs;
            pj["ys"] = p.ys;
        }
        if (!p.edge_probe.empty()) pj["edges"] = p.edge_probe;
        pj["hits"] = p.hits;
        pj["freq"] = p.freq;
        pj["cp_lo"] = p.cp_lo;
        pj["cp_hi"] = p.cp_hi;
        pj["flagged"] = p.flagged;
        j["probes"].push_back(std::move(pj));
    }
    return j.dump();
}

}  // namespace perturb
