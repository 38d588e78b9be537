#include "perturb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "perturb/cycles.hpp"
#include "perturb/density.hpp"
#include "perturb/spread.hpp"
#include "perturb/stats.hpp"

namespace perturb {

double multi_round_split(double p, int rounds) {
    if (rounds < 2) throw std::invalid_argument("multi_round_split: rounds must be >= 2");
    if (p < 0 || p > 1) throw std::invalid_argument("multi_round_split: p outside [0, 1]");
    if (p == 0) return 0;
    if (p == 1) return 1;
    double pr = 1.0 - std::pow(1.0 - p, 1.0 / rounds);
    if (!(pr > p / rounds))
        throw std::logic_error("multi_round_split: p' <= p/rounds");
    return pr;
}

// --- config -----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: bad boolean '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw std::invalid_argument("config: bad section at line " + std::to_string(lineno));
            section = t.substr(1, t.size() - 2);
            if (section != "experiment")
                throw std::invalid_argument("config: unknown section [" + section + "]");
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));

        if (key == "theorem") cfg.theorem = val;
        else if (key == "family") cfg.family = val;
        else if (key == "alpha") cfg.alpha = std::stod(val);
        else if (key == "eps") cfg.eps = std::stod(val);
        else if (key == "clique") cfg.clique = std::stoi(val);
        else if (key == "k") cfg.k = std::stoi(val);
        else if (key == "ell") cfg.ell = std::stoi(val);
        else if (key == "r") cfg.r = std::stoi(val);
        else if (key == "pattern") cfg.pattern = val;
        else if (key == "spanning") cfg.spanning = val;
        else if (key == "delta") cfg.delta = std::stoi(val);
        else if (key == "n") {
            for (const auto& s : split_ws(val)) cfg.n_grid.push_back(std::stoi(s));
        } else if (key == "c") {
            for (const auto& s : split_ws(val)) cfg.c_grid.push_back(std::stod(s));
        } else if (key == "exponent") cfg.exponent = std::stod(val);
        else if (key == "p_extra") {
            for (const auto& s : split_ws(val)) cfg.p_extra.push_back(std::stod(s));
        } else if (key == "trials") cfg.trials = std::stoi(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "budget") cfg.budget = std::stoull(val);
        else if (key == "threads") cfg.threads = std::stoi(val);
        else if (key == "spread_compare") cfg.spread_compare = parse_bool(val);
        else if (key == "M") cfg.big_m = std::stoi(val);
        else if (key == "out") cfg.out_dir = val;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    if (cfg.theorem.empty()) throw std::invalid_argument("config: theorem not set");
    if (cfg.n_grid.empty()) throw std::invalid_argument("config: empty n grid");
    if (cfg.trials < 1) throw std::invalid_argument("config: trials < 1");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

Hypergraph load_pattern(const std::string& spec) {
    if (!spec.empty() && spec[0] == '@') return read_edge_list_file(spec.substr(1));
    return named_pattern(spec);
}

long long binom_ll(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

double theorem_exponent(const ExperimentConfig& cfg) {
    if (cfg.exponent != 0) return cfg.exponent;
    if (cfg.theorem == "factor") {
        Hypergraph f = load_pattern(cfg.pattern);
        DensityReport dm = m1(f);
        return -double(dm.value.denominator()) / double(dm.value.numerator());
    }
    if (cfg.theorem == "bounded") {
        int delta = cfg.delta;
        if (delta == 0) {
            Hypergraph f = parse_pattern_sum(cfg.spanning);
            for (int v = 0; v < f.n(); ++v) delta = std::max(delta, f.vertex_degree(v));
        }
        return -2.0 / (delta + 1);
    }
    if (cfg.theorem == "ell-cycle") return -double(cfg.k - cfg.ell);
    if (cfg.theorem == "power") return -1.0 / double(binom_ll(cfg.k + cfg.r - 2, cfg.k - 1));
    throw std::invalid_argument("unknown theorem tag '" + cfg.theorem + "'");
}

// --- trial execution -----------------------------------------------------------

namespace {

struct Cell {
    int n;
    double p;
    double c;  // -1 for p_extra entries
    int index;
};

uint64_t family_seed(const ExperimentConfig& cfg, int n) {
    return derive_seed(cfg.seed, uint64_t(n), 0xfa111ULL);
}

Hypergraph build_family(const ExperimentConfig& cfg, int n) {
    FamilyParams params;
    params.alpha = cfg.alpha;
    params.eps = cfg.eps;
    params.clique = cfg.clique;
    params.seed = family_seed(cfg, n);
    return gen_family(cfg.family, n, cfg.k, params);
}

std::string factor_cert_json(const FactorCertificate& cert) {
    nlohmann::json j;
    j["blocks"] = nlohmann::json::array();
    for (const auto& b : cert.blocks)
        j["blocks"].push_back({{"v", b.host_vertices}, {"iso", b.iso}});
    return j.dump();
}

std::string cycle_cert_json(const CycleCertificate& cert) {
    nlohmann::json j;
    j["order"] = cert.order;
    return j.dump();
}

struct TrialContext {
    const ExperimentConfig& cfg;
    const Hypergraph* base;        // dense part (factor / cycles)
    const Hypergraph* pattern;     // factor F
    // bounded decomposition
    const Hypergraph* spanning = nullptr;
    const Hypergraph* clique = nullptr;       // K_{delta+1}
    const Hypergraph* remainder = nullptr;    // F' on its own vertex set
    int num_cliques = 0;
    // cycle spread pipeline
    const ReducedCycle* reduced = nullptr;
    const LinkFiltration* filtration = nullptr;
};

void run_factor_trial(const TrialContext& ctx, TrialRecord& rec) {
    Hypergraph random_part = gen_random(rec.n, ctx.cfg.k, rec.p, rec.seed);
    Hypergraph host = union_of(*ctx.base, random_part);
    FactorResult res = has_factor(host, *ctx.pattern, ctx.cfg.budget);
    rec.status = res.status;
    rec.solver_nodes = res.nodes;
    if (res.status == SearchStatus::found) {
        if (!verify_factor(host, *ctx.pattern, res.certificate))
            throw std::logic_error("factor trial: certificate failed re-verification");
        rec.certificate_json = factor_cert_json(res.certificate);
        rec.cert_hash = certificate_hash(rec.certificate_json);
    }
}

void run_cycle_trial(const TrialContext& ctx, TrialRecord& rec, bool power) {
    Hypergraph random_part = gen_random(rec.n, ctx.cfg.k, rec.p, rec.seed);
    Hypergraph host = union_of(*ctx.base, random_part);
    CycleOptions opts;
    opts.budget = ctx.cfg.budget;
    CycleResult res = power ? has_power_tight_hamilton(host, ctx.cfg.r, opts)
                            : has_hamilton_ell_cycle(host, ctx.cfg.ell, opts);
    rec.status = res.status;
    rec.solver_nodes = res.nodes;
    if (res.status == SearchStatus::found) {
        bool ok = power ? verify_power_cycle(host, ctx.cfg.r, res.certificate.order)
                        : verify_ell_cycle(host, ctx.cfg.ell, res.certificate.order);
        if (!ok) throw std::logic_error("cycle trial: certificate failed re-verification");
        rec.certificate_json = cycle_cert_json(res.certificate);
        rec.cert_hash = certificate_hash(rec.certificate_json);
    }
    if (ctx.reduced && ctx.filtration) {
        AnchoredSample sample =
            sample_anchored_embedding(*ctx.filtration, ctx.reduced->big_m, derive_seed(rec.seed, 3));
        auto residual_edges = image_of_structure(ctx.reduced->residual, sample.image);
        bool hit = true;
        for (const auto& e : residual_edges)
            if (!random_part.has_edge(e)) { hit = false; break; }
        rec.spread_residual_hit = hit;
    }
}

void run_bounded_trial(const TrialContext& ctx, TrialRecord& rec) {
    const ExperimentConfig& cfg = ctx.cfg;
    const int n = rec.n;
    const int delta_plus_1 = ctx.clique->n();
    double pr = multi_round_split(rec.p, 2);
    Hypergraph g1 = gen_random(n, 2, pr, derive_seed(rec.seed, 1));
    Hypergraph g2 = gen_random(n, 2, pr, derive_seed(rec.seed, 2));

    const double gamma = 0.1;
    bool case_a = double(ctx.num_cliques * delta_plus_1) <= (1.0 - gamma) * n;
    rec.branch = case_a ? "A" : "B";
    nlohmann::json cert;
    cert["branch"] = rec.branch;

    if (case_a) {
        // Clique copies from the first round, the remainder spans the rest of
        // the second round.
        GreedyCover cover = greedy_cover(g1, *ctx.clique, VertexSet(n), cfg.budget);
        if (int(cover.partial.blocks.size()) < ctx.num_cliques) {
            rec.status = SearchStatus::absent;
            return;
        }
        VertexSet used(n);
        nlohmann::json blocks = nlohmann::json::array();
        for (int i = 0; i < ctx.num_cliques; ++i) {
            const auto& b = cover.partial.blocks[i];
            for (int v : b.host_vertices) used.set(v);
            blocks.push_back({{"v", b.host_vertices}, {"iso", b.iso}});
        }
        cert["clique_blocks"] = std::move(blocks);
        if (ctx.remainder->n() > 0) {
            EmbedOptions opts;
            opts.budget = cfg.budget;
            VertexSet allowed = VertexSet::full(n) - used;
            opts.allowed = &allowed;
            EmbeddingResult emb = find_embedding(g2, *ctx.remainder, opts);
            rec.status = emb.status;
            rec.solver_nodes = emb.nodes;
            if (emb.status != SearchStatus::found) return;
            cert["remainder_map"] = emb.map;
        } else {
            rec.status = SearchStatus::found;
        }
    } else {
        // Remainder from the first round, then a clique factor on the rest of
        // the dense graph plus the second round.
        EmbedOptions opts;
        opts.budget = cfg.budget;
        EmbeddingResult emb = find_embedding(g1, *ctx.remainder, opts);
        rec.solver_nodes = emb.nodes;
        if (emb.status != SearchStatus::found) {
            rec.status = emb.status;
            return;
        }
        cert["remainder_map"] = emb.map;
        VertexSet keep = VertexSet::full(n);
        for (int v : emb.map) keep.reset(v);
        auto sub = induced(union_of(*ctx.base, g2), keep);
        FactorResult res = has_factor(sub.graph, *ctx.clique, cfg.budget);
        rec.status = res.status;
        rec.solver_nodes += res.nodes;
        if (res.status != SearchStatus::found) return;
        nlohmann::json blocks = nlohmann::json::array();
        for (auto blk : res.certificate.blocks) {
            for (int& v : blk.host_vertices) v = sub.vertex_map[v];
            for (int& v : blk.iso) v = sub.vertex_map[v];
            std::sort(blk.host_vertices.begin(), blk.host_vertices.end());
            blocks.push_back({{"v", blk.host_vertices}, {"iso", blk.iso}});
        }
        cert["clique_blocks"] = std::move(blocks);
    }
    if (rec.status == SearchStatus::found) {
        rec.certificate_json = cert.dump();
        rec.cert_hash = certificate_hash(rec.certificate_json);
    }
}

}  // namespace

uint64_t certificate_hash(const std::string& json) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : json) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
    const bool is_factor = cfg.theorem == "factor";
    const bool is_bounded = cfg.theorem == "bounded";
    const bool is_ell = cfg.theorem == "ell-cycle";
    const bool is_power = cfg.theorem == "power";
    if (!is_factor && !is_bounded && !is_ell && !is_power)
        throw std::invalid_argument("run_experiment: unknown theorem '" + cfg.theorem + "'");

    // Per-n immutable context, shared across trials.
    struct PerN {
        Hypergraph base, pattern, spanning, clique, remainder;
        std::unique_ptr<ReducedCycle> reduced;
        std::unique_ptr<LinkFiltration> filtration;
        int num_cliques = 0;
    };
    std::map<int, PerN> per_n;
    double expo = (is_bounded || is_factor || is_ell || is_power) ? theorem_exponent(cfg) : 0;

    for (int n : cfg.n_grid) {
        PerN ctx;
        if (is_factor) {
            ctx.pattern = load_pattern(cfg.pattern);
            DensityReport dm = m1(ctx.pattern);
            if (dm.value <= Rational(1))
                throw std::invalid_argument("run_experiment: factor pattern must not be a forest");
            if (n % ctx.pattern.n() != 0)
                throw std::invalid_argument("run_experiment: v_F must divide n");
            ctx.base = build_family(cfg, n);
        } else if (is_bounded) {
            ctx.spanning = parse_pattern_sum(cfg.spanning);
            if (ctx.spanning.n() != n)
                throw std::invalid_argument("run_experiment: spanning graph order must equal n");
            int delta = cfg.delta;
            if (delta == 0)
                for (int v = 0; v < ctx.spanning.n(); ++v)
                    delta = std::max(delta, ctx.spanning.vertex_degree(v));
            ctx.clique = Hypergraph::complete(2, delta + 1);
            // Greedily delete clique copies to split F = l K_{delta+1} u F'.
            VertexSet remaining = VertexSet::full(n);
            while (true) {
                EmbedOptions opts;
                opts.allowed = &remaining;
                EmbeddingResult emb = find_embedding(ctx.spanning, ctx.clique, opts);
                if (emb.status != SearchStatus::found) break;
                for (int v : emb.map) remaining.reset(v);
                ++ctx.num_cliques;
            }
            ctx.remainder = induced(ctx.spanning, remaining).graph;
            ctx.base = build_family(cfg, n);
        } else {
            ctx.base = build_family(cfg, n);
            if (is_ell && n % (cfg.k - cfg.ell) != 0)
                throw std::invalid_argument("run_experiment: (k-ell) must divide n");
            if (cfg.spread_compare && cfg.big_m > 0 && n >= 2 * cfg.big_m) {
                if (is_ell) {
                    ctx.reduced = std::make_unique<ReducedCycle>(
                        build_reduced_hc_ell(n, cfg.k, cfg.ell, cfg.big_m));
                    ctx.filtration = std::make_unique<LinkFiltration>(
                        LinkFiltration::ell_path(ctx.base, cfg.ell));
                } else {
                    ctx.reduced = std::make_unique<ReducedCycle>(
                        build_reduced_hc_power(n, cfg.k, cfg.r, cfg.big_m));
                    ctx.filtration = std::make_unique<LinkFiltration>(
                        LinkFiltration::tight(ctx.base, cfg.eps));
                }
            }
        }
        per_n.emplace(n, std::move(ctx));
    }

    // Cells: n major, p ascending.
    std::vector<Cell> cells;
    for (int n : cfg.n_grid) {
        std::set<double> ps(cfg.p_extra.begin(), cfg.p_extra.end());
        for (double c : cfg.c_grid) {
            double p = std::min(1.0, std::max(0.0, c * std::pow(double(n), expo)));
            ps.insert(p);
        }
        for (double p : ps) {
            Cell cell;
            cell.n = n;
            cell.p = p;
            cell.c = -1;
            for (double c : cfg.c_grid)
                if (std::abs(c * std::pow(double(n), expo) - p) < 1e-15) cell.c = c;
            cell.index = int(cells.size());
            cells.push_back(cell);
        }
    }

    std::vector<TrialRecord> records(cells.size() * size_t(cfg.trials));
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (!failed.load()) {
            size_t task = next.fetch_add(1);
            if (task >= records.size()) break;
            const Cell& cell = cells[task / cfg.trials];
            int trial = int(task % cfg.trials);
            TrialRecord& rec = records[task];
            rec.theorem = cfg.theorem;
            rec.family = cfg.family;
            rec.n = cell.n;
            rec.k = cfg.k;
            rec.ell = is_ell ? cfg.ell : 0;
            rec.r = is_power ? cfg.r : 0;
            rec.p = cell.p;
            rec.c = cell.c;
            rec.cell_index = cell.index;
            rec.trial_index = trial;
            rec.seed = derive_seed(cfg.seed, uint64_t(cell.index), uint64_t(trial));
            const PerN& ctx_n = per_n.at(cell.n);
            TrialContext tctx{cfg, &ctx_n.base, &ctx_n.pattern,
                              &ctx_n.spanning, &ctx_n.clique, &ctx_n.remainder,
                              ctx_n.num_cliques, ctx_n.reduced.get(), ctx_n.filtration.get()};
            auto start = std::chrono::steady_clock::now();
            try {
                if (is_factor) run_factor_trial(tctx, rec);
                else if (is_bounded) run_bounded_trial(tctx, rec);
                else run_cycle_trial(tctx, rec, is_power);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error_message = e.what();
                failed.store(true);
                return;
            }
            rec.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start).count();
        }
    };

    int nthreads = cfg.threads > 0 ? cfg.threads : int(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, int(records.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) throw std::runtime_error("run_experiment: " + error_message);
    return records;
}

// --- aggregation and emission ------------------------------------------------------

std::vector<CellAggregate> aggregate(const std::vector<TrialRecord>& records) {
    std::map<std::tuple<std::string, std::string, int, int, int, int, double>, CellAggregate> cells;
    for (const auto& rec : records) {
        auto key = std::tuple(rec.theorem, rec.family, rec.n, rec.k, rec.ell, rec.r, rec.p);
        auto& cell = cells[key];
        cell.theorem = rec.theorem;
        cell.family = rec.family;
        cell.n = rec.n;
        cell.k = rec.k;
        cell.ell = rec.ell;
        cell.r = rec.r;
        cell.p = rec.p;
        ++cell.trials;
        switch (rec.status) {
            case SearchStatus::found: ++cell.found; break;
            case SearchStatus::absent: ++cell.absent; break;
            case SearchStatus::timeout: ++cell.timeout; break;
        }
    }
    std::vector<CellAggregate> out;
    for (auto& [key, cell] : cells) {
        uint64_t denom = cell.found + cell.absent;  // timeouts are censored
        if (denom > 0) {
            cell.freq = double(cell.found) / double(denom);
            BinomialCI ci = clopper_pearson(cell.found, denom, 0.95);
            cell.ci_lo = ci.lo;
            cell.ci_hi = ci.hi;
        } else {
            cell.freq = 0;
            cell.ci_lo = 0;
            cell.ci_hi = 1;
        }
        out.push_back(cell);
    }
    return out;
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

std::string results_csv(const std::vector<CellAggregate>& cells) {
    std::string out = "theorem,family,n,k,ell,r,p,trials,found,absent,timeout,freq,ci_lo,ci_hi\n";
    for (const auto& c : cells) {
        out += c.theorem + "," + c.family + "," + std::to_string(c.n) + "," +
               std::to_string(c.k) + "," + std::to_string(c.ell) + "," + std::to_string(c.r) +
               "," + fmt("%.10g", c.p) + "," + std::to_string(c.trials) + "," +
               std::to_string(c.found) + "," + std::to_string(c.absent) + "," +
               std::to_string(c.timeout) + "," + fmt("%.6f", c.freq) + "," +
               fmt("%.6f", c.ci_lo) + "," + fmt("%.6f", c.ci_hi) + "\n";
    }
    return out;
}

std::vector<CellAggregate> parse_results_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("results csv: empty");
    std::vector<CellAggregate> out;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> parts;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) parts.push_back(tok);
        if (parts.size() != 14) throw std::runtime_error("results csv: bad row '" + line + "'");
        CellAggregate c;
        c.theorem = parts[0];
        c.family = parts[1];
        c.n = std::stoi(parts[2]);
        c.k = std::stoi(parts[3]);
        c.ell = std::stoi(parts[4]);
        c.r = std::stoi(parts[5]);
        c.p = std::stod(parts[6]);
        c.trials = std::stoull(parts[7]);
        c.found = std::stoull(parts[8]);
        c.absent = std::stoull(parts[9]);
        c.timeout = std::stoull(parts[10]);
        c.freq = std::stod(parts[11]);
        c.ci_lo = std::stod(parts[12]);
        c.ci_hi = std::stod(parts[13]);
        out.push_back(std::move(c));
    }
    return out;
}

void write_results_csv(const std::string& path, const std::vector<CellAggregate>& cells) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << results_csv(cells);
}

void write_trials_jsonl(const std::string& path, const std::vector<TrialRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& rec : records) {
        nlohmann::json j;
        j["theorem"] = rec.theorem;
        j["family"] = rec.family;
        j["n"] = rec.n;
        j["k"] = rec.k;
        j["ell"] = rec.ell;
        j["r"] = rec.r;
        j["p"] = rec.p;
        j["c"] = rec.c;
        j["cell"] = rec.cell_index;
        j["trial"] = rec.trial_index;
        j["seed"] = rec.seed;
        j["status"] = to_string(rec.status);
        j["nodes"] = rec.solver_nodes;
        j["wall_ms"] = rec.wall_ms;
        if (rec.cert_hash) j["cert_hash"] = rec.cert_hash;
        if (!rec.certificate_json.empty())
            j["certificate"] = nlohmann::json::parse(rec.certificate_json);
        if (!rec.branch.empty()) j["branch"] = rec.branch;
        if (rec.spread_residual_hit.has_value()) j["spread_residual_hit"] = *rec.spread_residual_hit;
        out << j.dump() << "\n";
    }
}

std::string plot_svg(const std::vector<CellAggregate>& cells) {
    const int W = 640, H = 480, ML = 60, MR = 160, MT = 30, MB = 50;
    const double PW = W - ML - MR, PH = H - MT - MB;
    double pmax = 1e-9;
    std::set<int> ns;
    for (const auto& c : cells) {
        pmax = std::max(pmax, c.p);
        ns.insert(c.n);
    }
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                             "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    auto xpix = [&](double p) { return ML + PW * (p / pmax); };
    auto ypix = [&](double f) { return MT + PH * (1.0 - f); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    // axes
    svg << "<line x1=\"" << ML << "\" y1=\"" << MT + PH << "\" x2=\"" << ML + PW << "\" y2=\""
        << MT + PH << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << MT + PH
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double f = i / 5.0;
        svg << "<text x=\"" << ML - 8 << "\" y=\"" << ypix(f) + 4
            << "\" text-anchor=\"end\">" << fmt("%.1f", f) << "</text>\n";
        double p = pmax * f;
        svg << "<text x=\"" << xpix(p) << "\" y=\"" << MT + PH + 18
            << "\" text-anchor=\"middle\">" << fmt("%.3g", p) << "</text>\n";
    }
    svg << "<text x=\"" << ML + PW / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\">p</text>\n";
    svg << "<text x=\"16\" y=\"" << MT + PH / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << MT + PH / 2
        << ")\">success frequency</text>\n";

    int color_idx = 0;
    for (int n : ns) {
        const char* color = palette[color_idx % 8];
        std::vector<const CellAggregate*> row;
        for (const auto& c : cells)
            if (c.n == n) row.push_back(&c);
        std::sort(row.begin(), row.end(),
                  [](const CellAggregate* a, const CellAggregate* b) { return a->p < b->p; });
        std::ostringstream pts;
        for (const auto* c : row) pts << fmt("%.2f", xpix(c->p)) << "," << fmt("%.2f", ypix(c->freq)) << " ";
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
            << pts.str() << "\"/>\n";
        for (const auto* c : row) {
            svg << "<line x1=\"" << fmt("%.2f", xpix(c->p)) << "\" y1=\"" << fmt("%.2f", ypix(c->ci_lo))
                << "\" x2=\"" << fmt("%.2f", xpix(c->p)) << "\" y2=\"" << fmt("%.2f", ypix(c->ci_hi))
                << "\" stroke=\"" << color << "\" stroke-width=\"0.8\"/>\n";
            svg << "<circle cx=\"" << fmt("%.2f", xpix(c->p)) << "\" cy=\"" << fmt("%.2f", ypix(c->freq))
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
        svg << "<text x=\"" << ML + PW + 12 << "\" y=\"" << MT + 16 + 18 * color_idx
            << "\" fill=\"" << color << "\">n = " << n << "</text>\n";
        ++color_idx;
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_plot_svg(const std::string& path, const std::vector<CellAggregate>& cells) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << plot_svg(cells);
}

bool reverify_trial(const ExperimentConfig& cfg, const TrialRecord& rec) {
    if (rec.status != SearchStatus::found) return true;
    if (rec.certificate_json.empty()) return false;
    nlohmann::json cert = nlohmann::json::parse(rec.certificate_json);

    FamilyParams params;
    params.alpha = cfg.alpha;
    params.eps = cfg.eps;
    params.clique = cfg.clique;
    params.seed = family_seed(cfg, rec.n);

    if (rec.theorem == "factor") {
        Hypergraph base = gen_family(cfg.family, rec.n, cfg.k, params);
        Hypergraph host = union_of(base, gen_random(rec.n, cfg.k, rec.p, rec.seed));
        Hypergraph pattern = load_pattern(cfg.pattern);
        FactorCertificate fc;
        for (const auto& b : cert["blocks"]) {
            FactorBlock blk;
            blk.host_vertices = b["v"].get<std::vector<int>>();
            blk.iso = b["iso"].get<std::vector<int>>();
            fc.blocks.push_back(std::move(blk));
        }
        return verify_factor(host, pattern, fc);
    }
    if (rec.theorem == "ell-cycle" || rec.theorem == "power") {
        Hypergraph base = gen_family(cfg.family, rec.n, cfg.k, params);
        Hypergraph host = union_of(base, gen_random(rec.n, cfg.k, rec.p, rec.seed));
        std::vector<int> order = cert["order"].get<std::vector<int>>();
        return rec.theorem == "power" ? verify_power_cycle(host, cfg.r, order)
                                      : verify_ell_cycle(host, cfg.ell, order);
    }
    if (rec.theorem == "bounded") {
        double pr = multi_round_split(rec.p, 2);
        Hypergraph g1 = gen_random(rec.n, 2, pr, derive_seed(rec.seed, 1));
        Hypergraph g2 = gen_random(rec.n, 2, pr, derive_seed(rec.seed, 2));
        Hypergraph base = gen_family(cfg.family, rec.n, 2, params);
        Hypergraph spanning = parse_pattern_sum(cfg.spanning);
        int delta = cfg.delta;
        if (delta == 0)
            for (int v = 0; v < spanning.n(); ++v)
                delta = std::max(delta, spanning.vertex_degree(v));
        Hypergraph clique = Hypergraph::complete(2, delta + 1);

        std::string branch = cert["branch"].get<std::string>();
        VertexSet used(rec.n);
        if (cert.contains("clique_blocks")) {
            const Hypergraph& host = branch == "A" ? g1 : union_of(base, g2);
            for (const auto& b : cert["clique_blocks"]) {
                auto iso = b["iso"].get<std::vector<int>>();
                for (const auto& e : clique.edges()) {
                    Hypergraph::Edge img{iso[e[0]], iso[e[1]]};
                    std::sort(img.begin(), img.end());
                    if (!host.has_edge(img)) return false;
                }
                for (int v : b["v"].get<std::vector<int>>()) {
                    if (used.test(v)) return false;
                    used.set(v);
                }
            }
        }
        if (cert.contains("remainder_map")) {
            const Hypergraph& host = branch == "A" ? g2 : g1;
            auto map = cert["remainder_map"].get<std::vector<int>>();
            VertexSet remaining = VertexSet::full(rec.n);
            while (true) {
                EmbedOptions opts;
                opts.allowed = &remaining;
                EmbeddingResult emb = find_embedding(spanning, clique, opts);
                if (emb.status != SearchStatus::found) break;
                for (int v : emb.map) remaining.reset(v);
            }
            Hypergraph remainder = induced(spanning, remaining).graph;
            std::vector<bool> seen(rec.n, false);
            for (int v : map) {
                if (v < 0 || v >= rec.n || seen[v]) return false;
                seen[v] = true;
                if (branch == "A" && used.test(v)) return false;
            }
            for (const auto& e : remainder.edges()) {
                Hypergraph::Edge img{map[e[0]], map[e[1]]};
                std::sort(img.begin(), img.end());
                if (!host.has_edge(img)) return false;
            }
        }
        return true;
    }
    return false;
}

}  // namespace perturb
