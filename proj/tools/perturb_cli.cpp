// Command-line front end: density functionals, gadget construction, exact
// structure search, reduced-cycle checks, spread estimation, and the
// perturbation experiment harness.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "perturb/cycles.hpp"
#include "perturb/density.hpp"
#include "perturb/gadgets.hpp"
#include "perturb/generators.hpp"
#include "perturb/harness.hpp"
#include "perturb/solvers.hpp"
#include "perturb/spread.hpp"

using namespace perturb;
using nlohmann::json;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return out;
}

json witness_json(const VertexSet& s) { return json(s.vertices()); }

int run_density(const std::string& input, const std::string& mode, double n, double p,
                const std::string& roots, int max_component) {
    Hypergraph f = read_edge_list_file(input);
    json out;
    out["mode"] = mode;
    if (mode == "m1") {
        M1Options opts;
        if (max_component > 0) opts.max_component_vertices = max_component;
        auto rep = m1(f, opts);
        out["value"] = to_string(rep.value);
        out["value_float"] = double(rep.value.numerator()) / double(rep.value.denominator());
        out["witness"] = witness_json(rep.witness);
        out["enumerated"] = rep.enumerated;
    } else if (mode == "phi") {
        auto rep = phi(f, n, p);
        out["log_value"] = rep.log_value;
        out["value"] = rep.value();
        out["min_vertices"] = rep.min_vertices;
        out["min_edges"] = rep.min_edges;
        out["witness"] = witness_json(rep.witness);
        out["enumerated"] = rep.enumerated;
    } else if (mode == "phi-rooted") {
        VertexSet w(f.n());
        for (int v : parse_int_list(roots)) w.set(v);
        auto rep = phi_rooted(RootedGraph(f, w), n, p);
        out["log_value"] = rep.log_value;
        out["value"] = rep.value();
        out["min_vertices"] = rep.min_vertices;
        out["min_edges"] = rep.min_edges;
        out["witness"] = witness_json(rep.witness);
        out["enumerated"] = rep.enumerated;
    } else {
        throw CLI::ValidationError("--mode must be m1|phi|phi-rooted");
    }
    std::cout << out.dump() << "\n";
    return 0;
}

int run_gadget(const std::string& input, int t, const std::string& emit, bool verify,
               const std::string& out_dir) {
    Hypergraph f = read_edge_list_file(input);
    GadgetBundle bundle = t > 0 ? build_absorber(f, t) : build_gadgets(f);
    std::filesystem::create_directories(out_dir);
    auto emit_graph = [&](const std::string& name, const Hypergraph& g) {
        write_edge_list_file(out_dir + "/" + name + ".el", g);
    };
    if (emit == "fplus" || emit == "bundle") emit_graph("fplus", bundle.f_plus);
    if (emit == "fprime" || emit == "bundle") emit_graph("fprime", bundle.f_prime);
    if (emit == "fstar" || emit == "bundle") emit_graph("fstar", bundle.f_star);
    if ((emit == "b" || emit == "d" || emit == "bundle") && bundle.b_graph.n() == 0)
        throw CLI::ValidationError("B/D need --t >= 1");
    if (emit == "b" || emit == "bundle") emit_graph("b", bundle.b_graph);
    if (emit == "d" || emit == "bundle") emit_graph("d", bundle.d_graph);

    json labels;
    labels["u"] = bundle.u;
    labels["u_prime"] = bundle.u_prime;
    labels["case"] = bundle.kind == GadgetCase::edge_off_neighborhood ? "i" : "ii";
    labels["special_edge"] = bundle.special_edge;
    labels["outside_end"] = bundle.outside_end;
    labels["m"] = bundle.m;
    labels["m1"] = to_string(bundle.m1_value);
    labels["eps0"] = to_string(bundle.eps0);
    labels["t"] = bundle.t;
    labels["c1"] = bundle.c1;
    if (bundle.b_graph.n() > 0) {
        labels["s"] = bundle.s_vertices;
        labels["a0"] = bundle.a0;
        json blocks = json::array();
        for (int i = 0; i < bundle.m; ++i)
            for (int j = 0; j < bundle.t; ++j)
                blocks.push_back({{"i", i}, {"j", j}, {"vertices", bundle.block_vertex[i][j]}});
        labels["blocks"] = std::move(blocks);
    }
    if (verify) {
        auto certs = verify_absorber(bundle);
        labels["verified"] = true;
        labels["factor_blocks_with_s"] = certs.with_s.blocks.size();
        labels["factor_blocks_without_s"] = certs.without_s.blocks.size();
    }
    std::ofstream lbl(out_dir + "/labels.json");
    lbl << labels.dump(2) << "\n";
    std::cout << labels.dump() << "\n";
    return 0;
}

int run_solve(const std::string& host_path, const std::string& mode,
              const std::string& pattern_path, int ell, int r, uint64_t budget) {
    Hypergraph host = read_edge_list_file(host_path);
    json out;
    SearchStatus status;
    if (mode == "factor") {
        Hypergraph pattern = read_edge_list_file(pattern_path);
        auto res = has_factor(host, pattern, budget);
        status = res.status;
        out["nodes"] = res.nodes;
        if (status == SearchStatus::found) {
            if (!verify_factor(host, pattern, res.certificate))
                throw std::logic_error("certificate failed verification");
            json blocks = json::array();
            for (const auto& b : res.certificate.blocks)
                blocks.push_back({{"v", b.host_vertices}, {"iso", b.iso}});
            out["certificate"] = {{"blocks", std::move(blocks)}};
        }
    } else if (mode == "ell-cycle" || mode == "power") {
        CycleOptions opts;
        opts.budget = budget;
        auto res = mode == "power" ? has_power_tight_hamilton(host, r, opts)
                                   : has_hamilton_ell_cycle(host, ell, opts);
        status = res.status;
        out["nodes"] = res.nodes;
        if (status == SearchStatus::found) {
            bool ok = mode == "power" ? verify_power_cycle(host, r, res.certificate.order)
                                      : verify_ell_cycle(host, ell, res.certificate.order);
            if (!ok) throw std::logic_error("certificate failed verification");
            out["certificate"] = {{"order", res.certificate.order}};
        }
    } else {
        throw CLI::ValidationError("--mode must be factor|ell-cycle|power");
    }
    out["status"] = to_string(status);
    std::cout << out.dump() << "\n";
    switch (status) {
        case SearchStatus::found: return 0;
        case SearchStatus::absent: return 1;
        case SearchStatus::timeout: return 2;
    }
    return 2;
}

int run_cycles(int n, int k, int ell, int r, int big_m, const std::string& emit,
               const std::string& check, int w_max, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    json report;
    const bool power = r > 0;
    if (big_m <= 0 && (emit == "reduced" || emit == "removed" || !check.empty()))
        throw CLI::ValidationError("--M is required for reduced structures and checks");

    if (emit == "full") {
        Hypergraph full = power ? build_hc_power(n, k, r) : build_hc_ell(n, k, ell);
        write_edge_list_file(out_dir + "/full.el", full);
        report["edges"] = full.edge_count();
    } else if (emit == "reduced" || emit == "removed") {
        ReducedCycle rc = power ? build_reduced_hc_power(n, k, r, big_m)
                                : build_reduced_hc_ell(n, k, ell, big_m);
        if (emit == "reduced") {
            write_edge_list_file(out_dir + "/reduced.el", rc.residual);
            report["edges"] = rc.residual.edge_count();
        } else {
            write_edge_list_file(out_dir + "/removed.el", Hypergraph(k, n, rc.removed));
            report["edges"] = rc.removed.size();
        }
    } else if (!emit.empty()) {
        throw CLI::ValidationError("--emit must be full|reduced|removed");
    }

    if (check == "m1") {
        if (power) throw CLI::ValidationError("--check m1 applies to the ell variant");
        auto rc = build_reduced_hc_ell(n, k, ell, big_m);
        auto rep = check_m1_reduced_ell(rc);
        report["check"] = "m1";
        report["holds"] = rep.holds;
        report["max_density"] = to_string(rep.max_density);
        report["bound"] = to_string(rep.bound);
        json comps = json::array();
        for (const auto& cd : rep.per_component)
            comps.push_back({{"vertices", cd.component.count()},
                             {"m1", to_string(cd.report.value)},
                             {"banded", cd.banded}});
        report["components"] = std::move(comps);
    } else if (check == "factnumber") {
        if (!power) throw CLI::ValidationError("--check factnumber applies to the power variant");
        auto rc = build_reduced_hc_power(n, k, r, big_m);
        auto rep = check_factnumber(rc, w_max);
        report["check"] = "factnumber";
        report["subgraphs_checked"] = rep.subgraphs_checked;
        report["max_w"] = rep.max_w;
        report["max_density"] = to_string(rep.max_density);
        report["density_bound_holds"] = rep.density_bound_holds;
        report["edge_bounds_hold"] = rep.edge_bounds_hold;
        report["violations"] = rep.violations.size();
    } else if (!check.empty()) {
        throw CLI::ValidationError("--check must be m1|factnumber");
    }
    std::cout << report.dump() << "\n";
    return 0;
}

int run_spread(const std::string& host_path, const std::string& pattern, int n, int k, int ell,
               int r, int big_m, double eps, uint64_t trials, uint64_t seed, int probe_s) {
    Hypergraph host = read_edge_list_file(host_path);
    if (n == 0) n = host.n();
    if (n != host.n()) throw CLI::ValidationError("--n disagrees with the host order");
    if (k != 0 && k != host.k()) throw CLI::ValidationError("--k disagrees with the host");
    k = host.k();

    LinkFiltration filt = pattern == "ellpath" ? LinkFiltration::ell_path(host, ell)
                                               : LinkFiltration::tight(host, eps);
    InjectionSampler sampler = [&](uint64_t s) {
        return sample_anchored_embedding(filt, big_m, s).image;
    };
    double q = std::pow(2.0, filt.chain_length() + 1) / filt.eps() / double(n);

    SpreadReport report;
    if (pattern == "power" && probe_s == 1) {
        // edge-spread of the reduced power structure pushed through the sampler
        ReducedCycle rc = build_reduced_hc_power(n, k, r, big_m);
        SubgraphSampler sub = [&](uint64_t s) {
            return image_of_structure(rc.residual, sample_anchored_embedding(filt, big_m, s).image);
        };
        auto first = sub(derive_seed(seed, 0xabc));
        std::vector<std::vector<Hypergraph::Edge>> probes;
        for (size_t i = 0; i < first.size() && i < 16; ++i) probes.push_back({first[i]});
        auto dm = m1_banded(rc.residual, [&] {
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            return order;
        }());
        double qe = std::pow(double(n), -double(dm.value.denominator()) /
                                            double(dm.value.numerator()));
        report = estimate_edge_spread(sub, probes, trials, seed, qe);
    } else if (probe_s == 2) {
        std::vector<std::pair<std::vector<int>, std::vector<int>>> probes;
        Rng rng(derive_seed(seed, 0x5151));
        int len = filt.chain_length();
        for (int i = 0; i < 200; ++i) {
            int block = big_m > 0 && n / big_m > 0 ? int(rng.bounded(uint64_t(n / big_m))) : 0;
            int x1 = block * big_m, x2 = x1 + (len > 1 ? 1 : 0);
            probes.push_back({{x1, x2}, {int(rng.bounded(uint64_t(n))), int(rng.bounded(uint64_t(n)))}});
        }
        report = estimate_vertex_spread(sampler, n, n, 2, trials, seed, q, 0.99, &probes);
    } else {
        report = estimate_vertex_spread(sampler, n, n, 1, trials, seed, q);
    }
    std::cout << to_json(report) << "\n";
    return 0;
}

int run_experiment_cmd(const std::string& config_path) {
    ExperimentConfig cfg = load_config(config_path);
    auto records = run_experiment(cfg);
    auto cells = aggregate(records);
    std::filesystem::create_directories(cfg.out_dir);
    write_results_csv(cfg.out_dir + "/results.csv", cells);
    write_trials_jsonl(cfg.out_dir + "/trials.jsonl", records);
    write_plot_svg(cfg.out_dir + "/" + cfg.theorem + ".svg", cells);
    std::cout << "cells " << cells.size() << ", trials " << records.size() << ", outputs in "
              << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-uniform hypergraph workbench for randomly perturbed dense graphs"};
    app.require_subcommand(1);

    // density
    std::string d_input, d_mode = "m1", d_roots;
    double d_n = 0, d_p = 0;
    int d_maxcomp = 0;
    auto* density_cmd = app.add_subcommand("density", "density functionals of a pattern graph");
    density_cmd->add_option("--input", d_input, "edge-list file")->required();
    density_cmd->add_option("--mode", d_mode, "m1|phi|phi-rooted");
    density_cmd->add_option("--n", d_n, "host order for phi");
    density_cmd->add_option("--p", d_p, "edge probability for phi");
    density_cmd->add_option("--roots", d_roots, "comma-separated root vertices");
    density_cmd->add_option("--max-component", d_maxcomp, "enumeration cap override");

    // gadget
    std::string g_input, g_emit = "bundle", g_out = "gadget-out";
    int g_t = 0;
    bool g_verify = false;
    auto* gadget_cmd = app.add_subcommand("gadget", "absorber gadget construction");
    gadget_cmd->add_option("--f", g_input, "edge-list file of F")->required();
    gadget_cmd->add_option("--t", g_t, "chain length (enables B and D)");
    gadget_cmd->add_option("--emit", g_emit, "fplus|fprime|fstar|b|d|bundle");
    gadget_cmd->add_flag("--verify", g_verify, "run the independent factor solver");
    gadget_cmd->add_option("--out", g_out, "output directory");

    // solve
    std::string s_host, s_mode = "factor", s_pattern;
    int s_ell = 2, s_r = 2;
    uint64_t s_budget = kDefaultBudget;
    auto* solve_cmd = app.add_subcommand("solve", "exact search for spanning structures");
    solve_cmd->add_option("--host", s_host, "host edge-list file")->required();
    solve_cmd->add_option("--mode", s_mode, "factor|ell-cycle|power");
    solve_cmd->add_option("--pattern", s_pattern, "pattern edge-list (factor mode)");
    solve_cmd->add_option("--ell", s_ell, "overlap for ell-cycles");
    solve_cmd->add_option("--r", s_r, "power");
    solve_cmd->add_option("--budget", s_budget, "search-node budget");

    // cycles
    int c_n = 0, c_k = 3, c_ell = 0, c_r = 0, c_m = 0, c_wmax = 12;
    std::string c_emit, c_check, c_out = "cycles-out";
    auto* cycles_cmd = app.add_subcommand("cycles", "reduced Hamilton structures and checks");
    cycles_cmd->add_option("--n", c_n)->required();
    cycles_cmd->add_option("--k", c_k)->required();
    cycles_cmd->add_option("--ell", c_ell, "ell-cycle variant");
    cycles_cmd->add_option("--r", c_r, "power variant");
    cycles_cmd->add_option("--M", c_m, "block stride");
    cycles_cmd->add_option("--emit", c_emit, "full|reduced|removed");
    cycles_cmd->add_option("--check", c_check, "m1|factnumber");
    cycles_cmd->add_option("--w-max", c_wmax, "subgraph size cap for factnumber");
    cycles_cmd->add_option("--out", c_out, "output directory");

    // spread
    std::string p_host, p_pattern = "tight";
    int p_n = 0, p_k = 0, p_ell = 2, p_r = 2, p_m = 0, p_probe_s = 1;
    double p_eps = 0.2;
    uint64_t p_trials = 1000, p_seed = 1;
    auto* spread_cmd = app.add_subcommand("spread", "anchored embeddings and spread estimation");
    spread_cmd->add_option("--host", p_host, "host edge-list file")->required();
    spread_cmd->add_option("--pattern", p_pattern, "tight|ellpath|power");
    spread_cmd->add_option("--n", p_n);
    spread_cmd->add_option("--k", p_k);
    spread_cmd->add_option("--ell", p_ell);
    spread_cmd->add_option("--r", p_r);
    spread_cmd->add_option("--M", p_m, "anchor stride")->required();
    spread_cmd->add_option("--eps", p_eps, "density parameter");
    spread_cmd->add_option("--trials", p_trials);
    spread_cmd->add_option("--seed", p_seed);
    spread_cmd->add_option("--probe-s", p_probe_s, "1|2");

    // experiment
    std::string e_config;
    auto* exp_cmd = app.add_subcommand("experiment", "perturbation experiment harness");
    exp_cmd->add_option("--config", e_config, "config file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (density_cmd->parsed()) return run_density(d_input, d_mode, d_n, d_p, d_roots, d_maxcomp);
        if (gadget_cmd->parsed()) return run_gadget(g_input, g_t, g_emit, g_verify, g_out);
        if (solve_cmd->parsed()) return run_solve(s_host, s_mode, s_pattern, s_ell, s_r, s_budget);
        if (cycles_cmd->parsed()) return run_cycles(c_n, c_k, c_ell, c_r, c_m, c_emit, c_check, c_wmax, c_out);
        if (spread_cmd->parsed())
            return run_spread(p_host, p_pattern, p_n, p_k, p_ell, p_r, p_m, p_eps, p_trials, p_seed, p_probe_s);
        if (exp_cmd->parsed()) return run_experiment_cmd(e_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    }
    return 0;
}
