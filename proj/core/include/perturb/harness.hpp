#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perturb/generators.hpp"
#include "perturb/hypergraph.hpp"
#include "perturb/solvers.hpp"

namespace perturb {

/// p' with (1-p')^rounds = 1-p, so the union of `rounds` independent
/// G(n, p') samples is distributed exactly as G(n, p). Asserts p' > p/rounds
/// for p in (0, 1).
double multi_round_split(double p, int rounds);

struct ExperimentConfig {
    std::string theorem;  // factor | bounded | ell-cycle | power
    std::string family = "complete-bipartite";
    double alpha = 0.5;
    double eps = 0.2;
    int clique = 0;  // clique-plus-isolated parameter

    int k = 2, ell = 2, r = 2;
    std::string pattern = "triangle";   // factor experiments: F
    std::string spanning;               // bounded experiments: F as a pattern sum
    int delta = 0;                      // bounded experiments: max degree bound

    std::vector<int> n_grid;
    std::vector<double> c_grid;      // p = c * n^exponent
    double exponent = 0;             // 0 = derive from the theorem tag
    std::vector<double> p_extra;     // absolute p values added to every cell

    int trials = 50;
    uint64_t seed = 1;
    uint64_t budget = kDefaultBudget;
    int threads = 0;  // 0 = hardware concurrency

    bool spread_compare = false;  // cycle experiments: also run the sampler pipeline
    int big_m = 0;                // anchor stride for spread_compare (0 = skip)

    std::string out_dir = ".";
};

/// Key-value sections: `[experiment]` plus `key = value` lines; lists are
/// space-separated. Unknown keys are an error.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

/// The exponent the theorem prescribes for p = c * n^x.
double theorem_exponent(const ExperimentConfig& cfg);

struct TrialRecord {
    std::string theorem, family;
    int n = 0, k = 0, ell = 0, r = 0;
    double p = 0;
    double c = -1;  // -1 when p came from p_extra
    int cell_index = 0, trial_index = 0;
    uint64_t seed = 0;
    SearchStatus status = SearchStatus::absent;
    uint64_t cert_hash = 0;
    std::string certificate_json;  // re-verifiable payload for found records
    uint64_t solver_nodes = 0;
    double wall_ms = 0;
    std::string branch;  // bounded experiments: which case ran
    std::optional<bool> spread_residual_hit;  // cycle experiments, optional pipeline
};

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

struct CellAggregate {
    std::string theorem, family;
    int n = 0, k = 0, ell = 0, r = 0;
    double p = 0;
    uint64_t trials = 0, found = 0, absent = 0, timeout = 0;
    double freq = 0, ci_lo = 0, ci_hi = 1;
};

std::vector<CellAggregate> aggregate(const std::vector<TrialRecord>& records);

std::string results_csv(const std::vector<CellAggregate>& cells);
std::vector<CellAggregate> parse_results_csv(const std::string& text);

void write_results_csv(const std::string& path, const std::vector<CellAggregate>& cells);
void write_trials_jsonl(const std::string& path, const std::vector<TrialRecord>& records);

/// Frequency-vs-p curves, one polyline per n, with Clopper-Pearson bars.
std::string plot_svg(const std::vector<CellAggregate>& cells);
void write_plot_svg(const std::string& path, const std::vector<CellAggregate>& cells);

/// Reconstructs the perturbed host of a trial from its seed and re-verifies
/// the stored certificate.
bool reverify_trial(const ExperimentConfig& cfg, const TrialRecord& record);

/// 64-bit FNV-1a of a certificate's canonical serialization.
uint64_t certificate_hash(const std::string& json);

}  // namespace perturb
