#pragma once

#include <iosfwd>

#include "stabtomo/highdim_learner.hpp"
#include "stabtomo/io.hpp"
#include "stabtomo/product_learner.hpp"
#include "stabtomo/stab_learner.hpp"

namespace stabtomo {

enum class AlgorithmKind { Stab, HighDim, Product, StabProduct, Magic };

struct ExperimentConfig {
    AlgorithmKind algorithm = AlgorithmKind::Stab;
    InstanceSpec instance;
    std::optional<PackingSet> packing;  // Product runs
    double tau = 1.0;
    double gamma = 1.0;
    double eps = 0.1;
    double delta = 0.1;
    uint32_t t = 0;      // HighDim nullity parameter
    bool t_sweep = false;  // t unknown: sweep t = 0, 1, ... at the CLI
    int64_t trials = 1;
    std::optional<uint64_t> master_seed;  // mandatory; validated at run time
    int64_t budget_cap = 100000000;
    double p_floor = 1e-6;
    double p_floor_outer = 1e-6;
    double p_floor_step2 = 0.1;
    double p_floor_exp = 0.05;
    int workers = 1;
    bool test_mode = true;  // report exact fidelities from the dense backend

    void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct TrialRecord {
    int64_t trial = 0;
    bool success = false;
    nlohmann::json output;
    std::optional<double> exact_fidelity;
    std::optional<double> target_fidelity;
    SampleLedger ledger;
    int64_t wall_ms = 0;
    std::string error;
};

struct ExperimentSummary {
    int64_t trials = 0;
    int64_t successes = 0;
    double success_rate = 0.0;
    double ci_low = 0.0, ci_high = 0.0;  // Wilson 95%
    double mean_samples = 0.0;
};

// Runs all trials (parallel over a worker pool, deterministic per-trial rng
// streams), writes one JSON line per trial and a one-row aggregate CSV.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::ostream& jsonl,
                                 std::ostream& csv);

// Wilson 95% interval for a binomial proportion.
std::pair<double, double> wilson_interval(int64_t successes, int64_t trials);

// Invariant battery for the `verify` subcommand; returns a JSON report with
// one entry per check and an overall "pass" flag.
nlohmann::json run_verification_battery(uint32_t n_max, uint64_t seed);

}  // namespace stabtomo
