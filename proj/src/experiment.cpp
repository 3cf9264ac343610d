#include "stabtomo/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <ostream>
#include <thread>

namespace stabtomo {

using json = nlohmann::json;

void ExperimentConfig::validate() const {
    if (!master_seed) throw std::invalid_argument("master_seed is mandatory");
    if (trials <= 0) throw std::invalid_argument("trials must be positive");
    if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("tau must be in (0, 1]");
    if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("eps must be in (0, 1]");
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("delta must be in (0, 1)");
    if (algorithm == AlgorithmKind::Stab && (gamma <= 0.5 || gamma > 1.0))
        throw std::invalid_argument("gamma must be in (1/2, 1]");
    if (algorithm == AlgorithmKind::Product && !packing)
        throw std::invalid_argument("product runs need a packing set");
    if (budget_cap <= 0) throw std::invalid_argument("budget_cap must be positive");
    if (workers <= 0) throw std::invalid_argument("workers must be positive");
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg;
    if (j.contains("algorithm")) {
        std::string a = j.at("algorithm").get<std::string>();
        if (a == "stab")
            cfg.algorithm = AlgorithmKind::Stab;
        else if (a == "highdim")
            cfg.algorithm = AlgorithmKind::HighDim;
        else if (a == "product")
            cfg.algorithm = AlgorithmKind::Product;
        else if (a == "stabprod")
            cfg.algorithm = AlgorithmKind::StabProduct;
        else if (a == "magic")
            cfg.algorithm = AlgorithmKind::Magic;
        else
            throw std::invalid_argument("unknown algorithm " + a);
    }
    cfg.instance = instance_spec_from_json(j.at("instance"));
    if (j.contains("packing")) cfg.packing = packing_from_json(j.at("packing"));
    cfg.tau = j.value("tau", 1.0);
    cfg.gamma = j.value("gamma", 1.0);
    cfg.eps = j.value("epsilon", j.value("eps", 0.1));
    cfg.delta = j.value("delta", 0.1);
    cfg.t = j.value("t", 0u);
    cfg.t_sweep = !j.contains("t");
    cfg.trials = j.value("trials", int64_t(1));
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<uint64_t>();
    cfg.budget_cap = j.value("budget_cap", int64_t(100000000));
    cfg.p_floor = j.value("p_floor", 1e-6);
    cfg.p_floor_outer = j.value("p_floor_outer", 1e-6);
    cfg.p_floor_step2 = j.value("p_floor_step2", 0.1);
    cfg.p_floor_exp = j.value("p_floor_exp", 0.05);
    cfg.workers = j.value("workers", 1);
    cfg.test_mode = j.value("test_mode", true);
    return cfg;
}

namespace {

// Exact fidelity of the learner output with the trial's base state.
double output_fidelity(const DensityMatrix& rho, const json& output,
                       const ExperimentConfig& cfg) {
    if (output.contains("stabilizer"))
        return exact_fidelity(rho, stabilizer_state_from_json(output.at("stabilizer")));
    if (output.contains("product")) {
        ProductState p = product_state_from_json(
            output.at("product"), cfg.packing ? &*cfg.packing : nullptr);
        return exact_fidelity(rho, p.state_vector());
    }
    if (output.contains("clifford")) {
        HighDimOutput out;
        out.clifford = circuit_from_json(output.at("clifford"));
        out.block_state = density_from_json(output.at("block_state"));
        Eigen::MatrixXcd rep = out.represented_density(rho.n());
        DensityMatrix sigma(rho.n(), rep);
        return exact_fidelity(rho, sigma);
    }
    return 0.0;
}

std::optional<double> target_fidelity_for(const Instance& inst, const ExperimentConfig& cfg) {
    if (inst.planted_class_fidelity) return inst.planted_class_fidelity;
    if (inst.rho.n() > 4) return std::nullopt;
    switch (cfg.algorithm) {
        case AlgorithmKind::Stab:
        case AlgorithmKind::Magic:
            return brute_force_class_fidelity(inst.rho, StateClass::Stabilizer).value;
        case AlgorithmKind::StabProduct:
            return brute_force_class_fidelity(inst.rho, StateClass::StabilizerProduct).value;
        case AlgorithmKind::Product:
            return brute_force_class_fidelity(inst.rho, StateClass::Product, 0, &*cfg.packing)
                .value;
        case AlgorithmKind::HighDim:
            if (inst.rho.n() <= 3)
                return brute_force_class_fidelity(inst.rho, StateClass::HighStabilizerDim, cfg.t)
                    .value;
            return std::nullopt;
    }
    return std::nullopt;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const Instance& inst, int64_t trial) {
    TrialRecord rec;
    rec.trial = trial;
    auto start = std::chrono::steady_clock::now();
    Rng rng = Rng::stream(*cfg.master_seed, uint64_t(trial), "trial");
    OracleFactory factory(inst.rho, std::move(rng), cfg.budget_cap);
    try {
        switch (cfg.algorithm) {
            case AlgorithmKind::Stab: {
                BootstrapConfig bcfg;
                bcfg.tau = cfg.tau;
                bcfg.gamma = cfg.gamma;
                bcfg.eps = cfg.eps;
                bcfg.delta = cfg.delta;
                bcfg.p_floor = cfg.p_floor;
                AgnosticResult res = agnostic_stabilizer(factory, bcfg);
                rec.output = json{{"stabilizer", to_json(res.state)},
                                  {"estimated_fidelity", res.estimated_fidelity},
                                  {"list_size", res.list_size},
                                  {"runs", res.runs}};
                rec.success = true;
                break;
            }
            case AlgorithmKind::HighDim: {
                HighDimConfig hcfg;
                hcfg.t = cfg.t;
                hcfg.tau = cfg.tau;
                hcfg.eps = cfg.eps;
                hcfg.delta = cfg.delta;
                hcfg.p_floor_outer = cfg.p_floor_outer;
                hcfg.p_floor_step2 = cfg.p_floor_step2;
                hcfg.p_floor_exp = cfg.p_floor_exp;
                HighDimResult res = cfg.t_sweep
                                        ? agnostic_highdim_sweep(factory, hcfg,
                                                                 inst.rho.n() - 1)
                                        : agnostic_highdim(factory, hcfg);
                rec.output = json{{"clifford", to_json(res.output.clifford)},
                                  {"block_state", to_json(res.output.block_state)},
                                  {"t", res.output.block_state.n()},
                                  {"selected_block_weight", res.selected_block_weight},
                                  {"runs", res.runs}};
                rec.success = true;
                break;
            }
            case AlgorithmKind::Product: {
                ProductConfig pcfg{cfg.tau, cfg.eps, cfg.delta, cfg.p_floor};
                ProductResult res = agnostic_product(factory, *cfg.packing, pcfg);
                rec.output = json{{"product", to_json(res.state)},
                                  {"estimated_fidelity", res.estimated_fidelity},
                                  {"list_size", res.list_size},
                                  {"runs", res.runs}};
                rec.success = true;
                break;
            }
            case AlgorithmKind::StabProduct: {
                ProductConfig pcfg{cfg.tau, cfg.eps, cfg.delta, cfg.p_floor};
                ProductResult res = agnostic_stab_product(factory, pcfg);
                rec.output = json{{"product", to_json(res.state)},
                                  {"estimated_fidelity", res.estimated_fidelity},
                                  {"list_size", res.list_size},
                                  {"runs", res.runs}};
                rec.success = true;
                break;
            }
            case AlgorithmKind::Magic: {
                double est =
                    estimate_stabilizer_fidelity(factory, cfg.eps, cfg.delta, cfg.p_floor);
                rec.output = json{{"estimate", est}};
                rec.success = true;
                break;
            }
        }
    } catch (const std::exception& e) {
        rec.success = false;
        rec.error = e.what();
    }
    rec.ledger = factory.ledger();
    if (rec.success && cfg.test_mode && cfg.algorithm != AlgorithmKind::Magic)
        rec.exact_fidelity = output_fidelity(inst.rho, rec.output, cfg);
    auto end = std::chrono::steady_clock::now();
    rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
    return rec;
}

json record_to_json(const TrialRecord& rec, const std::optional<double>& target) {
    json j{{"trial", rec.trial},
           {"success", rec.success},
           {"output", rec.output},
           {"samples", to_json(rec.ledger)},
           {"wall_ms", rec.wall_ms}};
    if (rec.exact_fidelity) j["exact_fidelity"] = *rec.exact_fidelity;
    if (target) j["target_fidelity"] = *target;
    if (!rec.error.empty()) j["error"] = rec.error;
    return j;
}

}  // namespace

std::pair<double, double> wilson_interval(int64_t successes, int64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    double z = 1.959963984540054;
    double n = double(trials), p = double(successes) / n;
    double z2 = z * z;
    double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::ostream& jsonl,
                                 std::ostream& csv) {
    cfg.validate();
    Instance inst = generate_instance(cfg.instance);
    std::optional<double> target = cfg.test_mode ? target_fidelity_for(inst, cfg) : std::nullopt;

    int workers = cfg.workers;
    if (const char* env = std::getenv("STABTOMO_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) workers = w;
    }
    workers = std::min<int64_t>(workers, cfg.trials);

    std::vector<TrialRecord> records(cfg.trials);
    std::atomic<int64_t> next{0};
    auto work = [&]() {
        while (true) {
            int64_t i = next.fetch_add(1);
            if (i >= cfg.trials) break;
            records[i] = run_trial(cfg, inst, i);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    ExperimentSummary summary;
    summary.trials = cfg.trials;
    double samples_acc = 0;
    for (const auto& rec : records) {
        jsonl << record_to_json(rec, target).dump() << "\n";
        summary.successes += rec.success;
        samples_acc += double(rec.ledger.base_copies);
    }
    summary.success_rate = double(summary.successes) / double(cfg.trials);
    auto [lo, hi] = wilson_interval(summary.successes, cfg.trials);
    summary.ci_low = lo;
    summary.ci_high = hi;
    summary.mean_samples = samples_acc / double(cfg.trials);
    csv << "trials,successes,success_rate,ci_low,ci_high,mean_samples\n";
    csv << summary.trials << "," << summary.successes << "," << summary.success_rate << ","
        << summary.ci_low << "," << summary.ci_high << "," << summary.mean_samples << "\n";
    return summary;
}

namespace {

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

}  // namespace

json run_verification_battery(uint32_t n_max, uint64_t seed) {
    std::vector<Check> checks;
    Rng rng(seed);

    {  // Stabilizer census counts.
        bool ok = true;
        std::string detail;
        uint64_t expect[] = {6, 60, 1080, 36720};
        for (uint32_t n = 1; n <= std::min<uint32_t>(n_max, 4); ++n) {
            size_t got = enumerate_stabilizer_states(n).size();
            if (got != expect[n - 1]) ok = false;
            detail += "n=" + std::to_string(n) + ":" + std::to_string(got) + " ";
        }
        checks.push_back({"stabilizer_census", ok, detail});
    }
    {  // Nearest-neighbor degeneracy 4(2^n - 1) at fidelity 1/2.
        bool ok = true;
        for (uint32_t n = 1; n <= std::min<uint32_t>(n_max, 2); ++n) {
            StabilizerState phi = StabilizerState::random(n, rng);
            Eigen::VectorXcd v = phi.state_vector();
            size_t at_half = 0;
            for (const auto& s : enumerate_stabilizer_states(n))
                if (std::abs(std::norm(v.dot(s.state_vector())) - 0.5) < 1e-9) ++at_half;
            if (at_half != 4 * ((uint64_t(1) << n) - 1)) ok = false;
        }
        checks.push_back({"nearest_neighbor_degeneracy", ok, "4(2^n-1) states at fidelity 1/2"});
    }
    {  // Planted fidelity of generators matches dense computation.
        bool ok = true;
        for (uint32_t n = 2; n <= std::min<uint32_t>(n_max, 4); ++n) {
            InstanceSpec spec;
            spec.kind = InstanceKind::NoisyStabilizer;
            spec.n = n;
            spec.noise = 0.3;
            spec.seed = rng.uniform_u64();
            Instance inst = generate_instance(spec);
            double f = exact_fidelity(inst.rho, *inst.planted_stabilizer);
            if (std::abs(f - *inst.planted_class_fidelity) > 1e-9) ok = false;
        }
        checks.push_back({"planted_fidelity_exact", ok, "noisy stabilizer generator"});
    }
    {  // Oracle self-consistency: brute-force max dominates every candidate.
        bool ok = true;
        DensityMatrix rho = DensityMatrix::random_mixed(2, rng);
        auto res = brute_force_class_fidelity(rho, StateClass::Stabilizer);
        for (const auto& s : enumerate_stabilizer_states(2))
            if (exact_fidelity(rho, s) > res.value + 1e-9) ok = false;
        double attained = exact_fidelity(rho, *res.argmax_stabilizer);
        if (std::abs(attained - res.value) > 1e-9) ok = false;
        checks.push_back({"brute_force_argmax", ok, "argmax attains the maximum"});
    }
    {  // Pairwise fidelities powers of 1/2.
        bool ok = true;
        auto states = enumerate_stabilizer_states(2);
        for (size_t i = 0; i < states.size(); i += 9) {
            Eigen::VectorXcd vi = states[i].state_vector();
            for (size_t j = i; j < states.size(); j += 7) {
                double f = std::norm(vi.dot(states[j].state_vector()));
                if (f > 1e-9) {
                    double l = std::log2(f);
                    if (std::abs(l - std::round(l)) > 1e-8) ok = false;
                }
            }
        }
        checks.push_back({"pairwise_fidelity_powers", ok, "only powers of 1/2"});
    }
    {  // Bell distribution bounds.
        bool ok = true;
        for (uint32_t n = 1; n <= std::min<uint32_t>(n_max, 3); ++n) {
            DensityMatrix rho = DensityMatrix::random_mixed(n, rng);
            auto bell = exact_bell_distribution(rho);
            double total = 0;
            for (double p : bell) {
                total += p;
                if (p > std::pow(2.0, -double(n)) + 1e-10) ok = false;
            }
            if (std::abs(total - 1.0) > 1e-9) ok = false;
        }
        checks.push_back({"bell_distribution_bounds", ok, "max <= 2^-n, sums to one"});
    }
    {  // Uncertainty relation on anticommuting pairs.
        bool ok = true;
        DensityMatrix rho = DensityMatrix::random_mixed(2, rng);
        for (uint64_t a = 0; a < 16 && ok; ++a)
            for (uint64_t b = a + 1; b < 16; ++b) {
                BitVec x = BitVec::from_u64(4, a), y = BitVec::from_u64(4, b);
                if (symplectic_product(x, y) == 0) continue;
                double ta = exact_weyl_expectation(rho, x), tb = exact_weyl_expectation(rho, y);
                if (ta * ta + tb * tb > 1.0 + 1e-10) {
                    ok = false;
                    break;
                }
            }
        checks.push_back({"uncertainty_relation", ok, "anticommuting pair correlation sum <= 1"});
    }
    {  // Doped states keep stabilizer dimension >= n - 2t.
        bool ok = true;
        InstanceSpec spec;
        spec.kind = InstanceKind::Doped;
        spec.n = std::min<uint32_t>(n_max + 1, 4);
        spec.t_count = 1;
        spec.seed = rng.uniform_u64();
        Instance inst = generate_instance(spec);
        Subspace weyl(2 * spec.n);
        for (uint64_t bits = 0; bits < (uint64_t(1) << (2 * spec.n)); ++bits) {
            BitVec x = BitVec::from_u64(2 * spec.n, bits);
            double t = exact_weyl_expectation(inst.rho, x);
            if (std::abs(std::abs(t) - 1.0) < 1e-9) weyl.insert(x);
        }
        if (weyl.dim() + 2 * spec.t_count < spec.n) ok = false;
        checks.push_back({"doped_stabilizer_dimension", ok,
                          "dim Weyl >= n - 2t, got " + std::to_string(weyl.dim())});
    }

    json out;
    out["checks"] = json::array();
    bool all = true;
    for (const auto& c : checks) {
        out["checks"].push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        all &= c.pass;
    }
    out["pass"] = all;
    return out;
}

}  // namespace stabtomo
