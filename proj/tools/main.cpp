// stabtomo: agnostic tomography of stabilizer-structured states from
// simulated measurement data.
//
// Subcommands:
//   gen       generate an instance file (optionally with its planted truth)
//   stab      agnostic stabilizer tomography        (stab run --config ...)
//   highdim   high stabilizer dimension learner     (highdim run --t k ...)
//   product   discrete product class learner        (product run --packing ...)
//   stabprod  stabilizer product specialization
//   magic     stabilizer-fidelity estimation
//   verify    invariant battery, pass/fail JSON report

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "stabtomo/experiment.hpp"

using namespace stabtomo;
using json = nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

struct RunOptions {
    std::string config_path;
    std::string out_path = "results.jsonl";
    std::string csv_path = "aggregate.csv";
    std::string packing_path;
    std::optional<uint64_t> seed_override;
    std::optional<int64_t> trials_override;
    std::optional<uint32_t> t_override;
    std::optional<int> workers_override;
};

int execute_run(AlgorithmKind algorithm, const RunOptions& opt) {
    json j = load_json(opt.config_path);
    ExperimentConfig cfg = experiment_config_from_json(j);
    cfg.algorithm = algorithm;
    if (!opt.packing_path.empty()) cfg.packing = packing_from_json(load_json(opt.packing_path));
    if (opt.seed_override) cfg.master_seed = opt.seed_override;
    if (opt.trials_override) cfg.trials = *opt.trials_override;
    if (opt.t_override) {
        cfg.t = *opt.t_override;
        cfg.t_sweep = false;
    }
    if (opt.workers_override) cfg.workers = *opt.workers_override;

    std::ofstream jsonl(opt.out_path);
    std::ofstream csv(opt.csv_path);
    if (!jsonl || !csv) throw std::runtime_error("cannot open output files");
    ExperimentSummary summary = run_experiment(cfg, jsonl, csv);
    std::cout << "trials=" << summary.trials << " successes=" << summary.successes
              << " success_rate=" << summary.success_rate
              << " mean_samples=" << summary.mean_samples << "\n";
    // Exit 0 iff every trial completed (per-trial failures are recorded in
    // the JSONL, not the exit code).
    return 0;
}

void add_run_options(CLI::App* run, RunOptions& opt, bool with_packing, bool with_t) {
    run->add_option("--config", opt.config_path, "experiment config JSON")->required();
    run->add_option("--out", opt.out_path, "per-trial JSONL output");
    run->add_option("--csv", opt.csv_path, "aggregate CSV output");
    run->add_option("--seed", opt.seed_override, "master seed override");
    run->add_option("--trials", opt.trials_override, "trial count override");
    run->add_option("--workers", opt.workers_override, "worker pool size");
    if (with_packing)
        run->add_option("--packing", opt.packing_path, "packing set JSON (Bloch vectors + mu)");
    if (with_t) run->add_option("--t", opt.t_override, "stabilizer-dimension deficit t");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agnostic tomography of stabilizer-structured states"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance file");
    std::string gen_kind = "noisy_stabilizer";
    uint32_t gen_n = 4;
    double gen_noise = 0.25, gen_tau = 0.75;
    uint32_t gen_tcount = 1, gen_subset = 4;
    uint64_t gen_seed = 0;
    std::string gen_out = "instance.json", gen_truth;
    gen->add_option("--kind", gen_kind,
                    "noisy_stabilizer | doped | noisy_product | subset_phase | lower_bound_family");
    gen->add_option("--n", gen_n, "qubit count");
    gen->add_option("--p", gen_noise, "noise weight");
    gen->add_option("--tau", gen_tau, "lower-bound family fidelity");
    gen->add_option("--t-count", gen_tcount, "non-Clifford gate count");
    gen->add_option("--subset-size", gen_subset, "subset phase support size");
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--out", gen_out, "instance spec output path");
    gen->add_option("--truth", gen_truth, "planted truth sidecar path");

    RunOptions stab_opt, highdim_opt, product_opt, stabprod_opt, magic_opt;
    auto* stab = app.add_subcommand("stab", "agnostic stabilizer tomography");
    add_run_options(stab->add_subcommand("run", "run trials"), stab_opt, false, false);
    auto* highdim = app.add_subcommand("highdim", "high stabilizer dimension learner");
    add_run_options(highdim->add_subcommand("run", "run trials"), highdim_opt, false, true);
    auto* product = app.add_subcommand("product", "discrete product class learner");
    add_run_options(product->add_subcommand("run", "run trials"), product_opt, true, false);
    auto* stabprod = app.add_subcommand("stabprod", "stabilizer product learner");
    add_run_options(stabprod->add_subcommand("run", "run trials"), stabprod_opt, false, false);

    auto* magic = app.add_subcommand("magic", "stabilizer-fidelity estimation");
    add_run_options(magic, magic_opt, false, false);

    auto* verify = app.add_subcommand("verify", "run the invariant battery");
    uint32_t verify_nmax = 3;
    uint64_t verify_seed = 1;
    std::string verify_out;
    verify->add_option("--n-max", verify_nmax, "largest register in the battery");
    verify->add_option("--seed", verify_seed, "battery seed");
    verify->add_option("--out", verify_out, "report path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            InstanceSpec spec;
            if (gen_kind == "noisy_stabilizer")
                spec.kind = InstanceKind::NoisyStabilizer;
            else if (gen_kind == "doped")
                spec.kind = InstanceKind::Doped;
            else if (gen_kind == "noisy_product")
                spec.kind = InstanceKind::NoisyProduct;
            else if (gen_kind == "subset_phase")
                spec.kind = InstanceKind::SubsetPhase;
            else if (gen_kind == "lower_bound_family")
                spec.kind = InstanceKind::LowerBoundFamily;
            else
                throw std::invalid_argument("unknown instance kind " + gen_kind);
            spec.n = gen_n;
            spec.noise = gen_noise;
            spec.tau = gen_tau;
            spec.t_count = gen_tcount;
            spec.subset_size = gen_subset;
            spec.seed = gen_seed;
            std::ofstream out(gen_out);
            out << instance_spec_to_json(spec).dump(2) << "\n";
            if (!gen_truth.empty()) {
                Instance inst = generate_instance(spec);
                json truth{{"description", inst.description}};
                if (inst.planted_stabilizer) truth["stabilizer"] = to_json(*inst.planted_stabilizer);
                if (inst.planted_product) truth["product"] = to_json(*inst.planted_product);
                if (inst.planted_clifford) truth["clifford"] = to_json(*inst.planted_clifford);
                if (inst.planted_class_fidelity)
                    truth["class_fidelity"] = *inst.planted_class_fidelity;
                std::ofstream tf(gen_truth);
                tf << truth.dump(2) << "\n";
            }
            std::cout << "wrote " << gen_out << "\n";
            return 0;
        }
        if (stab->parsed()) return execute_run(AlgorithmKind::Stab, stab_opt);
        if (highdim->parsed()) return execute_run(AlgorithmKind::HighDim, highdim_opt);
        if (product->parsed()) return execute_run(AlgorithmKind::Product, product_opt);
        if (stabprod->parsed()) return execute_run(AlgorithmKind::StabProduct, stabprod_opt);
        if (magic->parsed()) return execute_run(AlgorithmKind::Magic, magic_opt);
        if (verify->parsed()) {
            json report = run_verification_battery(verify_nmax, verify_seed);
            if (verify_out.empty()) {
                std::cout << report.dump(2) << "\n";
            } else {
                std::ofstream out(verify_out);
                out << report.dump(2) << "\n";
                std::cout << (report.at("pass").get<bool>() ? "PASS" : "FAIL") << "\n";
            }
            return report.at("pass").get<bool>() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
