#include "stabtomo/product_learner.hpp"

#include <cmath>
#include <map>

#include "stabtomo/stab_learner.hpp"

namespace stabtomo {

void ProductConfig::validate() const {
    if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("tau must be in (0, 1]");
    if (eps <= 0.0 || eps > tau) throw std::invalid_argument("need 0 < eps <= tau");
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("delta must be in (0, 1)");
    if (p_floor <= 0.0 || p_floor > 1.0) throw std::invalid_argument("bad p_floor");
}

std::optional<ProductState> agnostic_product_once(CopyOracle& o, const PackingSet& k, double tau,
                                                  const ProductHook& hook) {
    uint32_t n = o.n();
    double theta = packing_theta(k.mu());
    int t_max = static_cast<int>(std::floor(std::log(1.0 / tau) / std::log(1.0 / theta)));
    double fid_eps = k.mu() / 16.0;
    const double fid_delta = 1.0 / 5.0;
    std::vector<ProductState> candidates;
    for (int t = 0; t <= t_max; ++t) {
        int64_t need = local_fidelities_planned_copies(n, fid_eps, fid_delta);
        if (!o.prepare_conditioned(need, 1.0 / 6.0, tau)) break;
        LocalFidelityTable table = local_fidelities(o, k.states(), fid_eps, fid_delta);
        std::vector<size_t> argmax(n, 0);
        for (uint32_t q = 0; q < n; ++q) {
            for (size_t i = 1; i < k.size(); ++i)
                if (table.value[i][q] > table.value[argmax[q]][q]) argmax[q] = i;
        }
        ProductState candidate = ProductState::from_packing(k, argmax);
        candidates.push_back(candidate);
        // Random re-guess: a qubit and a different packing element.
        uint32_t jt = static_cast<uint32_t>(o.rng().uniform_below(n));
        size_t other = o.rng().uniform_below(k.size() - 1);
        if (other >= argmax[jt]) ++other;
        ProductIteration record;
        if (hook) {
            record.t = t;
            record.candidate = candidate;
            record.conditioned_qubit = jt;
            record.conditioned_element = other;
            record.state_before = o.inspect_current();
        }
        double before_accept = o.inspect_acceptance();
        o.condition_on_single_qubit_state(jt, k.state(other));
        if (hook) {
            record.projector_acceptance =
                o.inspect_acceptance() > 0 ? o.inspect_acceptance() / before_accept : 0.0;
            if (!o.degenerate()) record.state_after = o.inspect_current();
            hook(record);
        }
        if (o.degenerate()) break;
    }
    if (candidates.empty()) return std::nullopt;
    return candidates[o.rng().uniform_below(candidates.size())];
}

std::optional<ProductState> agnostic_stab_product_once(CopyOracle& o, double tau,
                                                       const ProductHook& hook) {
    uint32_t n = o.n();
    int t_max = static_cast<int>(std::floor(std::log(1.0 / tau) / std::log(1.08)));
    const double corr_eps = 0.1, corr_delta = 1.0 / 5.0;
    std::vector<ProductState> candidates;
    for (int t = 0; t <= t_max; ++t) {
        // Correlations of the 3n single-qubit Paulis.
        std::vector<BitVec> strings;
        strings.reserve(3 * n);
        for (uint32_t q = 0; q < n; ++q)
            for (int pauli = 0; pauli < 3; ++pauli)
                strings.push_back(axis_stabilizer(n, q, {pauli, +1}).x);
        int64_t m_bell = bell_measurement_count(strings.size(), corr_eps, corr_delta);
        int64_t need = 2 * m_bell + 4;
        if (!o.prepare_conditioned(need, 1.0 / 6.0, tau)) break;
        auto est = estimate_correlations_fixed(o, strings, m_bell);
        std::vector<int> best_axis(n, 0);
        for (uint32_t q = 0; q < n; ++q) {
            double best = -1;
            for (int pauli = 0; pauli < 3; ++pauli) {
                double v = est[3 * q + pauli].value;
                if (v > best) {
                    best = v;
                    best_axis[q] = pauli;
                }
            }
        }
        // Measure the base state in the joint +-P^j eigenbasis.
        std::vector<BitVec> meas_strings;
        for (uint32_t q = 0; q < n; ++q)
            meas_strings.push_back(axis_stabilizer(n, q, {best_axis[q], +1}).x);
        std::vector<int> signs = o.measure_commuting_on_base(meas_strings);
        std::vector<ProductState::Axis> axes(n);
        for (uint32_t q = 0; q < n; ++q) axes[q] = {best_axis[q], signs[q]};
        ProductState candidate = ProductState::from_axes(axes);
        candidates.push_back(candidate);
        // Bell difference sample; pick the lowest coordinate where it is
        // neither identity nor the selected axis.
        BitVec r = o.bell_difference_sample();
        std::optional<uint32_t> jt;
        int pauli_at_jt = -1;
        for (uint32_t q = 0; q < n; ++q) {
            bool a = r.get(q), b = r.get(n + q);
            if (!a && !b) continue;
            int pauli = a && b ? 1 : (a ? 0 : 2);
            if (pauli != best_axis[q]) {
                jt = q;
                pauli_at_jt = pauli;
                break;
            }
        }
        if (!jt) break;  // no differing coordinate
        int sign = o.rng().bernoulli(0.5) ? +1 : -1;
        SignedPauli proj = axis_stabilizer(n, *jt, {pauli_at_jt, sign});
        ProductIteration record;
        if (hook) {
            record.t = t;
            record.candidate = candidate;
            record.conditioned_qubit = jt;
            record.conditioned_axis = ProductState::Axis{pauli_at_jt, sign};
            record.state_before = o.inspect_current();
            double tw = exact_weyl_expectation(o.inspect_current(), proj.x);
            record.projector_acceptance = 0.5 * (1.0 + sign * tw);
        }
        o.condition_on_pauli(proj);
        if (hook) {
            if (!o.degenerate()) record.state_after = o.inspect_current();
            hook(record);
        }
        if (o.degenerate()) break;
    }
    if (candidates.empty()) return std::nullopt;
    return candidates[o.rng().uniform_below(candidates.size())];
}

namespace {

int64_t product_repetitions(const ProductConfig& cfg, double per_run_theory) {
    double p_hat = std::max(per_run_theory, cfg.p_floor);
    return static_cast<int64_t>(std::ceil(std::log(2.0 / cfg.delta) / p_hat));
}

}  // namespace

ProductResult agnostic_product(OracleFactory& factory, const PackingSet& k,
                               const ProductConfig& cfg, const ProductHook& hook) {
    cfg.validate();
    uint32_t n = factory.base().n();
    double theta = packing_theta(k.mu());
    int t_max = static_cast<int>(std::floor(std::log(1.0 / cfg.tau) / std::log(1.0 / theta)));
    double per_iter = 2.0 / (3.0 * double(n) * double(k.size() - 1));
    double p_theory = std::pow(per_iter, double(t_max + 1)) / double(t_max + 1);
    int64_t runs = product_repetitions(cfg, p_theory);
    std::map<std::string, ProductState> dedup;
    for (int64_t r = 0; r < runs; ++r) {
        CopyOracle o = factory.make();
        try {
            auto got = agnostic_product_once(o, k, cfg.tau, hook);
            if (got) dedup.emplace(got->key(), *got);
        } catch (const BudgetExhausted&) {
            break;
        }
    }
    if (dedup.empty()) throw NoCandidateError();
    // Per-candidate product-PVM estimation.
    size_t m_count = dedup.size();
    int64_t shots = static_cast<int64_t>(
        std::ceil(2.0 * std::log(4.0 * double(m_count) / cfg.delta) / (cfg.eps * cfg.eps)));
    ProductResult res;
    res.runs = runs;
    res.list_size = static_cast<int64_t>(m_count);
    double best = -1;
    CopyOracle sel = factory.make();
    for (auto& [key, cand] : dedup) {
        int64_t hits = sel.count_pure_state_accept(cand.state_vector(), shots);
        double est = double(hits) / double(shots);
        if (est > best) {
            best = est;
            res.state = cand;
            res.estimated_fidelity = est;
        }
    }
    return res;
}

ProductResult agnostic_stab_product(OracleFactory& factory, const ProductConfig& cfg,
                                    const ProductHook& hook) {
    cfg.validate();
    int t_max = static_cast<int>(std::floor(std::log(1.0 / cfg.tau) / std::log(1.08)));
    // Per-run success floor tau * tau_t^3 / 6 per iteration.
    double p_theory = 1.0;
    for (int t = 0; t <= t_max; ++t)
        p_theory *= std::min(1.0, cfg.tau * std::pow(1.08 * cfg.tau, 3.0) / 6.0);
    p_theory /= double(t_max + 1);
    int64_t runs = product_repetitions(cfg, p_theory);
    std::map<std::string, ProductState> dedup;
    for (int64_t r = 0; r < runs; ++r) {
        CopyOracle o = factory.make();
        try {
            auto got = agnostic_stab_product_once(o, cfg.tau, hook);
            if (got) dedup.emplace(got->key(), *got);
        } catch (const BudgetExhausted&) {
            break;
        }
    }
    if (dedup.empty()) throw NoCandidateError();
    // Stabilizer product states are stabilizer states: classical shadows.
    std::vector<ProductState> list;
    std::vector<StabilizerState> targets;
    for (auto& [key, cand] : dedup) {
        list.push_back(cand);
        std::vector<SignedPauli> gens;
        for (uint32_t q = 0; q < cand.n(); ++q)
            gens.push_back(axis_stabilizer(cand.n(), q, (*cand.axes)[q]));
        targets.emplace_back(std::move(gens));
    }
    CopyOracle sel = factory.make();
    auto est = shadow_fidelities(sel, targets, cfg.eps / 2.0, cfg.delta / 2.0);
    size_t best = 0;
    for (size_t i = 1; i < est.size(); ++i)
        if (est[i] > est[best]) best = i;
    ProductResult res;
    res.state = list[best];
    res.estimated_fidelity = est[best];
    res.runs = runs;
    res.list_size = static_cast<int64_t>(list.size());
    return res;
}

}  // namespace stabtomo
