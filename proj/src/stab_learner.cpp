#include "stabtomo/stab_learner.hpp"

#include <cmath>
#include <map>

namespace stabtomo {

void BootstrapConfig::validate() const {
    if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("tau must be in (0, 1]");
    if (gamma <= 0.5 || gamma > 1.0) throw std::invalid_argument("gamma must be in (1/2, 1]");
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("delta must be in (0, 1)");
    if (eps <= 0.0 || eps > tau) throw std::invalid_argument("need 0 < eps <= tau");
    if (p_floor <= 0.0 || p_floor > 1.0) throw std::invalid_argument("bad p_floor");
}

int BootstrapConfig::iteration_cap() const {
    return static_cast<int>(std::floor(std::log(1.0 / tau) / std::log(1.08)));
}

namespace {

int64_t selection_sample_count(uint32_t n, double eps) {
    return static_cast<int64_t>(std::ceil(8.0 * (std::log(3.0 / (1.0 / 5.0)) + 4.0 * double(n)) / eps));
}

constexpr double kSelectionDelta = 1.0 / 5.0;

}  // namespace

int64_t bootstrap_iteration_copies(uint32_t n, double eps) {
    int64_t m = selection_sample_count(n, eps);
    int64_t m_bell = bell_measurement_count(size_t(m), 0.1, kSelectionDelta / 3.0);
    return 4 * m + 2 * m_bell + 4;
}

std::optional<Subspace> select_high_correlation(CopyOracle& o, double eps, double delta) {
    uint32_t n = o.n();
    int64_t m = static_cast<int64_t>(std::ceil(8.0 * (std::log(3.0 / delta) + 4.0 * n) / eps));
    // Collect distinct sampled strings with multiplicities.
    std::map<uint64_t, int64_t> sampled;
    if (n <= kBellTableQubitLimit) {
        auto counts = o.bell_difference_batch(m);
        for (uint64_t x = 0; x < counts.size(); ++x)
            if (counts[x] > 0) sampled[x] = counts[x];
    } else {
        for (int64_t i = 0; i < m; ++i) sampled[o.bell_difference_sample().to_u64()]++;
    }
    std::vector<BitVec> distinct;
    distinct.reserve(sampled.size());
    for (const auto& [x, c] : sampled) distinct.push_back(BitVec::from_u64(2 * n, x));
    // The union bound in the estimator is over the m raw samples.
    int64_t m_bell = bell_measurement_count(size_t(m), 0.1, delta / 3.0);
    auto estimates = estimate_correlations_fixed(o, distinct, m_bell);
    std::vector<BitVec> kept;
    for (const auto& e : estimates)
        if (e.value > 0.6) kept.push_back(e.x);
    Subspace span = Subspace::row_reduce(2 * n, kept);
    if (!span.is_isotropic()) return std::nullopt;  // abort
    return extend_to_lagrangian(span);
}

std::optional<StabilizerState> bootstrap_once(CopyOracle& o, const BootstrapConfig& cfg,
                                              const BootstrapHook& hook) {
    cfg.validate();
    uint32_t n = o.n();
    int t_max = cfg.iteration_cap();
    std::vector<StabilizerState> candidates;
    double tau_t = cfg.tau;
    for (int t = 0; t <= t_max; ++t) {
        double eps_t = 0.25 * (cfg.gamma - 0.5) * (cfg.gamma - 0.5) * tau_t * tau_t * tau_t * tau_t;
        int64_t need = bootstrap_iteration_copies(n, eps_t);
        if (!o.prepare_conditioned(need, 1.0 / 6.0, cfg.tau)) break;
        auto basis = select_high_correlation(o, eps_t, kSelectionDelta);
        if (!basis) break;  // anticommuting abort ends the loop like a copy shortage
        StabilizerState measured = o.measure_stabilizer_basis_on_base(*basis);
        candidates.push_back(measured);
        BitVec y = o.bell_difference_sample();
        int sign = o.rng().bernoulli(0.5) ? +1 : -1;
        BootstrapIteration record;
        if (hook) {
            record.t = t;
            record.lagrangian = *basis;
            record.measured = measured;
            record.state_before = o.inspect_current();
            double ty = exact_weyl_expectation(o.inspect_current(), y);
            record.sampled_correlation_before = ty * ty;
            record.sampled = SignedPauli(sign, y);
        }
        o.condition_on_pauli(SignedPauli(sign, y));
        if (hook) {
            if (!o.degenerate()) record.state_after = o.inspect_current();
            hook(record);
        }
        tau_t *= 1.08;
    }
    if (candidates.empty()) return std::nullopt;
    return candidates[o.rng().uniform_below(candidates.size())];
}

namespace {

int64_t repetition_count(const BootstrapConfig& cfg) {
    int t_max = cfg.iteration_cap();
    double g = cfg.gamma - 0.5;
    double per_iter = 0.25 * g * g * std::pow(cfg.tau, 4.0);
    double p_theory = std::pow(per_iter, double(t_max + 1)) / double(t_max + 1);
    double p_hat = std::max(p_theory, cfg.p_floor);
    return static_cast<int64_t>(std::ceil(std::log(1.0 / cfg.delta) / p_hat));
}

}  // namespace

ListDecodeResult list_decode(OracleFactory& factory, const BootstrapConfig& cfg,
                             const BootstrapHook& hook) {
    cfg.validate();
    int64_t runs = repetition_count(cfg);
    std::map<std::string, StabilizerState> dedup;
    for (int64_t r = 0; r < runs; ++r) {
        CopyOracle o = factory.make();
        try {
            auto got = bootstrap_once(o, cfg, hook);
            if (got) dedup.emplace(got->canonical_key(), *got);
        } catch (const BudgetExhausted&) {
            // A run that exhausted the trial budget yields nothing further.
            break;
        }
    }
    ListDecodeResult res;
    res.runs = runs;
    for (auto& [k, s] : dedup) res.states.push_back(std::move(s));
    return res;
}

AgnosticResult agnostic_stabilizer(OracleFactory& factory, const BootstrapConfig& cfg,
                                   const BootstrapHook& hook) {
    cfg.validate();
    BootstrapConfig inner = cfg;
    inner.gamma = 1.0;
    inner.delta = cfg.delta / 2.0;
    ListDecodeResult list = list_decode(factory, inner, hook);
    if (list.states.empty()) throw NoCandidateError();
    CopyOracle o = factory.make();
    auto estimates = shadow_fidelities(o, list.states, cfg.eps / 2.0, cfg.delta / 2.0);
    size_t best = 0;
    for (size_t i = 1; i < list.states.size(); ++i) {
        if (estimates[i] > estimates[best] + 1e-15 ||
            (estimates[i] == estimates[best] &&
             list.states[i].canonical_key() < list.states[best].canonical_key()))
            best = i;
    }
    AgnosticResult res;
    res.state = list.states[best];
    res.estimated_fidelity = estimates[best];
    res.list_size = static_cast<int64_t>(list.states.size());
    res.runs = list.runs;
    return res;
}

double estimate_stabilizer_fidelity(OracleFactory& factory, double eps, double delta,
                                    double p_floor) {
    BootstrapConfig cfg;
    cfg.tau = eps;
    cfg.gamma = 1.0;
    cfg.delta = delta / 2.0;
    cfg.eps = eps;
    cfg.p_floor = p_floor;
    ListDecodeResult list = list_decode(factory, cfg);
    if (list.states.empty()) return 0.0;
    CopyOracle o = factory.make();
    auto estimates = shadow_fidelities(o, list.states, eps / 2.0, delta / 2.0);
    double best = 0.0;
    for (double e : estimates) best = std::max(best, e);
    return best;
}

}  // namespace stabtomo
