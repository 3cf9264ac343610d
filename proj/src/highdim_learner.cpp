#include "stabtomo/highdim_learner.hpp"

#include <cmath>

#include "stabtomo/stab_learner.hpp"

namespace stabtomo {

void HighDimConfig::validate(uint32_t n) const {
    if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("tau must be in (0, 1]");
    if (eps <= 0.0 || eps > tau) throw std::invalid_argument("need 0 < eps <= tau");
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("delta must be in (0, 1)");
    if (t >= n) throw std::invalid_argument("t must be below n");
}

uint32_t HighDimConfig::t_prime(uint32_t n) const {
    double raw = 2.0 * double(t) + 2.0 + 4.0 * std::log2(1.0 / tau);
    uint32_t tp = static_cast<uint32_t>(std::ceil(raw - 1e-12));
    if (tp < t) tp = t;
    if (tp > n) tp = n;
    return tp;
}

int HighDimConfig::iteration_cap() const {
    return static_cast<int>(std::floor(std::log(1.0 / tau) / std::log(1.08))) + 1;
}

Eigen::MatrixXcd HighDimOutput::represented_density(uint32_t n) const {
    uint32_t t = block_state.n();
    uint64_t dim = uint64_t(1) << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    // |0^{n-t}><0^{n-t}| x block on the (prefix, suffix) split, prefix low bits.
    uint64_t tdim = uint64_t(1) << t;
    for (uint64_t u = 0; u < tdim; ++u)
        for (uint64_t v = 0; v < tdim; ++v)
            m(u << (n - t), v << (n - t)) = block_state.data()(u, v);
    return conjugate_by_circuit(clifford.inverse(), m);
}

CliffordCircuit find_heavy_subspace(CopyOracle& o, const Subspace& lagrangian, uint32_t t,
                                    uint32_t t_prime, double tau, double eps) {
    (void)t;
    (void)tau;
    (void)eps;
    uint32_t n = o.n();
    if (lagrangian.dim() != n) throw std::invalid_argument("basis is not a Lagrangian");
    if (t_prime > n) throw std::invalid_argument("t' above the register size");
    CliffordCircuit c1 = synthesize_clifford(n, lagrangian.basis(), BlockSide::Trailing);
    auto outcomes = o.measure_computational_in_basis(c1, n, int64_t(t_prime) + 1);
    AffineSpace span = affine_span(outcomes);
    Subspace complement = span.directions.orthogonal_complement(F2Form::Standard);
    if (complement.dim() < n - t_prime)
        throw std::logic_error("affine span exceeded t' dimensions");
    std::vector<BitVec> sub_basis;
    for (uint32_t i = 0; i < n - t_prime; ++i)
        sub_basis.push_back(z_string_of(complement.basis()[i]));
    CliffordCircuit c = c1;
    if (n - t_prime > 0) {
        CliffordCircuit c2 = synthesize_clifford(n, sub_basis, BlockSide::Leading);
        c.append(c2);
        BitVec s = o.measure_computational_in_basis(c, n - t_prime, 1)[0];
        for (uint32_t q = 0; q < n - t_prime; ++q)
            if (s.get(q)) c.x(q);
    }
    return c;
}

namespace {

// One pass of the exponential-time loop (uniform Pauli conditioning,
// select-all high-correlation strings). Returns an n0-qubit circuit.
CliffordCircuit exponential_single_run(CopyOracle& o, uint32_t t, double tau, double eps) {
    uint32_t n0 = o.n();
    int k_max = static_cast<int>(std::floor(std::log(1.0 / tau) / std::log(1.08))) + 1;
    std::vector<CliffordCircuit> candidates;
    CliffordCircuit chain(n0);  // composition of the conditioning rotations
    for (int k = 0; k <= k_max; ++k) {
        uint32_t nk = o.n();
        if (nk <= t) break;
        double tau_k = std::min(1.0, std::pow(1.08, k) * tau);
        double eps_k = std::min(1.0, std::pow(1.08, k) * eps);
        uint64_t strings = uint64_t(1) << (2 * nk);
        int64_t m_bell = static_cast<int64_t>(
            std::ceil(800.0 * std::log(6.0 * double(strings))));
        int64_t need = 2 * m_bell + int64_t(t) + 2;
        if (!o.prepare_conditioned(need, 2.0 / 3.0, tau)) break;
        // Select all high-correlation strings: estimate everything to 0.05.
        std::vector<BitVec> all;
        all.reserve(strings);
        for (uint64_t b = 0; b < strings; ++b) all.push_back(BitVec::from_u64(2 * nk, b));
        auto est = estimate_correlations_fixed(o, all, m_bell);
        std::vector<BitVec> kept;
        for (const auto& e : est)
            if (e.value >= 0.6) kept.push_back(e.x);
        Subspace span = Subspace::row_reduce(2 * nk, kept);
        if (!span.is_isotropic()) break;
        Subspace basis = extend_to_lagrangian(span);
        CliffordCircuit uk = find_heavy_subspace(o, basis, t, t, tau_k, eps_k);
        CliffordCircuit candidate = chain;
        candidate.append(uk, n0 - nk);
        candidates.push_back(candidate);
        // Uniform signed Pauli conditioning.
        uint64_t q_bits = o.rng().uniform_below(strings);
        if (q_bits == 0) break;
        int sign = o.rng().bernoulli(0.5) ? +1 : -1;
        SignedPauli q(sign, BitVec::from_u64(2 * nk, q_bits));
        CliffordCircuit vk = synthesize_to_z(nk, q, 0);
        chain.append(vk, n0 - nk);
        o.condition_on_circuit_prefix(vk, BitVec(1));
        if (o.degenerate()) break;
    }
    if (candidates.empty()) return CliffordCircuit(n0);
    return candidates[o.rng().uniform_below(candidates.size())];
}

}  // namespace

CliffordCircuit highdim_exponential(CopyOracle& o, uint32_t t, double tau, double eps,
                                    double delta, double p_floor) {
    uint32_t n0 = o.n();
    if (t >= n0) throw std::invalid_argument("t must be below the register size");
    int k_max = static_cast<int>(std::floor(std::log(1.0 / tau) / std::log(1.08))) + 1;
    double run_eps = eps / 2.0;
    double p_theory = std::pow(6.0 * double(uint64_t(1) << (2 * n0)), -double(k_max)) *
                      std::pow(run_eps, double(t) + 1.0) * std::max(1e-300, tau - run_eps) /
                      double(k_max + 1);
    double p_hat = std::max(p_theory, p_floor);
    int64_t runs = static_cast<int64_t>(std::ceil(std::log(2.0 / delta) / p_hat));
    std::vector<CliffordCircuit> candidates;
    candidates.reserve(runs);
    for (int64_t r = 0; r < runs; ++r) {
        CopyOracle run = o.clone();
        candidates.push_back(exponential_single_run(run, t, tau, run_eps));
    }
    CopyOracle sel = o.clone();
    auto weights = direct_block_fidelities(sel, candidates, t, eps / 4.0, delta / 2.0);
    size_t best = 0;
    for (size_t i = 1; i < weights.size(); ++i)
        if (weights[i] > weights[best]) best = i;
    return candidates[best];
}

CliffordCircuit highdim_step2(CopyOracle& o, const Subspace& lagrangian, uint32_t t,
                              uint32_t t_prime, double tau, double eps, double delta,
                              const HighDimConfig& cfg) {
    uint32_t n = o.n();
    double p_theory = std::pow(eps / 4.0, double(t_prime) + 1.0) * tau / 8.0;
    double p_hat = std::max(p_theory, cfg.p_floor_step2);
    int64_t runs = static_cast<int64_t>(std::ceil(std::log(2.0 / delta) / p_hat));
    std::vector<CliffordCircuit> candidates;
    candidates.reserve(runs);
    for (int64_t r = 0; r < runs; ++r) {
        CliffordCircuit c1 = find_heavy_subspace(o, lagrangian, t, t_prime, tau, eps / 4.0);
        CliffordCircuit composed = c1;
        if (t_prime > t) {
            CopyOracle residual = o.clone();
            residual.condition_on_circuit_prefix(c1, BitVec(n - t_prime));
            if (residual.degenerate()) {
                candidates.push_back(composed);
                continue;
            }
            CliffordCircuit c2 = highdim_exponential(residual, t, tau / 2.0, eps / 4.0, 0.5,
                                                     cfg.p_floor_exp);
            composed.append(c2, n - t_prime);
        }
        candidates.push_back(composed);
    }
    CopyOracle sel = o.clone();
    auto weights = direct_block_fidelities(sel, candidates, t, eps / 4.0, delta / 2.0);
    size_t best = 0;
    for (size_t i = 1; i < weights.size(); ++i)
        if (weights[i] > weights[best]) best = i;
    return candidates[best];
}

CliffordCircuit highdim_bootstrap(CopyOracle& o, const HighDimConfig& cfg,
                                  const HighDimHook& hook) {
    uint32_t n0 = o.n();
    cfg.validate(n0);
    int k_max = cfg.iteration_cap();
    uint32_t t_prime_global = cfg.t_prime(n0);
    std::vector<CliffordCircuit> candidates;
    CliffordCircuit chain(n0);
    for (int k = 0; k <= k_max; ++k) {
        uint32_t nk = o.n();
        if (nk <= cfg.t) break;
        double tau_k = std::min(1.0, std::pow(1.08, k) * cfg.tau);
        double eps_k = std::min(tau_k, std::pow(1.08, k) * cfg.eps);
        double sel_eps = std::pow(cfg.tau, 4.0) / std::pow(2.0, 2.0 * cfg.t + 2.0);
        int64_t m1 = bootstrap_iteration_copies(nk, sel_eps);
        if (!o.prepare_conditioned(m1, 2.0 / 3.0, cfg.tau)) break;
        auto basis = select_high_correlation(o, sel_eps, 1.0 / 3.0);
        if (!basis) break;
        uint32_t tp = std::min<uint32_t>(t_prime_global, nk);
        if (tp < cfg.t) break;
        CliffordCircuit uk = highdim_step2(o, *basis, cfg.t, tp, tau_k, eps_k, 1.0 / 3.0, cfg);
        CliffordCircuit candidate = chain;
        candidate.append(uk, n0 - nk);
        candidates.push_back(candidate);
        BitVec q = o.bell_difference_sample();
        if (q.is_zero()) break;
        int sign = o.rng().bernoulli(0.5) ? +1 : -1;
        CliffordCircuit vk = synthesize_to_z(nk, SignedPauli(sign, q), 0);
        chain.append(vk, n0 - nk);
        HighDimIteration record;
        if (hook) {
            record.k = k;
            record.sampled = SignedPauli(sign, q);
            double tq = exact_weyl_expectation(o.inspect_current(), q);
            record.sampled_correlation_before = tq * tq;
            record.rotation = vk;
            record.state_before = o.inspect_current();
        }
        o.condition_on_circuit_prefix(vk, BitVec(1));
        if (hook) {
            if (!o.degenerate()) record.state_after = o.inspect_current();
            hook(record);
        }
        if (o.degenerate()) break;
    }
    if (candidates.empty()) return CliffordCircuit(n0);
    return candidates[o.rng().uniform_below(candidates.size())];
}

HighDimResult agnostic_highdim(OracleFactory& factory, const HighDimConfig& cfg) {
    uint32_t n = factory.base().n();
    cfg.validate(n);
    HighDimConfig inner = cfg;
    inner.eps = cfg.eps / 3.0;
    int k_max = cfg.iteration_cap();
    double p_theory = 2.0 *
                      std::pow(std::pow(cfg.tau, 4.0) / std::pow(2.0, 2.0 * cfg.t + 4.0),
                               double(k_max)) /
                      (3.0 * double(k_max + 1));
    double p_hat = std::max(p_theory, cfg.p_floor_outer);
    int64_t runs = static_cast<int64_t>(std::ceil(std::log(2.0 / cfg.delta) / p_hat));
    std::vector<CliffordCircuit> candidates;
    candidates.reserve(runs);
    for (int64_t r = 0; r < runs; ++r) {
        CopyOracle o = factory.make();
        try {
            candidates.push_back(highdim_bootstrap(o, inner));
        } catch (const BudgetExhausted&) {
            break;
        }
    }
    if (candidates.empty()) throw NoCandidateError();
    CopyOracle sel = factory.make();
    auto weights = direct_block_fidelities(sel, candidates, cfg.t, cfg.eps / 6.0, cfg.delta / 2.0);
    size_t best = 0;
    for (size_t i = 1; i < weights.size(); ++i)
        if (weights[i] > weights[best]) best = i;

    CopyOracle tomo = factory.make();
    auto block = block_tomography_given_clifford(tomo, candidates[best], cfg.t, cfg.tau / 3.0,
                                                 cfg.eps / 3.0, cfg.delta / 2.0);
    HighDimResult res;
    res.output.clifford = candidates[best];
    res.output.block_state = block ? *block : DensityMatrix::maximally_mixed(cfg.t);
    res.selected_block_weight = weights[best];
    res.runs = runs;
    return res;
}

HighDimResult agnostic_highdim_sweep(OracleFactory& factory, HighDimConfig cfg,
                                     uint32_t t_max_sweep) {
    uint32_t n = factory.base().n();
    t_max_sweep = std::min(t_max_sweep, n - 1);
    std::optional<HighDimResult> best;
    for (uint32_t t = 0; t <= t_max_sweep; ++t) {
        cfg.t = t;
        HighDimResult res = agnostic_highdim(factory, cfg);
        if (res.selected_block_weight >= cfg.tau - cfg.eps) return res;
        if (!best || res.selected_block_weight > best->selected_block_weight) best = res;
    }
    if (!best) throw NoCandidateError();
    return *best;
}

}  // namespace stabtomo
