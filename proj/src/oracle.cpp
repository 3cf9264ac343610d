#include "stabtomo/oracle.hpp"

#include <cmath>

namespace stabtomo {

namespace {

constexpr double kDegenerate = 1e-14;

void apply_single_qubit_kraus(const Eigen::Matrix2cd& k, uint32_t q, Eigen::MatrixXcd& m) {
    uint64_t dim = uint64_t(m.rows());
    uint64_t bit = uint64_t(1) << q;
    for (uint64_t r = 0; r < dim; ++r) {
        if (r & bit) continue;
        Eigen::RowVectorXcd a = m.row(r), b = m.row(r | bit);
        m.row(r) = k(0, 0) * a + k(0, 1) * b;
        m.row(r | bit) = k(1, 0) * a + k(1, 1) * b;
    }
    Eigen::Matrix2cd kd = k.adjoint();
    for (uint64_t c = 0; c < dim; ++c) {
        if (c & bit) continue;
        Eigen::VectorXcd a = m.col(c), b = m.col(c | bit);
        m.col(c) = a * kd(0, 0) + b * kd(1, 0);
        m.col(c | bit) = a * kd(0, 1) + b * kd(1, 1);
    }
}

}  // namespace

CopyOracle::CopyOracle(DensityMatrix base, std::shared_ptr<StateCache> base_cache, Rng rng,
                       std::shared_ptr<SampleLedger> ledger, int64_t budget_cap)
    : base_(std::move(base)),
      base_cache_(std::move(base_cache)),
      rng_(std::move(rng)),
      ledger_(std::move(ledger)),
      budget_cap_(budget_cap) {
    if (!base_cache_) base_cache_ = std::make_shared<StateCache>(base_);
    if (!ledger_) ledger_ = std::make_shared<SampleLedger>();
    current_ = base_cache_;
}

CopyOracle CopyOracle::clone() {
    CopyOracle c(base_, base_cache_, rng_.substream("clone"), ledger_, budget_cap_);
    c.current_ = current_;
    c.p_accept_ = p_accept_;
    c.depth_ = depth_;
    return c;
}

void CopyOracle::charge_base(int64_t copies) {
    ledger_->base_copies += copies;
    if (ledger_->base_copies > budget_cap_) throw BudgetExhausted();
}

void CopyOracle::consume_conditioned(int64_t copies) {
    ledger_->conditioned_copies += copies;
    int64_t from_pool = std::min(pool_, copies);
    pool_ -= from_pool;
    int64_t deficit = copies - from_pool;
    if (deficit == 0) return;
    if (depth_ == 0) {
        charge_base(deficit);
        return;
    }
    if (p_accept_ <= kDegenerate) throw BudgetExhausted();
    int64_t cap_left = budget_cap_ - ledger_->base_copies;
    int64_t attempts = rng_.attempts_for_successes(deficit, p_accept_, cap_left);
    charge_base(attempts);  // throws when attempts exceed the remaining cap
}

void CopyOracle::condition_on_pauli(const SignedPauli& p) {
    if (p.x.len() != 2 * n()) throw std::invalid_argument("conditioning projector length mismatch");
    const Eigen::MatrixXcd& m = current_->state().data();
    double tw = exact_weyl_expectation(current_->state(), p.x);
    double p_step = 0.5 * (1.0 + p.sign * tw);
    ++depth_;
    pool_ = 0;
    if (p_step <= kDegenerate) {
        p_accept_ = 0.0;
        return;
    }
    Eigen::MatrixXcd wm = m;
    apply_weyl_left(p, wm);   // s W rho
    Eigen::MatrixXcd wmw = wm;
    apply_weyl_right(p, wmw);  // s W rho s W = W rho W
    Eigen::MatrixXcd mw = m;
    apply_weyl_right(p, mw);  // rho s W
    Eigen::MatrixXcd proj = 0.25 * (m + wm + mw + wmw) / p_step;
    current_ = std::make_shared<StateCache>(DensityMatrix(n(), std::move(proj)));
    p_accept_ *= p_step;
}

void CopyOracle::condition_on_single_qubit_state(uint32_t qubit, const Eigen::Vector2cd& psi) {
    Eigen::Vector2cd v = psi / psi.norm();
    Eigen::Matrix2cd proj = v * v.adjoint();
    Eigen::MatrixXcd m = current_->state().data();
    apply_single_qubit_kraus(proj, qubit, m);
    double p_step = m.trace().real();
    ++depth_;
    pool_ = 0;
    if (p_step <= kDegenerate) {
        p_accept_ = 0.0;
        return;
    }
    m /= p_step;
    current_ = std::make_shared<StateCache>(DensityMatrix(n(), std::move(m)));
    p_accept_ *= p_step;
}

void CopyOracle::condition_on_circuit_prefix(const CliffordCircuit& c, const BitVec& prefix) {
    if (c.n != n()) throw std::invalid_argument("conditioning circuit register mismatch");
    uint32_t k = prefix.len();
    if (k > n()) throw std::invalid_argument("conditioning prefix too long");
    Eigen::MatrixXcd rotated = conjugate_by_circuit(c, current_->state().data());
    Eigen::MatrixXcd block = prefix_block(rotated, n(), prefix);
    double p_step = block.trace().real();
    ++depth_;
    pool_ = 0;
    if (p_step <= kDegenerate) {
        p_accept_ = 0.0;
        return;
    }
    block /= p_step;
    current_ = std::make_shared<StateCache>(DensityMatrix(n() - k, std::move(block)));
    p_accept_ *= p_step;
}

bool CopyOracle::prepare_conditioned(int64_t copies, double delta, double tau_floor) {
    if (copies <= 0) return true;
    if (tau_floor <= 0.0 || tau_floor > 1.0) throw std::invalid_argument("bad tau floor");
    int64_t budget = static_cast<int64_t>(
        std::ceil((2.0 / tau_floor) * (double(copies) + std::log(1.0 / delta))));
    if (depth_ == 0) {
        // No conditioning: every base copy is a conditioned copy.
        charge_base(copies);
        pool_ += copies;
        return true;
    }
    if (p_accept_ <= kDegenerate) {
        charge_base(budget);
        return false;
    }
    int64_t attempts = rng_.attempts_for_successes(copies, p_accept_, budget);
    if (attempts > budget) {
        charge_base(budget);
        return false;
    }
    charge_base(attempts);
    pool_ += copies;
    return true;
}

BitVec CopyOracle::bell_difference_sample() {
    consume_conditioned(4);
    ledger_->bell_difference_samples += 1;
    if (n() <= kBellTableQubitLimit) {
        uint64_t x = cache().bell_difference_sampler().sample(rng_);
        return BitVec::from_u64(2 * n(), x);
    }
    uint64_t a = bell_measurement_sample_impl();
    uint64_t b = bell_measurement_sample_impl();
    return BitVec::from_u64(2 * n(), a ^ b);
}

std::vector<int64_t> CopyOracle::bell_difference_batch(int64_t m) {
    if (n() > kBellTableQubitLimit) throw std::runtime_error("Bell difference batch beyond table");
    consume_conditioned(4 * m);
    ledger_->bell_difference_samples += m;
    return rng_.multinomial(m, cache().bell_difference_table());
}

uint64_t CopyOracle::bell_measurement_sample_impl() {
    if (n() <= 4) return cache().bell_measurement_sampler().sample(rng_);
    const auto& sys = cache().eigensystem();
    size_t k = sys.sampler.sample(rng_);
    size_t l = sys.sampler.sample(rng_);
    return cache().pure_pair_bell_sampler(k, l).sample(rng_);
}

uint64_t CopyOracle::bell_measurement_sample() {
    consume_conditioned(2);
    ledger_->bell_measurements += 1;
    return bell_measurement_sample_impl();
}

std::vector<int64_t> CopyOracle::bell_measurement_batch(int64_t m) {
    consume_conditioned(2 * m);
    ledger_->bell_measurements += m;
    if (n() <= 4) return rng_.multinomial(m, cache().bell_measurement_table());
    std::vector<int64_t> counts(uint64_t(1) << (2 * n()), 0);
    for (int64_t i = 0; i < m; ++i) counts[bell_measurement_sample_impl()]++;
    return counts;
}

bool CopyOracle::measure_pauli_projector(const SignedPauli& p) {
    consume_conditioned(1);
    ledger_->single_copy_measurements += 1;
    double tw = exact_weyl_expectation(current_->state(), p.x);
    double accept = std::clamp(0.5 * (1.0 + p.sign * tw), 0.0, 1.0);
    return rng_.bernoulli(accept);
}

int CopyOracle::measure_weyl_eigenvalue(const BitVec& x) {
    consume_conditioned(1);
    ledger_->single_copy_measurements += 1;
    double tw = exact_weyl_expectation(current_->state(), x);
    double p_plus = std::clamp(0.5 * (1.0 + tw), 0.0, 1.0);
    return rng_.bernoulli(p_plus) ? +1 : -1;
}

int64_t CopyOracle::count_weyl_plus(const BitVec& x, int64_t shots) {
    consume_conditioned(shots);
    ledger_->single_copy_measurements += shots;
    double tw = exact_weyl_expectation(current_->state(), x);
    double p_plus = std::clamp(0.5 * (1.0 + tw), 0.0, 1.0);
    return rng_.binomial(shots, p_plus);
}

BitVec CopyOracle::measure_computational(uint32_t k) {
    if (k == 0 || k > n()) throw std::invalid_argument("bad prefix length");
    consume_conditioned(1);
    ledger_->single_copy_measurements += 1;
    const auto& diag = cache().computational_diagonal();
    DiscreteSampler sampler(diag);
    uint64_t t = sampler.sample(rng_);
    return BitVec::from_u64(n(), t).prefix(k);
}

std::vector<BitVec> CopyOracle::measure_computational_in_basis(const CliffordCircuit& c,
                                                               uint32_t k, int64_t shots) {
    if (c.n != n()) throw std::invalid_argument("basis circuit register mismatch");
    if (k == 0 || k > n()) throw std::invalid_argument("bad prefix length");
    consume_conditioned(shots);
    ledger_->single_copy_measurements += shots;
    Eigen::MatrixXcd rotated = conjugate_by_circuit(c, current_->state().data());
    std::vector<double> diag(rotated.rows());
    for (Eigen::Index t = 0; t < rotated.rows(); ++t) diag[t] = std::max(0.0, rotated(t, t).real());
    DiscreteSampler sampler(diag);
    std::vector<BitVec> out;
    out.reserve(shots);
    for (int64_t i = 0; i < shots; ++i)
        out.push_back(BitVec::from_u64(n(), sampler.sample(rng_)).prefix(k));
    return out;
}

int64_t CopyOracle::count_prefix_zero_in_basis(const CliffordCircuit& c, uint32_t k,
                                               int64_t shots) {
    if (c.n != n()) throw std::invalid_argument("basis circuit register mismatch");
    if (k == 0 || k > n()) throw std::invalid_argument("bad prefix length");
    consume_conditioned(shots);
    ledger_->single_copy_measurements += shots;
    Eigen::MatrixXcd rotated = conjugate_by_circuit(c, current_->state().data());
    uint64_t prefix_mask = (uint64_t(1) << k) - 1;
    double p0 = 0;
    for (Eigen::Index t = 0; t < rotated.rows(); ++t)
        if ((uint64_t(t) & prefix_mask) == 0) p0 += std::max(0.0, rotated(t, t).real());
    return rng_.binomial(shots, std::min(1.0, p0));
}

std::vector<int64_t> CopyOracle::measure_axis_batch(PauliAxis axis, int64_t m) {
    consume_conditioned(m);
    ledger_->single_copy_measurements += m;
    CliffordCircuit rot(n());
    for (uint32_t q = 0; q < n(); ++q) {
        if (axis == PauliAxis::X) {
            rot.h(q);
        } else if (axis == PauliAxis::Y) {
            // S^dagger then H maps the Y eigenbasis to the computational one.
            rot.z(q);
            rot.s(q);
            rot.h(q);
        }
    }
    Eigen::MatrixXcd rotated = conjugate_by_circuit(rot, current_->state().data());
    std::vector<double> diag(rotated.rows());
    for (Eigen::Index t = 0; t < rotated.rows(); ++t) diag[t] = std::max(0.0, rotated(t, t).real());
    return rng_.multinomial(m, diag);
}

int64_t CopyOracle::count_pure_state_accept(const Eigen::VectorXcd& target, int64_t shots) {
    consume_conditioned(shots);
    ledger_->single_copy_measurements += shots;
    double p = exact_fidelity(current_->state(), target);
    return rng_.binomial(shots, p);
}

uint64_t CopyOracle::shadow_snapshot(const CliffordCircuit& u) {
    if (u.n != n()) throw std::invalid_argument("snapshot circuit register mismatch");
    consume_conditioned(1);
    ledger_->single_copy_measurements += 1;
    const auto& sys = cache().eigensystem();
    size_t k = sys.sampler.sample(rng_);
    Eigen::VectorXcd v = apply_circuit(u, sys.vectors.col(k));
    std::vector<double> probs(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) probs[i] = std::norm(v[i]);
    DiscreteSampler sampler(probs);
    return sampler.sample(rng_);
}

std::vector<int> CopyOracle::measure_commuting_on_base(std::span<const BitVec> strings) {
    charge_base(1);
    ledger_->base_measurements += 1;
    Eigen::MatrixXcd state = base_.data();
    std::vector<int> signs;
    signs.reserve(strings.size());
    for (const BitVec& x : strings) {
        DensityMatrix cur(base_.n(), state);
        double tw = exact_weyl_expectation(cur, x);
        double p_plus = std::clamp(0.5 * (1.0 + tw), 0.0, 1.0);
        int s = rng_.bernoulli(p_plus) ? +1 : -1;
        signs.push_back(s);
        SignedPauli sp(s, x);
        Eigen::MatrixXcd wm = state;
        apply_weyl_left(sp, wm);
        Eigen::MatrixXcd mw = state;
        apply_weyl_right(sp, mw);
        Eigen::MatrixXcd wmw = wm;
        apply_weyl_right(sp, wmw);
        double p_step = s > 0 ? p_plus : 1.0 - p_plus;
        state = 0.25 * (state + wm + mw + wmw) / p_step;
    }
    return signs;
}

StabilizerState CopyOracle::measure_stabilizer_basis_on_base(const Subspace& lagrangian) {
    if (lagrangian.ambient_dim() != 2 * base_.n() || lagrangian.dim() != base_.n())
        throw std::invalid_argument("measurement basis is not a Lagrangian of the base register");
    if (!lagrangian.is_isotropic())
        throw std::invalid_argument("measurement basis is not isotropic");
    std::vector<int> signs = measure_commuting_on_base(lagrangian.basis());
    std::vector<SignedPauli> gens;
    for (size_t i = 0; i < signs.size(); ++i)
        gens.emplace_back(signs[i], lagrangian.basis()[i]);
    return StabilizerState(std::move(gens));
}

OracleFactory::OracleFactory(DensityMatrix base, Rng rng, int64_t budget_cap)
    : base_(std::move(base)),
      cache_(std::make_shared<StateCache>(base_)),
      ledger_(std::make_shared<SampleLedger>()),
      rng_(std::move(rng)),
      budget_cap_(budget_cap) {}

CopyOracle OracleFactory::make() {
    return CopyOracle(base_, cache_, rng_.substream("oracle"), ledger_, budget_cap_);
}

}  // namespace stabtomo
