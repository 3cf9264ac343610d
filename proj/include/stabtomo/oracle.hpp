#pragma once

#include <functional>
#include <memory>

#include "stabtomo/density.hpp"

namespace stabtomo {

// Copy accounting. Conditioned copies consumed by primitives cost 4 (Bell
// difference), 2 (one Bell-basis measurement) or 1 (single-copy measurement)
// each; base copies additionally include accept/reject retries of the
// conditioning chain.
struct SampleLedger {
    int64_t base_copies = 0;
    int64_t conditioned_copies = 0;
    int64_t bell_difference_samples = 0;
    int64_t bell_measurements = 0;
    int64_t single_copy_measurements = 0;
    // Measurements taken on the unconditioned base state (one base copy
    // each), outside the conditioned-copy accounting.
    int64_t base_measurements = 0;

    int64_t expected_conditioned() const {
        return 4 * bell_difference_samples + 2 * bell_measurements + single_copy_measurements;
    }
    void merge(const SampleLedger& o) {
        base_copies += o.base_copies;
        conditioned_copies += o.conditioned_copies;
        bell_difference_samples += o.bell_difference_samples;
        bell_measurements += o.bell_measurements;
        single_copy_measurements += o.single_copy_measurements;
        base_measurements += o.base_measurements;
    }
};

struct BudgetExhausted : std::runtime_error {
    BudgetExhausted() : std::runtime_error("base-copy budget exhausted") {}
};

enum class PauliAxis { X, Y, Z };

// Sample-metered access to fresh copies of an unknown state, optionally
// conditioned on a projector chain. Learners may call only the measurement
// primitives; the dense state is exposed solely through inspect_* for tests,
// instrumentation and reporting.
class CopyOracle {
  public:
    CopyOracle(DensityMatrix base, std::shared_ptr<StateCache> base_cache, Rng rng,
               std::shared_ptr<SampleLedger> ledger, int64_t budget_cap);

    uint32_t base_n() const { return base_.n(); }
    uint32_t n() const { return current_->n(); }
    const SampleLedger& ledger() const { return *ledger_; }
    Rng& rng() { return rng_; }

    // Fresh oracle with the same conditioning chain and shared ledger, fresh
    // rng substream, empty pool.
    CopyOracle clone();

    // --- conditioning ---------------------------------------------------
    // Appends the projector (I + s W_x)/2 on the current register.
    void condition_on_pauli(const SignedPauli& p);
    // Appends |psi><psi| on one qubit.
    void condition_on_single_qubit_state(uint32_t qubit, const Eigen::Vector2cd& psi);
    // Applies the circuit, conditions the first k qubits on the basis string
    // `prefix`, and drops them from the register.
    void condition_on_circuit_prefix(const CliffordCircuit& c, const BitVec& prefix);

    size_t conditioning_depth() const { return depth_; }
    bool degenerate() const { return p_accept_ <= 0.0; }

    // Accept/reject preparation of `copies` conditioned copies inside the
    // Chernoff budget ceil((2/tau_floor)(copies + ln(1/delta))). On success
    // the copies join the pool; on failure the whole budget is charged.
    bool prepare_conditioned(int64_t copies, double delta, double tau_floor);
    int64_t pool() const { return pool_; }

    // --- measurement primitives on the conditioned state ----------------
    BitVec bell_difference_sample();
    // Counts over the 4^n packed-string table.
    std::vector<int64_t> bell_difference_batch(int64_t m);
    uint64_t bell_measurement_sample();
    std::vector<int64_t> bell_measurement_batch(int64_t m);
    bool measure_pauli_projector(const SignedPauli& p);
    int measure_weyl_eigenvalue(const BitVec& x);
    int64_t count_weyl_plus(const BitVec& x, int64_t shots);
    BitVec measure_computational(uint32_t k);
    std::vector<BitVec> measure_computational_in_basis(const CliffordCircuit& c, uint32_t k,
                                                       int64_t shots);
    // Count of shots whose first-k-qubit outcome is all zero, measured after
    // applying the circuit; exact binomial batch.
    int64_t count_prefix_zero_in_basis(const CliffordCircuit& c, uint32_t k, int64_t shots);
    // All qubits measured in one Pauli axis; counts over outcome strings
    // (bit q set = eigenvalue -1 on qubit q).
    std::vector<int64_t> measure_axis_batch(PauliAxis axis, int64_t m);
    // PVM {|target><target|, I - ...}; returns acceptance count.
    int64_t count_pure_state_accept(const Eigen::VectorXcd& target, int64_t shots);
    // Classical-shadow snapshot: measure U rho U^dag in the computational
    // basis, returning the outcome index.
    uint64_t shadow_snapshot(const CliffordCircuit& u);

    // --- measurements on the unconditioned base state -------------------
    // Joint eigenbasis of the Lagrangian span(H); returns the observed
    // stabilizer state. One base copy.
    StabilizerState measure_stabilizer_basis_on_base(const Subspace& lagrangian);
    // Simultaneous measurement of commuting signed strings; returns observed
    // signs (+1/-1 per string). One base copy.
    std::vector<int> measure_commuting_on_base(std::span<const BitVec> strings);

    // --- inspection (not for learners) -----------------------------------
    const DensityMatrix& inspect_current() const { return current_->state(); }
    const DensityMatrix& inspect_base() const { return base_; }
    double inspect_acceptance() const { return p_accept_; }

  private:
    void charge_base(int64_t copies);
    void consume_conditioned(int64_t copies);
    uint64_t bell_measurement_sample_impl();
    StateCache& cache() { return *current_; }

    DensityMatrix base_;
    std::shared_ptr<StateCache> base_cache_;
    std::shared_ptr<StateCache> current_;  // == base_cache_ while unconditioned
    double p_accept_ = 1.0;
    size_t depth_ = 0;
    int64_t pool_ = 0;
    Rng rng_;
    std::shared_ptr<SampleLedger> ledger_;
    int64_t budget_cap_;
};

// Per-trial factory: one base state, one shared cache, one ledger and budget,
// fresh rng substream per oracle.
class OracleFactory {
  public:
    OracleFactory(DensityMatrix base, Rng rng, int64_t budget_cap);

    CopyOracle make();
    const SampleLedger& ledger() const { return *ledger_; }
    const DensityMatrix& base() const { return base_; }
    std::shared_ptr<StateCache> base_cache() const { return cache_; }

  private:
    DensityMatrix base_;
    std::shared_ptr<StateCache> cache_;
    std::shared_ptr<SampleLedger> ledger_;
    Rng rng_;
    int64_t budget_cap_;
};

}  // namespace stabtomo
