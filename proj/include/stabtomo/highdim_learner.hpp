#pragma once

#include "stabtomo/estimators.hpp"
#include "stabtomo/oracle.hpp"

namespace stabtomo {

struct HighDimConfig {
    uint32_t t = 1;      // nullity parameter of the class S^{n-t}
    double tau = 1.0;    // promise F(rho, S^{n-t}) >= tau
    double eps = 0.1;
    double delta = 0.2;
    // Success-probability floors for the repeat-and-select wrappers, from the
    // outermost inward: the theory bounds are astronomically conservative, so
    // repetition counts use max(theory, floor).
    double p_floor_outer = 1e-6;
    double p_floor_step2 = 0.1;
    double p_floor_exp = 0.05;

    void validate(uint32_t n) const;
    // t' = ceil(2t + 2 + 4 log2(1/tau)), clamped into [t, n].
    uint32_t t_prime(uint32_t n) const;
    int iteration_cap() const;  // k_max = floor(log_{1.08}(1/tau)) + 1
};

struct HighDimOutput {
    CliffordCircuit clifford;
    DensityMatrix block_state;  // t qubits
    // Represented state: C^dag (|0^{n-t}><0^{n-t}| x block) C.
    Eigen::MatrixXcd represented_density(uint32_t n) const;
};

// Algorithm-4 step: synthesize the all-Z rotation for span(H), take t'+1
// computational samples, intersect via the affine span's standard complement
// lifted to Z strings, rotate the sub-basis onto the leading block, measure
// the prefix, and normalize it away with X gates.
CliffordCircuit find_heavy_subspace(CopyOracle& o, const Subspace& lagrangian, uint32_t t,
                                    uint32_t t_prime, double tau, double eps);

// Exponential-time variant: select-all high-correlation strings, heavy
// subspace at t' = t, uniform Pauli conditioning; repeat-and-select to
// confidence 1 - delta with direct block-weight estimates.
CliffordCircuit highdim_exponential(CopyOracle& o, uint32_t t, double tau, double eps,
                                    double delta, double p_floor);

// Step-2 machinery: find_heavy_subspace at eps/4, then the exponential
// learner on the t'-qubit residual, composed and amplified to 1 - delta.
CliffordCircuit highdim_step2(CopyOracle& o, const Subspace& lagrangian, uint32_t t,
                              uint32_t t_prime, double tau, double eps, double delta,
                              const HighDimConfig& cfg);

// Per-iteration record for instrumented runs: the sampled conditioning
// string, its exact correlation on the pre-measurement state, and the dense
// states on both sides of the prefix reduction.
struct HighDimIteration {
    int k = 0;
    SignedPauli sampled;
    double sampled_correlation_before = 0.0;
    CliffordCircuit rotation;  // V_k mapping the sampled string to Z_1
    DensityMatrix state_before;
    std::optional<DensityMatrix> state_after;  // one fewer qubit
};

using HighDimHook = std::function<void(const HighDimIteration&)>;

// The Algorithm-3 loop; returns one Clifford candidate (identity when the
// candidate list stays empty).
CliffordCircuit highdim_bootstrap(CopyOracle& o, const HighDimConfig& cfg,
                                  const HighDimHook& hook = nullptr);

struct HighDimResult {
    HighDimOutput output;
    double selected_block_weight = 0.0;
    int64_t runs = 0;
};

// Repeat highdim_bootstrap, select the best candidate by block-weight
// estimation (error eps/6, confidence 1 - delta/2), then block tomography at
// (eps/3, delta/2). Guarantee: F(rho, output) >= F(rho, S^{n-t}) - eps with
// probability 1 - delta under the promise.
HighDimResult agnostic_highdim(OracleFactory& factory, const HighDimConfig& cfg);

// Unknown t: sweep t = 0, 1, 2, ... and stop at the first output whose
// estimated block weight clears tau - eps; falls back to the best attempt.
HighDimResult agnostic_highdim_sweep(OracleFactory& factory, HighDimConfig cfg,
                                     uint32_t t_max_sweep);

}  // namespace stabtomo
