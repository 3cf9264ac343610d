#pragma once

#include <map>

#include "stabtomo/oracle.hpp"

namespace stabtomo {

struct CorrelationEstimate {
    BitVec x;
    double value;  // estimate of tr(W_x rho)^2, clamped to [0, 1]
};

// ceil(2 ln(2M/delta)/eps^2), the Bell-measurement count for M simultaneous
// correlation estimates at accuracy eps and confidence 1 - delta.
int64_t bell_measurement_count(size_t num_strings, double eps, double delta);

// Bell-measurement estimator: ceil(2 ln(2M/delta)/eps^2) Bell measurements
// shared across all M strings; each estimate within eps of tr(W_y rho)^2
// simultaneously with probability 1 - delta.
std::vector<CorrelationEstimate> estimate_correlations(CopyOracle& o,
                                                       std::span<const BitVec> strings,
                                                       double eps, double delta);

// Same estimator with an explicit measurement count (the learners size the
// count from the number of raw samples before deduplication).
std::vector<CorrelationEstimate> estimate_correlations_fixed(CopyOracle& o,
                                                             std::span<const BitVec> strings,
                                                             int64_t measurements);

// Classical shadows with uniformly random Cliffords and median-of-means:
// K = ceil(8 ln(M/delta)) groups of ceil(12/eps^2) snapshots. Estimates
// <phi_i|rho|phi_i> for stabilizer targets, all within eps w.p. 1 - delta.
std::vector<double> shadow_fidelities(CopyOracle& o, std::span<const StabilizerState> targets,
                                      double eps, double delta);

// Block weights tr<0^{n-t}|C_i rho C_i^dag|0^{n-t}> as sums of 2^t shadow
// fidelities, each estimated to eps/2^t.
std::vector<double> shadow_block_fidelities(CopyOracle& o,
                                            std::span<const CliffordCircuit> cliffords,
                                            uint32_t t, double eps, double delta);

// Direct Hoeffding estimate of the same block weights: apply C, measure the
// first n-t qubits, count the all-zero outcome.
std::vector<double> direct_block_fidelities(CopyOracle& o,
                                            std::span<const CliffordCircuit> cliffords,
                                            uint32_t t, double eps, double delta);

// Single-qubit fidelity table <phi_i| tr_{-j}(rho) |phi_i> via X/Y/Z basis
// measurements on every qubit, ceil((9/(2 eps^2)) ln(6n/delta)) shots per
// axis; all |K| * n estimates within eps w.p. 1 - delta.
struct LocalFidelityTable {
    // [state index][qubit]
    std::vector<std::vector<double>> value;
    // Estimated Bloch components per qubit.
    std::vector<std::array<double, 3>> bloch;
};
LocalFidelityTable local_fidelities(CopyOracle& o,
                                    std::span<const Eigen::Vector2cd> single_qubit_states,
                                    double eps, double delta);

// Pauli-expectation full tomography with eigenvalue clipping to the PSD
// trace-one cone; trace distance <= eps w.p. 1 - delta.
DensityMatrix full_tomography(CopyOracle& o, double eps, double delta);

// Conditions on the 0^{n-t} prefix under C, then runs full tomography on the
// t-qubit residual; F(rho_block, result) >= 1 - eps w.p. 1 - delta, assuming
// block weight >= tau. Throws BudgetExhausted-style failure as
// std::nullopt when the conditioned preparation cannot be completed.
std::optional<DensityMatrix> block_tomography_given_clifford(CopyOracle& o,
                                                             const CliffordCircuit& c,
                                                             uint32_t t, double tau, double eps,
                                                             double delta);

// Planned conditioned-copy consumption of the estimators (used by the
// learners to size preparation batches).
int64_t correlations_planned_copies(size_t num_strings, double eps, double delta);
int64_t local_fidelities_planned_copies(uint32_t n, double eps, double delta);
int64_t full_tomography_planned_copies(uint32_t n, double eps, double delta);

}  // namespace stabtomo
