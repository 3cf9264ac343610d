#pragma once

#include "stabtomo/estimators.hpp"
#include "stabtomo/oracle.hpp"
#include "stabtomo/product_state.hpp"

namespace stabtomo {

struct ProductConfig {
    double tau = 1.0;
    double eps = 0.1;
    double delta = 0.1;
    double p_floor = 1e-3;

    void validate() const;
};

struct ProductIteration {
    int t = 0;
    ProductState candidate;
    std::optional<uint32_t> conditioned_qubit;
    // What was conditioned on: a packing element (Algorithm 5) or a signed
    // single-qubit Pauli axis (Algorithm 6).
    std::optional<size_t> conditioned_element;
    std::optional<ProductState::Axis> conditioned_axis;
    // Exact acceptance probability of the appended projector on the state
    // before conditioning (test mode).
    double projector_acceptance = 0.0;
    DensityMatrix state_before;
    std::optional<DensityMatrix> state_after;
};

using ProductHook = std::function<void(const ProductIteration&)>;

// Algorithm for discrete product classes K^n: per-qubit argmax of estimated
// local fidelities, random re-guess conditioning, t_max =
// floor(log_{1/theta(mu)}(1/tau)) iterations.
std::optional<ProductState> agnostic_product_once(CopyOracle& o, const PackingSet& k, double tau,
                                                  const ProductHook& hook = nullptr);

// Stabilizer-product specialization: per-qubit Pauli correlations via Bell
// measurements, one joint product-basis measurement of the base state per
// iteration, Bell-difference-guided conditioning.
std::optional<ProductState> agnostic_stab_product_once(CopyOracle& o, double tau,
                                                       const ProductHook& hook = nullptr);

struct ProductResult {
    ProductState state;
    double estimated_fidelity = 0.0;
    int64_t runs = 0;
    int64_t list_size = 0;
};

// Repetition + dedup + per-candidate product-PVM estimation (Hoeffding,
// ceil(2 ln(4M/delta)/eps^2) shots per candidate).
ProductResult agnostic_product(OracleFactory& factory, const PackingSet& k,
                               const ProductConfig& cfg, const ProductHook& hook = nullptr);

// Repetition + dedup + classical-shadow selection at eps/2.
ProductResult agnostic_stab_product(OracleFactory& factory, const ProductConfig& cfg,
                                    const ProductHook& hook = nullptr);

}  // namespace stabtomo
