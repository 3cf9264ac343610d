#pragma once

#include <string>

#include "stabtomo/density.hpp"
#include "stabtomo/product_state.hpp"

namespace stabtomo {

// Complete duplicate-free list of n-qubit stabilizer states (n <= 4; the
// counts are 6, 60, 1080, 36720).
std::vector<StabilizerState> enumerate_stabilizer_states(uint32_t n);

// All isotropic subspaces of F2^{2n} with the given dimension, by BFS over
// canonical echelon forms.
std::vector<Subspace> enumerate_isotropic_subspaces(uint32_t n, uint32_t dim);
// Isotropic subspaces of the given dimension containing `base`.
std::vector<Subspace> enumerate_isotropic_superspaces(const Subspace& base, uint32_t dim);

enum class StateClass {
    Stabilizer,       // S
    StabilizerProduct,  // SP
    Product,            // K^n for a given packing set
    HighStabilizerDim,  // S^{n-t}
};

struct ClassFidelityResult {
    double value = 0.0;
    std::string argmax_description;
    std::optional<StabilizerState> argmax_stabilizer;
};

// Exact max fidelity over the class by exhaustive enumeration; the S^{n-t}
// case optimizes the block state analytically as the normalized residual.
ClassFidelityResult brute_force_class_fidelity(const DensityMatrix& rho, StateClass cls,
                                               uint32_t t = 0,
                                               const PackingSet* packing = nullptr);

// Stabilizer fidelity F_S(rho) (n <= 4).
double brute_force_stabilizer_fidelity(const DensityMatrix& rho);

}  // namespace stabtomo
