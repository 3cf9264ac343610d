#pragma once

#include "stabtomo/bruteforce.hpp"
#include "stabtomo/density.hpp"
#include "stabtomo/product_state.hpp"

namespace stabtomo {

enum class InstanceKind {
    NoisyStabilizer,   // (1-p)|phi><phi| + p I/2^n, random stabilizer phi
    Doped,             // random Clifford circuit with t_count T gates
    NoisyProduct,      // (1-p)|phi><phi| + p I/2^n, random stabilizer product phi
    SubsetPhase,       // sum_{x in A} (-1)^{f(x)} |x> / sqrt(|A|)
    LowerBoundFamily,  // ((2^n tau - 1)/(2^n - 1))|phi><phi| + rest * I/2^n
    File,              // explicit density matrix
};

struct InstanceSpec {
    InstanceKind kind = InstanceKind::NoisyStabilizer;
    uint32_t n = 2;
    double noise = 0.0;    // p for noisy kinds
    double tau = 1.0;      // lower-bound family target fidelity
    uint32_t t_count = 1;  // doped
    uint32_t subset_size = 4;
    uint64_t seed = 0;
    Eigen::MatrixXcd explicit_data;  // kind == File
};

struct Instance {
    DensityMatrix rho;
    std::string description;
    // Planted structure, when the generator knows it.
    std::optional<StabilizerState> planted_stabilizer;
    std::optional<ProductState> planted_product;
    std::optional<CliffordCircuit> planted_clifford;  // doped: the circuit
    std::optional<double> planted_class_fidelity;     // exact, when computable
    std::optional<Eigen::VectorXcd> planted_vector;
};

Instance generate_instance(const InstanceSpec& spec);

}  // namespace stabtomo
