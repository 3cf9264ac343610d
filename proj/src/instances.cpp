#include "stabtomo/instances.hpp"

#include <set>

namespace stabtomo {

namespace {

DensityMatrix mix_with_identity(uint32_t n, const Eigen::VectorXcd& psi, double pure_weight) {
    uint64_t dim = uint64_t(1) << n;
    Eigen::VectorXcd v = psi / psi.norm();
    Eigen::MatrixXcd m = pure_weight * (v * v.adjoint());
    m += (1.0 - pure_weight) / double(dim) * Eigen::MatrixXcd::Identity(dim, dim);
    return DensityMatrix(n, m);
}

// Random Clifford circuit interleaved with t_count T gates on random qubits.
std::pair<CliffordCircuit, Eigen::VectorXcd> doped_state(uint32_t n, uint32_t t_count, Rng& rng) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(uint64_t(1) << n);
    v[0] = 1.0;
    CliffordCircuit trace(n);  // Clifford part only, for the record
    const std::complex<double> tphase = std::exp(std::complex<double>(0, M_PI / 4.0));
    for (uint32_t seg = 0; seg <= t_count; ++seg) {
        CliffordCircuit c = random_clifford(n, rng);
        v = apply_circuit(c, v);
        trace.append(c);
        if (seg == t_count) break;
        uint32_t q = static_cast<uint32_t>(rng.uniform_below(n));
        uint64_t bit = uint64_t(1) << q;
        for (uint64_t i = 0; i < uint64_t(v.size()); ++i)
            if (i & bit) v[i] *= tphase;
    }
    return {trace, v};
}

}  // namespace

Instance generate_instance(const InstanceSpec& spec) {
    Rng rng(spec.seed ^ 0x5eedULL);
    Instance inst;
    switch (spec.kind) {
        case InstanceKind::NoisyStabilizer: {
            StabilizerState phi = StabilizerState::random(spec.n, rng);
            Eigen::VectorXcd v = phi.state_vector();
            inst.rho = mix_with_identity(spec.n, v, 1.0 - spec.noise);
            inst.planted_stabilizer = phi;
            inst.planted_vector = v;
            // F_S = (1 - p) + p / 2^n, attained at the planted state.
            inst.planted_class_fidelity =
                (1.0 - spec.noise) + spec.noise / double(uint64_t(1) << spec.n);
            inst.description = "noisy_stabilizer(n=" + std::to_string(spec.n) +
                               ", p=" + std::to_string(spec.noise) + ")";
            break;
        }
        case InstanceKind::Doped: {
            auto [circ, v] = doped_state(spec.n, spec.t_count, rng);
            inst.rho = spec.noise > 0 ? mix_with_identity(spec.n, v, 1.0 - spec.noise)
                                      : DensityMatrix::pure(spec.n, v);
            inst.planted_clifford = circ;
            inst.planted_vector = v;
            inst.description = "doped(n=" + std::to_string(spec.n) +
                               ", t=" + std::to_string(spec.t_count) +
                               ", p=" + std::to_string(spec.noise) + ")";
            break;
        }
        case InstanceKind::NoisyProduct: {
            ProductState phi = ProductState::random_stabilizer_product(spec.n, rng);
            Eigen::VectorXcd v = phi.state_vector();
            inst.rho = mix_with_identity(spec.n, v, 1.0 - spec.noise);
            inst.planted_product = phi;
            inst.planted_vector = v;
            // Product classes containing phi: per-qubit overlaps with the
            // planted state are 1 for phi, <= 1/2 otherwise, so the planted
            // state is the class optimum.
            inst.planted_class_fidelity =
                (1.0 - spec.noise) + spec.noise / double(uint64_t(1) << spec.n);
            inst.description = "noisy_product(n=" + std::to_string(spec.n) +
                               ", p=" + std::to_string(spec.noise) + ")";
            break;
        }
        case InstanceKind::SubsetPhase: {
            uint64_t dim = uint64_t(1) << spec.n;
            uint32_t size = std::min<uint32_t>(spec.subset_size, dim);
            if (size == 0) throw std::invalid_argument("subset size must be positive");
            std::set<uint64_t> subset;
            while (subset.size() < size) subset.insert(rng.uniform_below(dim));
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
            for (uint64_t x : subset) v[x] = rng.bernoulli(0.5) ? -1.0 : 1.0;
            v /= v.norm();
            inst.rho = DensityMatrix::pure(spec.n, v);
            inst.planted_vector = v;
            inst.description = "subset_phase(n=" + std::to_string(spec.n) +
                               ", size=" + std::to_string(size) + ")";
            break;
        }
        case InstanceKind::LowerBoundFamily: {
            StabilizerState phi = StabilizerState::random(spec.n, rng);
            Eigen::VectorXcd v = phi.state_vector();
            double dim = double(uint64_t(1) << spec.n);
            double w = (dim * spec.tau - 1.0) / (dim - 1.0);
            if (w < 0.0 || w > 1.0)
                throw std::invalid_argument("tau out of range for the lower-bound family");
            inst.rho = mix_with_identity(spec.n, v, w);
            inst.planted_stabilizer = phi;
            inst.planted_vector = v;
            inst.planted_class_fidelity = spec.tau;  // F_S(rho_i) = tau exactly
            inst.description = "lower_bound_family(n=" + std::to_string(spec.n) +
                               ", tau=" + std::to_string(spec.tau) + ")";
            break;
        }
        case InstanceKind::File: {
            inst.rho = DensityMatrix(spec.n, spec.explicit_data);
            inst.description = "file(n=" + std::to_string(spec.n) + ")";
            break;
        }
    }
    return inst;
}

}  // namespace stabtomo
