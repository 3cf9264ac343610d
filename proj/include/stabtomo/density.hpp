#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "stabtomo/clifford.hpp"
#include "stabtomo/pauli.hpp"
#include "stabtomo/rng.hpp"
#include "stabtomo/stabilizer_state.hpp"

namespace stabtomo {

inline constexpr uint32_t kBellTableQubitLimit = 6;

// Dense n-qubit density matrix. Construction validates Hermiticity (1e-10),
// positive semidefiniteness (eigenvalues >= -1e-9, with small negatives
// clamped to zero and the trace renormalized) and unit trace (1e-10).
class DensityMatrix {
  public:
    DensityMatrix() = default;
    DensityMatrix(uint32_t n, Eigen::MatrixXcd data, uint32_t dense_limit = kDenseQubitLimit);

    static DensityMatrix pure(uint32_t n, const Eigen::VectorXcd& psi);
    static DensityMatrix maximally_mixed(uint32_t n);
    static DensityMatrix of_stabilizer(const StabilizerState& s);
    // Hilbert-Schmidt random mixed state (Ginibre G G^dag / tr).
    static DensityMatrix random_mixed(uint32_t n, Rng& rng);
    static DensityMatrix random_pure(uint32_t n, Rng& rng);
    static Eigen::VectorXcd random_pure_vector(uint32_t n, Rng& rng);

    uint32_t n() const { return n_; }
    uint64_t dim() const { return uint64_t(1) << n_; }
    const Eigen::MatrixXcd& data() const { return m_; }

    bool operator==(const DensityMatrix& o) const { return n_ == o.n_ && m_ == o.m_; }

  private:
    uint32_t n_ = 0;
    Eigen::MatrixXcd m_;
};

// tr(W_x rho), real by Hermiticity.
double exact_weyl_expectation(const DensityMatrix& rho, const BitVec& x);

// Uhlmann fidelity; pure-pure reduces to overlap squared.
double exact_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double exact_fidelity(const DensityMatrix& rho, const Eigen::VectorXcd& psi);
double exact_fidelity(const DensityMatrix& rho, const StabilizerState& s);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Single-qubit reduced state tr_{-j}(rho).
Eigen::Matrix2cd reduced_state(const DensityMatrix& rho, uint32_t j);

// <s|rho|s> block on the last n-k qubits after projecting the first k qubits
// onto basis string s (unnormalized).
Eigen::MatrixXcd prefix_block(const Eigen::MatrixXcd& rho, uint32_t n, const BitVec& s);

// rho -> U rho U^dag for a circuit, applied gate by gate.
Eigen::MatrixXcd conjugate_by_circuit(const CliffordCircuit& c, const Eigen::MatrixXcd& rho);
Eigen::VectorXcd apply_circuit(const CliffordCircuit& c, const Eigen::VectorXcd& psi);

// Closed-form Bell difference distribution
//   B_rho(x) = 4^{-n} sum_a (-1)^{<x,a>} tr(W_a rho)^4,
// indexed by the packed string value. Requires n <= table limit.
std::vector<double> exact_bell_distribution(const DensityMatrix& rho,
                                            uint32_t table_limit = kBellTableQubitLimit);

// Distribution of a single Bell-basis measurement on rho (x) rho:
//   p(x) = 2^{-n} tr((W_x rho W_x)^T rho).
std::vector<double> exact_bell_measurement_distribution(const DensityMatrix& rho,
                                                        uint32_t table_limit = kBellTableQubitLimit);

// Lazy per-state caches reused by the oracle's samplers.
class StateCache {
  public:
    explicit StateCache(const DensityMatrix& rho) : rho_(rho) {}

    const DensityMatrix& state() const { return rho_; }
    uint32_t n() const { return rho_.n(); }

    // tr(W_a rho) for all 4^n strings (n <= table limit).
    const std::vector<double>& weyl_traces();
    const std::vector<double>& bell_difference_table();
    const DiscreteSampler& bell_difference_sampler();
    const std::vector<double>& bell_measurement_table();
    const DiscreteSampler& bell_measurement_sampler();
    // Diagonal of rho in the computational basis.
    const std::vector<double>& computational_diagonal();
    // Eigendecomposition with negligible eigenvalues dropped.
    struct Eigensystem {
        std::vector<double> weights;
        Eigen::MatrixXcd vectors;  // columns
        DiscreteSampler sampler;
    };
    const Eigensystem& eigensystem();

    // Bell-measurement distribution of the pure pair |k> x |l> of
    // eigenvectors, cached with a small LRU.
    const DiscreteSampler& pure_pair_bell_sampler(size_t k, size_t l);

  private:
    DensityMatrix rho_;
    std::optional<std::vector<double>> weyl_traces_;
    std::optional<std::vector<double>> bell_diff_;
    std::optional<DiscreteSampler> bell_diff_sampler_;
    std::optional<std::vector<double>> bell_meas_;
    std::optional<DiscreteSampler> bell_meas_sampler_;
    std::optional<std::vector<double>> comp_diag_;
    std::optional<Eigensystem> eigensystem_;
    std::vector<std::pair<std::pair<size_t, size_t>, std::unique_ptr<DiscreteSampler>>> pair_lru_;
};

// Bell-measurement distribution for a pure product |psi> x |phi>:
// p(x) = |<phi^* | W_x | psi>|^2 / 2^n, computed for all x with Walsh-
// Hadamard transforms.
std::vector<double> bell_measurement_distribution_pure_pair(const Eigen::VectorXcd& psi,
                                                            const Eigen::VectorXcd& phi);

}  // namespace stabtomo
