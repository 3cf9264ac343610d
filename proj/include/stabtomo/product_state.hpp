#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "stabtomo/pauli.hpp"
#include "stabtomo/rng.hpp"

namespace stabtomo {

// Finite set of single-qubit pure states with pairwise fidelity <= 1 - mu,
// given as Bloch vectors. Fidelity between members is (1 + u.v)/2.
class PackingSet {
  public:
    PackingSet(double mu, std::vector<std::array<double, 3>> bloch);

    // The six single-qubit stabilizer states (a 1/2-packing set): +-Z, +-X, +-Y.
    static PackingSet stabilizer_axes();

    double mu() const { return mu_; }
    size_t size() const { return bloch_.size(); }
    const std::array<double, 3>& bloch(size_t i) const { return bloch_[i]; }
    Eigen::Vector2cd state(size_t i) const;
    const std::vector<Eigen::Vector2cd>& states() const { return states_; }

  private:
    double mu_;
    std::vector<std::array<double, 3>> bloch_;
    std::vector<Eigen::Vector2cd> states_;
};

// theta(mu) = (1 + sqrt(1 - mu))/2 + mu/8, the correlation ceiling that
// controls the product learner's amplification.
double packing_theta(double mu);

// Product state: per-qubit indices into a packing set, or per-qubit signed
// Pauli axes for stabilizer product states.
struct ProductState {
    // Either packing indices or (axis, sign) pairs.
    struct Axis {
        int pauli;  // 0 = X, 1 = Y, 2 = Z
        int sign;   // +1 / -1
        bool operator==(const Axis& o) const = default;
    };
    std::optional<std::vector<size_t>> packing_indices;
    const PackingSet* packing = nullptr;  // non-owning, set with packing_indices
    std::optional<std::vector<Axis>> axes;

    uint32_t n() const;
    Eigen::Vector2cd qubit_state(uint32_t j) const;
    Eigen::VectorXcd state_vector() const;
    std::string key() const;
    bool operator==(const ProductState& o) const { return key() == o.key(); }

    static ProductState from_packing(const PackingSet& k, std::vector<size_t> idx);
    static ProductState from_axes(std::vector<Axis> axes);
    static ProductState random_stabilizer_product(uint32_t n, Rng& rng);
};

// The signed single-qubit Pauli stabilizing an axis state, as a 2n string.
SignedPauli axis_stabilizer(uint32_t n, uint32_t qubit, ProductState::Axis axis);

}  // namespace stabtomo
