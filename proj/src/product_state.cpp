#include "stabtomo/product_state.hpp"

#include <cmath>
#include <stdexcept>

namespace stabtomo {

PackingSet::PackingSet(double mu, std::vector<std::array<double, 3>> bloch)
    : mu_(mu), bloch_(std::move(bloch)) {
    if (mu_ <= 0.0 || mu_ > 1.0) throw std::invalid_argument("mu must be in (0, 1]");
    if (bloch_.empty()) throw std::invalid_argument("empty packing set");
    for (auto& u : bloch_) {
        double norm = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        if (std::abs(norm - 1.0) > 1e-8) throw std::invalid_argument("Bloch vector not unit");
    }
    for (size_t i = 0; i < bloch_.size(); ++i) {
        for (size_t j = i + 1; j < bloch_.size(); ++j) {
            double dot = bloch_[i][0] * bloch_[j][0] + bloch_[i][1] * bloch_[j][1] +
                         bloch_[i][2] * bloch_[j][2];
            if (0.5 * (1.0 + dot) > 1.0 - mu_ + 1e-10)
                throw std::invalid_argument("pairwise fidelity violates the packing separation");
        }
    }
    // |K| <= 2 / (1 - sqrt(1 - mu)), the sphere-packing count.
    double cap = 2.0 / (1.0 - std::sqrt(1.0 - mu_));
    if (double(bloch_.size()) > cap + 1e-9)
        throw std::invalid_argument("packing set larger than the sphere bound allows");
    states_.reserve(bloch_.size());
    for (size_t i = 0; i < bloch_.size(); ++i) states_.push_back(state(i));
}

PackingSet PackingSet::stabilizer_axes() {
    return PackingSet(0.5, {{0, 0, 1},
                            {0, 0, -1},
                            {1, 0, 0},
                            {-1, 0, 0},
                            {0, 1, 0},
                            {0, -1, 0}});
}

Eigen::Vector2cd PackingSet::state(size_t i) const {
    const auto& u = bloch_[i];
    // |psi><psi| = (I + u . sigma)/2; spherical parametrization.
    double theta = std::acos(std::clamp(u[2], -1.0, 1.0));
    double phi = std::atan2(u[1], u[0]);
    Eigen::Vector2cd v;
    v << std::cos(theta / 2.0),
        std::exp(std::complex<double>(0, phi)) * std::sin(theta / 2.0);
    return v;
}

double packing_theta(double mu) { return (1.0 + std::sqrt(1.0 - mu)) / 2.0 + mu / 8.0; }

uint32_t ProductState::n() const {
    if (packing_indices) return static_cast<uint32_t>(packing_indices->size());
    if (axes) return static_cast<uint32_t>(axes->size());
    return 0;
}

Eigen::Vector2cd ProductState::qubit_state(uint32_t j) const {
    if (packing_indices) return packing->state((*packing_indices)[j]);
    const Axis& a = (*axes)[j];
    Eigen::Vector2cd v;
    const double r = 1.0 / std::sqrt(2.0);
    if (a.pauli == 2) {  // Z
        if (a.sign > 0)
            v << 1, 0;
        else
            v << 0, 1;
    } else if (a.pauli == 0) {  // X
        v << r, a.sign > 0 ? r : -r;
    } else {  // Y
        v << r, std::complex<double>(0, a.sign > 0 ? r : -r);
    }
    return v;
}

Eigen::VectorXcd ProductState::state_vector() const {
    uint32_t qubits = n();
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
    // Qubit j is bit j of the index; each fold adds the next qubit as the
    // current top bit, so ascending order leaves qubit 0 at the bottom.
    for (uint32_t j = 0; j < qubits; ++j) {
        Eigen::Vector2cd q = qubit_state(j);
        Eigen::VectorXcd next(v.size() * 2);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            next[i] = v[i] * q[0];
            next[i + v.size()] = v[i] * q[1];
        }
        v = std::move(next);
    }
    return v;
}

std::string ProductState::key() const {
    std::string k;
    if (packing_indices) {
        k = "K:";
        for (size_t i : *packing_indices) k += std::to_string(i) + ",";
    } else {
        k = "P:";
        for (const Axis& a : *axes) {
            k += "XYZ"[a.pauli];
            k += a.sign > 0 ? '+' : '-';
        }
    }
    return k;
}

ProductState ProductState::from_packing(const PackingSet& k, std::vector<size_t> idx) {
    ProductState p;
    p.packing = &k;
    p.packing_indices = std::move(idx);
    return p;
}

ProductState ProductState::from_axes(std::vector<Axis> axes) {
    ProductState p;
    p.axes = std::move(axes);
    return p;
}

ProductState ProductState::random_stabilizer_product(uint32_t n, Rng& rng) {
    std::vector<Axis> axes;
    for (uint32_t j = 0; j < n; ++j)
        axes.push_back({static_cast<int>(rng.uniform_below(3)),
                        rng.bernoulli(0.5) ? +1 : -1});
    return from_axes(std::move(axes));
}

SignedPauli axis_stabilizer(uint32_t n, uint32_t qubit, ProductState::Axis axis) {
    BitVec x(2 * n);
    if (axis.pauli == 0 || axis.pauli == 1) x.set(qubit, true);
    if (axis.pauli == 1 || axis.pauli == 2) x.set(n + qubit, true);
    return SignedPauli(axis.sign, x);
}

}  // namespace stabtomo
