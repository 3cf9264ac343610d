#include "stabtomo/stabilizer_state.hpp"

#include <stdexcept>

namespace stabtomo {

StabilizerState::StabilizerState(std::vector<SignedPauli> generators) {
    if (generators.empty()) throw std::invalid_argument("stabilizer state needs generators");
    n_ = generators[0].n();
    if (generators.size() != n_) throw std::invalid_argument("need exactly n generators");

    // Row-reduce the check matrix, tracking which input generators combine
    // into each echelon row so signs can be recomputed by group
    // multiplication in a fixed order.
    uint32_t m = 2 * n_;
    std::vector<BitVec> rows;       // echelon rows, string part
    std::vector<BitVec> coeffs;     // which inputs were folded in (length n)
    for (uint32_t g = 0; g < n_; ++g) {
        if (generators[g].x.len() != m) throw std::invalid_argument("generator length mismatch");
        BitVec r = generators[g].x;
        BitVec c(n_);
        c.set(g, true);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (r.get(rows[i].lowest_set_bit())) {
                r ^= rows[i];
                c ^= coeffs[i];
            }
        }
        if (r.is_zero()) throw std::invalid_argument("generators are dependent");
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].get(r.lowest_set_bit())) {
                rows[i] ^= r;
                coeffs[i] ^= c;
            }
        }
        size_t pos = rows.size();
        for (size_t i = 0; i < rows.size(); ++i)
            if (r.lowest_set_bit() < rows[i].lowest_set_bit()) {
                pos = i;
                break;
            }
        rows.insert(rows.begin() + pos, r);
        coeffs.insert(coeffs.begin() + pos, c);
    }

    group_ = Subspace::row_reduce(m, rows);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = i + 1; j < rows.size(); ++j)
            if (symplectic_product(rows[i], rows[j]) != 0)
                throw std::invalid_argument("generators do not commute");

    gens_.clear();
    for (size_t i = 0; i < rows.size(); ++i) {
        WeylProduct prod(m);
        for (uint32_t g = 0; g < n_; ++g)
            if (coeffs[i].get(g)) prod.multiply_right(generators[g]);
        SignedPauli e = prod.to_signed();
        if (!(e.x == rows[i])) throw std::logic_error("echelon sign recomputation mismatch");
        gens_.push_back(e);
    }

    key_.reserve(gens_.size() * (m / 4 + 3));
    for (const SignedPauli& g : gens_) {
        key_ += g.sign > 0 ? '+' : '-';
        key_ += g.x.to_hex();
        key_ += '|';
    }
}

StabilizerState StabilizerState::computational_basis(uint32_t n, const BitVec& bits) {
    std::vector<SignedPauli> gens;
    for (uint32_t q = 0; q < n; ++q)
        gens.emplace_back(bits.get(q) ? -1 : +1, pauli_z_string(n, q));
    return StabilizerState(std::move(gens));
}

StabilizerState StabilizerState::zero_state(uint32_t n) {
    return computational_basis(n, BitVec(n));
}

StabilizerState StabilizerState::from_circuit(const CliffordCircuit& c) {
    Tableau t = Tableau::of_circuit(c);
    std::vector<SignedPauli> gens;
    for (uint32_t q = 0; q < c.n; ++q) gens.push_back(t.z_image(q));
    return StabilizerState(std::move(gens));
}

StabilizerState StabilizerState::random(uint32_t n, Rng& rng) {
    return from_circuit(random_clifford(n, rng));
}

int StabilizerState::sign_of(const BitVec& x) const {
    if (!group_.contains(x)) throw std::invalid_argument("string not in the stabilizer group");
    WeylProduct prod(2 * n_);
    BitVec r = x;
    for (const SignedPauli& g : gens_) {
        if (r.get(g.x.lowest_set_bit())) {
            prod.multiply_right(g);
            r ^= g.x;
        }
    }
    if (!r.is_zero()) throw std::logic_error("reduction failed");
    SignedPauli s = prod.to_signed();
    if (!(s.x == x)) throw std::logic_error("sign_of string mismatch");
    return s.sign;
}

Eigen::VectorXcd StabilizerState::state_vector(uint32_t dense_limit) const {
    if (n_ > dense_limit) throw std::runtime_error("state_vector beyond dense backend limit");
    uint64_t dim = uint64_t(1) << n_;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    Eigen::VectorXcd tmp(dim);
    // Apply the projector product to basis vectors until one survives;
    // P = prod_i (I + s_i W_i)/2 has rank one.
    for (uint64_t seed = 0; seed < dim; ++seed) {
        v.setZero();
        v[seed] = 1.0;
        for (const SignedPauli& g : gens_) {
            apply_weyl(g, v, tmp);
            v = 0.5 * (v + tmp);
        }
        double norm = v.norm();
        if (norm > 1e-6) {
            v /= norm;
            break;
        }
    }
    double norm = v.norm();
    if (std::abs(norm - 1.0) > 1e-9) throw std::logic_error("stabilizer projector had no support");
    for (uint64_t i = 0; i < dim; ++i) {
        if (std::abs(v[i]) > 1e-9) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            break;
        }
    }
    return v;
}

}  // namespace stabtomo
