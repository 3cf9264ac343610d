#include "stabtomo/bruteforce.hpp"

#include <map>
#include <set>
#include <stdexcept>

namespace stabtomo {

namespace {

// BFS over canonical echelon forms, extending by commuting independent
// vectors one dimension at a time.
std::vector<Subspace> grow_isotropic(const std::vector<Subspace>& frontier) {
    std::vector<Subspace> next;
    std::set<std::string> seen;
    for (const Subspace& s : frontier) {
        uint32_t len = s.ambient_dim();
        for (uint64_t w = 1; w < (uint64_t(1) << len); ++w) {
            BitVec v = BitVec::from_u64(len, w);
            if (s.contains(v)) continue;
            bool commutes = true;
            for (const BitVec& row : s.basis())
                if (symplectic_product(row, v)) {
                    commutes = false;
                    break;
                }
            if (!commutes) continue;
            Subspace grown = s;
            grown.insert(v);
            if (seen.insert(grown.to_key()).second) next.push_back(grown);
        }
    }
    return next;
}

}  // namespace

std::vector<Subspace> enumerate_isotropic_subspaces(uint32_t n, uint32_t dim) {
    if (dim > n) throw std::invalid_argument("isotropic dimension above n");
    std::vector<Subspace> cur = {Subspace(2 * n)};
    for (uint32_t d = 0; d < dim; ++d) cur = grow_isotropic(cur);
    return cur;
}

std::vector<Subspace> enumerate_isotropic_superspaces(const Subspace& base, uint32_t dim) {
    if (!base.is_isotropic()) throw std::invalid_argument("base not isotropic");
    if (dim < base.dim()) throw std::invalid_argument("target dimension below base");
    std::vector<Subspace> cur = {base};
    for (uint32_t d = base.dim(); d < dim; ++d) cur = grow_isotropic(cur);
    return cur;
}

std::vector<StabilizerState> enumerate_stabilizer_states(uint32_t n) {
    if (n > 4) throw std::invalid_argument("stabilizer enumeration limited to n <= 4");
    std::vector<Subspace> lagrangians = enumerate_isotropic_subspaces(n, n);
    std::vector<StabilizerState> out;
    out.reserve(lagrangians.size() << n);
    for (const Subspace& lag : lagrangians) {
        for (uint64_t signs = 0; signs < (uint64_t(1) << n); ++signs) {
            std::vector<SignedPauli> gens;
            for (uint32_t i = 0; i < n; ++i)
                gens.emplace_back((signs >> i) & 1 ? -1 : +1, lag.basis()[i]);
            out.emplace_back(std::move(gens));
        }
    }
    return out;
}

double brute_force_stabilizer_fidelity(const DensityMatrix& rho) {
    return brute_force_class_fidelity(rho, StateClass::Stabilizer).value;
}

namespace {

// <phi|rho|phi> = 2^{-n} sum over group elements of sign * tr(W rho).
double stabilizer_fidelity_from_traces(const StabilizerState& st,
                                       const std::vector<double>& traces) {
    uint32_t n = st.n();
    double acc = 0;
    uint64_t count = uint64_t(1) << n;
    for (uint64_t mask = 0; mask < count; ++mask) {
        WeylProduct prod(2 * n);
        for (uint32_t j = 0; j < n; ++j)
            if ((mask >> j) & 1) prod.multiply_right(st.generators()[j]);
        SignedPauli e = prod.to_signed();
        acc += double(e.sign) * traces[e.x.to_u64()];
    }
    return acc / double(count);
}

std::vector<double> all_weyl_traces(const DensityMatrix& rho) {
    uint64_t strings = uint64_t(1) << (2 * rho.n());
    std::vector<double> tr(strings);
    for (uint64_t a = 0; a < strings; ++a)
        tr[a] = exact_weyl_expectation(rho, BitVec::from_u64(2 * rho.n(), a));
    return tr;
}

ClassFidelityResult stabilizer_class_fidelity(const DensityMatrix& rho) {
    auto states = enumerate_stabilizer_states(rho.n());
    auto traces = all_weyl_traces(rho);
    ClassFidelityResult best;
    best.value = -1;
    for (const auto& st : states) {
        double f = stabilizer_fidelity_from_traces(st, traces);
        if (f > best.value + 1e-12 ||
            (std::abs(f - best.value) <= 1e-12 && best.argmax_stabilizer &&
             st.canonical_key() < best.argmax_stabilizer->canonical_key())) {
            best.value = f;
            best.argmax_stabilizer = st;
        }
    }
    best.argmax_description = best.argmax_stabilizer->canonical_key();
    best.value = std::clamp(best.value, 0.0, 1.0);
    return best;
}

ClassFidelityResult product_class_fidelity(const DensityMatrix& rho, const PackingSet& k) {
    uint32_t n = rho.n();
    size_t kk = k.size();
    uint64_t total = 1;
    for (uint32_t j = 0; j < n; ++j) {
        total *= kk;
        if (total > 2000000) throw std::runtime_error("product enumeration too large");
    }
    ClassFidelityResult best;
    best.value = -1;
    std::vector<size_t> idx(n, 0);
    for (uint64_t it = 0; it < total; ++it) {
        uint64_t v = it;
        for (uint32_t j = 0; j < n; ++j) {
            idx[j] = v % kk;
            v /= kk;
        }
        ProductState p = ProductState::from_packing(k, idx);
        double f = exact_fidelity(rho, p.state_vector());
        if (f > best.value) {
            best.value = f;
            best.argmax_description = p.key();
        }
    }
    return best;
}

ClassFidelityResult stabilizer_product_class_fidelity(const DensityMatrix& rho) {
    uint32_t n = rho.n();
    uint64_t total = 1;
    for (uint32_t j = 0; j < n; ++j) total *= 6;
    ClassFidelityResult best;
    best.value = -1;
    for (uint64_t it = 0; it < total; ++it) {
        uint64_t v = it;
        std::vector<ProductState::Axis> axes(n);
        for (uint32_t j = 0; j < n; ++j) {
            int code = v % 6;
            v /= 6;
            axes[j] = {code / 2, code % 2 ? -1 : +1};
        }
        ProductState p = ProductState::from_axes(axes);
        double f = exact_fidelity(rho, p.state_vector());
        if (f > best.value) {
            best.value = f;
            best.argmax_description = p.key();
        }
    }
    return best;
}

ClassFidelityResult highdim_class_fidelity(const DensityMatrix& rho, uint32_t t) {
    uint32_t n = rho.n();
    if (t > n) throw std::invalid_argument("t above n");
    // max over (n-t)-dimensional stabilizer groups P of
    // max_s tr<s| C_P rho C_P^dag |s>, block state chosen optimally.
    auto groups = enumerate_isotropic_subspaces(n, n - t);
    ClassFidelityResult best;
    best.value = -1;
    for (const Subspace& p : groups) {
        CliffordCircuit c = synthesize_clifford(n, p.basis(), BlockSide::Leading);
        Eigen::MatrixXcd rot = conjugate_by_circuit(c, rho.data());
        for (uint64_t s = 0; s < (uint64_t(1) << (n - t)); ++s) {
            Eigen::MatrixXcd blk = prefix_block(rot, n, BitVec::from_u64(n - t, s));
            double w = blk.trace().real();
            if (w > best.value) {
                best.value = w;
                best.argmax_description =
                    "group=" + p.to_key() + " s=" + BitVec::from_u64(n - t, s).to_01();
            }
        }
    }
    best.value = std::clamp(best.value, 0.0, 1.0);
    return best;
}

}  // namespace

ClassFidelityResult brute_force_class_fidelity(const DensityMatrix& rho, StateClass cls,
                                               uint32_t t, const PackingSet* packing) {
    switch (cls) {
        case StateClass::Stabilizer:
            return stabilizer_class_fidelity(rho);
        case StateClass::StabilizerProduct:
            return stabilizer_product_class_fidelity(rho);
        case StateClass::Product:
            if (!packing) throw std::invalid_argument("product class needs a packing set");
            return product_class_fidelity(rho, *packing);
        case StateClass::HighStabilizerDim:
            return highdim_class_fidelity(rho, t);
    }
    throw std::logic_error("unreachable");
}

}  // namespace stabtomo
