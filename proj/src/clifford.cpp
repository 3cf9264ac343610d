#include "stabtomo/clifford.hpp"

#include <stdexcept>

namespace stabtomo {

void CliffordCircuit::push(Gate g) {
    if (g.q >= n || (g.kind == GateKind::CNOT && (g.t >= n || g.t == g.q)))
        throw std::invalid_argument("gate qubit out of range");
    gates.push_back(g);
}

void CliffordCircuit::append(const CliffordCircuit& other, uint32_t offset) {
    for (Gate g : other.gates) {
        g.q += offset;
        if (g.kind == GateKind::CNOT) g.t += offset;
        push(g);
    }
}

CliffordCircuit CliffordCircuit::inverse() const {
    CliffordCircuit inv(n);
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        if (it->kind == GateKind::S) {
            // S^{-1} = Z S
            inv.push({GateKind::Z, it->q});
            inv.push({GateKind::S, it->q});
        } else {
            inv.push(*it);
        }
    }
    return inv;
}

SignedPauli gate_act(const Gate& g, SignedPauli p) {
    uint32_t n = p.n();
    bool aq = p.x.get(g.q), bq = p.x.get(n + g.q);
    switch (g.kind) {
        case GateKind::H:
            // X <-> Z, Y -> -Y.
            if (aq && bq) p.sign = -p.sign;
            p.x.set(g.q, bq);
            p.x.set(n + g.q, aq);
            break;
        case GateKind::S:
            // X -> Y, Y -> -X, Z -> Z.
            if (aq && bq) p.sign = -p.sign;
            if (aq) p.x.set(n + g.q, !bq);
            break;
        case GateKind::X:
            if (bq) p.sign = -p.sign;
            break;
        case GateKind::Z:
            if (aq) p.sign = -p.sign;
            break;
        case GateKind::CNOT: {
            bool ac = p.x.get(g.q), bc = p.x.get(n + g.q);
            bool at = p.x.get(g.t), bt = p.x.get(n + g.t);
            // Bits: a_t ^= a_c, b_c ^= b_t. The i^{a.b} convention contributes
            // i^{old(a.b) - new(a.b)} which lands in {+1, -1}.
            int old_dot = (ac && bc ? 1 : 0) + (at && bt ? 1 : 0);
            bool at2 = at ^ ac, bc2 = bc ^ bt;
            int new_dot = (ac && bc2 ? 1 : 0) + (at2 && bt ? 1 : 0);
            int delta = old_dot - new_dot;  // in {-2,...,2}, always even here?
            // delta can be odd only if conjugation broke Hermiticity, which it
            // cannot; fold the exact i-power via a WeylProduct-free check.
            if (((delta % 4) + 4) % 4 == 2) p.sign = -p.sign;
            if ((((delta % 4) + 4) % 4) & 1) throw std::logic_error("CNOT phase not Hermitian");
            p.x.set(g.t, at2);
            p.x.set(n + g.q, bc2);
            break;
        }
    }
    return p;
}

SignedPauli clifford_act(const CliffordCircuit& c, SignedPauli p) {
    for (const Gate& g : c.gates) p = gate_act(g, p);
    return p;
}

Tableau Tableau::identity(uint32_t n) {
    Tableau t;
    t.n_ = n;
    for (uint32_t j = 0; j < n; ++j) {
        t.x_images_.emplace_back(+1, pauli_x_string(n, j));
        t.z_images_.emplace_back(+1, pauli_z_string(n, j));
    }
    return t;
}

Tableau Tableau::of_circuit(const CliffordCircuit& c) {
    Tableau t = identity(c.n);
    for (const Gate& g : c.gates) t.apply_gate(g);
    return t;
}

void Tableau::apply_gate(const Gate& g) {
    for (auto& p : x_images_) p = gate_act(g, p);
    for (auto& p : z_images_) p = gate_act(g, p);
}

SignedPauli Tableau::act(const SignedPauli& p) const {
    // W_x = i^{a.b} prod_j X_j^{a_j} prod_j Z_j^{b_j}; conjugation maps each
    // generator to its image, multiplied back together with exact phases.
    WeylProduct prod(2 * n_);
    for (uint32_t j = 0; j < n_; ++j)
        if (p.x.get(j)) prod.multiply_right(x_images_[j]);
    for (uint32_t j = 0; j < n_; ++j)
        if (p.x.get(n_ + j)) prod.multiply_right(z_images_[j]);
    int phase = (prod.phase_mod4() + weyl_self_phase_mod4(p.x)) & 3;
    // The generator product convention absorbs i^{a.b} of the result string
    // inside WeylProduct already; the input's own i^{a.b} is added here.
    int sign = p.sign;
    if (phase == 2)
        sign = -sign;
    else if (phase != 0)
        throw std::logic_error("tableau action produced non-Hermitian phase");
    return SignedPauli(sign, prod.string());
}

BitVec Tableau::act_string(const BitVec& x) const {
    BitVec y(2 * n_);
    for (uint32_t j = 0; j < n_; ++j) {
        if (x.get(j)) y ^= x_images_[j].x;
        if (x.get(n_ + j)) y ^= z_images_[j].x;
    }
    return y;
}

Tableau Tableau::then(const Tableau& other) const {
    Tableau t;
    t.n_ = n_;
    for (uint32_t j = 0; j < n_; ++j) {
        t.x_images_.push_back(other.act(x_images_[j]));
        t.z_images_.push_back(other.act(z_images_[j]));
    }
    return t;
}

Tableau Tableau::inverse() const {
    // Solve for the preimages of X_j, Z_j: invert the 2n x 2n symplectic
    // matrix over F2 (Gaussian elimination), then recover signs by acting on
    // the candidate preimages.
    uint32_t m = 2 * n_;
    // rows of the matrix: image strings of the generators, as columns of M.
    std::vector<BitVec> cols(m, BitVec(m));
    for (uint32_t j = 0; j < n_; ++j) {
        cols[j] = x_images_[j].x;
        cols[n_ + j] = z_images_[j].x;
    }
    // Augmented elimination: find coefficient vectors c with M c = e_k.
    // Build rows of [M | I] where row i of M is bit i of each column.
    std::vector<BitVec> rows(m, BitVec(2 * m));
    for (uint32_t i = 0; i < m; ++i)
        for (uint32_t j = 0; j < m; ++j) {
            if (cols[j].get(i)) rows[i].set(j, true);
        }
    for (uint32_t i = 0; i < m; ++i) rows[i].set(m + i, true);
    // Gauss-Jordan.
    uint32_t r = 0;
    for (uint32_t c = 0; c < m && r < m; ++c) {
        uint32_t piv = r;
        while (piv < m && !rows[piv].get(c)) ++piv;
        if (piv == m) continue;
        std::swap(rows[r], rows[piv]);
        for (uint32_t i = 0; i < m; ++i)
            if (i != r && rows[i].get(c)) rows[i] ^= rows[r];
        ++r;
    }
    if (r != m) throw std::logic_error("tableau matrix not invertible");
    Tableau inv;
    inv.n_ = n_;
    auto preimage = [&](const BitVec& target_gen) {
        // The row with pivot column k holds row k of M^{-1} in its augmented
        // half, so (M^{-1} g)_k is its dot product with g.
        BitVec pre(m);
        for (uint32_t i = 0; i < m; ++i) {
            uint32_t p = 0;
            while (p < m && !rows[i].get(p)) ++p;
            if (p == m) continue;
            int bit = 0;
            for (uint32_t j = 0; j < m; ++j)
                if (rows[i].get(m + j) && target_gen.get(j)) bit ^= 1;
            pre.set(p, bit != 0);
        }
        // pre is a coefficient vector over generators == a Pauli string.
        SignedPauli candidate(+1, pre);
        SignedPauli image = act(candidate);
        candidate.sign = image.sign;  // flip so image sign becomes +1
        return candidate;
    };
    for (uint32_t j = 0; j < n_; ++j) {
        inv.x_images_.push_back(preimage(pauli_x_string(n_, j)));
        inv.z_images_.push_back(preimage(pauli_z_string(n_, j)));
    }
    return inv;
}

bool Tableau::is_symplectic() const {
    for (uint32_t i = 0; i < n_; ++i) {
        for (uint32_t j = 0; j < n_; ++j) {
            int xx = symplectic_product(x_images_[i].x, x_images_[j].x);
            int zz = symplectic_product(z_images_[i].x, z_images_[j].x);
            int xz = symplectic_product(x_images_[i].x, z_images_[j].x);
            if (xx != 0 || zz != 0) return false;
            if (xz != (i == j ? 1 : 0)) return false;
        }
    }
    return true;
}

SynthesisError::SynthesisError(BitVec a, BitVec b)
    : std::runtime_error("span is not isotropic: generators anticommute"),
      first(std::move(a)),
      second(std::move(b)) {}

namespace {

// Reduces vector index `vi` of `vecs` to the single-qubit Z generator on
// `target`, appending gates to `c` and updating every vector in `vecs`.
// Gates touch only qubits outside `fixed`, except the final fixed-qubit
// Z-clearing CNOTs which keep all placed Z generators invariant.
void reduce_vector_to_z(CliffordCircuit& c, std::vector<BitVec>& vecs, size_t vi,
                        uint32_t target, const std::vector<bool>& fixed) {
    uint32_t n = c.n;
    auto apply = [&](Gate g) {
        c.push(g);
        for (BitVec& v : vecs) v = gate_act(g, SignedPauli(+1, v)).x;
    };
    // Local Y -> X -> Z normalization on non-fixed qubits.
    for (uint32_t q = 0; q < n; ++q) {
        if (fixed[q]) continue;
        if (vecs[vi].get(q) && vecs[vi].get(n + q)) apply({GateKind::S, q});
        if (vecs[vi].get(q)) apply({GateKind::H, q});
    }
    // Move some support onto the target qubit if absent.
    if (!vecs[vi].get(n + target)) {
        uint32_t q0 = n;
        for (uint32_t q = 0; q < n; ++q)
            if (!fixed[q] && vecs[vi].get(n + q)) {
                q0 = q;
                break;
            }
        if (q0 == n) throw std::logic_error("synthesis: vector vanished on active block");
        // SWAP(q0, target) as three CNOTs.
        apply({GateKind::CNOT, q0, target});
        apply({GateKind::CNOT, target, q0});
        apply({GateKind::CNOT, q0, target});
    }
    // Merge remaining active Z support into the target.
    for (uint32_t q = 0; q < n; ++q) {
        if (fixed[q] || q == target) continue;
        if (vecs[vi].get(n + q)) apply({GateKind::CNOT, q, target});
    }
    // Clear Z components on fixed qubits; CNOT(fixed, target) leaves every
    // placed Z generator unchanged.
    for (uint32_t q = 0; q < n; ++q) {
        if (!fixed[q]) continue;
        if (vecs[vi].get(n + q)) apply({GateKind::CNOT, q, target});
    }
}

}  // namespace

CliffordCircuit synthesize_clifford(uint32_t n, std::span<const BitVec> vectors, BlockSide side) {
    Subspace span = Subspace::row_reduce(2 * n, vectors);
    const auto& basis = span.basis();
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i + 1; j < basis.size(); ++j)
            if (symplectic_product(basis[i], basis[j]) != 0)
                throw SynthesisError(basis[i], basis[j]);
    uint32_t d = span.dim();
    if (d > n) throw std::logic_error("isotropic span larger than n");

    CliffordCircuit c(n);
    std::vector<BitVec> work(basis.begin(), basis.end());
    std::vector<bool> fixed(n, false);
    for (uint32_t i = 0; i < d; ++i) {
        uint32_t target = side == BlockSide::Trailing ? n - d + i : i;
        reduce_vector_to_z(c, work, i, target, fixed);
        fixed[target] = true;
    }
    return c;
}

CliffordCircuit synthesize_to_z(uint32_t n, const SignedPauli& p, uint32_t target) {
    if (p.x.is_zero()) throw std::invalid_argument("cannot map identity to Z");
    CliffordCircuit c(n);
    std::vector<BitVec> work = {p.x};
    std::vector<bool> fixed(n, false);
    reduce_vector_to_z(c, work, 0, target, fixed);
    SignedPauli image = clifford_act(c, p);
    if (image.sign < 0) c.x(target);
    return c;
}

namespace {

// Reduces the anticommuting signed pair (x, y), supported on qubits
// [lo, n), to (+Z_lo, +X_lo), appending gates acting on [lo, n) only.
void reduce_pair(CliffordCircuit& c, SignedPauli x, SignedPauli y, uint32_t lo) {
    uint32_t n = c.n;
    auto apply = [&](Gate g) {
        c.push(g);
        x = gate_act(g, x);
        y = gate_act(g, y);
    };
    // Stage 1: x -> Z_lo (same elimination as synthesis, all qubits >= lo active).
    for (uint32_t q = lo; q < n; ++q) {
        if (x.x.get(q) && x.x.get(n + q)) apply({GateKind::S, q});
        if (x.x.get(q)) apply({GateKind::H, q});
    }
    if (!x.x.get(n + lo)) {
        uint32_t q0 = n;
        for (uint32_t q = lo; q < n; ++q)
            if (x.x.get(n + q)) {
                q0 = q;
                break;
            }
        if (q0 == n) throw std::logic_error("pair reduction: zero vector");
        apply({GateKind::CNOT, q0, lo});
        apply({GateKind::CNOT, lo, q0});
        apply({GateKind::CNOT, q0, lo});
    }
    for (uint32_t q = lo + 1; q < n; ++q)
        if (x.x.get(n + q)) apply({GateKind::CNOT, q, lo});
    // Stage 2: y -> X_lo with gates fixing Z_lo. y anticommutes with Z_lo,
    // so it has an X component on lo.
    for (uint32_t q = lo + 1; q < n; ++q) {
        if (y.x.get(q) && y.x.get(n + q)) apply({GateKind::S, q});
        if (y.x.get(q)) apply({GateKind::H, q});
    }
    // Clear Z_q (q > lo) via CZ(lo, q) = H(q) CNOT(lo, q) H(q): X_lo -> X_lo Z_q.
    for (uint32_t q = lo + 1; q < n; ++q) {
        if (y.x.get(n + q)) {
            apply({GateKind::H, q});
            apply({GateKind::CNOT, lo, q});
            apply({GateKind::H, q});
        }
    }
    if (y.x.get(n + lo)) apply({GateKind::S, lo});  // Y_lo -> -X_lo, keeps Z_lo
    // Sign fixes: X(lo) flips Z_lo only, Z(lo) flips X_lo only.
    if (x.sign < 0) apply({GateKind::X, lo});
    if (y.sign < 0) apply({GateKind::Z, lo});
    if (!(x == SignedPauli(+1, pauli_z_string(n, lo))) ||
        !(y == SignedPauli(+1, pauli_x_string(n, lo))))
        throw std::logic_error("pair reduction failed");
}

}  // namespace

CliffordCircuit random_clifford(uint32_t n, Rng& rng) {
    CliffordCircuit reduction(n);
    for (uint32_t i = 0; i < n; ++i) {
        uint32_t m = n - i;
        // Uniform nonzero string on qubits [i, n).
        BitVec x(2 * n);
        do {
            for (uint32_t q = i; q < n; ++q) {
                x.set(q, rng.bernoulli(0.5));
                x.set(n + q, rng.bernoulli(0.5));
            }
        } while (x.is_zero());
        // Uniform string anticommuting with x, without rejection: draw z
        // uniformly; if <x,z> = 0 shift by a fixed y0 with <x,y0> = 1.
        BitVec y0(2 * n);
        {
            uint32_t q = 2 * n;
            for (uint32_t j = i; j < n; ++j) {
                if (x.get(j)) {
                    q = n + j;  // x has X_j, take Z_j
                    break;
                }
                if (x.get(n + j)) {
                    q = j;
                    break;
                }
            }
            y0.set(q, true);
        }
        BitVec y(2 * n);
        for (uint32_t q = i; q < n; ++q) {
            y.set(q, rng.bernoulli(0.5));
            y.set(n + q, rng.bernoulli(0.5));
        }
        if (symplectic_product(x, y) == 0) y ^= y0;
        int sx = rng.bernoulli(0.5) ? +1 : -1;
        int sy = rng.bernoulli(0.5) ? +1 : -1;
        reduce_pair(reduction, SignedPauli(sx, x), SignedPauli(sy, y), i);
        (void)m;
    }
    return reduction.inverse();
}

}  // namespace stabtomo
