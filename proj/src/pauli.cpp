#include "stabtomo/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace stabtomo {

namespace {

// Integer dot of x's two halves, mod 4.
int halves_dot_mod4(const BitVec& x) {
    uint32_t n = x.len() / 2;
    int c = 0;
    for (uint32_t i = 0; i < n; ++i)
        if (x.get(i) && x.get(n + i)) ++c;
    return c & 3;
}

// Parity of b(u) . a(v).
int cross_parity(const BitVec& u, const BitVec& v) {
    uint32_t n = u.len() / 2;
    int c = 0;
    for (uint32_t i = 0; i < n; ++i)
        if (u.get(n + i) && v.get(i)) c ^= 1;
    return c;
}

struct PackedPauli {
    uint64_t a = 0, b = 0;
    std::complex<double> coeff;
};

PackedPauli pack(const SignedPauli& p) {
    uint32_t n = p.n();
    if (n > 63) throw std::runtime_error("dense Weyl application beyond 63 qubits");
    PackedPauli r;
    for (uint32_t i = 0; i < n; ++i) {
        if (p.x.get(i)) r.a |= uint64_t(1) << i;
        if (p.x.get(n + i)) r.b |= uint64_t(1) << i;
    }
    static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    r.coeff = ipow[halves_dot_mod4(p.x)];
    if (p.sign < 0) r.coeff = -r.coeff;
    return r;
}

}  // namespace

int weyl_self_phase_mod4(const BitVec& x) { return halves_dot_mod4(x); }

void WeylProduct::multiply_right(const SignedPauli& p) {
    if (p.x.len() != x_.len()) throw std::invalid_argument("WeylProduct length mismatch");
    // W_u W_v = i^{u_h + v_h + 2(b_u.a_v) - (u+v)_h} W_{u+v}, where w_h is the
    // integer dot of w's halves; exponent tracked mod 4.
    int e = halves_dot_mod4(x_) + halves_dot_mod4(p.x) + 2 * cross_parity(x_, p.x);
    if (p.sign < 0) e += 2;
    x_ ^= p.x;
    e += 4 - halves_dot_mod4(x_);
    phase_ = (phase_ + e) & 3;
}

SignedPauli WeylProduct::to_signed() const {
    if (phase_ == 0) return SignedPauli(+1, x_);
    if (phase_ == 2) return SignedPauli(-1, x_);
    throw std::logic_error("Weyl product is not Hermitian (odd i-power)");
}

Eigen::MatrixXcd weyl_matrix(const BitVec& x, uint32_t dense_limit) {
    uint32_t n = x.len() / 2;
    if (n > dense_limit) throw std::runtime_error("weyl_matrix beyond dense backend limit");
    uint64_t dim = uint64_t(1) << n;
    PackedPauli p = pack(SignedPauli(+1, x));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (uint64_t t = 0; t < dim; ++t) {
        // W |t> = i^{a.b} (-1)^{b.t} |t ^ a>
        int s = std::popcount(p.b & t) & 1;
        m(t ^ p.a, t) = s ? -p.coeff : p.coeff;
    }
    return m;
}

void apply_weyl(const SignedPauli& sp, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    PackedPauli p = pack(sp);
    uint64_t dim = uint64_t(in.size());
    out.resize(dim);
    for (uint64_t t = 0; t < dim; ++t) {
        int s = std::popcount(p.b & t) & 1;
        out[t ^ p.a] = (s ? -p.coeff : p.coeff) * in[t];
    }
}

void apply_weyl_left(const SignedPauli& sp, Eigen::MatrixXcd& m) {
    PackedPauli p = pack(sp);
    uint64_t dim = uint64_t(m.rows());
    Eigen::MatrixXcd out(dim, dim);
    for (uint64_t t = 0; t < dim; ++t) {
        int s = std::popcount(p.b & t) & 1;
        out.row(t ^ p.a) = (s ? -p.coeff : p.coeff) * m.row(t);
    }
    m.swap(out);
}

void apply_weyl_right(const SignedPauli& sp, Eigen::MatrixXcd& m) {
    PackedPauli p = pack(sp);
    uint64_t dim = uint64_t(m.rows());
    Eigen::MatrixXcd out(dim, dim);
    for (uint64_t t = 0; t < dim; ++t) {
        // Column t of W has its entry at row t ^ a; (M W).col(t) = phase * M.col(t ^ a).
        int s = std::popcount(p.b & t) & 1;
        out.col(t) = (s ? -p.coeff : p.coeff) * m.col(t ^ p.a);
    }
    m.swap(out);
}

}  // namespace stabtomo
