#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stabtomo {

// Fixed-length vector over F2, bit-packed into 64-bit words.
//
// Pauli strings use length 2n with the layout (a | b): bit i is a_i (X part
// of qubit i) and bit n+i is b_i (Z part of qubit i), little-endian within
// each block. Computational-basis strings use length n.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(uint32_t len) : len_(len), words_((len + 63) / 64, 0) {}

    static BitVec from_u64(uint32_t len, uint64_t bits);
    static BitVec from_bits(std::span<const int> bits);

    uint32_t len() const { return len_; }
    bool get(uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(uint32_t i, bool v) {
        uint64_t mask = uint64_t(1) << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    bool is_zero() const;
    uint32_t popcount() const;
    uint32_t lowest_set_bit() const;  // len() when zero

    BitVec& operator^=(const BitVec& o);
    BitVec operator^(const BitVec& o) const;
    bool operator==(const BitVec& o) const = default;
    bool operator<(const BitVec& o) const;  // lexicographic, bit 0 most significant

    // Standard inner product mod 2.
    int dot(const BitVec& o) const;

    // For length-2n strings: swaps the (a|b) halves. Used to express the
    // symplectic form as a standard one.
    BitVec swap_halves() const;

    // First k bits as a fresh vector.
    BitVec prefix(uint32_t k) const;
    // Bits [k, len) as a fresh vector.
    BitVec suffix_from(uint32_t k) const;
    BitVec concat(const BitVec& tail) const;

    uint64_t to_u64() const;  // requires len <= 64

    std::string to_hex() const;
    static BitVec from_hex(uint32_t len, const std::string& hex);
    std::string to_01() const;

    std::span<const uint64_t> words() const { return words_; }

  private:
    uint32_t len_ = 0;
    std::vector<uint64_t> words_;
};

int symplectic_product(const BitVec& x, const BitVec& y);

// Pauli string helpers for the (a|b) layout.
BitVec pauli_x_string(uint32_t n, uint32_t qubit);
BitVec pauli_z_string(uint32_t n, uint32_t qubit);
// Lifts a computational-basis string y in F2^n to the Z-string (0|y).
BitVec z_string_of(const BitVec& y);

enum class F2Form { Standard, Symplectic };

// Subspace of F2^L in reduced row echelon form: rows have strictly
// increasing pivots (lowest set bit), and each pivot bit is zero in every
// other row. The form is unique, so equality of subspaces is equality of
// the representation.
class Subspace {
  public:
    Subspace() = default;
    explicit Subspace(uint32_t ambient) : ambient_(ambient) {}

    static Subspace row_reduce(uint32_t ambient, std::span<const BitVec> vectors);
    static Subspace full(uint32_t ambient);

    uint32_t ambient_dim() const { return ambient_; }
    uint32_t dim() const { return static_cast<uint32_t>(rows_.size()); }
    const std::vector<BitVec>& basis() const { return rows_; }

    // Residual of x after elimination against the echelon rows; zero iff x
    // is in the span.
    BitVec reduce(const BitVec& x) const;
    bool contains(const BitVec& x) const { return reduce(x).is_zero(); }
    bool contains_subspace(const Subspace& s) const;

    // Inserts x if independent; keeps the echelon form. Returns false if x
    // was already in the span.
    bool insert(const BitVec& x);

    bool is_isotropic() const;

    Subspace orthogonal_complement(F2Form form) const;

    // Enumerates all 2^dim elements (small subspaces only).
    std::vector<BitVec> enumerate_elements() const;

    bool operator==(const Subspace& o) const = default;

    std::string to_key() const;

  private:
    uint32_t ambient_ = 0;
    std::vector<BitVec> rows_;
};

// Affine subspace offset + span(directions), with offset canonicalized by
// zeroing the pivot positions of the direction basis. Equality of the
// normalized representation is equality of the point sets.
struct AffineSpace {
    BitVec offset;
    Subspace directions;

    bool contains(const BitVec& x) const { return directions.contains(x ^ offset); }
    bool operator==(const AffineSpace& o) const = default;
};

AffineSpace affine_span(std::span<const BitVec> points);

// Extends an isotropic subspace of F2^{2n} to dimension n (a Lagrangian /
// stabilizer family). Candidates are scanned deterministically: single-qubit
// Z strings in qubit order, then single-qubit X strings, then the echelon
// basis of the symplectic complement. Throws if the input is not isotropic.
Subspace extend_to_lagrangian(const Subspace& s);

}  // namespace stabtomo
