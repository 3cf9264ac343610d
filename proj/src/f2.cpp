#include "stabtomo/f2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace stabtomo {

namespace {

void check_same_len(const BitVec& x, const BitVec& y) {
    if (x.len() != y.len()) throw std::invalid_argument("BitVec length mismatch");
}

}  // namespace

BitVec BitVec::from_u64(uint32_t len, uint64_t bits) {
    if (len > 64) throw std::invalid_argument("from_u64 needs len <= 64");
    BitVec v(len);
    if (len > 0) v.words_[0] = len == 64 ? bits : (bits & ((uint64_t(1) << len) - 1));
    return v;
}

BitVec BitVec::from_bits(std::span<const int> bits) {
    BitVec v(static_cast<uint32_t>(bits.size()));
    for (uint32_t i = 0; i < bits.size(); ++i) v.set(i, bits[i] != 0);
    return v;
}

bool BitVec::is_zero() const {
    for (uint64_t w : words_)
        if (w) return false;
    return true;
}

uint32_t BitVec::popcount() const {
    uint32_t c = 0;
    for (uint64_t w : words_) c += static_cast<uint32_t>(std::popcount(w));
    return c;
}

uint32_t BitVec::lowest_set_bit() const {
    for (size_t k = 0; k < words_.size(); ++k)
        if (words_[k]) return static_cast<uint32_t>(64 * k + std::countr_zero(words_[k]));
    return len_;
}

BitVec& BitVec::operator^=(const BitVec& o) {
    check_same_len(*this, o);
    for (size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
    return *this;
}

BitVec BitVec::operator^(const BitVec& o) const {
    BitVec r = *this;
    r ^= o;
    return r;
}

bool BitVec::operator<(const BitVec& o) const {
    check_same_len(*this, o);
    // Bit 0 is the most significant position for the lexicographic order.
    for (size_t k = 0; k < words_.size(); ++k) {
        if (words_[k] == o.words_[k]) continue;
        uint64_t diff = words_[k] ^ o.words_[k];
        uint32_t bit = static_cast<uint32_t>(std::countr_zero(diff));
        return !((words_[k] >> bit) & 1);
    }
    return false;
}

int BitVec::dot(const BitVec& o) const {
    check_same_len(*this, o);
    uint64_t acc = 0;
    for (size_t k = 0; k < words_.size(); ++k) acc ^= words_[k] & o.words_[k];
    return std::popcount(acc) & 1;
}

BitVec BitVec::swap_halves() const {
    if (len_ % 2 != 0) throw std::invalid_argument("swap_halves needs even length");
    uint32_t n = len_ / 2;
    BitVec r(len_);
    for (uint32_t i = 0; i < n; ++i) {
        r.set(i, get(n + i));
        r.set(n + i, get(i));
    }
    return r;
}

BitVec BitVec::prefix(uint32_t k) const {
    BitVec r(k);
    for (uint32_t i = 0; i < k; ++i) r.set(i, get(i));
    return r;
}

BitVec BitVec::suffix_from(uint32_t k) const {
    BitVec r(len_ - k);
    for (uint32_t i = k; i < len_; ++i) r.set(i - k, get(i));
    return r;
}

BitVec BitVec::concat(const BitVec& tail) const {
    BitVec r(len_ + tail.len());
    for (uint32_t i = 0; i < len_; ++i) r.set(i, get(i));
    for (uint32_t i = 0; i < tail.len(); ++i) r.set(len_ + i, tail.get(i));
    return r;
}

uint64_t BitVec::to_u64() const {
    if (len_ > 64) throw std::invalid_argument("to_u64 needs len <= 64");
    return words_.empty() ? 0 : words_[0];
}

std::string BitVec::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    uint32_t bytes = (len_ + 7) / 8;
    s.reserve(2 * bytes);
    for (uint32_t b = 0; b < bytes; ++b) {
        uint8_t byte = static_cast<uint8_t>((words_[b / 8] >> (8 * (b % 8))) & 0xff);
        s.push_back(digits[byte >> 4]);
        s.push_back(digits[byte & 0xf]);
    }
    return s;
}

BitVec BitVec::from_hex(uint32_t len, const std::string& hex) {
    uint32_t bytes = (len + 7) / 8;
    if (hex.size() != 2 * bytes) throw std::invalid_argument("hex length mismatch");
    auto nibble = [](char c) -> uint8_t {
        if (c >= '0' && c <= '9') return static_cast<uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<uint8_t>(c - 'A' + 10);
        throw std::invalid_argument("bad hex digit");
    };
    BitVec v(len);
    for (uint32_t b = 0; b < bytes; ++b) {
        uint8_t byte = static_cast<uint8_t>((nibble(hex[2 * b]) << 4) | nibble(hex[2 * b + 1]));
        v.words_[b / 8] |= uint64_t(byte) << (8 * (b % 8));
    }
    for (uint32_t i = len; i < 8 * bytes; ++i)
        if (v.get(i)) throw std::invalid_argument("hex has bits beyond declared length");
    return v;
}

std::string BitVec::to_01() const {
    std::string s(len_, '0');
    for (uint32_t i = 0; i < len_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

int symplectic_product(const BitVec& x, const BitVec& y) {
    check_same_len(x, y);
    if (x.len() % 2 != 0) throw std::invalid_argument("symplectic product needs even length");
    return x.dot(y.swap_halves());
}

BitVec pauli_x_string(uint32_t n, uint32_t qubit) {
    BitVec v(2 * n);
    v.set(qubit, true);
    return v;
}

BitVec pauli_z_string(uint32_t n, uint32_t qubit) {
    BitVec v(2 * n);
    v.set(n + qubit, true);
    return v;
}

BitVec z_string_of(const BitVec& y) {
    BitVec v(2 * y.len());
    for (uint32_t i = 0; i < y.len(); ++i) v.set(y.len() + i, y.get(i));
    return v;
}

Subspace Subspace::row_reduce(uint32_t ambient, std::span<const BitVec> vectors) {
    Subspace s(ambient);
    for (const BitVec& v : vectors) s.insert(v);
    return s;
}

Subspace Subspace::full(uint32_t ambient) {
    Subspace s(ambient);
    for (uint32_t i = 0; i < ambient; ++i) {
        BitVec e(ambient);
        e.set(i, true);
        s.rows_.push_back(e);
    }
    return s;
}

BitVec Subspace::reduce(const BitVec& x) const {
    if (x.len() != ambient_) throw std::invalid_argument("ambient dimension mismatch");
    BitVec r = x;
    for (const BitVec& row : rows_) {
        uint32_t p = row.lowest_set_bit();
        if (r.get(p)) r ^= row;
    }
    return r;
}

bool Subspace::contains_subspace(const Subspace& s) const {
    for (const BitVec& row : s.rows_)
        if (!contains(row)) return false;
    return true;
}

bool Subspace::insert(const BitVec& x) {
    BitVec r = reduce(x);
    if (r.is_zero()) return false;
    uint32_t p = r.lowest_set_bit();
    for (BitVec& row : rows_)
        if (row.get(p)) row ^= r;
    auto it = std::lower_bound(rows_.begin(), rows_.end(), r,
                               [](const BitVec& a, const BitVec& b) {
                                   return a.lowest_set_bit() < b.lowest_set_bit();
                               });
    rows_.insert(it, r);
    return true;
}

bool Subspace::is_isotropic() const {
    for (size_t i = 0; i < rows_.size(); ++i)
        for (size_t j = i + 1; j < rows_.size(); ++j)
            if (symplectic_product(rows_[i], rows_[j]) != 0) return false;
    return true;
}

Subspace Subspace::orthogonal_complement(F2Form form) const {
    // Kernel of the map x -> (b_i . x) where b_i runs over the (possibly
    // half-swapped) basis rows.
    std::vector<BitVec> constraints;
    constraints.reserve(rows_.size());
    for (const BitVec& row : rows_)
        constraints.push_back(form == F2Form::Standard ? row : row.swap_halves());

    Subspace cs = Subspace::row_reduce(ambient_, constraints);
    std::vector<bool> is_pivot(ambient_, false);
    for (const BitVec& row : cs.rows_) is_pivot[row.lowest_set_bit()] = true;

    Subspace result(ambient_);
    for (uint32_t free = 0; free < ambient_; ++free) {
        if (is_pivot[free]) continue;
        BitVec v(ambient_);
        v.set(free, true);
        // Solve the pivot coordinates so every constraint row dots to zero.
        for (auto it = cs.rows_.rbegin(); it != cs.rows_.rend(); ++it) {
            if (it->dot(v)) v.set(it->lowest_set_bit(), !v.get(it->lowest_set_bit()));
        }
        result.insert(v);
    }
    return result;
}

std::vector<BitVec> Subspace::enumerate_elements() const {
    if (dim() > 25) throw std::invalid_argument("subspace too large to enumerate");
    std::vector<BitVec> out;
    out.reserve(size_t(1) << dim());
    out.push_back(BitVec(ambient_));
    for (const BitVec& row : rows_) {
        size_t cur = out.size();
        for (size_t i = 0; i < cur; ++i) out.push_back(out[i] ^ row);
    }
    return out;
}

std::string Subspace::to_key() const {
    std::string key = std::to_string(ambient_) + ":";
    for (const BitVec& row : rows_) key += row.to_hex() + ";";
    return key;
}

AffineSpace affine_span(std::span<const BitVec> points) {
    if (points.empty()) throw std::invalid_argument("affine_span of empty point set");
    std::vector<BitVec> diffs;
    diffs.reserve(points.size() - 1);
    for (size_t i = 1; i < points.size(); ++i) diffs.push_back(points[i] ^ points[0]);
    AffineSpace a;
    a.directions = Subspace::row_reduce(points[0].len(), diffs);
    a.offset = a.directions.reduce(points[0]);
    return a;
}

Subspace extend_to_lagrangian(const Subspace& s) {
    if (s.ambient_dim() % 2 != 0)
        throw std::invalid_argument("extend_to_lagrangian needs an even ambient dimension");
    if (!s.is_isotropic())
        throw std::invalid_argument("extend_to_lagrangian: generators anticommute");
    uint32_t n = s.ambient_dim() / 2;
    Subspace out = s;
    while (out.dim() < n) {
        Subspace perp = out.orthogonal_complement(F2Form::Symplectic);
        bool extended = false;
        auto try_candidate = [&](const BitVec& v) {
            if (extended) return;
            if (!perp.contains(v) || out.contains(v)) return;
            out.insert(v);
            extended = true;
        };
        for (uint32_t q = 0; q < n && !extended; ++q) try_candidate(pauli_z_string(n, q));
        for (uint32_t q = 0; q < n && !extended; ++q) try_candidate(pauli_x_string(n, q));
        for (const BitVec& row : perp.basis()) try_candidate(row);
        if (!extended) throw std::logic_error("isotropic subspace without extension");
    }
    return out;
}

}  // namespace stabtomo
