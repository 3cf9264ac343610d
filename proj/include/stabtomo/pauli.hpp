#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "stabtomo/f2.hpp"

namespace stabtomo {

// A signed Weyl operator: sign * W_x with sign in {+1, -1} and
// W_x = i^{a.b} (X^{a_1}Z^{b_1}) x ... x (X^{a_n}Z^{b_n}), the Hermitian
// phase convention.
struct SignedPauli {
    int sign = +1;  // +1 or -1
    BitVec x;

    SignedPauli() = default;
    SignedPauli(int s, BitVec v) : sign(s), x(std::move(v)) {}

    uint32_t n() const { return x.len() / 2; }
    bool operator==(const SignedPauli& o) const = default;
};

// Projector (I + sign * W_x) / 2.
struct PauliProjector {
    SignedPauli p;
};

// Accumulator for products of signed Weyl operators, tracking the i-power
// phase exactly. Multiplying W_u by W_v gives
//   W_u W_v = i^{a_u.b_u + a_v.b_v + 2(b_u.a_v) - (a_u^a_v).(b_u^b_v)} W_{u+v},
// all dot products over the integers, exponent mod 4.
class WeylProduct {
  public:
    explicit WeylProduct(uint32_t two_n) : x_(two_n) {}

    void multiply_right(const SignedPauli& p);
    // The accumulated operator equals i^{phase} W_x.
    int phase_mod4() const { return phase_; }
    const BitVec& string() const { return x_; }

    // Valid only when the phase is 0 or 2 (Hermitian result); throws otherwise.
    SignedPauli to_signed() const;

  private:
    int phase_ = 0;
    BitVec x_;
};

// tr(W_x) = 2^n if x == 0 else 0; here: integer dot a.b mod 4 helper shared
// by the accumulator and dense application.
int weyl_self_phase_mod4(const BitVec& x);

// Dense backends. The default qubit cap keeps 2^n x 2^n matrices desk-sized.
inline constexpr uint32_t kDenseQubitLimit = 10;

Eigen::MatrixXcd weyl_matrix(const BitVec& x, uint32_t dense_limit = kDenseQubitLimit);

// y <- sign * W_x applied to a state vector, without building the matrix.
void apply_weyl(const SignedPauli& p, const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
// M <- sign * W_x * M (left multiplication), in place.
void apply_weyl_left(const SignedPauli& p, Eigen::MatrixXcd& m);
// M <- M * (sign * W_x), in place.
void apply_weyl_right(const SignedPauli& p, Eigen::MatrixXcd& m);

}  // namespace stabtomo
