#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabtomo/f2.hpp"
#include "stabtomo/pauli.hpp"
#include "stabtomo/rng.hpp"

namespace stabtomo {

enum class GateKind : uint8_t { H, S, CNOT, X, Z };

struct Gate {
    GateKind kind;
    uint32_t q;        // target qubit; control for CNOT
    uint32_t t = 0;    // CNOT target
    bool operator==(const Gate& o) const = default;
};

// Gate list applied left to right: the circuit unitary is
// U = U(gates.back()) * ... * U(gates.front()).
struct CliffordCircuit {
    uint32_t n = 0;
    std::vector<Gate> gates;

    CliffordCircuit() = default;
    explicit CliffordCircuit(uint32_t qubits) : n(qubits) {}

    void h(uint32_t q) { push({GateKind::H, q}); }
    void s(uint32_t q) { push({GateKind::S, q}); }
    void x(uint32_t q) { push({GateKind::X, q}); }
    void z(uint32_t q) { push({GateKind::Z, q}); }
    void cnot(uint32_t c, uint32_t t) { push({GateKind::CNOT, c, t}); }
    void push(Gate g);

    // Appends `other`, with its qubit i acting on qubit i + offset here.
    void append(const CliffordCircuit& other, uint32_t offset = 0);

    CliffordCircuit inverse() const;

    bool operator==(const CliffordCircuit& o) const = default;
};

// Conjugates one signed Weyl operator through one gate: U (s W_x) U^dagger.
SignedPauli gate_act(const Gate& g, SignedPauli p);

// U (s W_x) U^dagger for the whole circuit, gate by gate.
SignedPauli clifford_act(const CliffordCircuit& c, SignedPauli p);

// Symplectic tableau with sign data: the images of the generators X_j, Z_j
// under conjugation. Arbitrary strings are acted on by multiplying generator
// images with exact phase tracking.
class Tableau {
  public:
    static Tableau identity(uint32_t n);
    static Tableau of_circuit(const CliffordCircuit& c);

    uint32_t n() const { return n_; }
    const SignedPauli& x_image(uint32_t j) const { return x_images_[j]; }
    const SignedPauli& z_image(uint32_t j) const { return z_images_[j]; }

    SignedPauli act(const SignedPauli& p) const;
    BitVec act_string(const BitVec& x) const;

    // this = gate-level update so that act() becomes (U_g . U_old) W (..)^dag.
    void apply_gate(const Gate& g);

    // Composition: (other o this), i.e. first this, then other.
    Tableau then(const Tableau& other) const;
    Tableau inverse() const;

    // M^T Omega M = Omega over F2.
    bool is_symplectic() const;

    bool operator==(const Tableau& o) const = default;

  private:
    uint32_t n_ = 0;
    std::vector<SignedPauli> x_images_, z_images_;
};

enum class BlockSide { Trailing, Leading };

// Maps an isotropic span (dim d) exactly onto a block of single-qubit Z
// generators: the last d qubits (Trailing, the canonical 0^{2n-d} x F2^d
// block) or the first d (Leading). The i-th echelon basis vector maps to the
// i-th target Z generator. Throws SynthesisError naming an anticommuting
// pair when the span is not isotropic. O(nd) gates.
struct SynthesisError : std::runtime_error {
    BitVec first, second;
    SynthesisError(BitVec a, BitVec b);
};

CliffordCircuit synthesize_clifford(uint32_t n, std::span<const BitVec> vectors,
                                    BlockSide side = BlockSide::Trailing);

// Circuit C with C (sign W_x) C^dag = +Z_target. Requires x != 0.
CliffordCircuit synthesize_to_z(uint32_t n, const SignedPauli& p, uint32_t target);

// Exactly uniform over the Clifford group modulo phase: qubit-by-qubit sweep,
// reducing a uniformly random anticommuting signed pair to (Z_i, X_i).
CliffordCircuit random_clifford(uint32_t n, Rng& rng);

}  // namespace stabtomo
