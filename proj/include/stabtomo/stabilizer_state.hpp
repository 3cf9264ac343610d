#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stabtomo/clifford.hpp"
#include "stabtomo/pauli.hpp"

namespace stabtomo {

// Pure n-qubit stabilizer state given by n independent, pairwise commuting
// signed generators. The canonical key is the unique reduced echelon form of
// the check matrix together with the group-consistent sign of each echelon
// generator: equal keys iff equal states up to global phase.
class StabilizerState {
  public:
    StabilizerState() = default;
    explicit StabilizerState(std::vector<SignedPauli> generators);

    static StabilizerState computational_basis(uint32_t n, const BitVec& bits);
    static StabilizerState zero_state(uint32_t n);
    // C |0^n>, generators are the images of +Z_j.
    static StabilizerState from_circuit(const CliffordCircuit& c);
    static StabilizerState random(uint32_t n, Rng& rng);

    uint32_t n() const { return n_; }
    const std::vector<SignedPauli>& generators() const { return gens_; }
    const std::string& canonical_key() const { return key_; }
    const Subspace& weyl_group() const { return group_; }

    // Sign of the group element with string `x` (must lie in the group).
    int sign_of(const BitVec& x) const;

    // Dense unit vector fixed by every generator (n <= dense limit), global
    // phase fixed by making the first nonzero amplitude real positive.
    Eigen::VectorXcd state_vector(uint32_t dense_limit = kDenseQubitLimit) const;

    bool operator==(const StabilizerState& o) const { return key_ == o.key_; }
    bool operator<(const StabilizerState& o) const { return key_ < o.key_; }

  private:
    uint32_t n_ = 0;
    std::vector<SignedPauli> gens_;       // echelon-form signed generators
    Subspace group_;                      // span of the strings
    std::string key_;
};

}  // namespace stabtomo
