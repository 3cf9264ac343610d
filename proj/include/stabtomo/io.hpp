#pragma once

#include <nlohmann/json.hpp>

#include "stabtomo/highdim_learner.hpp"
#include "stabtomo/instances.hpp"
#include "stabtomo/oracle.hpp"
#include "stabtomo/product_state.hpp"

// JSON wire formats. BitVec serializes as {"len": L, "hex": "..."} with the
// packed little-endian bytes; circuits as gate lists [{"g":"H","q":0},
// {"g":"CNOT","c":0,"t":1}, ...]; stabilizer states as {"n":..., "gens":
// [{"sign":1,"x":"hex"}, ...]}.

namespace stabtomo {

nlohmann::json to_json(const BitVec& v);
BitVec bitvec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Subspace& s);
Subspace subspace_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SignedPauli& p);
SignedPauli signed_pauli_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CliffordCircuit& c);
CliffordCircuit circuit_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StabilizerState& s);
StabilizerState stabilizer_state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SampleLedger& l);

nlohmann::json to_json(const PackingSet& k);
PackingSet packing_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProductState& p);
ProductState product_state_from_json(const nlohmann::json& j, const PackingSet* packing);

nlohmann::json instance_spec_to_json(const InstanceSpec& spec);
InstanceSpec instance_spec_from_json(const nlohmann::json& j);

}  // namespace stabtomo
