#include "stabtomo/io.hpp"

#include <nlohmann/json.hpp>

namespace stabtomo {

using json = nlohmann::json;

json to_json(const BitVec& v) { return json{{"len", v.len()}, {"hex", v.to_hex()}}; }

BitVec bitvec_from_json(const json& j) {
    return BitVec::from_hex(j.at("len").get<uint32_t>(), j.at("hex").get<std::string>());
}

json to_json(const Subspace& s) {
    json rows = json::array();
    for (const BitVec& r : s.basis()) rows.push_back(to_json(r));
    return json{{"ambient", s.ambient_dim()}, {"basis", rows}};
}

Subspace subspace_from_json(const json& j) {
    std::vector<BitVec> rows;
    for (const auto& r : j.at("basis")) rows.push_back(bitvec_from_json(r));
    return Subspace::row_reduce(j.at("ambient").get<uint32_t>(), rows);
}

json to_json(const SignedPauli& p) {
    return json{{"sign", p.sign}, {"len", p.x.len()}, {"x", p.x.to_hex()}};
}

SignedPauli signed_pauli_from_json(const json& j) {
    int sign = j.at("sign").get<int>();
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
    return SignedPauli(sign,
                       BitVec::from_hex(j.at("len").get<uint32_t>(), j.at("x").get<std::string>()));
}

json to_json(const CliffordCircuit& c) {
    json gates = json::array();
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::H: gates.push_back({{"g", "H"}, {"q", g.q}}); break;
            case GateKind::S: gates.push_back({{"g", "S"}, {"q", g.q}}); break;
            case GateKind::X: gates.push_back({{"g", "X"}, {"q", g.q}}); break;
            case GateKind::Z: gates.push_back({{"g", "Z"}, {"q", g.q}}); break;
            case GateKind::CNOT:
                gates.push_back({{"g", "CNOT"}, {"c", g.q}, {"t", g.t}});
                break;
        }
    }
    return json{{"n", c.n}, {"gates", gates}};
}

CliffordCircuit circuit_from_json(const json& j) {
    CliffordCircuit c(j.at("n").get<uint32_t>());
    for (const auto& g : j.at("gates")) {
        std::string kind = g.at("g").get<std::string>();
        if (kind == "H")
            c.h(g.at("q").get<uint32_t>());
        else if (kind == "S")
            c.s(g.at("q").get<uint32_t>());
        else if (kind == "X")
            c.x(g.at("q").get<uint32_t>());
        else if (kind == "Z")
            c.z(g.at("q").get<uint32_t>());
        else if (kind == "CNOT")
            c.cnot(g.at("c").get<uint32_t>(), g.at("t").get<uint32_t>());
        else
            throw std::invalid_argument("unknown gate kind " + kind);
    }
    return c;
}

json to_json(const StabilizerState& s) {
    json gens = json::array();
    for (const SignedPauli& g : s.generators())
        gens.push_back(json{{"sign", g.sign}, {"x", g.x.to_hex()}});
    return json{{"n", s.n()}, {"gens", gens}};
}

StabilizerState stabilizer_state_from_json(const json& j) {
    uint32_t n = j.at("n").get<uint32_t>();
    std::vector<SignedPauli> gens;
    for (const auto& g : j.at("gens")) {
        int sign = g.at("sign").get<int>();
        gens.emplace_back(sign, BitVec::from_hex(2 * n, g.at("x").get<std::string>()));
    }
    return StabilizerState(std::move(gens));
}

json to_json(const DensityMatrix& rho) {
    uint64_t d = rho.dim();
    json re = json::array(), im = json::array();
    for (uint64_t r = 0; r < d; ++r) {
        json rr = json::array(), ri = json::array();
        for (uint64_t c = 0; c < d; ++c) {
            rr.push_back(rho.data()(r, c).real());
            ri.push_back(rho.data()(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return json{{"n", rho.n()}, {"re", re}, {"im", im}};
}

DensityMatrix density_from_json(const json& j) {
    uint32_t n = j.at("n").get<uint32_t>();
    uint64_t d = uint64_t(1) << n;
    Eigen::MatrixXcd m(d, d);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    for (uint64_t r = 0; r < d; ++r)
        for (uint64_t c = 0; c < d; ++c)
            m(r, c) = std::complex<double>(re.at(r).at(c).get<double>(),
                                           im.at(r).at(c).get<double>());
    return DensityMatrix(n, std::move(m));
}

json to_json(const SampleLedger& l) {
    return json{{"base_copies", l.base_copies},
                {"conditioned_copies", l.conditioned_copies},
                {"bell_difference_samples", l.bell_difference_samples},
                {"bell_measurements", l.bell_measurements},
                {"single_copy_measurements", l.single_copy_measurements},
                {"base_measurements", l.base_measurements}};
}

json to_json(const PackingSet& k) {
    json states = json::array();
    for (size_t i = 0; i < k.size(); ++i) {
        const auto& u = k.bloch(i);
        states.push_back(json::array({u[0], u[1], u[2]}));
    }
    return json{{"mu", k.mu()}, {"states", states}};
}

PackingSet packing_from_json(const json& j) {
    std::vector<std::array<double, 3>> bloch;
    for (const auto& u : j.at("states"))
        bloch.push_back({u.at(0).get<double>(), u.at(1).get<double>(), u.at(2).get<double>()});
    return PackingSet(j.at("mu").get<double>(), std::move(bloch));
}

json to_json(const ProductState& p) {
    if (p.packing_indices) {
        json idx = json::array();
        for (size_t i : *p.packing_indices) idx.push_back(i);
        return json{{"kind", "packing"}, {"indices", idx}};
    }
    json axes = json::array();
    for (const auto& a : *p.axes) {
        std::string s;
        s += "XYZ"[a.pauli];
        s += a.sign > 0 ? '+' : '-';
        axes.push_back(s);
    }
    return json{{"kind", "axes"}, {"axes", axes}};
}

ProductState product_state_from_json(const json& j, const PackingSet* packing) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "packing") {
        if (!packing) throw std::invalid_argument("packing-indexed state needs a packing set");
        std::vector<size_t> idx;
        for (const auto& i : j.at("indices")) idx.push_back(i.get<size_t>());
        return ProductState::from_packing(*packing, std::move(idx));
    }
    std::vector<ProductState::Axis> axes;
    for (const auto& a : j.at("axes")) {
        std::string s = a.get<std::string>();
        if (s.size() != 2) throw std::invalid_argument("bad axis token");
        int pauli = s[0] == 'X' ? 0 : s[0] == 'Y' ? 1 : 2;
        axes.push_back({pauli, s[1] == '+' ? +1 : -1});
    }
    return ProductState::from_axes(std::move(axes));
}

json instance_spec_to_json(const InstanceSpec& spec) {
    json j;
    switch (spec.kind) {
        case InstanceKind::NoisyStabilizer: j["kind"] = "noisy_stabilizer"; break;
        case InstanceKind::Doped: j["kind"] = "doped"; break;
        case InstanceKind::NoisyProduct: j["kind"] = "noisy_product"; break;
        case InstanceKind::SubsetPhase: j["kind"] = "subset_phase"; break;
        case InstanceKind::LowerBoundFamily: j["kind"] = "lower_bound_family"; break;
        case InstanceKind::File: j["kind"] = "file"; break;
    }
    j["n"] = spec.n;
    j["seed"] = spec.seed;
    if (spec.kind == InstanceKind::NoisyStabilizer || spec.kind == InstanceKind::NoisyProduct ||
        spec.kind == InstanceKind::Doped)
        j["noise"] = spec.noise;
    if (spec.kind == InstanceKind::Doped) j["t_count"] = spec.t_count;
    if (spec.kind == InstanceKind::SubsetPhase) j["subset_size"] = spec.subset_size;
    if (spec.kind == InstanceKind::LowerBoundFamily) j["tau"] = spec.tau;
    if (spec.kind == InstanceKind::File) {
        DensityMatrix rho(spec.n, spec.explicit_data);
        j.update(to_json(rho));
    }
    return j;
}

InstanceSpec instance_spec_from_json(const json& j) {
    InstanceSpec spec;
    if (j.contains("re")) {
        // Explicit matrix form {"n":k, "re":[[..]], "im":[[..]]}.
        DensityMatrix rho = density_from_json(j);
        spec.kind = InstanceKind::File;
        spec.n = rho.n();
        spec.explicit_data = rho.data();
        return spec;
    }
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "noisy_stabilizer")
        spec.kind = InstanceKind::NoisyStabilizer;
    else if (kind == "doped")
        spec.kind = InstanceKind::Doped;
    else if (kind == "noisy_product")
        spec.kind = InstanceKind::NoisyProduct;
    else if (kind == "subset_phase")
        spec.kind = InstanceKind::SubsetPhase;
    else if (kind == "lower_bound_family")
        spec.kind = InstanceKind::LowerBoundFamily;
    else if (kind == "file")
        spec.kind = InstanceKind::File;
    else
        throw std::invalid_argument("unknown instance kind " + kind);
    spec.n = j.at("n").get<uint32_t>();
    spec.seed = j.value("seed", uint64_t(0));
    spec.noise = j.value("noise", 0.0);
    spec.tau = j.value("tau", 1.0);
    spec.t_count = j.value("t_count", 1u);
    spec.subset_size = j.value("subset_size", 4u);
    if (spec.kind == InstanceKind::File) spec.explicit_data = density_from_json(j).data();
    return spec;
}

}  // namespace stabtomo
