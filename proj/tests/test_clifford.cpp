#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "stabtomo/clifford.hpp"
#include "stabtomo/stabilizer_state.hpp"
#include "support/dense_reference.hpp"

using namespace stabtomo;

namespace {

CliffordCircuit random_circuit(uint32_t n, size_t gate_count, Rng& rng) {
    CliffordCircuit c(n);
    for (size_t i = 0; i < gate_count; ++i) {
        int kind = static_cast<int>(rng.uniform_below(n >= 2 ? 5 : 4));
        uint32_t q = static_cast<uint32_t>(rng.uniform_below(n));
        switch (kind) {
            case 0: c.h(q); break;
            case 1: c.s(q); break;
            case 2: c.x(q); break;
            case 3: c.z(q); break;
            default: {
                uint32_t t = static_cast<uint32_t>(rng.uniform_below(n - 1));
                if (t >= q) ++t;
                c.cnot(q, t);
            }
        }
    }
    return c;
}

BitVec random_string(uint32_t n, Rng& rng) {
    BitVec v(2 * n);
    for (uint32_t i = 0; i < 2 * n; ++i) v.set(i, rng.bernoulli(0.5));
    return v;
}

// Signed comparison of U (s W) U^dag against the claimed signed Weyl.
void check_conjugation(const CliffordCircuit& c, const SignedPauli& in, const SignedPauli& out) {
    Eigen::MatrixXcd u = dense_ref::circuit_unitary(c);
    Eigen::MatrixXcd lhs = u * (double(in.sign) * dense_ref::weyl(in.x)) * u.adjoint();
    Eigen::MatrixXcd rhs = double(out.sign) * dense_ref::weyl(out.x);
    CHECK((lhs - rhs).norm() < 1e-10);
}

}  // namespace

TEST_CASE("single gate examples") {
    // H on +X -> +Z.
    CliffordCircuit h(1);
    h.h(0);
    SignedPauli x(+1, pauli_x_string(1, 0));
    SignedPauli hx = clifford_act(h, x);
    CHECK(hx == SignedPauli(+1, pauli_z_string(1, 0)));
    // S on +X -> +Y.
    CliffordCircuit s(1);
    s.s(0);
    SignedPauli sx = clifford_act(s, x);
    CHECK(sx.sign == +1);
    CHECK(sx.x == BitVec::from_u64(2, 0b11));
    // CNOT(0,1) on X x I -> X x X.
    CliffordCircuit cx(2);
    cx.cnot(0, 1);
    SignedPauli xi(+1, pauli_x_string(2, 0));
    SignedPauli out = clifford_act(cx, xi);
    CHECK(out.sign == +1);
    CHECK(out.x == (pauli_x_string(2, 0) ^ pauli_x_string(2, 1)));
}

TEST_CASE("gate action matches dense conjugation exhaustively") {
    // Every 1- and 2-qubit gate against every signed Pauli string.
    for (uint32_t n = 1; n <= 2; ++n) {
        std::vector<Gate> gates;
        for (uint32_t q = 0; q < n; ++q) {
            gates.push_back({GateKind::H, q});
            gates.push_back({GateKind::S, q});
            gates.push_back({GateKind::X, q});
            gates.push_back({GateKind::Z, q});
        }
        if (n == 2) {
            gates.push_back({GateKind::CNOT, 0, 1});
            gates.push_back({GateKind::CNOT, 1, 0});
        }
        for (const Gate& g : gates) {
            CliffordCircuit c(n);
            c.push(g);
            for (uint64_t bits = 0; bits < (uint64_t(1) << (2 * n)); ++bits) {
                for (int sign : {+1, -1}) {
                    SignedPauli in(sign, BitVec::from_u64(2 * n, bits));
                    check_conjugation(c, in, clifford_act(c, in));
                }
            }
        }
    }
}

TEST_CASE("tableau equals gate-by-gate action and dense conjugation") {
    Rng rng(31);
    for (int it = 0; it < 60; ++it) {
        uint32_t n = 1 + static_cast<uint32_t>(rng.uniform_below(3));
        CliffordCircuit c = random_circuit(n, 1 + rng.uniform_below(30), rng);
        Tableau t = Tableau::of_circuit(c);
        CHECK(t.is_symplectic());
        for (uint64_t bits = 0; bits < (uint64_t(1) << (2 * n)); ++bits) {
            SignedPauli in(rng.bernoulli(0.5) ? 1 : -1, BitVec::from_u64(2 * n, bits));
            SignedPauli via_gates = clifford_act(c, in);
            SignedPauli via_tableau = t.act(in);
            CHECK(via_gates == via_tableau);
            if (bits % 7 == 0) check_conjugation(c, in, via_tableau);
        }
    }
}

TEST_CASE("tableau composition and inverse") {
    Rng rng(32);
    for (int it = 0; it < 40; ++it) {
        uint32_t n = 1 + static_cast<uint32_t>(rng.uniform_below(4));
        CliffordCircuit c1 = random_circuit(n, 10, rng);
        CliffordCircuit c2 = random_circuit(n, 10, rng);
        Tableau t1 = Tableau::of_circuit(c1);
        Tableau t2 = Tableau::of_circuit(c2);
        CliffordCircuit both = c1;
        both.append(c2);
        CHECK(Tableau::of_circuit(both) == t1.then(t2));

        Tableau inv = t1.inverse();
        CHECK(t1.then(inv) == Tableau::identity(n));
        CHECK(inv.then(t1) == Tableau::identity(n));
        // Circuit-level inverse agrees.
        CHECK(Tableau::of_circuit(c1.inverse()) == inv);
    }
}

TEST_CASE("synthesis examples") {
    // A = {Z} on 1 qubit: identity works; contract only asks for the block.
    CliffordCircuit cz = synthesize_clifford(1, std::vector<BitVec>{pauli_z_string(1, 0)});
    CHECK(Tableau::of_circuit(cz).act_string(pauli_z_string(1, 0)) == pauli_z_string(1, 0));
    // A = {X} on 1 qubit: maps onto Z.
    CliffordCircuit cx = synthesize_clifford(1, std::vector<BitVec>{pauli_x_string(1, 0)});
    CHECK(Tableau::of_circuit(cx).act_string(pauli_x_string(1, 0)) == pauli_z_string(1, 0));
    // Anticommuting pair errors out.
    CHECK_THROWS_AS(synthesize_clifford(
                        1, std::vector<BitVec>{pauli_x_string(1, 0), pauli_z_string(1, 0)}),
                    SynthesisError);
}

TEST_CASE("synthesis postcondition on random isotropic subspaces") {
    Rng rng(33);
    for (int it = 0; it < 120; ++it) {
        uint32_t n = 1 + static_cast<uint32_t>(rng.uniform_below(5));
        // Random isotropic span: grow greedily from random strings.
        Subspace s(2 * n);
        uint32_t want = static_cast<uint32_t>(rng.uniform_below(n + 1));
        int guard = 0;
        while (s.dim() < want && guard++ < 300) {
            BitVec v = random_string(n, rng);
            bool ok = !v.is_zero();
            for (const BitVec& row : s.basis())
                if (symplectic_product(row, v)) ok = false;
            if (ok) s.insert(v);
        }
        uint32_t d = s.dim();
        for (BlockSide side : {BlockSide::Trailing, BlockSide::Leading}) {
            CliffordCircuit c = synthesize_clifford(n, s.basis(), side);
            Tableau t = Tableau::of_circuit(c);
            Subspace image(2 * n);
            for (uint32_t i = 0; i < d; ++i) {
                BitVec y = t.act_string(s.basis()[i]);
                // Exact target: i-th Z generator of the block.
                uint32_t q = side == BlockSide::Trailing ? n - d + i : i;
                CHECK(y == pauli_z_string(n, q));
                image.insert(y);
            }
            CHECK(image.dim() == d);
            CHECK(c.gates.size() <= 16 * size_t(n) * std::max<size_t>(d, 1));
        }
    }
}

TEST_CASE("synthesize_to_z maps signed Pauli to +Z_target") {
    Rng rng(34);
    for (int it = 0; it < 200; ++it) {
        uint32_t n = 1 + static_cast<uint32_t>(rng.uniform_below(5));
        BitVec x = random_string(n, rng);
        if (x.is_zero()) continue;
        SignedPauli p(rng.bernoulli(0.5) ? 1 : -1, x);
        uint32_t target = static_cast<uint32_t>(rng.uniform_below(n));
        CliffordCircuit c = synthesize_to_z(n, p, target);
        CHECK(clifford_act(c, p) == SignedPauli(+1, pauli_z_string(n, target)));
    }
}

TEST_CASE("random_clifford uniform over the 24 single-qubit cosets") {
    Rng rng(35);
    std::map<std::string, int> counts;
    const int draws = 24000;
    for (int i = 0; i < draws; ++i) {
        CliffordCircuit c = random_clifford(1, rng);
        Tableau t = Tableau::of_circuit(c);
        CHECK(t.is_symplectic());
        SignedPauli ix = t.x_image(0), iz = t.z_image(0);
        std::string key;
        key += ix.sign > 0 ? '+' : '-';
        key += ix.x.to_01();
        key += iz.sign > 0 ? '+' : '-';
        key += iz.x.to_01();
        counts[key]++;
    }
    CHECK(counts.size() == 24);
    // Each coset: mean 1000, sd = sqrt(1000 * 23/24) ~ 31; require +-5 sd.
    for (const auto& [k, v] : counts) {
        CHECK(v > 1000 - 5 * 31);
        CHECK(v < 1000 + 5 * 31);
    }
}

TEST_CASE("random_clifford n=2 image of X_1 uniform over nonzero strings") {
    Rng rng(36);
    std::map<uint64_t, int> counts;
    const int draws = 15000;
    for (int i = 0; i < draws; ++i) {
        CliffordCircuit c = random_clifford(2, rng);
        Tableau t = Tableau::of_circuit(c);
        counts[t.x_image(0).x.to_u64()]++;
    }
    CHECK(counts.size() == 15);
    // Chi-square against uniform over 15 bins; 5-sigma-ish critical value.
    double expected = draws / 15.0;
    double chi2 = 0;
    for (const auto& [k, v] : counts) chi2 += (v - expected) * (v - expected) / expected;
    CHECK(chi2 < 60.0);  // df = 14, far tail
}

TEST_CASE("random stabilizer states via circuits are fixed by their generators") {
    Rng rng(37);
    for (int it = 0; it < 30; ++it) {
        uint32_t n = 1 + static_cast<uint32_t>(rng.uniform_below(3));
        CliffordCircuit c = random_clifford(n, rng);
        StabilizerState st = StabilizerState::from_circuit(c);
        Eigen::VectorXcd v = st.state_vector();
        for (const SignedPauli& g : st.generators()) {
            Eigen::VectorXcd w;
            apply_weyl(g, v, w);
            CHECK((w - v).norm() < 1e-9);
        }
        // The state vector equals U|0...0> up to phase.
        Eigen::MatrixXcd u = dense_ref::circuit_unitary(c);
        Eigen::VectorXcd want = u.col(0);
        CHECK(std::abs(std::abs(want.dot(v)) - 1.0) < 1e-9);
    }
}

TEST_CASE("canonical key identifies states") {
    // {+Z1, +Z2} and {+Z1, +Z1Z2} stabilize |00>.
    std::vector<SignedPauli> g1 = {SignedPauli(+1, pauli_z_string(2, 0)),
                                   SignedPauli(+1, pauli_z_string(2, 1))};
    std::vector<SignedPauli> g2 = {
        SignedPauli(+1, pauli_z_string(2, 0)),
        SignedPauli(+1, pauli_z_string(2, 0) ^ pauli_z_string(2, 1))};
    CHECK(StabilizerState(g1) == StabilizerState(g2));
    // |0> vs |1>.
    CHECK(!(StabilizerState::zero_state(1) ==
            StabilizerState(std::vector<SignedPauli>{SignedPauli(-1, pauli_z_string(1, 0))})));

    // Random regenerated generator sets of a random n=3 state share the key,
    // and the dense vectors agree.
    Rng rng(38);
    for (int it = 0; it < 40; ++it) {
        StabilizerState st = StabilizerState::random(3, rng);
        // Re-generate: random products of the generators (invertible coeffs).
        std::vector<SignedPauli> regen;
        std::vector<BitVec> strings;
        while (regen.size() < 3) {
            WeylProduct prod(6);
            BitVec mask(3);
            for (uint32_t j = 0; j < 3; ++j) mask.set(j, rng.bernoulli(0.5));
            if (mask.is_zero()) continue;
            for (uint32_t j = 0; j < 3; ++j)
                if (mask.get(j)) prod.multiply_right(st.generators()[j]);
            SignedPauli cand = prod.to_signed();
            Subspace sp = Subspace::row_reduce(6, strings);
            if (sp.contains(cand.x)) continue;
            strings.push_back(cand.x);
            regen.push_back(cand);
        }
        StabilizerState st2(regen);
        CHECK(st == st2);
        CHECK(std::abs(std::abs(st.state_vector().dot(st2.state_vector())) - 1.0) < 1e-9);
    }

    // Distinct n<=2 states have distinct keys (dense cross-check).
    Rng rng2(39);
    std::vector<StabilizerState> states;
    for (int it = 0; it < 25; ++it) states.push_back(StabilizerState::random(2, rng2));
    for (size_t i = 0; i < states.size(); ++i) {
        for (size_t j = i + 1; j < states.size(); ++j) {
            double ov = std::norm(states[i].state_vector().dot(states[j].state_vector()));
            bool same_key = states[i] == states[j];
            CHECK(same_key == (std::abs(ov - 1.0) < 1e-9));
        }
    }
}

TEST_CASE("dependent or anticommuting generators are rejected") {
    std::vector<SignedPauli> dep = {SignedPauli(+1, pauli_z_string(2, 0)),
                                    SignedPauli(-1, pauli_z_string(2, 0))};
    CHECK_THROWS(StabilizerState(dep));
    std::vector<SignedPauli> anti = {SignedPauli(+1, pauli_x_string(2, 0)),
                                     SignedPauli(+1, pauli_z_string(2, 0))};
    CHECK_THROWS(StabilizerState(anti));
}

TEST_CASE("nearest-neighbor form reproduces all overlap-1/sqrt2 pairs") {
    // For n <= 2: every stabilizer pair with |<phi|phi'>| = 1/sqrt(2) is of
    // the form |phi'> = (I + i^l W_x)/sqrt(2) |phi>, exhaustively.
    Rng rng(40);
    for (uint32_t n = 1; n <= 2; ++n) {
        std::vector<StabilizerState> all;
        std::set<std::string> seen;
        // Collect every stabilizer state by sampling until the census is full
        // (6 at n=1, 60 at n=2).
        size_t want = n == 1 ? 6 : 60;
        int guard = 0;
        while (seen.size() < want && guard++ < 20000) {
            StabilizerState st = StabilizerState::random(n, rng);
            if (seen.insert(st.canonical_key()).second) all.push_back(st);
        }
        REQUIRE(all.size() == want);
        for (const auto& a : all) {
            Eigen::VectorXcd va = a.state_vector();
            for (const auto& b : all) {
                Eigen::VectorXcd vb = b.state_vector();
                double ov = std::norm(va.dot(vb));
                if (std::abs(ov - 0.5) > 1e-9) continue;
                bool reproduced = false;
                for (uint64_t bits = 1; bits < (uint64_t(1) << (2 * n)) && !reproduced; ++bits) {
                    Eigen::MatrixXcd w = dense_ref::weyl(BitVec::from_u64(2 * n, bits));
                    for (int l = 0; l < 4 && !reproduced; ++l) {
                        std::complex<double> il = std::pow(std::complex<double>(0, 1), l);
                        Eigen::VectorXcd cand =
                            (va + il * (w * va)) / std::sqrt(2.0);
                        if (cand.norm() < 1e-9) continue;
                        cand /= cand.norm();
                        if (std::abs(std::abs(cand.dot(vb)) - 1.0) < 1e-9) reproduced = true;
                    }
                }
                CHECK(reproduced);
            }
        }
    }
}
