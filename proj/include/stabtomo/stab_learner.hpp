#pragma once

#include <functional>

#include "stabtomo/bruteforce.hpp"
#include "stabtomo/estimators.hpp"
#include "stabtomo/oracle.hpp"

namespace stabtomo {

struct BootstrapConfig {
    double tau = 1.0;     // fidelity floor in (0, 1]
    double gamma = 1.0;   // local-maximizer parameter in (1/2, 1]
    double delta = 0.1;   // failure probability of the repeated wrappers
    double eps = 0.1;     // accuracy of the proper-learning wrappers
    double p_floor = 1e-6;  // floor for the per-run success probability

    void validate() const;
    int iteration_cap() const;  // t_max = floor(log_{1.08}(1/tau))
};

// Per-iteration record for instrumented runs (test mode). The conditioned
// states are dense copies taken before/after the bootstrap measurement.
struct BootstrapIteration {
    int t = 0;
    Subspace lagrangian;
    std::optional<StabilizerState> measured;
    std::optional<SignedPauli> sampled;
    double sampled_correlation_before = 0.0;  // exact tr(W_y rho_t)^2
    DensityMatrix state_before;
    std::optional<DensityMatrix> state_after;
};

using BootstrapHook = std::function<void(const BootstrapIteration&)>;

// Select-high-correlation subroutine: m = ceil(8(ln(3/delta) + 4n)/eps) Bell
// difference samples, correlations estimated to 0.1 at confidence
// 1 - delta/3, strings with estimate > 0.6 kept, completed to a Lagrangian.
// Returns nullopt on the anticommuting abort.
std::optional<Subspace> select_high_correlation(CopyOracle& o, double eps, double delta);

// Conditioned-copy demand of one select_high_correlation call plus the
// iteration's Bell-difference sample (Algorithm 2 line 3 batch size).
int64_t bootstrap_iteration_copies(uint32_t n, double eps);

// One pass of the bootstrapping loop. Returns the uniformly random element
// of the candidate list, or nullopt when the list stays empty.
std::optional<StabilizerState> bootstrap_once(CopyOracle& o, const BootstrapConfig& cfg,
                                              const BootstrapHook& hook = nullptr);

struct ListDecodeResult {
    std::vector<StabilizerState> states;
    int64_t runs = 0;
};

ListDecodeResult list_decode(OracleFactory& factory, const BootstrapConfig& cfg,
                             const BootstrapHook& hook = nullptr);

struct AgnosticResult {
    StabilizerState state;
    double estimated_fidelity = 0.0;
    int64_t list_size = 0;
    int64_t runs = 0;
};

struct NoCandidateError : std::runtime_error {
    NoCandidateError() : std::runtime_error("candidate list is empty") {}
};

// Proper agnostic tomography: list-decode at gamma = 1, then classical
// shadows at eps/2, confidence 1 - delta/2; ties broken by lowest canonical
// key. Guarantee F(rho, output) >= F_S(rho) - eps w.p. >= 1 - delta under
// the promise F_S(rho) >= tau >= eps.
AgnosticResult agnostic_stabilizer(OracleFactory& factory, const BootstrapConfig& cfg,
                                   const BootstrapHook& hook = nullptr);

// Stabilizer-fidelity (magic) estimation: the same pipeline run at tau :=
// eps, returning the highest fidelity estimate (0 for an empty list).
double estimate_stabilizer_fidelity(OracleFactory& factory, double eps, double delta,
                                    double p_floor = 1e-6);

}  // namespace stabtomo
