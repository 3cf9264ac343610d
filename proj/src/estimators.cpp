#include "stabtomo/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace stabtomo {

int64_t bell_measurement_count(size_t num_strings, double eps, double delta) {
    double m = 2.0 * std::log(2.0 * double(std::max<size_t>(num_strings, 1)) / delta) / (eps * eps);
    return static_cast<int64_t>(std::ceil(m));
}

namespace {

double median_of_means(std::vector<double>& group_means) {
    std::sort(group_means.begin(), group_means.end());
    size_t k = group_means.size();
    return k % 2 ? group_means[k / 2] : 0.5 * (group_means[k / 2 - 1] + group_means[k / 2]);
}

struct ShadowPlan {
    int64_t groups;
    int64_t group_size;
};

ShadowPlan shadow_plan(size_t targets, double eps, double delta) {
    ShadowPlan plan;
    plan.groups = static_cast<int64_t>(
        std::ceil(8.0 * std::log(std::max<double>(2.0, double(targets)) / delta)));
    plan.group_size = static_cast<int64_t>(std::ceil(12.0 / (eps * eps)));
    return plan;
}

}  // namespace

int64_t correlations_planned_copies(size_t num_strings, double eps, double delta) {
    return 2 * bell_measurement_count(num_strings, eps, delta);
}

std::vector<CorrelationEstimate> estimate_correlations(CopyOracle& o,
                                                       std::span<const BitVec> strings,
                                                       double eps, double delta) {
    return estimate_correlations_fixed(o, strings,
                                       bell_measurement_count(strings.size(), eps, delta));
}

std::vector<CorrelationEstimate> estimate_correlations_fixed(CopyOracle& o,
                                                             std::span<const BitVec> strings,
                                                             int64_t m) {
    if (strings.empty()) return {};
    uint32_t n = o.n();
    std::vector<CorrelationEstimate> out;
    out.reserve(strings.size());
    if (n <= 4) {
        auto counts = o.bell_measurement_batch(m);
        uint64_t mask = (uint64_t(1) << n) - 1;
        for (const BitVec& y : strings) {
            // est = (-1)^{a.b} mean of (-1)^{<x_i, y>}
            uint64_t yv = y.to_u64();
            uint64_t yswap = ((yv & mask) << n) | (yv >> n);
            double acc = 0;
            for (uint64_t x = 0; x < counts.size(); ++x) {
                if (counts[x] == 0) continue;
                int s = std::popcount(x & yswap) & 1;
                acc += (s ? -1.0 : 1.0) * double(counts[x]);
            }
            acc /= double(m);
            if (weyl_self_phase_mod4(y) & 1) acc = -acc;
            out.push_back({y, std::clamp(acc, 0.0, 1.0)});
        }
        return out;
    }
    std::vector<double> acc(strings.size(), 0.0);
    for (int64_t i = 0; i < m; ++i) {
        BitVec x = BitVec::from_u64(2 * n, o.bell_measurement_sample());
        for (size_t j = 0; j < strings.size(); ++j)
            acc[j] += symplectic_product(x, strings[j]) ? -1.0 : 1.0;
    }
    for (size_t j = 0; j < strings.size(); ++j) {
        double v = acc[j] / double(m);
        if (weyl_self_phase_mod4(strings[j]) & 1) v = -v;
        out.push_back({strings[j], std::clamp(v, 0.0, 1.0)});
    }
    return out;
}

std::vector<double> shadow_fidelities(CopyOracle& o, std::span<const StabilizerState> targets,
                                      double eps, double delta) {
    if (targets.empty()) return {};
    uint32_t n = o.n();
    ShadowPlan plan = shadow_plan(targets.size(), eps, delta);
    double dimp1 = double(uint64_t(1) << n) + 1.0;
    std::vector<Eigen::VectorXcd> target_vecs;
    target_vecs.reserve(targets.size());
    for (const auto& t : targets) target_vecs.push_back(t.state_vector());

    std::vector<std::vector<double>> group_means(targets.size());
    for (auto& g : group_means) g.reserve(plan.groups);
    std::vector<double> sums(targets.size());
    for (int64_t g = 0; g < plan.groups; ++g) {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (int64_t i = 0; i < plan.group_size; ++i) {
            CliffordCircuit c = random_clifford(n, o.rng());
            uint64_t s = o.shadow_snapshot(c);
            // Snapshot (2^n + 1) C^dag |s><s| C - I; the fidelity estimate for
            // |phi> is (2^n + 1)|<phi|C^dag|s>|^2 - 1.
            Eigen::VectorXcd u = Eigen::VectorXcd::Zero(uint64_t(1) << n);
            u[s] = 1.0;
            Eigen::VectorXcd back = apply_circuit(c.inverse(), u);
            for (size_t t = 0; t < targets.size(); ++t)
                sums[t] += dimp1 * std::norm(back.dot(target_vecs[t])) - 1.0;
        }
        for (size_t t = 0; t < targets.size(); ++t)
            group_means[t].push_back(sums[t] / double(plan.group_size));
    }
    std::vector<double> out(targets.size());
    for (size_t t = 0; t < targets.size(); ++t)
        out[t] = std::clamp(median_of_means(group_means[t]), 0.0, 1.0);
    return out;
}

std::vector<double> shadow_block_fidelities(CopyOracle& o,
                                            std::span<const CliffordCircuit> cliffords,
                                            uint32_t t, double eps, double delta) {
    if (cliffords.empty()) return {};
    uint32_t n = o.n();
    if (t >= n) throw std::invalid_argument("block parameter must be below n");
    uint64_t slices = uint64_t(1) << t;
    double per_fid_eps = eps / double(slices);
    ShadowPlan plan = shadow_plan(cliffords.size() * slices, per_fid_eps, delta);
    double dimp1 = double(uint64_t(1) << n) + 1.0;

    std::vector<Eigen::VectorXcd> targets;  // C_i |0^{n-t} s>
    targets.reserve(cliffords.size() * slices);
    for (const auto& c : cliffords) {
        for (uint64_t s = 0; s < slices; ++s) {
            Eigen::VectorXcd e = Eigen::VectorXcd::Zero(uint64_t(1) << n);
            e[s << (n - t)] = 1.0;
            targets.push_back(apply_circuit(c, e));
        }
    }
    std::vector<std::vector<double>> group_means(targets.size());
    std::vector<double> sums(targets.size());
    for (int64_t g = 0; g < plan.groups; ++g) {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (int64_t i = 0; i < plan.group_size; ++i) {
            CliffordCircuit c = random_clifford(n, o.rng());
            uint64_t s = o.shadow_snapshot(c);
            Eigen::VectorXcd u = Eigen::VectorXcd::Zero(uint64_t(1) << n);
            u[s] = 1.0;
            Eigen::VectorXcd back = apply_circuit(c.inverse(), u);
            for (size_t j = 0; j < targets.size(); ++j)
                sums[j] += dimp1 * std::norm(back.dot(targets[j])) - 1.0;
        }
        for (size_t j = 0; j < targets.size(); ++j)
            group_means[j].push_back(sums[j] / double(plan.group_size));
    }
    std::vector<double> out;
    out.reserve(cliffords.size());
    for (size_t i = 0; i < cliffords.size(); ++i) {
        double acc = 0;
        for (uint64_t s = 0; s < slices; ++s)
            acc += std::clamp(median_of_means(group_means[i * slices + s]), 0.0, 1.0);
        out.push_back(std::clamp(acc, 0.0, 1.0));
    }
    return out;
}

std::vector<double> direct_block_fidelities(CopyOracle& o,
                                            std::span<const CliffordCircuit> cliffords,
                                            uint32_t t, double eps, double delta) {
    if (cliffords.empty()) return {};
    uint32_t n = o.n();
    if (t >= n) throw std::invalid_argument("block parameter must be below n");
    int64_t shots = static_cast<int64_t>(
        std::ceil(std::log(2.0 * double(cliffords.size()) / delta) / (2.0 * eps * eps)));
    std::vector<double> out;
    out.reserve(cliffords.size());
    for (const auto& c : cliffords) {
        int64_t hits = o.count_prefix_zero_in_basis(c, n - t, shots);
        out.push_back(double(hits) / double(shots));
    }
    return out;
}

int64_t local_fidelities_planned_copies(uint32_t n, double eps, double delta) {
    int64_t per_axis = static_cast<int64_t>(
        std::ceil(9.0 / (2.0 * eps * eps) * std::log(6.0 * double(n) / delta)));
    return 3 * per_axis;
}

LocalFidelityTable local_fidelities(CopyOracle& o,
                                    std::span<const Eigen::Vector2cd> single_qubit_states,
                                    double eps, double delta) {
    uint32_t n = o.n();
    int64_t per_axis = static_cast<int64_t>(
        std::ceil(9.0 / (2.0 * eps * eps) * std::log(6.0 * double(n) / delta)));
    LocalFidelityTable table;
    table.bloch.assign(n, {0.0, 0.0, 0.0});
    PauliAxis axes[3] = {PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
    for (int a = 0; a < 3; ++a) {
        auto counts = o.measure_axis_batch(axes[a], per_axis);
        // Outcome bit q set means eigenvalue -1 on qubit q.
        for (uint32_t q = 0; q < n; ++q) {
            int64_t minus = 0;
            for (uint64_t s = 0; s < counts.size(); ++s)
                if ((s >> q) & 1) minus += counts[s];
            table.bloch[q][a] = 1.0 - 2.0 * double(minus) / double(per_axis);
        }
    }
    table.value.assign(single_qubit_states.size(), std::vector<double>(n, 0.0));
    for (size_t i = 0; i < single_qubit_states.size(); ++i) {
        Eigen::Vector2cd v = single_qubit_states[i].normalized();
        double px = 2.0 * (std::conj(v[0]) * v[1]).real();
        double py = 2.0 * (std::conj(v[0]) * v[1]).imag();
        double pz = std::norm(v[0]) - std::norm(v[1]);
        for (uint32_t q = 0; q < n; ++q) {
            double f = 0.5 * (1.0 + table.bloch[q][0] * px + table.bloch[q][1] * py +
                              table.bloch[q][2] * pz);
            table.value[i][q] = std::clamp(f, 0.0, 1.0);
        }
    }
    return table;
}

namespace {

int64_t tomography_shots_per_string(uint32_t n, double eps, double delta) {
    uint64_t dim = uint64_t(1) << n;
    double eps1 = eps / double(dim);
    return static_cast<int64_t>(std::ceil(
        2.0 * std::log(2.0 * double(dim * dim - 1) / delta) / (eps1 * eps1)));
}

}  // namespace

int64_t full_tomography_planned_copies(uint32_t n, double eps, double delta) {
    uint64_t dim = uint64_t(1) << n;
    return tomography_shots_per_string(n, eps, delta) * int64_t(dim * dim - 1);
}

DensityMatrix full_tomography(CopyOracle& o, double eps, double delta) {
    uint32_t n = o.n();
    uint64_t dim = uint64_t(1) << n;
    uint64_t strings = dim * dim;
    // Per-string accuracy eps/2^n keeps the Frobenius error below a
    // trace-distance of eps/2 before the PSD projection.
    int64_t shots = tomography_shots_per_string(n, eps, delta);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(dim, dim);
    for (uint64_t bits = 1; bits < strings; ++bits) {
        BitVec x = BitVec::from_u64(2 * n, bits);
        int64_t plus = o.count_weyl_plus(x, shots);
        double c = 2.0 * double(plus) / double(shots) - 1.0;
        acc += c * weyl_matrix(x);
    }
    acc /= double(dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (acc + acc.adjoint().eval()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    double tr = ev.sum();
    if (tr <= 0) return DensityMatrix::maximally_mixed(n);
    ev /= tr;
    Eigen::MatrixXcd rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    return DensityMatrix(n, std::move(rho));
}

std::optional<DensityMatrix> block_tomography_given_clifford(CopyOracle& o,
                                                             const CliffordCircuit& c,
                                                             uint32_t t, double tau, double eps,
                                                             double delta) {
    uint32_t n = o.n();
    if (t >= n) throw std::invalid_argument("block parameter must be below n");
    // Tomography at trace distance eps/2 gives F >= (1 - eps/2)^2 >= 1 - eps.
    int64_t total = full_tomography_planned_copies(t, eps / 2.0, delta / 2.0);
    o.condition_on_circuit_prefix(c, BitVec(n - t));
    if (!o.prepare_conditioned(total, delta / 2.0, tau)) return std::nullopt;
    return full_tomography(o, eps / 2.0, delta / 2.0);
}

}  // namespace stabtomo
