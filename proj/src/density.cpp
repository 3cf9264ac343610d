#include "stabtomo/density.hpp"

#include <bit>
#include <stdexcept>

namespace stabtomo {

namespace {

void walsh_hadamard(std::vector<std::complex<double>>& v) {
    size_t n = v.size();
    for (size_t h = 1; h < n; h <<= 1) {
        for (size_t i = 0; i < n; i += 2 * h) {
            for (size_t j = i; j < i + h; ++j) {
                auto a = v[j], b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

void walsh_hadamard(std::vector<double>& v) {
    size_t n = v.size();
    for (size_t h = 1; h < n; h <<= 1) {
        for (size_t i = 0; i < n; i += 2 * h) {
            for (size_t j = i; j < i + h; ++j) {
                double a = v[j], b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

uint64_t swap_halves_index(uint64_t x, uint32_t n) {
    uint64_t mask = (uint64_t(1) << n) - 1;
    return ((x & mask) << n) | (x >> n);
}

}  // namespace

DensityMatrix::DensityMatrix(uint32_t n, Eigen::MatrixXcd data, uint32_t dense_limit) {
    if (n > dense_limit) throw std::runtime_error("density matrix beyond dense backend limit");
    uint64_t d = uint64_t(1) << n;
    if (data.rows() != Eigen::Index(d) || data.cols() != Eigen::Index(d))
        throw std::invalid_argument("density matrix dimension mismatch");
    if ((data - data.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("density matrix not Hermitian");
    data = 0.5 * (data + data.adjoint().eval());
    if (std::abs(data.trace().real() - 1.0) > 1e-10 || std::abs(data.trace().imag()) > 1e-10)
        throw std::invalid_argument("density matrix trace not one");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(data);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw std::invalid_argument("density matrix not positive semidefinite");
    if (es.eigenvalues().minCoeff() < 0.0) {
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        data = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
        data /= data.trace().real();
    }
    n_ = n;
    m_ = std::move(data);
}

DensityMatrix DensityMatrix::pure(uint32_t n, const Eigen::VectorXcd& psi) {
    Eigen::VectorXcd v = psi / psi.norm();
    return DensityMatrix(n, v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(uint32_t n) {
    uint64_t d = uint64_t(1) << n;
    return DensityMatrix(n, Eigen::MatrixXcd::Identity(d, d) / double(d));
}

DensityMatrix DensityMatrix::of_stabilizer(const StabilizerState& s) {
    return pure(s.n(), s.state_vector());
}

Eigen::VectorXcd DensityMatrix::random_pure_vector(uint32_t n, Rng& rng) {
    uint64_t d = uint64_t(1) << n;
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd v(d);
    for (uint64_t i = 0; i < d; ++i) v[i] = std::complex<double>(g(rng.engine()), g(rng.engine()));
    return v / v.norm();
}

DensityMatrix DensityMatrix::random_pure(uint32_t n, Rng& rng) {
    return pure(n, random_pure_vector(n, rng));
}

DensityMatrix DensityMatrix::random_mixed(uint32_t n, Rng& rng) {
    uint64_t d = uint64_t(1) << n;
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd gm(d, d);
    for (uint64_t i = 0; i < d; ++i)
        for (uint64_t j = 0; j < d; ++j)
            gm(i, j) = std::complex<double>(g(rng.engine()), g(rng.engine()));
    Eigen::MatrixXcd rho = gm * gm.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(n, rho);
}

double exact_weyl_expectation(const DensityMatrix& rho, const BitVec& x) {
    uint32_t n = rho.n();
    if (x.len() != 2 * n) throw std::invalid_argument("Pauli string length mismatch");
    uint64_t a = 0, b = 0;
    for (uint32_t i = 0; i < n; ++i) {
        if (x.get(i)) a |= uint64_t(1) << i;
        if (x.get(n + i)) b |= uint64_t(1) << i;
    }
    static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::complex<double> coeff = ipow[weyl_self_phase_mod4(x)];
    std::complex<double> acc = 0;
    const Eigen::MatrixXcd& m = rho.data();
    for (uint64_t t = 0; t < rho.dim(); ++t) {
        // tr(W rho) = sum_t W_{t, t^a} rho_{t^a, t}, W_{t, t^a} = coeff (-1)^{b.(t^a)}.
        int s = std::popcount(b & (t ^ a)) & 1;
        acc += (s ? -coeff : coeff) * m(t ^ a, t);
    }
    if (std::abs(acc.imag()) > 1e-8) throw std::logic_error("Weyl expectation not real");
    return acc.real();
}

double exact_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.data());
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXcd root = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::MatrixXcd inner = root * sigma.data() * root;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(inner);
    double acc = 0;
    for (Eigen::Index i = 0; i < es2.eigenvalues().size(); ++i)
        acc += std::sqrt(std::max(0.0, es2.eigenvalues()[i]));
    return std::min(1.0, acc * acc);
}

double exact_fidelity(const DensityMatrix& rho, const Eigen::VectorXcd& psi) {
    Eigen::VectorXcd v = psi / psi.norm();
    double f = (v.adjoint() * rho.data() * v)(0, 0).real();
    return std::clamp(f, 0.0, 1.0);
}

double exact_fidelity(const DensityMatrix& rho, const StabilizerState& s) {
    return exact_fidelity(rho, s.state_vector());
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.data() - b.data());
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Eigen::Matrix2cd reduced_state(const DensityMatrix& rho, uint32_t j) {
    if (j >= rho.n()) throw std::invalid_argument("qubit out of range");
    Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
    uint64_t bit = uint64_t(1) << j;
    for (uint64_t t = 0; t < rho.dim(); ++t) {
        if (t & bit) continue;
        r(0, 0) += rho.data()(t, t);
        r(0, 1) += rho.data()(t, t | bit);
        r(1, 0) += rho.data()(t | bit, t);
        r(1, 1) += rho.data()(t | bit, t | bit);
    }
    return r;
}

Eigen::MatrixXcd prefix_block(const Eigen::MatrixXcd& rho, uint32_t n, const BitVec& s) {
    uint32_t k = s.len();
    if (k > n) throw std::invalid_argument("prefix longer than register");
    uint64_t rest = uint64_t(1) << (n - k);
    uint64_t sval = s.to_u64();
    Eigen::MatrixXcd out(rest, rest);
    for (uint64_t u = 0; u < rest; ++u)
        for (uint64_t v = 0; v < rest; ++v) out(u, v) = rho(sval | (u << k), sval | (v << k));
    return out;
}

namespace {

void gate_on_matrix(const Gate& g, Eigen::MatrixXcd& m) {
    uint64_t dim = uint64_t(m.rows());
    const std::complex<double> I(0, 1);
    uint64_t bit = uint64_t(1) << g.q;
    switch (g.kind) {
        case GateKind::H: {
            double inv = 1.0 / std::sqrt(2.0);
            for (uint64_t r = 0; r < dim; ++r) {
                if (r & bit) continue;
                Eigen::RowVectorXcd a = m.row(r), b = m.row(r | bit);
                m.row(r) = inv * (a + b);
                m.row(r | bit) = inv * (a - b);
            }
            for (uint64_t c = 0; c < dim; ++c) {
                if (c & bit) continue;
                Eigen::VectorXcd a = m.col(c), b = m.col(c | bit);
                m.col(c) = inv * (a + b);
                m.col(c | bit) = inv * (a - b);
            }
            break;
        }
        case GateKind::S:
            for (uint64_t r = 0; r < dim; ++r)
                if (r & bit) m.row(r) *= I;
            for (uint64_t c = 0; c < dim; ++c)
                if (c & bit) m.col(c) *= -I;
            break;
        case GateKind::X:
            for (uint64_t r = 0; r < dim; ++r)
                if (!(r & bit)) m.row(r).swap(m.row(r | bit));
            for (uint64_t c = 0; c < dim; ++c)
                if (!(c & bit)) m.col(c).swap(m.col(c | bit));
            break;
        case GateKind::Z:
            for (uint64_t r = 0; r < dim; ++r)
                if (r & bit) m.row(r) *= -1.0;
            for (uint64_t c = 0; c < dim; ++c)
                if (c & bit) m.col(c) *= -1.0;
            break;
        case GateKind::CNOT: {
            uint64_t tb = uint64_t(1) << g.t;
            for (uint64_t r = 0; r < dim; ++r)
                if ((r & bit) && !(r & tb)) m.row(r).swap(m.row(r | tb));
            for (uint64_t c = 0; c < dim; ++c)
                if ((c & bit) && !(c & tb)) m.col(c).swap(m.col(c | tb));
            break;
        }
    }
}

void gate_on_vector(const Gate& g, Eigen::VectorXcd& v) {
    uint64_t dim = uint64_t(v.size());
    const std::complex<double> I(0, 1);
    uint64_t bit = uint64_t(1) << g.q;
    switch (g.kind) {
        case GateKind::H: {
            double inv = 1.0 / std::sqrt(2.0);
            for (uint64_t r = 0; r < dim; ++r) {
                if (r & bit) continue;
                auto a = v[r], b = v[r | bit];
                v[r] = inv * (a + b);
                v[r | bit] = inv * (a - b);
            }
            break;
        }
        case GateKind::S:
            for (uint64_t r = 0; r < dim; ++r)
                if (r & bit) v[r] *= I;
            break;
        case GateKind::X:
            for (uint64_t r = 0; r < dim; ++r)
                if (!(r & bit)) std::swap(v[r], v[r | bit]);
            break;
        case GateKind::Z:
            for (uint64_t r = 0; r < dim; ++r)
                if (r & bit) v[r] *= -1.0;
            break;
        case GateKind::CNOT: {
            uint64_t tb = uint64_t(1) << g.t;
            for (uint64_t r = 0; r < dim; ++r)
                if ((r & bit) && !(r & tb)) std::swap(v[r], v[r | tb]);
            break;
        }
    }
}

}  // namespace

Eigen::MatrixXcd conjugate_by_circuit(const CliffordCircuit& c, const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd m = rho;
    for (const Gate& g : c.gates) gate_on_matrix(g, m);
    return m;
}

Eigen::VectorXcd apply_circuit(const CliffordCircuit& c, const Eigen::VectorXcd& psi) {
    Eigen::VectorXcd v = psi;
    for (const Gate& g : c.gates) gate_on_vector(g, v);
    return v;
}

std::vector<double> exact_bell_distribution(const DensityMatrix& rho, uint32_t table_limit) {
    uint32_t n = rho.n();
    if (n > table_limit) throw std::runtime_error("Bell table beyond limit");
    uint64_t strings = uint64_t(1) << (2 * n);
    std::vector<double> fourth(strings);
    for (uint64_t a = 0; a < strings; ++a) {
        double t = exact_weyl_expectation(rho, BitVec::from_u64(2 * n, a));
        fourth[a] = t * t * t * t;
    }
    // <x,a> = x . swap(a): reorder, then a standard WHT computes the sum.
    std::vector<double> d(strings);
    for (uint64_t a = 0; a < strings; ++a) d[a] = fourth[swap_halves_index(a, n)];
    walsh_hadamard(d);
    double scale = 1.0 / double(strings);
    for (auto& v : d) {
        v *= scale;
        if (v < 0 && v > -1e-10) v = 0;
    }
    return d;
}

std::vector<double> exact_bell_measurement_distribution(const DensityMatrix& rho,
                                                        uint32_t table_limit) {
    uint32_t n = rho.n();
    if (n > table_limit) throw std::runtime_error("Bell table beyond limit");
    uint64_t dim = rho.dim();
    const Eigen::MatrixXcd& m = rho.data();
    std::vector<double> out(dim * dim);
    std::vector<std::complex<double>> g(dim);
    for (uint64_t a = 0; a < dim; ++a) {
        // p(a,b) = 2^{-n} sum_u (-1)^{b.u} g_a(u), g_a(u) = sum_t rho_{t^a, t^a^u} rho_{t, t^u}.
        for (uint64_t u = 0; u < dim; ++u) {
            std::complex<double> acc = 0;
            for (uint64_t t = 0; t < dim; ++t) acc += m(t ^ a, t ^ a ^ u) * m(t, t ^ u);
            g[u] = acc;
        }
        walsh_hadamard(g);
        for (uint64_t b = 0; b < dim; ++b) {
            double p = g[b].real() / double(dim);
            out[a | (b << n)] = p > 0 ? p : 0;
        }
    }
    return out;
}

std::vector<double> bell_measurement_distribution_pure_pair(const Eigen::VectorXcd& psi,
                                                            const Eigen::VectorXcd& phi) {
    uint64_t dim = uint64_t(psi.size());
    uint32_t n = static_cast<uint32_t>(std::countr_zero(dim));
    std::vector<double> out(dim * dim);
    std::vector<std::complex<double>> h(dim);
    for (uint64_t a = 0; a < dim; ++a) {
        // |<Psi_{(a,b)} | psi x phi>|^2 = |WHT_b[phi(.^a) psi(.)]|^2 / 2^n.
        for (uint64_t r = 0; r < dim; ++r) h[r] = phi[r ^ a] * psi[r];
        walsh_hadamard(h);
        for (uint64_t b = 0; b < dim; ++b) out[a | (b << n)] = std::norm(h[b]) / double(dim);
    }
    return out;
}

const std::vector<double>& StateCache::weyl_traces() {
    if (!weyl_traces_) {
        uint64_t strings = uint64_t(1) << (2 * n());
        std::vector<double> t(strings);
        for (uint64_t a = 0; a < strings; ++a)
            t[a] = exact_weyl_expectation(rho_, BitVec::from_u64(2 * n(), a));
        weyl_traces_ = std::move(t);
    }
    return *weyl_traces_;
}

const std::vector<double>& StateCache::bell_difference_table() {
    if (!bell_diff_) bell_diff_ = exact_bell_distribution(rho_);
    return *bell_diff_;
}

const DiscreteSampler& StateCache::bell_difference_sampler() {
    if (!bell_diff_sampler_) bell_diff_sampler_ = DiscreteSampler(bell_difference_table());
    return *bell_diff_sampler_;
}

const std::vector<double>& StateCache::bell_measurement_table() {
    if (!bell_meas_) bell_meas_ = exact_bell_measurement_distribution(rho_);
    return *bell_meas_;
}

const DiscreteSampler& StateCache::bell_measurement_sampler() {
    if (!bell_meas_sampler_) bell_meas_sampler_ = DiscreteSampler(bell_measurement_table());
    return *bell_meas_sampler_;
}

const std::vector<double>& StateCache::computational_diagonal() {
    if (!comp_diag_) {
        std::vector<double> d(rho_.dim());
        for (uint64_t t = 0; t < rho_.dim(); ++t) d[t] = std::max(0.0, rho_.data()(t, t).real());
        comp_diag_ = std::move(d);
    }
    return *comp_diag_;
}

const StateCache::Eigensystem& StateCache::eigensystem() {
    if (!eigensystem_) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_.data());
        Eigensystem sys;
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()[i] > 1e-12) keep.push_back(i);
        sys.vectors.resize(rho_.dim(), keep.size());
        for (size_t k = 0; k < keep.size(); ++k) {
            sys.weights.push_back(es.eigenvalues()[keep[k]]);
            sys.vectors.col(k) = es.eigenvectors().col(keep[k]);
        }
        sys.sampler = DiscreteSampler(sys.weights);
        eigensystem_ = std::move(sys);
    }
    return *eigensystem_;
}

const DiscreteSampler& StateCache::pure_pair_bell_sampler(size_t k, size_t l) {
    for (auto& entry : pair_lru_)
        if (entry.first == std::make_pair(k, l)) return *entry.second;
    const Eigensystem& sys = eigensystem();
    auto table = bell_measurement_distribution_pure_pair(sys.vectors.col(k), sys.vectors.col(l));
    pair_lru_.emplace_back(std::make_pair(k, l), std::make_unique<DiscreteSampler>(table));
    const size_t cap = 192;
    if (pair_lru_.size() > cap) pair_lru_.erase(pair_lru_.begin());
    return *pair_lru_.back().second;
}

}  // namespace stabtomo
