#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace stabtomo {

// Deterministic stream seeding: every consumer derives its stream from
// (master_seed, trial_id, phase tag) so parallel trials replay identically.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash_tag(std::string_view tag) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed_sequence(seed)) {}

    static Rng stream(uint64_t master_seed, uint64_t trial_id, std::string_view phase) {
        uint64_t s = master_seed;
        uint64_t a = splitmix64(s);
        s ^= trial_id * 0x9e3779b97f4a7c15ULL;
        uint64_t b = splitmix64(s);
        s ^= hash_tag(phase);
        uint64_t c = splitmix64(s);
        return Rng(a ^ (b << 1) ^ c);
    }

    Rng substream(std::string_view phase) {
        uint64_t s = uniform_u64() ^ hash_tag(phase);
        return Rng(splitmix64(s));
    }

    uint64_t uniform_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform_double() { return (engine_() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., bound-1}.
    uint64_t uniform_below(uint64_t bound) {
        std::uniform_int_distribution<uint64_t> d(0, bound - 1);
        return d(engine_);
    }

    bool bernoulli(double p) { return uniform_double() < p; }

    int64_t binomial(int64_t trials, double p) {
        if (trials <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return trials;
        std::binomial_distribution<int64_t> d(trials, p);
        return d(engine_);
    }

    // Number of Bernoulli(p) attempts needed to see `successes` successes,
    // truncated at `max_attempts`. Returns max_attempts + 1 on truncation.
    int64_t attempts_for_successes(int64_t successes, double p, int64_t max_attempts) {
        if (successes <= 0) return 0;
        if (p <= 0.0) return max_attempts + 1;
        if (p >= 1.0) return successes <= max_attempts ? successes : max_attempts + 1;
        double mean = static_cast<double>(successes) / p;
        double sd = std::sqrt(successes * (1.0 - p)) / p;
        if (mean - 20.0 * sd > static_cast<double>(max_attempts) + 1.0) return max_attempts + 1;
        std::negative_binomial_distribution<int64_t> d(successes, p);
        int64_t attempts = successes + d(engine_);
        return attempts <= max_attempts ? attempts : max_attempts + 1;
    }

    // Exact multinomial counts for `draws` samples over `probs` (need not be
    // normalized); done with a chain of binomials.
    std::vector<int64_t> multinomial(int64_t draws, std::span<const double> probs) {
        std::vector<int64_t> counts(probs.size(), 0);
        double rem = 0.0;
        for (double p : probs) rem += p;
        int64_t left = draws;
        for (size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
            if (rem <= 0.0) break;
            double q = probs[i] / rem;
            if (q > 1.0) q = 1.0;
            counts[i] = binomial(left, q);
            left -= counts[i];
            rem -= probs[i];
        }
        if (!counts.empty()) counts.back() += left;
        return counts;
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    static std::mt19937_64 seed_sequence(uint64_t seed) {
        std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                          0x3779u, 0x9e37u};
        return std::mt19937_64(seq);
    }

    std::mt19937_64 engine_;
};

// Cumulative table for repeated draws from a fixed discrete distribution.
class DiscreteSampler {
  public:
    DiscreteSampler() = default;
    explicit DiscreteSampler(std::span<const double> probs) {
        cdf_.reserve(probs.size());
        double acc = 0.0;
        for (double p : probs) {
            acc += p > 0.0 ? p : 0.0;
            cdf_.push_back(acc);
        }
        total_ = acc;
    }

    bool empty() const { return cdf_.empty() || total_ <= 0.0; }

    size_t sample(Rng& rng) const {
        if (empty()) throw std::runtime_error("sampling from empty distribution");
        double u = rng.uniform_double() * total_;
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        size_t i = static_cast<size_t>(it - cdf_.begin());
        return i < cdf_.size() ? i : cdf_.size() - 1;
    }

  private:
    std::vector<double> cdf_;
    double total_ = 0.0;
};

}  // namespace stabtomo
