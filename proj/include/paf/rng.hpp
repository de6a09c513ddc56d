#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

namespace paf {

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Splittable seed derivation: child = mix64(base + GAMMA * (word + 1)).
// Chained calls give per-stream, per-index seeds, e.g.
//   derive_seed(derive_seed(run_seed, stream::kTrial), trial_index)
// This scheme is part of the output format contract: results are a pure
// function of the base seed regardless of execution order or thread count.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t word) noexcept {
    return mix64(base + kGoldenGamma * (word + 1));
}

// Stream tags used with derive_seed across the library.
namespace stream {
inline constexpr std::uint64_t kLatent = 1;
inline constexpr std::uint64_t kErasure = 2;
inline constexpr std::uint64_t kBscFlip = 3;
inline constexpr std::uint64_t kNeighborTies = 4;
inline constexpr std::uint64_t kVoteTies = 5;
inline constexpr std::uint64_t kClusterPick = 6;
inline constexpr std::uint64_t kTrial = 7;
inline constexpr std::uint64_t kRedraw = 8;
inline constexpr std::uint64_t kRecommend = 9;
inline constexpr std::uint64_t kSplit = 10;
inline constexpr std::uint64_t kEval = 11;
}  // namespace stream

// xoshiro256** generator. Self-contained so that draws are identical across
// standard library versions; std distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s += kGoldenGamma;
            w = mix64(s);
        }
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return next_double() < p; }

    // Uniform integer in [0, n); unbiased via rejection.
    std::uint64_t below(std::uint64_t n) noexcept {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Exact binomial sample by CDF inversion. Log-space term recurrence keeps
    // the walk valid when (1-p)^n underflows; terms that flush to zero carry
    // mass far below the 2^-53 resolution of the uniform draw.
    std::int64_t binomial(std::int64_t n, double p) noexcept {
        if (n <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return n;
        if (p > 0.5) return n - binomial(n, 1.0 - p);
        const double u = next_double();
        const double lratio = std::log(p) - std::log1p(-p);
        double lpmf = static_cast<double>(n) * std::log1p(-p);
        double cum = 0.0;
        for (std::int64_t i = 0;; ++i) {
            cum += std::exp(lpmf);
            if (u < cum || i >= n) return i;
            lpmf += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1)) + lratio;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Floyd's algorithm: `count` distinct values from [0, population), sorted.
    std::vector<std::int32_t> sample_without_replacement(std::int32_t population, std::int32_t count) {
        std::vector<std::int32_t> out;
        out.reserve(static_cast<std::size_t>(count));
        std::unordered_set<std::int32_t> seen;
        seen.reserve(static_cast<std::size_t>(count) * 2);
        for (std::int32_t t = population - count; t < population; ++t) {
            const auto r = static_cast<std::int32_t>(below(static_cast<std::uint64_t>(t) + 1));
            if (seen.insert(r).second) {
                out.push_back(r);
            } else {
                seen.insert(t);
                out.push_back(t);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace paf
