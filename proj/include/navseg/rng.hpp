#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace navseg {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed for independent stream `stream` under `master`: mix64(master ^ mix64(stream)).
/// Path i of a batch always uses derive_seed(master, i), so it can be replayed alone.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master ^ mix64(stream));
}

/// Thin wrapper over mt19937_64 with distribution code that does not depend on
/// the standard library's unspecified distribution algorithms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Index i with probability weights[i] / sum(weights). Requires a positive sum.
    std::size_t pick(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double target = uniform01() * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            last_positive = i;
            if (target < acc) return i;
        }
        return last_positive;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace navseg
