#pragma once

#include "navseg/codec_model.hpp"
#include "navseg/domain.hpp"
#include "navseg/rng.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace testing {

/// Small random instance for property tests.
struct Instance {
    std::vector<double> h_i;
    std::vector<double> h_p;  // h_p[0] == 0
    std::vector<double> p;    // normalized
};

inline std::size_t draw_index(navseg::Rng& rng, std::size_t lo, std::size_t hi) {
    const std::size_t span = hi - lo + 1;
    return lo + std::min(span - 1, static_cast<std::size_t>(rng.uniform01() * static_cast<double>(span)));
}

inline Instance random_instance(std::uint64_t seed, std::size_t min_views, std::size_t max_views) {
    navseg::Rng rng(seed);
    const std::size_t n = draw_index(rng, min_views, max_views);
    Instance inst;
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        const double hi = rng.uniform(10.0, 200.0);
        inst.h_i.push_back(hi);
        inst.h_p.push_back(v == 0 ? 0.0 : hi * rng.uniform(0.01, 0.99));
        inst.p.push_back(rng.uniform(0.05, 1.0));
        total += inst.p.back();
    }
    for (double& x : inst.p) x /= total;
    return inst;
}

inline navseg::RateTable table_of(const Instance& inst) { return navseg::RateTable("t", inst.h_i, inst.h_p); }
inline navseg::Popularity popularity_of(const Instance& inst) { return navseg::Popularity::from_weights(inst.p); }

/// Objective of a partition given by its end list, summed term by term from raw vectors.
inline double reference_objective(const Instance& inst, const std::vector<std::size_t>& ends, double mu, double g) {
    double total = 0.0;
    std::size_t start = 0;
    for (std::size_t end : ends) {
        double bits = inst.h_i[start];
        double mass = 0.0;
        for (std::size_t v = start; v < end; ++v) {
            if (v > start) bits += inst.h_p[v];
            mass += inst.p[v];
        }
        total += bits * (mu + 1.0 - g + g * mass);
        start = end;
    }
    return total;
}

/// Every end list of a partition of 1..n, in mask order.
inline std::vector<std::vector<std::size_t>> all_partitions(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
        std::vector<std::size_t> ends;
        for (std::size_t b = 1; b < n; ++b) {
            if (mask & (std::uint64_t{1} << (b - 1))) ends.push_back(b);
        }
        ends.push_back(n);
        out.push_back(ends);
    }
    return out;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("navseg_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
