#pragma once

#include "navseg/codec_model.hpp"
#include "navseg/domain.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace navseg {

/// Contiguous division of views 1..N_V into navigation segments, stored as the
/// increasing list of segment end indices (the last one is N_V). Segment k
/// (1-based) covers [ends[k-2] + 1, ends[k-1]].
class Partition {
public:
    explicit Partition(std::vector<std::size_t> ends);

    static Partition single(std::size_t view_count) { return Partition({view_count}); }
    static Partition from_widths(const std::vector<std::size_t>& widths);

    std::size_t view_count() const { return ends_.back(); }
    std::size_t segment_count() const { return ends_.size(); }
    const std::vector<std::size_t>& ends() const { return ends_; }

    ViewRange segment(std::size_t k) const;
    /// Segment index (1-based) containing view n.
    std::size_t segment_of(std::size_t view) const;
    std::vector<std::size_t> widths() const;
    double mean_width() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<std::size_t> ends_;
};

struct PartitionObjectiveParams {
    const RateTable& rates;
    const Popularity& popularity;
    double mu = 0.05;
    double g = 1.0;
    std::optional<std::size_t> width_cap;

    std::size_t view_count() const { return rates.size(); }
};

/// h(V_k) * (mu + 1 - g + g * sum_{n in V_k} p_n), evaluated by direct summation.
double segment_objective(const PartitionObjectiveParams& params, ViewRange segment);

double partition_objective(const Partition& partition, const PartitionObjectiveParams& params);

/// Global minimizer of partition_objective via shortest path over the interval
/// DAG (node per boundary position 0..N_V, edge per candidate segment). Equal
/// costs prefer fewer segments, then the lexicographically smallest end list.
Partition solve_optimal(const PartitionObjectiveParams& params);

struct BruteForceResult {
    Partition partition;
    double cost;
};

inline constexpr std::size_t brute_force_view_limit = 20;

/// Exhaustive search over all 2^(N_V - 1) partitions. Rejects N_V > 20.
BruteForceResult brute_force_optimal(const PartitionObjectiveParams& params);

/// N_K segments with widths floor/ceil(N_V / N_K), wider segments first.
Partition equidistant_partition(std::size_t view_count, std::size_t segment_count);

enum class BaselineMode {
    fixed,  ///< N_K chosen with no navigation ball (g = 1) and uniform popularity
    nb,     ///< N_K chosen with the actual g and uniform popularity
};

std::size_t select_baseline_segment_count(const PartitionObjectiveParams& params, BaselineMode mode);

Partition baseline_partition(const PartitionObjectiveParams& params, BaselineMode mode);

/// True when `a` beats `b` under the solver's ordering: lower cost beyond a
/// relative 1e-13 tolerance, then fewer segments, then lexicographic ends.
bool better_partition(double cost_a, const Partition& a, double cost_b, const Partition& b);

}  // namespace navseg
