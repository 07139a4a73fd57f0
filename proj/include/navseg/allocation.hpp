#pragma once

#include "navseg/codec_model.hpp"
#include "navseg/domain.hpp"
#include "navseg/partition.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace navseg {

enum class AllocationPolicy {
    fixed,      ///< S0: every segment holding the nearest camera of some viewpoint in the ball
    heuristic,  ///< segments hit by equally spaced samples of the sub-ball of radius t_S * delta
};

AllocationPolicy parse_allocation_policy(const std::string& name);
std::string to_string(AllocationPolicy policy);

struct AllocationConfig {
    double t_star = 4.0;
    double t_s = 4.0;
    double delta = 0.0;
    /// Samples over the sub-ball; empty means ceil(2 t_S delta) + 1, enough to
    /// hit every camera cell the sub-ball touches.
    std::optional<std::size_t> sample_count;
    bool memory_aware = false;
    AllocationPolicy policy = AllocationPolicy::fixed;
    /// Distortion weight, kept as run metadata only; t_S is the operative knob.
    std::optional<double> nu;

    void validate() const;
    std::size_t effective_sample_count() const;
};

struct AllocationDecision {
    Viewpoint request;
    /// Selected segment indices (1-based), ascending.
    std::vector<std::size_t> segments;
    double transmitted_bits = 0.0;
    /// Nearest camera of each heuristic sample; empty for the fixed policy.
    std::vector<std::size_t> sample_references;
};

double transmitted_bits(const RateTable& table, const Partition& partition, const std::vector<std::size_t>& segments);

AllocationDecision allocate_s0(const Viewpoint& r, const Partition& partition, const RateTable& table,
                               const AllocationConfig& cfg);

AllocationDecision allocate_heuristic(const Viewpoint& r, const Partition& partition, const RateTable& table,
                                      const AllocationConfig& cfg);

/// Dispatches on cfg.policy.
AllocationDecision allocate(const Viewpoint& r, const Partition& partition, const RateTable& table,
                            const AllocationConfig& cfg);

/// Drops segments the client already holds and recomputes the bit count.
/// The caller is responsible for adding the result to the history.
AllocationDecision dedup_against_memory(const AllocationDecision& decision, const std::set<std::size_t>& history,
                                        const Partition& partition, const RateTable& table);

/// Camera views covered by a set of segments, as merged ascending ranges.
std::vector<ViewRange> segment_views(const Partition& partition, const std::vector<std::size_t>& segments);

/// Closest available camera to s (ties to the lower index). Throws if nothing is available.
std::size_t render_reference_for(double s, const std::vector<ViewRange>& available);

}  // namespace navseg
