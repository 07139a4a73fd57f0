#include "navseg/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace navseg {

AllocationPolicy parse_allocation_policy(const std::string& name) {
    if (name == "fixed" || name == "s0") return AllocationPolicy::fixed;
    if (name == "heuristic") return AllocationPolicy::heuristic;
    throw ValidationError("unknown allocation policy '" + name + "'");
}

std::string to_string(AllocationPolicy policy) {
    return policy == AllocationPolicy::fixed ? "fixed" : "heuristic";
}

void AllocationConfig::validate() const {
    if (!(t_star >= 0.0)) throw ValidationError("allocation: t_star must be non-negative");
    if (!(t_s >= 0.0 && t_s <= t_star + 1e-12)) throw ValidationError("allocation: need 0 <= t_S <= t_star");
    if (!(delta >= 0.0)) throw ValidationError("allocation: delta must be non-negative");
    if (sample_count && *sample_count < 1) throw ValidationError("allocation: sample count must be at least 1");
}

std::size_t AllocationConfig::effective_sample_count() const {
    if (sample_count) return *sample_count;
    return static_cast<std::size_t>(std::ceil(2.0 * t_s * delta)) + 1;
}

double transmitted_bits(const RateTable& table, const Partition& partition, const std::vector<std::size_t>& segments) {
    double bits = 0.0;
    for (std::size_t k : segments) bits += segment_cost(table, partition.segment(k));
    return bits;
}

AllocationDecision allocate_s0(const Viewpoint& r, const Partition& partition, const RateTable& table,
                               const AllocationConfig& cfg) {
    const ViewRange views =
        ball_reference_range(NavigationBall{r, cfg.t_star * cfg.delta}, partition.view_count());
    AllocationDecision decision{r, {}, 0.0, {}};
    for (std::size_t k = partition.segment_of(views.lo); k <= partition.segment_of(views.hi); ++k) {
        decision.segments.push_back(k);
    }
    decision.transmitted_bits = transmitted_bits(table, partition, decision.segments);
    return decision;
}

AllocationDecision allocate_heuristic(const Viewpoint& r, const Partition& partition, const RateTable& table,
                                      const AllocationConfig& cfg) {
    const std::size_t n_views = partition.view_count();
    const double radius = cfg.t_s * cfg.delta;
    const std::size_t samples = cfg.effective_sample_count();

    AllocationDecision decision{r, {}, 0.0, {}};
    decision.sample_references.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        double s = r.s;
        if (samples > 1) {
            s = i + 1 == samples ? r.s + radius
                                 : r.s - radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(samples - 1);
        }
        decision.sample_references.push_back(nearest_camera(s, n_views));
    }
    for (std::size_t ref : decision.sample_references) decision.segments.push_back(partition.segment_of(ref));
    std::sort(decision.segments.begin(), decision.segments.end());
    decision.segments.erase(std::unique(decision.segments.begin(), decision.segments.end()), decision.segments.end());
    decision.transmitted_bits = transmitted_bits(table, partition, decision.segments);
    return decision;
}

AllocationDecision allocate(const Viewpoint& r, const Partition& partition, const RateTable& table,
                            const AllocationConfig& cfg) {
    return cfg.policy == AllocationPolicy::fixed ? allocate_s0(r, partition, table, cfg)
                                                 : allocate_heuristic(r, partition, table, cfg);
}

AllocationDecision dedup_against_memory(const AllocationDecision& decision, const std::set<std::size_t>& history,
                                        const Partition& partition, const RateTable& table) {
    AllocationDecision out = decision;
    std::erase_if(out.segments, [&](std::size_t k) { return history.contains(k); });
    out.transmitted_bits = transmitted_bits(table, partition, out.segments);
    return out;
}

std::vector<ViewRange> segment_views(const Partition& partition, const std::vector<std::size_t>& segments) {
    std::vector<std::size_t> sorted = segments;
    std::sort(sorted.begin(), sorted.end());
    std::vector<ViewRange> ranges;
    for (std::size_t k : sorted) {
        const ViewRange seg = partition.segment(k);
        if (!ranges.empty() && ranges.back().hi + 1 >= seg.lo) {
            ranges.back().hi = std::max(ranges.back().hi, seg.hi);
        } else {
            ranges.push_back(seg);
        }
    }
    return ranges;
}

std::size_t render_reference_for(double s, const std::vector<ViewRange>& available) {
    if (available.empty()) throw ValidationError("no camera views transmitted: client is starved");
    std::size_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (const ViewRange& range : available) {
        // nearest index inside the range; ties inside a range already go low
        const std::size_t candidate = std::clamp(nearest_camera(s, std::numeric_limits<std::size_t>::max() / 2),
                                                 range.lo, range.hi);
        const double d = std::abs(static_cast<double>(candidate) - s);
        if (d < best_distance || (d == best_distance && candidate < best)) {
            best = candidate;
            best_distance = d;
        }
    }
    return best;
}

}  // namespace navseg
