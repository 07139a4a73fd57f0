#include "navseg/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace navseg {

namespace {

bool within_tie(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= 1e-13 * scale;
}

void check_params(const PartitionObjectiveParams& params) {
    if (params.rates.size() != params.popularity.size()) {
        throw ValidationError("rate table covers " + std::to_string(params.rates.size()) +
                              " views but popularity covers " + std::to_string(params.popularity.size()));
    }
    if (!(params.mu >= 0.0)) throw ValidationError("mu must be non-negative");
    if (!(params.g >= 0.0 && params.g <= 1.0)) throw ValidationError("g must lie in [0, 1]");
    if (params.width_cap && *params.width_cap < 1) throw ValidationError("width cap must be at least 1");
}

}  // namespace

Partition::Partition(std::vector<std::size_t> ends) : ends_(std::move(ends)) {
    if (ends_.empty()) throw ValidationError("partition needs at least one segment");
    std::size_t prev = 0;
    for (std::size_t e : ends_) {
        if (e <= prev) throw ValidationError("partition ends must be strictly increasing and start above 0");
        prev = e;
    }
}

Partition Partition::from_widths(const std::vector<std::size_t>& widths) {
    std::vector<std::size_t> ends;
    std::size_t acc = 0;
    for (std::size_t w : widths) {
        acc += w;
        ends.push_back(acc);
    }
    return Partition(std::move(ends));
}

ViewRange Partition::segment(std::size_t k) const {
    if (k < 1 || k > ends_.size()) throw ValidationError("segment index out of range");
    return {k == 1 ? 1 : ends_[k - 2] + 1, ends_[k - 1]};
}

std::size_t Partition::segment_of(std::size_t view) const {
    if (view < 1 || view > view_count()) throw ValidationError("view index out of range");
    auto it = std::lower_bound(ends_.begin(), ends_.end(), view);
    return static_cast<std::size_t>(it - ends_.begin()) + 1;
}

std::vector<std::size_t> Partition::widths() const {
    std::vector<std::size_t> w;
    w.reserve(ends_.size());
    std::size_t prev = 0;
    for (std::size_t e : ends_) {
        w.push_back(e - prev);
        prev = e;
    }
    return w;
}

double Partition::mean_width() const {
    return static_cast<double>(view_count()) / static_cast<double>(segment_count());
}

double segment_objective(const PartitionObjectiveParams& params, ViewRange segment) {
    double bits = params.rates.h_i(segment.lo);
    double mass = params.popularity[segment.lo];
    for (std::size_t n = segment.lo + 1; n <= segment.hi; ++n) {
        bits += params.rates.h_p(n);
        mass += params.popularity[n];
    }
    return bits * (params.mu + 1.0 - params.g + params.g * mass);
}

double partition_objective(const Partition& partition, const PartitionObjectiveParams& params) {
    check_params(params);
    if (partition.view_count() != params.view_count()) {
        throw ValidationError("partition does not cover the rate table");
    }
    double total = 0.0;
    for (std::size_t k = 1; k <= partition.segment_count(); ++k) {
        total += segment_objective(params, partition.segment(k));
    }
    return total;
}

bool better_partition(double cost_a, const Partition& a, double cost_b, const Partition& b) {
    if (!within_tie(cost_a, cost_b)) return cost_a < cost_b;
    if (a.segment_count() != b.segment_count()) return a.segment_count() < b.segment_count();
    return a.ends() < b.ends();
}

Partition solve_optimal(const PartitionObjectiveParams& params) {
    check_params(params);
    const std::size_t n_views = params.view_count();
    const std::size_t cap = params.width_cap.value_or(n_views);

    std::vector<double> bits_prefix(n_views + 1, 0.0);
    std::vector<double> mass_prefix(n_views + 1, 0.0);
    for (std::size_t n = 1; n <= n_views; ++n) {
        bits_prefix[n] = bits_prefix[n - 1] + params.rates.h_p(n);
        mass_prefix[n] = mass_prefix[n - 1] + params.popularity[n];
    }
    // edge (a, b) is the segment [a + 1, b]
    auto edge_weight = [&](std::size_t a, std::size_t b) {
        const double bits = params.rates.h_i(a + 1) + (bits_prefix[b] - bits_prefix[a + 1]);
        const double mass = mass_prefix[b] - mass_prefix[a];
        return bits * (params.mu + 1.0 - params.g + params.g * mass);
    };

    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<double> dist(n_views + 1, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> hops(n_views + 1, 0);
    std::vector<std::size_t> parent(n_views + 1, none);
    dist[0] = 0.0;

    auto path_to = [&](std::size_t node) {
        std::vector<std::size_t> path;
        for (std::size_t v = node; v != 0; v = parent[v]) path.push_back(v);
        std::reverse(path.begin(), path.end());
        return path;
    };

    // Nodes are already in topological order, so a single forward sweep is the
    // shortest-path relaxation of the DAG.
    for (std::size_t b = 1; b <= n_views; ++b) {
        const std::size_t first = b > cap ? b - cap : 0;
        for (std::size_t a = first; a < b; ++a) {
            if (!std::isfinite(dist[a])) continue;
            const double cand = dist[a] + edge_weight(a, b);
            const std::size_t cand_hops = hops[a] + 1;
            bool take = false;
            if (parent[b] == none && !std::isfinite(dist[b])) {
                take = true;
            } else if (!within_tie(cand, dist[b])) {
                take = cand < dist[b];
            } else if (cand_hops != hops[b]) {
                take = cand_hops < hops[b];
            } else {
                take = path_to(a) < path_to(parent[b]);
            }
            if (take) {
                dist[b] = cand;
                hops[b] = cand_hops;
                parent[b] = a;
            }
        }
    }
    return Partition(path_to(n_views));
}

BruteForceResult brute_force_optimal(const PartitionObjectiveParams& params) {
    check_params(params);
    const std::size_t n_views = params.view_count();
    if (n_views > brute_force_view_limit) {
        throw ValidationError("brute force is limited to N_V <= " + std::to_string(brute_force_view_limit));
    }
    std::optional<BruteForceResult> best;
    const std::uint64_t subsets = std::uint64_t{1} << (n_views - 1);
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        // bit i set: a segment ends at view i + 1
        std::vector<std::size_t> ends;
        for (std::size_t i = 0; i + 1 < n_views; ++i) {
            if (mask & (std::uint64_t{1} << i)) ends.push_back(i + 1);
        }
        ends.push_back(n_views);
        Partition candidate(std::move(ends));
        const double cost = partition_objective(candidate, params);
        if (!best || better_partition(cost, candidate, best->cost, best->partition)) {
            best = BruteForceResult{std::move(candidate), cost};
        }
    }
    return *best;
}

Partition equidistant_partition(std::size_t view_count, std::size_t segment_count) {
    if (segment_count < 1 || segment_count > view_count) {
        throw ValidationError("equidistant partition needs 1 <= N_K <= N_V");
    }
    const std::size_t base = view_count / segment_count;
    const std::size_t extra = view_count % segment_count;
    std::vector<std::size_t> widths(segment_count, base);
    for (std::size_t k = 0; k < extra; ++k) ++widths[k];
    return Partition::from_widths(widths);
}

std::size_t select_baseline_segment_count(const PartitionObjectiveParams& params, BaselineMode mode) {
    check_params(params);
    const std::size_t n_views = params.view_count();
    const Popularity uniform = Popularity::uniform(n_views);
    const PartitionObjectiveParams blind{params.rates, uniform, params.mu,
                                         mode == BaselineMode::fixed ? 1.0 : params.g, std::nullopt};
    std::size_t best_k = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= n_views; ++k) {
        const double cost = partition_objective(equidistant_partition(n_views, k), blind);
        if (!std::isfinite(best_cost) || (!within_tie(cost, best_cost) && cost < best_cost)) {
            best_cost = cost;
            best_k = k;
        }
    }
    return best_k;
}

Partition baseline_partition(const PartitionObjectiveParams& params, BaselineMode mode) {
    return equidistant_partition(params.view_count(), select_baseline_segment_count(params, mode));
}

}  // namespace navseg
