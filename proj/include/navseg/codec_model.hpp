#pragma once

#include "navseg/domain.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace navseg {

class Partition;

/// Per-view coding costs in bits at one quantization setting. Views are
/// 1-based; `h_p(n)` is the cost of view n predicted from view n - 1 and is
/// zero for the first view.
class RateTable {
public:
    RateTable(std::string q_label, std::vector<double> h_i, std::vector<double> h_p);

    static RateTable constant(std::size_t view_count, double intra_bits, double predicted_bits,
                              std::string q_label = "const");

    /// Draws h_I uniformly in mean_I * (1 +- spread) and h_P in mean_P * (1 +- spread).
    static RateTable seeded_random(std::size_t view_count, double mean_intra, double mean_predicted,
                                   double spread, std::uint64_t seed, std::string q_label = "synthetic");

    /// CSV `index,h_I,h_P`. When `expected_views` is non-zero the row count must match.
    static RateTable load_csv(const std::filesystem::path& path, std::string q_label,
                              std::size_t expected_views = 0);
    void save_csv(const std::filesystem::path& path) const;

    const std::string& q_label() const { return q_label_; }
    std::size_t size() const { return h_i_.size(); }
    double h_i(std::size_t n) const { return h_i_[n - 1]; }
    double h_p(std::size_t n) const { return h_p_[n - 1]; }

    /// Sum of h_P over views a..b inclusive, from prefix sums.
    double predicted_sum(std::size_t a, std::size_t b) const;

    friend bool operator==(const RateTable&, const RateTable&) = default;

private:
    std::string q_label_;
    std::vector<double> h_i_;
    std::vector<double> h_p_;
    std::vector<double> h_p_prefix_;
};

/// IPP segment cost: the first view is intra coded, the rest predicted from
/// their left neighbour.
double segment_cost(const RateTable& table, ViewRange segment);

double storage_cost(const RateTable& table, const Partition& partition);

}  // namespace navseg
