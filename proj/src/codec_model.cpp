#include "navseg/codec_model.hpp"

#include "navseg/io.hpp"
#include "navseg/partition.hpp"
#include "navseg/rng.hpp"

#include <algorithm>
#include <cmath>

namespace navseg {

RateTable::RateTable(std::string q_label, std::vector<double> h_i, std::vector<double> h_p)
    : q_label_(std::move(q_label)), h_i_(std::move(h_i)), h_p_(std::move(h_p)) {
    if (h_i_.empty()) throw ValidationError("rate table needs at least one view");
    if (h_i_.size() != h_p_.size()) throw ValidationError("h_I and h_P must have the same length");
    for (std::size_t n = 0; n < h_i_.size(); ++n) {
        if (!(h_i_[n] > 0.0) || !std::isfinite(h_i_[n])) {
            throw ValidationError("non-positive I-frame cost at view " + std::to_string(n + 1));
        }
        if (!(h_p_[n] >= 0.0) || !std::isfinite(h_p_[n])) {
            throw ValidationError("negative P-frame cost at view " + std::to_string(n + 1));
        }
    }
    h_p_[0] = 0.0;
    h_p_prefix_.assign(h_p_.size() + 1, 0.0);
    for (std::size_t n = 0; n < h_p_.size(); ++n) h_p_prefix_[n + 1] = h_p_prefix_[n] + h_p_[n];
}

RateTable RateTable::constant(std::size_t view_count, double intra_bits, double predicted_bits,
                              std::string q_label) {
    if (!(predicted_bits > 0.0) || !(intra_bits > predicted_bits)) {
        throw ValidationError("constant rate table requires c_I > c_P > 0");
    }
    return RateTable(std::move(q_label), std::vector<double>(view_count, intra_bits),
                     std::vector<double>(view_count, predicted_bits));
}

RateTable RateTable::seeded_random(std::size_t view_count, double mean_intra, double mean_predicted,
                                   double spread, std::uint64_t seed, std::string q_label) {
    if (!(mean_predicted > 0.0) || !(mean_intra > mean_predicted)) {
        throw ValidationError("random rate table requires mean_I > mean_P > 0");
    }
    if (!(spread >= 0.0 && spread < 1.0)) throw ValidationError("rate spread must be in [0, 1)");
    Rng rng(seed);
    std::vector<double> h_i(view_count), h_p(view_count);
    constexpr double floor_bits = 1e-6;
    for (std::size_t n = 0; n < view_count; ++n) {
        h_i[n] = std::max(rng.uniform(mean_intra * (1.0 - spread), mean_intra * (1.0 + spread)), floor_bits);
        h_p[n] = std::max(rng.uniform(mean_predicted * (1.0 - spread), mean_predicted * (1.0 + spread)), floor_bits);
    }
    return RateTable(std::move(q_label), std::move(h_i), std::move(h_p));
}

RateTable RateTable::load_csv(const std::filesystem::path& path, std::string q_label,
                              std::size_t expected_views) {
    auto table = io::read_csv(path);
    if (table.header != std::vector<std::string>{"index", "h_I", "h_P"}) {
        throw ValidationError(path.string() + ": expected header index,h_I,h_P");
    }
    if (table.rows.empty()) throw ValidationError(path.string() + ": no rate rows");
    if (expected_views != 0 && table.rows.size() != expected_views) {
        throw ValidationError(path.string() + ": missing rows, expected " + std::to_string(expected_views) +
                              " views, found " + std::to_string(table.rows.size()));
    }
    std::vector<double> h_i, h_p;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (io::parse_int(row[0], "index") != static_cast<long long>(i + 1)) {
            throw ValidationError(path.string() + ": rate rows must be numbered 1..N_V in order");
        }
        h_i.push_back(io::parse_double(row[1], "h_I"));
        h_p.push_back(io::parse_double(row[2], "h_P"));
    }
    try {
        return RateTable(std::move(q_label), std::move(h_i), std::move(h_p));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void RateTable::save_csv(const std::filesystem::path& path) const {
    std::string out = "index,h_I,h_P\n";
    for (std::size_t n = 0; n < h_i_.size(); ++n) {
        out += std::to_string(n + 1) + "," + io::format_double(h_i_[n]) + "," + io::format_double(h_p_[n]) + "\n";
    }
    io::write_text(path, out);
}

double RateTable::predicted_sum(std::size_t a, std::size_t b) const {
    if (a > b) return 0.0;
    return h_p_prefix_[b] - h_p_prefix_[a - 1];
}

double segment_cost(const RateTable& table, ViewRange segment) {
    if (segment.lo > segment.hi) throw ValidationError("segment start after segment end");
    if (segment.lo < 1 || segment.hi > table.size()) throw ValidationError("segment outside the rate table");
    return table.h_i(segment.lo) + table.predicted_sum(segment.lo + 1, segment.hi);
}

double storage_cost(const RateTable& table, const Partition& partition) {
    double total = 0.0;
    for (std::size_t k = 1; k <= partition.segment_count(); ++k) total += segment_cost(table, partition.segment(k));
    return total;
}

}  // namespace navseg
