#include "navseg/io.hpp"

#include "navseg/domain.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace navseg::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());

    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto cells = split(view);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " columns, got " +
                                  std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) throw ValidationError(path.string() + ": missing header");
    return table;
}

double parse_double(std::string_view text, std::string_view what) {
    text = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw ValidationError("malformed number for " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

long long parse_int(std::string_view text, std::string_view what) {
    text = trim(text);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError("malformed integer for " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
}

}  // namespace navseg::io
