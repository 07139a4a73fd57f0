#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace navseg::io {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file. Blank lines and lines starting with '#' are skipped.
/// The first remaining line is the header; every row must have the header's width.
CsvTable read_csv(const std::filesystem::path& path);

/// Throws ValidationError naming `what` if `text` is not a complete finite number.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

/// Shortest round-trip decimal representation; stable across runs.
std::string format_double(double value);

void write_text(const std::filesystem::path& path, std::string_view content);

}  // namespace navseg::io
