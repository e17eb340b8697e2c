#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csa {

/// Shortest representation that round-trips.
std::string format_double(double v);

/// Writes `<path>.tmp` then renames it over `path`.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

std::string read_file(const std::filesystem::path &path);

/// Comma separated numbers, whitespace tolerated.
std::vector<double> parse_csv_vector(std::string_view text);

std::string sha256_hex(std::string_view data);

} // namespace csa
