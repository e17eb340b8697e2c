#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace csa::harness {

struct CurveTable {
  std::string label;
  std::vector<std::int64_t> k;
  std::vector<std::optional<double>> empirical_mean;
  std::vector<std::optional<double>> empirical_stderr;
  std::vector<std::optional<double>> bound;

  void add_row(std::int64_t k_, std::optional<double> mean, std::optional<double> se, std::optional<double> b);
  std::size_t size() const noexcept { return k.size(); }
  /// Throws unless k is strictly increasing and every stderr is >= 0.
  void validate() const;
};

inline constexpr const char *kCsvHeader = "k,empirical_mean,empirical_stderr,bound";

std::string to_csv(const CurveTable &table);

/// Line chart with log axes: empirical mean with a +-2 SE band and the
/// bound as a dashed overlay, one colour per table.
std::string render_svg(const std::string &title, const std::vector<CurveTable> &tables);

/// Resolves the directory experiment outputs go to: explicit value, then
/// CONTRACT_SA_OUTPUT_DIR, then the working directory.
std::filesystem::path resolve_output_dir(const std::string &explicit_dir);

} // namespace csa::harness
