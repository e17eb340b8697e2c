#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace csa::harness {

struct PropertyResult {
  std::string suite;
  std::string property;
  bool pass = false;
  std::string detail;
};

/// Sample counts for the property suites. The defaults are the full-scale
/// settings; `quick()` shrinks everything for smoke runs.
struct VerifyOptions {
  std::uint64_t seed = 20240917;
  unsigned threads = 0;
  std::int64_t sandwich_trials = 1000;
  std::int64_t sandwich_max_dim = 16;
  std::int64_t drift_points = 50;
  std::int64_t drift_samples = 10000;
  std::int64_t contraction_pairs = 1000;
  std::int64_t fixed_point_draws = 20;
  std::int64_t noise_points = 10;
  std::int64_t noise_samples = 10000;
  std::int64_t lipschitz_pairs = 1000;
  std::vector<std::int64_t> tightness_dims = {2, 8, 32, 128, 512};
  std::int64_t tightness_k = 1000;
  std::size_t tightness_paths = 500;

  static VerifyOptions quick();
};

const std::vector<std::string> &suite_names();

std::vector<PropertyResult> verify_sandwich(const VerifyOptions &opt);
std::vector<PropertyResult> verify_drift_suite(const VerifyOptions &opt);
/// Contraction factors of the exact operators plus their fixed points.
std::vector<PropertyResult> verify_contraction(const VerifyOptions &opt);
std::vector<PropertyResult> verify_noise(const VerifyOptions &opt);
std::vector<PropertyResult> verify_lipschitz(const VerifyOptions &opt);
std::vector<PropertyResult> verify_tightness(const VerifyOptions &opt);

/// Throws ConfigError for an unknown suite; "all" runs every suite.
std::vector<PropertyResult> run_suite(const std::string &name, const VerifyOptions &opt);

std::string format_report(const std::vector<PropertyResult> &results);
nlohmann::json report_json(const std::vector<PropertyResult> &results);
bool all_passed(const std::vector<PropertyResult> &results);

} // namespace csa::harness
