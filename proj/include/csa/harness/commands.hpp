#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csa/harness/config.hpp"
#include "csa/harness/output.hpp"

namespace csa::harness {

struct BoundsResult {
  CurveTable table;     // empirical columns left empty
  nlohmann::json info;  // derived constants (alphas, schedule, case)
};

/// theorem: 1, c1, c2, c3, 2, 3, 4, 5. Parameters come from the [params]
/// section; the accepted keys depend on the theorem.
BoundsResult compute_bounds(const std::string &theorem, const IniConfig &params, std::int64_t k_max);

/// Evaluates the envelope described by an [envelope] section (c, s, mu) at x.
/// Returns a two-line CSV: value,u_1..u_d,residual.
std::string envelope_eval_csv(const IniConfig &spec, const std::vector<double> &x, std::optional<double> tol);

} // namespace csa::harness
