#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "csa/harness/config.hpp"
#include "csa/harness/output.hpp"
#include "csa/mdp.hpp"
#include "csa/sa_engine.hpp"

namespace csa::harness {

struct ExperimentSpec {
  std::string name;
  std::string kind; // qlearning, tdn, vtrace, fig1, tightness, averaged
  std::filesystem::path output_dir;
  std::uint64_t seed = 1;
  std::size_t paths = 0;
  std::int64_t k_max = 0;
  unsigned threads = 0;
  IniConfig config;
};

/// Validates the whole file (schema, required keys, ranges) before anything
/// is computed or written.
ExperimentSpec load_experiment(const IniConfig &config, const std::string &output_dir_override = {});

struct ExperimentOutput {
  std::vector<CurveTable> tables; // one per case
  nlohmann::json summary;
};

ExperimentOutput compute_experiment(const ExperimentSpec &spec);

/// Writes <name>.csv (or <name>-<label>.csv per case), <name>.svg and
/// <name>.meta.json. Returns the written paths.
std::vector<std::filesystem::path> write_experiment(const ExperimentSpec &spec, const ExperimentOutput &out);

/// MDP from an [mdp] section: either file = <path> or states/actions/beta/seed.
Mdp mdp_from_config(const IniConfig &config);

/// Policy from a section with kind = uniform | random (+ seed).
Policy policy_from_config(const IniConfig &config, const std::string &section, Eigen::Index n_states,
                          Eigen::Index n_actions);

// Figure-1 reproduction: TD(n) under a constant stepsize for several n.
struct Fig1Case {
  std::int64_t n = 1;
  CurveStats l2;       // E||V_k - V_pi||_2^2
  CurveStats linf;     // E||V_k - V_pi||_inf^2
  double early_l2 = 0; // E||V_k - V_pi||_2^2 at k = early_k
  // First (log-interpolated) k with E||V_k - V_pi||_2^2 <= decay_fraction
  // times its initial value; +inf if never reached.
  double decay_time = 0;
  double asymptotic_l2 = 0;
  double asymptotic_linf = 0;
};

struct Fig1Result {
  std::int64_t early_k = 100;
  double decay_fraction = 0.1;
  std::vector<Fig1Case> cases;
};

Fig1Result run_fig1(const Mdp &mdp, const Policy &pi, const std::vector<std::int64_t> &n_list, double eps,
                    std::int64_t k_max, std::size_t paths, std::uint64_t seed, unsigned threads = 0,
                    std::int64_t early_k = 100);

/// Log-interpolated first k where the mean curve falls to `fraction` of its
/// value at k = 0.
double decay_time(const CurveStats &c, double fraction);

/// Mean of a curve over its last quarter of recorded points.
double tail_mean(const CurveStats &c);

/// Planar rotation by `angle` with isotropic Gaussian noise of std `sigma`.
NoisyOracle rotation_oracle(double angle, double sigma);

} // namespace csa::harness
