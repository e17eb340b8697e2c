#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "csa/mdp.hpp"
#include "csa/rng.hpp"
#include "csa/sa_engine.hpp"

namespace csa {

/// Cumulative tables for inverse-CDF sampling of actions and successors.
class TrajectorySampler {
public:
  TrajectorySampler(const Mdp &mdp, const Policy &behaviour);

  struct Step {
    Eigen::Index action;
    Eigen::Index next_state;
  };

  /// One (action, successor) draw from state s; consumes two uniforms.
  Step step(Eigen::Index s, StreamRng &rng) const;

  /// Successor draw for a fixed (s, a); consumes one uniform.
  Eigen::Index successor(Eigen::Index s, Eigen::Index a, StreamRng &rng) const;

private:
  Eigen::MatrixXd policy_cdf_;              // S x A
  std::vector<Eigen::MatrixXd> transition_cdf_; // per action, S x S
};

struct VtraceConfig {
  Mdp mdp;
  Policy target;
  Policy behaviour;
  VtraceParams params;
};

struct TdnConfig {
  Mdp mdp;
  Policy policy;
  std::int64_t n = 1;
};

struct QLearningConfig {
  Mdp mdp;
};

/// Trajectory of one state's sample, exposed for testing.
struct TrajectoryTrace {
  std::vector<Eigen::Index> states;  // S_0 .. S_n
  std::vector<Eigen::Index> actions; // A_0 .. A_{n-1}
};

// Every sampler draws the trajectory for state s from rng.split(s), so the
// per-state trajectories within one iteration are independent.

Eigen::VectorXd vtrace_sample(const VtraceConfig &config, const TrajectorySampler &sampler, const Eigen::VectorXd &V,
                              const StreamRng &rng, std::vector<TrajectoryTrace> *trace = nullptr);
Eigen::VectorXd tdn_sample(const TdnConfig &config, const TrajectorySampler &sampler, const Eigen::VectorXd &V,
                           const StreamRng &rng, std::vector<TrajectoryTrace> *trace = nullptr);
/// Q flattened row-major (s * A + a).
Eigen::VectorXd qlearning_sample(const QLearningConfig &config, const TrajectorySampler &sampler,
                                 const Eigen::VectorXd &q, const StreamRng &rng);

/// Convenience overloads building the sampler on every call.
Eigen::VectorXd vtrace_sample(const VtraceConfig &config, const Eigen::VectorXd &V, const StreamRng &rng);
Eigen::VectorXd tdn_sample(const TdnConfig &config, const Eigen::VectorXd &V, const StreamRng &rng);
Eigen::VectorXd qlearning_sample(const QLearningConfig &config, const Eigen::VectorXd &q, const StreamRng &rng);

/// Sampler wrapped as an SA oracle, with its exact mean operator and the
/// noise constants of the matching theorem.
struct AlgorithmModel {
  NoisyOracle oracle;
  OperatorModel op;
  Eigen::VectorXd x_star;
};

AlgorithmModel vtrace_model(const VtraceConfig &config);
AlgorithmModel tdn_model(const TdnConfig &config);
AlgorithmModel qlearning_model(const QLearningConfig &config);

struct AlgorithmRun {
  std::vector<RunRecord> paths;
  CurveStats error;       // E||x_k - x*||^2 in the theorem's norm
  Eigen::VectorXd x_star;
  double initial_err_sq = 0.0;
  double x_star_norm = 0.0;
};

AlgorithmRun run_vtrace(const VtraceConfig &config, const StepFn &schedule, std::int64_t k_max, std::size_t paths,
                        std::uint64_t seed, const Eigen::VectorXd &x0 = {}, unsigned threads = 0);
AlgorithmRun run_tdn(const TdnConfig &config, const StepFn &schedule, std::int64_t k_max, std::size_t paths,
                     std::uint64_t seed, const Eigen::VectorXd &x0 = {}, unsigned threads = 0,
                     bool keep_iterates = false);
AlgorithmRun run_qlearning(const QLearningConfig &config, const StepFn &schedule, std::int64_t k_max,
                           std::size_t paths, std::uint64_t seed, const Eigen::VectorXd &x0 = {},
                           unsigned threads = 0);

AlgorithmRun run_model(const AlgorithmModel &model, const Norm<double> &error_norm, const StepFn &schedule,
                       std::int64_t k_max, std::size_t paths, std::uint64_t seed, const Eigen::VectorXd &x0,
                       unsigned threads, bool keep_iterates = false);

} // namespace csa
