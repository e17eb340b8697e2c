#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "csa/error.hpp"

namespace csa {

/// Finite MDP with per-action transition matrices P_a (S x S), reward
/// table R (S x A) in [0, 1] and discount beta in (0, 1).
class Mdp {
public:
  Mdp(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd rewards, double beta);

  Eigen::Index n_states() const noexcept { return rewards_.rows(); }
  Eigen::Index n_actions() const noexcept { return rewards_.cols(); }
  double beta() const noexcept { return beta_; }
  const Eigen::MatrixXd &transition(Eigen::Index a) const { return transitions_.at(static_cast<std::size_t>(a)); }
  const std::vector<Eigen::MatrixXd> &transitions() const noexcept { return transitions_; }
  const Eigen::MatrixXd &rewards() const noexcept { return rewards_; }

private:
  std::vector<Eigen::MatrixXd> transitions_;
  Eigen::MatrixXd rewards_;
  double beta_;
};

/// Row-stochastic pi(a|s), stored S x A.
class Policy {
public:
  explicit Policy(Eigen::MatrixXd probs);

  static Policy uniform(Eigen::Index n_states, Eigen::Index n_actions);

  const Eigen::MatrixXd &probs() const noexcept { return probs_; }
  double operator()(Eigen::Index s, Eigen::Index a) const { return probs_(s, a); }
  Eigen::Index n_states() const noexcept { return probs_.rows(); }
  Eigen::Index n_actions() const noexcept { return probs_.cols(); }

private:
  Eigen::MatrixXd probs_;
};

struct VtraceParams {
  double c_bar = 1.0;
  double rho_bar = 1.0;
  std::int64_t n = 1;
};

void validate(const VtraceParams &params);

Mdp random_mdp(Eigen::Index n_states, Eigen::Index n_actions, double beta, std::uint64_t seed);

/// Rows drawn uniformly from the simplex.
Policy random_policy(Eigen::Index n_states, Eigen::Index n_actions, std::uint64_t seed);

Eigen::MatrixXd policy_transition(const Mdp &mdp, const Policy &pi);
Eigen::VectorXd policy_reward(const Mdp &mdp, const Policy &pi);

Eigen::VectorXd value_of_policy(const Mdp &mdp, const Policy &pi);

Eigen::VectorXd stationary_distribution(const Mdp &mdp, const Policy &pi);
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd &P);

/// Throws CoverageError unless pi(a|s) > 0 implies pi_prime(a|s) > 0.
void check_coverage(const Policy &pi, const Policy &pi_prime);

/// pi(a|s) / pi_prime(a|s), with 0/0 := 0.
Eigen::MatrixXd importance_ratios(const Policy &pi, const Policy &pi_prime);

/// max ratio; +inf when coverage fails.
double rho_max(const Policy &pi, const Policy &pi_prime);

Policy clipped_policy(const Policy &pi, const Policy &pi_prime, double rho_bar);

struct KappaConstants {
  double kappa_c = 1.0;
  double kappa_rho = 1.0;
};

KappaConstants kappa_constants(const Policy &pi, const Policy &pi_prime, const VtraceParams &params);

Eigen::VectorXd vtrace_operator(const Mdp &mdp, const Policy &pi, const Policy &pi_prime, const VtraceParams &params,
                                const Eigen::VectorXd &V);

double vtrace_contraction_factor(const Policy &pi, const Policy &pi_prime, const VtraceParams &params, double beta);

/// A (= B) of the V-trace noise model in the sup norm.
double vtrace_noise_constant(const VtraceParams &params, double beta);

/// beta^n P^n V + sum_{i<n} beta^i P^i R.
Eigen::VectorXd tdn_operator(const Mdp &mdp, const Policy &pi, std::int64_t n, const Eigen::VectorXd &V);

/// Q is S x A.
Eigen::MatrixXd bellman_optimality(const Mdp &mdp, const Eigen::MatrixXd &Q);

/// Value iteration until the sup-norm residual drops below tol.
Eigen::MatrixXd optimal_q(const Mdp &mdp, double tol = 1e-12);

struct LipschitzCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

LipschitzCheck policy_lipschitz_check(const Mdp &mdp, const Policy &pi1, const Policy &pi2);

/// Row-major flattening: index s * A + a.
Eigen::VectorXd flatten_q(const Eigen::MatrixXd &Q);
Eigen::MatrixXd unflatten_q(const Eigen::VectorXd &q, Eigen::Index n_states, Eigen::Index n_actions);

} // namespace csa
