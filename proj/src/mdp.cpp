#include "csa/mdp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "csa/rng.hpp"

namespace csa {

namespace {

constexpr double kRowTol = 1e-12;

void check_row_stochastic(const Eigen::MatrixXd &M, const std::string &what) {
  if (!M.allFinite())
    throw ConfigError(what + ": non-finite entry");
  if ((M.array() < 0.0).any())
    throw ConfigError(what + ": negative entry");
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    if (std::abs(M.row(r).sum() - 1.0) > kRowTol)
      throw ConfigError(what + ": row " + std::to_string(r) + " does not sum to 1");
}

Eigen::VectorXd simplex_row(StreamRng &rng, Eigen::Index n) {
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i)
    e[i] = rng.exponential();
  return e / e.sum();
}

void check_shapes(const Mdp &mdp, const Policy &pi) {
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions())
    throw DimensionError("policy shape does not match the MDP");
}

void check_same_shape(const Policy &a, const Policy &b) {
  if (a.n_states() != b.n_states() || a.n_actions() != b.n_actions())
    throw DimensionError("policies have different shapes");
}

} // namespace

Mdp::Mdp(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd rewards, double beta)
    : transitions_(std::move(transitions)), rewards_(std::move(rewards)), beta_(beta) {
  if (!(beta_ > 0.0 && beta_ < 1.0))
    throw ConfigError("mdp: beta must lie in (0, 1)");
  const Eigen::Index S = rewards_.rows();
  const Eigen::Index A = rewards_.cols();
  if (S < 1 || A < 1)
    throw ConfigError("mdp: needs at least one state and one action");
  if (static_cast<Eigen::Index>(transitions_.size()) != A)
    throw ConfigError("mdp: one transition matrix per action required");
  for (std::size_t a = 0; a < transitions_.size(); ++a) {
    if (transitions_[a].rows() != S || transitions_[a].cols() != S)
      throw ConfigError("mdp: transition matrix " + std::to_string(a) + " is not S x S");
    check_row_stochastic(transitions_[a], "mdp transition " + std::to_string(a));
  }
  if (!rewards_.allFinite() || (rewards_.array() < 0.0).any() || (rewards_.array() > 1.0).any())
    throw ConfigError("mdp: rewards must lie in [0, 1]");
}

Policy::Policy(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1)
    throw ConfigError("policy: empty table");
  check_row_stochastic(probs_, "policy");
}

Policy Policy::uniform(Eigen::Index n_states, Eigen::Index n_actions) {
  return Policy(Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / static_cast<double>(n_actions)));
}

void validate(const VtraceParams &params) {
  if (!(params.c_bar >= 0.0) || !std::isfinite(params.c_bar))
    throw PreconditionError("vtrace: c_bar must be finite and nonnegative");
  if (!(params.rho_bar >= params.c_bar) || !std::isfinite(params.rho_bar))
    throw PreconditionError("vtrace: requires rho_bar >= c_bar");
  if (!(params.rho_bar > 0.0))
    throw PreconditionError("vtrace: rho_bar must be positive");
  if (params.n < 1)
    throw PreconditionError("vtrace: horizon n must be at least 1");
}

Mdp random_mdp(Eigen::Index n_states, Eigen::Index n_actions, double beta, std::uint64_t seed) {
  if (n_states < 1 || n_actions < 1)
    throw ConfigError("random_mdp: needs at least one state and one action");
  const StreamRng root(seed);
  std::vector<Eigen::MatrixXd> P;
  P.reserve(static_cast<std::size_t>(n_actions));
  for (Eigen::Index a = 0; a < n_actions; ++a) {
    StreamRng rng = root.split(0).split(static_cast<std::uint64_t>(a));
    Eigen::MatrixXd Pa(n_states, n_states);
    for (Eigen::Index s = 0; s < n_states; ++s)
      Pa.row(s) = simplex_row(rng, n_states).transpose();
    P.push_back(std::move(Pa));
  }
  StreamRng rr = root.split(1);
  Eigen::MatrixXd R(n_states, n_actions);
  for (Eigen::Index s = 0; s < n_states; ++s)
    for (Eigen::Index a = 0; a < n_actions; ++a)
      R(s, a) = rr.uniform();
  return Mdp(std::move(P), std::move(R), beta);
}

Policy random_policy(Eigen::Index n_states, Eigen::Index n_actions, std::uint64_t seed) {
  StreamRng rng(seed);
  Eigen::MatrixXd probs(n_states, n_actions);
  for (Eigen::Index s = 0; s < n_states; ++s)
    probs.row(s) = simplex_row(rng, n_actions).transpose();
  return Policy(std::move(probs));
}

Eigen::MatrixXd policy_transition(const Mdp &mdp, const Policy &pi) {
  check_shapes(mdp, pi);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(mdp.n_states(), mdp.n_states());
  for (Eigen::Index a = 0; a < mdp.n_actions(); ++a)
    P.noalias() += pi.probs().col(a).asDiagonal() * mdp.transition(a);
  return P;
}

Eigen::VectorXd policy_reward(const Mdp &mdp, const Policy &pi) {
  check_shapes(mdp, pi);
  return mdp.rewards().cwiseProduct(pi.probs()).rowwise().sum();
}

Eigen::VectorXd value_of_policy(const Mdp &mdp, const Policy &pi) {
  const Eigen::MatrixXd P = policy_transition(mdp, pi);
  const Eigen::VectorXd R = policy_reward(mdp, pi);
  const Eigen::Index S = mdp.n_states();
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(S, S) - mdp.beta() * P;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::VectorXd V = lu.solve(R);
  // one step of iterative refinement
  V += lu.solve(R - M * V);
  const double residual = (M * V - R).cwiseAbs().maxCoeff();
  if (!(residual < 1e-10))
    throw NumericalError("value_of_policy: linear solve residual " + std::to_string(residual), 0);
  return V;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd &P) {
  const Eigen::Index S = P.rows();
  if (P.cols() != S)
    throw DimensionError("stationary_distribution: P must be square");
  check_row_stochastic(P, "stationary_distribution");
  if (S == 1)
    return Eigen::VectorXd::Ones(1);

  const Eigen::MatrixXd G = P.transpose() - Eigen::MatrixXd::Identity(S, S);
  Eigen::FullPivLU<Eigen::MatrixXd> rank_lu(G);
  rank_lu.setThreshold(1e-10);
  if (rank_lu.rank() != S - 1)
    throw PreconditionError("stationary_distribution: chain has no unique stationary distribution");

  Eigen::VectorXd lam = Eigen::VectorXd::Constant(S, 1.0 / static_cast<double>(S));
  bool converged = false;
  for (int it = 0; it < 1000000; ++it) {
    Eigen::VectorXd next = P.transpose() * lam;
    next /= next.sum();
    const double change = (next - lam).lpNorm<1>();
    lam.swap(next);
    if (change < 1e-13) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    // periodic or slowly mixing: solve (P^T - I) lam = 0 with sum(lam) = 1
    Eigen::MatrixXd M = G;
    M.row(S - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S);
    rhs[S - 1] = 1.0;
    lam = M.fullPivLu().solve(rhs);
  }
  if (!lam.allFinite() || lam.minCoeff() < 1e-9)
    throw PreconditionError("stationary_distribution: some state has stationary mass below 1e-9");
  return lam / lam.sum();
}

Eigen::VectorXd stationary_distribution(const Mdp &mdp, const Policy &pi) {
  return stationary_distribution(policy_transition(mdp, pi));
}

void check_coverage(const Policy &pi, const Policy &pi_prime) {
  check_same_shape(pi, pi_prime);
  for (Eigen::Index s = 0; s < pi.n_states(); ++s)
    for (Eigen::Index a = 0; a < pi.n_actions(); ++a)
      if (pi(s, a) > 0.0 && !(pi_prime(s, a) > 0.0))
        throw CoverageError("behaviour policy does not cover the target policy at state " + std::to_string(s) +
                            ", action " + std::to_string(a));
}

Eigen::MatrixXd importance_ratios(const Policy &pi, const Policy &pi_prime) {
  check_coverage(pi, pi_prime);
  Eigen::MatrixXd r(pi.n_states(), pi.n_actions());
  for (Eigen::Index s = 0; s < pi.n_states(); ++s)
    for (Eigen::Index a = 0; a < pi.n_actions(); ++a)
      r(s, a) = pi_prime(s, a) > 0.0 ? pi(s, a) / pi_prime(s, a) : 0.0;
  return r;
}

double rho_max(const Policy &pi, const Policy &pi_prime) {
  check_same_shape(pi, pi_prime);
  double m = 0.0;
  for (Eigen::Index s = 0; s < pi.n_states(); ++s)
    for (Eigen::Index a = 0; a < pi.n_actions(); ++a) {
      if (pi(s, a) > 0.0 && !(pi_prime(s, a) > 0.0))
        return std::numeric_limits<double>::infinity();
      if (pi_prime(s, a) > 0.0)
        m = std::max(m, pi(s, a) / pi_prime(s, a));
    }
  return m;
}

Policy clipped_policy(const Policy &pi, const Policy &pi_prime, double rho_bar) {
  check_coverage(pi, pi_prime);
  if (!(rho_bar > 0.0))
    throw PreconditionError("clipped_policy: rho_bar must be positive");
  Eigen::MatrixXd m = (rho_bar * pi_prime.probs()).cwiseMin(pi.probs());
  for (Eigen::Index s = 0; s < m.rows(); ++s) {
    const double z = m.row(s).sum();
    if (!(z > 0.0))
      throw CoverageError("clipped_policy: zero normaliser at state " + std::to_string(s));
    m.row(s) /= z;
  }
  return Policy(std::move(m));
}

KappaConstants kappa_constants(const Policy &pi, const Policy &pi_prime, const VtraceParams &params) {
  validate(params);
  check_coverage(pi, pi_prime);
  KappaConstants k;
  k.kappa_c = (params.c_bar * pi_prime.probs()).cwiseMin(pi.probs()).rowwise().sum().minCoeff();
  k.kappa_rho = (params.rho_bar * pi_prime.probs()).cwiseMin(pi.probs()).rowwise().sum().minCoeff();
  if (params.c_bar > 0.0 && !(k.kappa_c > 0.0))
    throw CoverageError("kappa_c = 0: behaviour policy does not cover the target policy");
  if (!(k.kappa_c <= k.kappa_rho) || !(k.kappa_rho <= 1.0 + 1e-12))
    throw std::logic_error("kappa constants out of order");
  return k;
}

Eigen::VectorXd vtrace_operator(const Mdp &mdp, const Policy &pi, const Policy &pi_prime, const VtraceParams &params,
                                const Eigen::VectorXd &V) {
  validate(params);
  check_shapes(mdp, pi);
  check_shapes(mdp, pi_prime);
  const Eigen::Index S = mdp.n_states();
  if (V.size() != S)
    throw DimensionError("vtrace_operator: V has the wrong length");
  const Eigen::MatrixXd ratio = importance_ratios(pi, pi_prime);
  const Eigen::MatrixXd wc = pi_prime.probs().cwiseProduct(ratio.cwiseMin(params.c_bar));
  const Eigen::MatrixXd wr = pi_prime.probs().cwiseProduct(ratio.cwiseMin(params.rho_bar));
  const double beta = mdp.beta();

  Eigen::MatrixXd Qc = Eigen::MatrixXd::Zero(S, S);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(S);
  for (Eigen::Index a = 0; a < mdp.n_actions(); ++a) {
    const Eigen::MatrixXd &Pa = mdp.transition(a);
    Qc.noalias() += wc.col(a).asDiagonal() * Pa;
    const Eigen::VectorXd td = mdp.rewards().col(a) + beta * (Pa * V) - V;
    b += wr.col(a).cwiseProduct(td);
  }
  Eigen::VectorXd term = b;
  Eigen::VectorXd sum = b;
  for (std::int64_t t = 1; t < params.n; ++t) {
    term = beta * (Qc * term);
    sum += term;
  }
  return V + sum;
}

double vtrace_contraction_factor(const Policy &pi, const Policy &pi_prime, const VtraceParams &params, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw PreconditionError("vtrace_contraction_factor: beta must lie in (0, 1)");
  const KappaConstants k = kappa_constants(pi, pi_prime, params);
  const double bk = beta * k.kappa_c;
  return 1.0 - (1.0 - beta) * (1.0 - std::pow(bk, static_cast<double>(params.n))) * k.kappa_rho / (1.0 - bk);
}

double vtrace_noise_constant(const VtraceParams &params, double beta) {
  validate(params);
  if (!(beta > 0.0 && beta < 1.0))
    throw PreconditionError("vtrace_noise_constant: beta must lie in (0, 1)");
  const double bc = beta * params.c_bar;
  const double r2 = params.rho_bar * params.rho_bar;
  const double n = static_cast<double>(params.n);
  // beta * c_bar within a few ulps of 1 is treated as the boundary case.
  if (std::abs(bc - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon())
    return 32.0 * r2 * n * n;
  if (bc < 1.0)
    return 32.0 * r2 / ((1.0 - bc) * (1.0 - bc));
  return 32.0 * r2 * std::pow(bc, 2.0 * n) / ((bc - 1.0) * (bc - 1.0));
}

Eigen::VectorXd tdn_operator(const Mdp &mdp, const Policy &pi, std::int64_t n, const Eigen::VectorXd &V) {
  if (n < 1)
    throw PreconditionError("tdn_operator: n must be at least 1");
  if (V.size() != mdp.n_states())
    throw DimensionError("tdn_operator: V has the wrong length");
  const Eigen::MatrixXd P = policy_transition(mdp, pi);
  const Eigen::VectorXd R = policy_reward(mdp, pi);
  Eigen::VectorXd out = V;
  for (std::int64_t i = 0; i < n; ++i)
    out = R + mdp.beta() * (P * out);
  return out;
}

Eigen::MatrixXd bellman_optimality(const Mdp &mdp, const Eigen::MatrixXd &Q) {
  if (Q.rows() != mdp.n_states() || Q.cols() != mdp.n_actions())
    throw DimensionError("bellman_optimality: Q must be S x A");
  const Eigen::VectorXd vmax = Q.rowwise().maxCoeff();
  Eigen::MatrixXd out(mdp.n_states(), mdp.n_actions());
  for (Eigen::Index a = 0; a < mdp.n_actions(); ++a)
    out.col(a) = mdp.rewards().col(a) + mdp.beta() * (mdp.transition(a) * vmax);
  return out;
}

Eigen::MatrixXd optimal_q(const Mdp &mdp, double tol) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(mdp.n_states(), mdp.n_actions());
  for (int it = 0; it < 1000000; ++it) {
    Eigen::MatrixXd next = bellman_optimality(mdp, Q);
    const double diff = (next - Q).cwiseAbs().maxCoeff();
    Q.swap(next);
    if (diff * mdp.beta() / (1.0 - mdp.beta()) < tol || diff == 0.0)
      return Q;
  }
  throw ConvergenceError("optimal_q: value iteration did not converge", 0.0, 0.0);
}

LipschitzCheck policy_lipschitz_check(const Mdp &mdp, const Policy &pi1, const Policy &pi2) {
  LipschitzCheck c;
  c.lhs = (value_of_policy(mdp, pi1) - value_of_policy(mdp, pi2)).cwiseAbs().maxCoeff();
  const double dist = (pi1.probs() - pi2.probs()).cwiseAbs().rowwise().sum().maxCoeff();
  const double g = 1.0 - mdp.beta();
  c.rhs = 2.0 / (g * g) * dist;
  c.ok = c.lhs <= c.rhs + 1e-10;
  return c;
}

Eigen::VectorXd flatten_q(const Eigen::MatrixXd &Q) {
  Eigen::VectorXd q(Q.size());
  for (Eigen::Index s = 0; s < Q.rows(); ++s)
    for (Eigen::Index a = 0; a < Q.cols(); ++a)
      q[s * Q.cols() + a] = Q(s, a);
  return q;
}

Eigen::MatrixXd unflatten_q(const Eigen::VectorXd &q, Eigen::Index n_states, Eigen::Index n_actions) {
  if (q.size() != n_states * n_actions)
    throw DimensionError("unflatten_q: length is not S * A");
  Eigen::MatrixXd Q(n_states, n_actions);
  for (Eigen::Index s = 0; s < n_states; ++s)
    for (Eigen::Index a = 0; a < n_actions; ++a)
      Q(s, a) = q[s * n_actions + a];
  return Q;
}

} // namespace csa
