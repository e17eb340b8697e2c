#pragma once

// Brute-force reference implementations used only by the tests. None of
// them share code with the library beyond the data types.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "csa/mdp.hpp"

namespace oracle {

// Plain-loop norms.
inline double lp_norm(const Eigen::VectorXd &x, double p) {
  long double s = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    s += std::pow(static_cast<long double>(std::abs(x[i])), static_cast<long double>(p));
  return static_cast<double>(std::pow(s, 1.0L / static_cast<long double>(p)));
}

inline double linf_norm(const Eigen::VectorXd &x) {
  double m = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    m = std::max(m, std::abs(x[i]));
  return m;
}

// Minimizes a convex function over a box by grid search, refining around the
// best point until the spacing reaches h_final. Returns the best value.
struct GridResult {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd point;
};

inline GridResult grid_minimize(const std::function<double(const Eigen::VectorXd &)> &f, Eigen::VectorXd lo,
                                Eigen::VectorXd hi, double h_final, int points_per_axis = 41) {
  const Eigen::Index d = lo.size();
  GridResult best;
  while (true) {
    const Eigen::VectorXd step = (hi - lo) / static_cast<double>(points_per_axis - 1);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd u(d);
    while (true) {
      for (Eigen::Index i = 0; i < d; ++i)
        u[i] = lo[i] + step[i] * idx[static_cast<std::size_t>(i)];
      const double v = f(u);
      if (v < best.value) {
        best.value = v;
        best.point = u;
      }
      Eigen::Index i = 0;
      while (i < d && ++idx[static_cast<std::size_t>(i)] == points_per_axis)
        idx[static_cast<std::size_t>(i++)] = 0;
      if (i == d)
        break;
    }
    if (step.maxCoeff() <= h_final)
      return best;
    // Zoom to a window of +-2 cells around the incumbent.
    lo = best.point.array() - 2.0 * step.array();
    hi = best.point.array() + 2.0 * step.array();
    const double target = std::max(h_final, step.maxCoeff() / 10.0);
    points_per_axis = std::max(5, static_cast<int>(std::ceil(4.0 * step.maxCoeff() / target)) + 1);
  }
}

// Value of a policy by truncated power series sum_t beta^t P^t R.
inline Eigen::VectorXd power_series_value(const Eigen::MatrixXd &P, const Eigen::VectorXd &R, double beta,
                                          long max_steps = 1000000) {
  Eigen::VectorXd term = R;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(R.size());
  for (long t = 0; t < max_steps; ++t) {
    v += term;
    term = beta * (P * term);
    if (term.cwiseAbs().maxCoeff() < 1e-18)
      break;
  }
  return v;
}

inline Eigen::MatrixXd policy_matrix(const csa::Mdp &m, const csa::Policy &pi) {
  const Eigen::Index S = m.n_states();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
  for (Eigen::Index s = 0; s < S; ++s)
    for (Eigen::Index a = 0; a < m.n_actions(); ++a)
      for (Eigen::Index t = 0; t < S; ++t)
        P(s, t) += pi(s, a) * m.transition(a)(s, t);
  return P;
}

inline Eigen::VectorXd policy_rewards(const csa::Mdp &m, const csa::Policy &pi) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m.n_states());
  for (Eigen::Index s = 0; s < m.n_states(); ++s)
    for (Eigen::Index a = 0; a < m.n_actions(); ++a)
      r[s] += pi(s, a) * m.rewards()(s, a);
  return r;
}

// Stationary distribution from (P^T - I) lambda = 0 with sum(lambda) = 1.
inline Eigen::VectorXd stationary_by_solve(const Eigen::MatrixXd &P) {
  const Eigen::Index S = P.rows();
  Eigen::MatrixXd M = P.transpose() - Eigen::MatrixXd::Identity(S, S);
  M.row(S - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S);
  rhs[S - 1] = 1.0;
  return M.fullPivLu().solve(rhs);
}

// Value iteration with explicit loops.
inline Eigen::MatrixXd value_iteration(const csa::Mdp &m, double tol = 1e-13) {
  const Eigen::Index S = m.n_states(), A = m.n_actions();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(S, A);
  for (int it = 0; it < 100000; ++it) {
    Eigen::MatrixXd next(S, A);
    for (Eigen::Index s = 0; s < S; ++s)
      for (Eigen::Index a = 0; a < A; ++a) {
        double e = 0;
        for (Eigen::Index t = 0; t < S; ++t)
          e += m.transition(a)(s, t) * Q.row(t).maxCoeff();
        next(s, a) = m.rewards()(s, a) + m.beta() * e;
      }
    const double diff = (next - Q).cwiseAbs().maxCoeff();
    Q = next;
    if (diff < tol)
      break;
  }
  return Q;
}

// Exact expectation of the V-trace target from state s by enumerating every
// length-n trajectory under the behaviour policy.
inline double vtrace_enumerate(const csa::Mdp &m, const csa::Policy &pi, const csa::Policy &mu, double c_bar,
                               double rho_bar, int n, const Eigen::VectorXd &V, Eigen::Index s0) {
  const double beta = m.beta();
  double total = 0;
  std::function<void(int, Eigen::Index, double, double, double)> rec = [&](int t, Eigen::Index s, double prob,
                                                                           double cprod, double acc) {
    if (t == n) {
      total += prob * acc;
      return;
    }
    for (Eigen::Index a = 0; a < m.n_actions(); ++a) {
      const double pa = mu(s, a);
      if (pa == 0.0)
        continue;
      const double ratio = pi(s, a) / pa;
      const double rho = std::min(rho_bar, ratio);
      const double c = std::min(c_bar, ratio);
      for (Eigen::Index s1 = 0; s1 < m.n_states(); ++s1) {
        const double ps = m.transition(a)(s, s1);
        if (ps == 0.0)
          continue;
        const double delta = m.rewards()(s, a) + beta * V[s1] - V[s];
        rec(t + 1, s1, prob * pa * ps, cprod * c, acc + std::pow(beta, t) * cprod * rho * delta);
      }
    }
  };
  rec(0, s0, 1.0, 1.0, 0.0);
  return V[s0] + total;
}

// Exact expectation of sum_{t<n} beta^t R + beta^n V(S_n) by enumeration.
inline double tdn_enumerate(const csa::Mdp &m, const csa::Policy &pi, int n, const Eigen::VectorXd &V,
                            Eigen::Index s0) {
  const double beta = m.beta();
  double total = 0;
  std::function<void(int, Eigen::Index, double, double)> rec = [&](int t, Eigen::Index s, double prob, double acc) {
    if (t == n) {
      total += prob * (acc + std::pow(beta, n) * V[s]);
      return;
    }
    for (Eigen::Index a = 0; a < m.n_actions(); ++a)
      for (Eigen::Index s1 = 0; s1 < m.n_states(); ++s1) {
        const double p = pi(s, a) * m.transition(a)(s, s1);
        if (p > 0)
          rec(t + 1, s1, prob * p, acc + std::pow(beta, t) * m.rewards()(s, a));
      }
  };
  rec(0, s0, 1.0, 0.0);
  return total;
}

} // namespace oracle
