#include <doctest.h>

#include <cmath>
#include <vector>

#include "csa/bounds.hpp"
#include "csa/rl_algorithms.hpp"
#include "csa/stats.hpp"

using namespace csa;

namespace {

// Deterministic chain s -> (s + a + 1) mod S.
Mdp deterministic_mdp(Eigen::Index S, Eigen::Index A, double beta) {
  std::vector<Eigen::MatrixXd> P;
  for (Eigen::Index a = 0; a < A; ++a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(S, S);
    for (Eigen::Index s = 0; s < S; ++s)
      m(s, (s + a + 1) % S) = 1.0;
    P.push_back(m);
  }
  Eigen::MatrixXd R(S, A);
  for (Eigen::Index s = 0; s < S; ++s)
    for (Eigen::Index a = 0; a < A; ++a)
      R(s, a) = static_cast<double>((s * 7 + a * 3) % 10) / 10.0;
  return Mdp(P, R, beta);
}

Policy deterministic_policy(Eigen::Index S, Eigen::Index A) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(S, A);
  for (Eigen::Index s = 0; s < S; ++s)
    p(s, s % A) = 1.0;
  return Policy(p);
}

Policy positive_policy(Eigen::Index S, Eigen::Index A, std::uint64_t seed) {
  Eigen::MatrixXd p = random_policy(S, A, seed).probs();
  p.array() += 0.05;
  for (Eigen::Index s = 0; s < S; ++s)
    p.row(s) /= p.row(s).sum();
  return Policy(p);
}

// Per-coordinate check that the sample mean is within 4 standard errors of
// the exact value.
template <class Sample>
void check_unbiased(const Sample &sample, const Eigen::VectorXd &exact, std::int64_t n, std::uint64_t seed) {
  std::vector<MeanAccumulator> acc(static_cast<std::size_t>(exact.size()));
  const StreamRng root(seed);
  for (std::int64_t i = 0; i < n; ++i) {
    const Eigen::VectorXd y = sample(root.split(static_cast<std::uint64_t>(i)));
    for (Eigen::Index j = 0; j < y.size(); ++j)
      acc[static_cast<std::size_t>(j)].add(y[j]);
  }
  for (Eigen::Index j = 0; j < exact.size(); ++j) {
    const MeanEstimate e = acc[static_cast<std::size_t>(j)].estimate();
    CAPTURE(j);
    CHECK(std::abs(e.mean - exact[j]) <= 4.0 * e.stderr_ + 1e-12);
  }
}

} // namespace

TEST_CASE("deterministic MDPs give zero noise") {
  const Mdp m = deterministic_mdp(4, 2, 0.9);
  const Policy pi = deterministic_policy(4, 2);
  const Eigen::VectorXd V = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0);

  const VtraceConfig vc{m, pi, pi, {1.0, 1.0, 3}};
  const Eigen::VectorXd exact = vtrace_operator(m, pi, pi, vc.params, V);
  for (std::uint64_t s = 0; s < 20; ++s)
    CHECK((vtrace_sample(vc, V, StreamRng(s)) - exact).cwiseAbs().maxCoeff() < 1e-12);

  const TdnConfig tc{m, pi, 1};
  const Eigen::VectorXd bell = tdn_operator(m, pi, 1, V);
  for (std::uint64_t s = 0; s < 20; ++s)
    CHECK((tdn_sample(tc, V, StreamRng(s)) - bell).cwiseAbs().maxCoeff() < 1e-12);

  const QLearningConfig qc{m};
  const Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(8, 0.0, 3.0);
  const Eigen::VectorXd tq = flatten_q(bellman_optimality(m, unflatten_q(q, 4, 2)));
  for (std::uint64_t s = 0; s < 20; ++s)
    CHECK((qlearning_sample(qc, q, StreamRng(s)) - tq).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("samplers are unbiased for the exact operators") {
  const Mdp m = random_mdp(5, 3, 0.9, 21);
  const Policy pi = random_policy(5, 3, 22);
  const Policy mu = positive_policy(5, 3, 23);
  const Eigen::VectorXd V = Eigen::VectorXd::LinSpaced(5, -3.0, 4.0);

  const VtraceConfig vc{m, pi, mu, {0.8, 1.4, 3}};
  const TrajectorySampler vs(m, mu);
  check_unbiased([&](const StreamRng &r) { return vtrace_sample(vc, vs, V, r); },
                 vtrace_operator(m, pi, mu, vc.params, V), 100000, 1);

  const TdnConfig tc{m, pi, 4};
  const TrajectorySampler ts(m, pi);
  check_unbiased([&](const StreamRng &r) { return tdn_sample(tc, ts, V, r); }, tdn_operator(m, pi, 4, V), 100000, 2);

  const QLearningConfig qc{m};
  const TrajectorySampler qs(m, Policy::uniform(5, 3));
  const Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(15, 0.0, 5.0);
  check_unbiased([&](const StreamRng &r) { return qlearning_sample(qc, qs, q, r); },
                 flatten_q(bellman_optimality(m, unflatten_q(q, 5, 3))), 100000, 3);
}

TEST_CASE("noise second moments stay inside the stated envelopes") {
  const Mdp m = random_mdp(6, 2, 0.9, 30);
  const Policy pi = random_policy(6, 2, 31);
  const Policy mu = positive_policy(6, 2, 32);
  const std::vector<AlgorithmModel> models = {
      vtrace_model({m, pi, mu, {0.9, 1.2, 2}}),
      vtrace_model({m, pi, mu, {1.0 / 0.9, 1.2, 3}}),
      tdn_model({m, pi, 1}),
      tdn_model({m, pi, 3}),
      qlearning_model({m}),
  };
  StreamRng draw(5);
  for (std::size_t i = 0; i < models.size(); ++i) {
    CAPTURE(i);
    const auto &mod = models[i];
    for (int j = 0; j < 5; ++j) {
      const Eigen::VectorXd x = 10.0 * draw.normal_vector(mod.x_star.size());
      const NoiseReport r = check_noise(mod.oracle, x, 20000, draw.split(static_cast<std::uint64_t>(100 * i + j)));
      CHECK(r.ok);
      CHECK(r.max_mean_z < 5.0);
    }
  }
}

TEST_CASE("V-trace on-policy with unit clippers reproduces TD(n) on a shared stream") {
  const Mdp m = random_mdp(6, 3, 0.9, 40);
  const Policy pi = random_policy(6, 3, 41);
  const TrajectorySampler sampler(m, pi);
  const Eigen::VectorXd V = Eigen::VectorXd::LinSpaced(6, 0.0, 5.0);
  for (std::int64_t n : {1, 2, 5}) {
    const VtraceConfig vc{m, pi, pi, {1.0, 1.0, n}};
    const TdnConfig tc{m, pi, n};
    for (std::uint64_t s = 0; s < 50; ++s) {
      std::vector<TrajectoryTrace> tv, tt;
      const Eigen::VectorXd a = vtrace_sample(vc, sampler, V, StreamRng(s), &tv);
      const Eigen::VectorXd b = tdn_sample(tc, sampler, V, StreamRng(s), &tt);
      REQUIRE(tv.size() == tt.size());
      for (std::size_t i = 0; i < tv.size(); ++i) {
        REQUIRE(tv[i].states == tt[i].states);
        REQUIRE(tv[i].actions == tt[i].actions);
        REQUIRE(tv[i].states.size() == static_cast<std::size_t>(n + 1));
      }
      REQUIRE((a - b).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("V-trace without clipping bias converges to the target value") {
  const Mdp m = random_mdp(5, 2, 0.8, 50);
  const Policy pi = random_policy(5, 2, 51);
  const Policy mu = positive_policy(5, 2, 52);
  const double rmax = rho_max(pi, mu);
  const VtraceConfig vc{m, pi, mu, {1.0, std::max(1.0, rmax), 2}};
  const AlgorithmModel mod = vtrace_model(vc);
  const Eigen::VectorXd Vpi = value_of_policy(m, pi);
  CHECK((mod.x_star - Vpi).cwiseAbs().maxCoeff() < 1e-10);

  const AlgorithmRun run = run_vtrace(vc, [](std::int64_t k) { return 1.0 / (1.0 + 0.01 * k); }, 5000, 20, 7);
  CHECK((run.x_star - Vpi).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(run.error.mean.back() < 0.01 * run.error.mean.front());

  // With heavy clipping the limit is the clipped-policy value instead.
  const VtraceConfig clipped{m, pi, mu, {0.3, 0.3, 2}};
  CHECK((vtrace_model(clipped).x_star - value_of_policy(m, clipped_policy(pi, mu, 0.3))).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("TD(n) under the theorem 4 stepsize stays below its bound") {
  const Mdp m = random_mdp(5, 2, 0.9, 60);
  const Policy pi = Policy::uniform(5, 2);
  const std::int64_t n = 2;
  const double eps = theorem4_stepsize_cap(0.9, n);
  const AlgorithmRun run = run_tdn({m, pi, n}, [eps](std::int64_t) { return eps; }, 3000, 100, 3);
  for (std::size_t i = 0; i < run.error.k.size(); ++i)
    REQUIRE(run.error.mean[i] <=
            theorem4_bound(0.9, n, eps, run.initial_err_sq, run.x_star_norm, run.error.k[i]) + 3.0 * run.error.stderr_[i]);
  CHECK(run.error.mean.back() < run.error.mean.front());
}

TEST_CASE("run_model argument checks") {
  const Mdp m = random_mdp(3, 2, 0.9, 1);
  const AlgorithmModel mod = qlearning_model({m});
  const StepFn step = [](std::int64_t) { return 0.1; };
  CHECK_THROWS_AS(run_model(mod, Norm<double>::linf(), step, 10, 0, 1, Eigen::VectorXd::Zero(6), 1), PreconditionError);
  CHECK_THROWS_AS(run_model(mod, Norm<double>::linf(), step, 10, 2, 1, Eigen::VectorXd::Zero(5), 1), DimensionError);
  CHECK_THROWS_AS(tdn_model({m, Policy::uniform(3, 2), 0}), PreconditionError);
  CHECK_THROWS_AS(vtrace_model({m, Policy::uniform(3, 2), Policy::uniform(3, 2), {2.0, 1.0, 1}}), PreconditionError);
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(3, 2);
  partial.col(0).setOnes();
  CHECK_THROWS_AS(vtrace_model({m, Policy::uniform(3, 2), Policy(partial), {1.0, 1.0, 1}}), CoverageError);
  CHECK_THROWS_AS(qlearning_sample({m}, Eigen::VectorXd::Zero(5), StreamRng(1)), DimensionError);

  const AlgorithmRun a = run_qlearning({m}, step, 200, 8, 9, {}, 1);
  const AlgorithmRun b = run_qlearning({m}, step, 200, 8, 9, {}, 4);
  CHECK(a.error.mean == b.error.mean);
  CHECK(a.initial_err_sq == doctest::Approx(std::pow(optimal_q(m).cwiseAbs().maxCoeff(), 2)));
}
