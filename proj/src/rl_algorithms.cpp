#include "csa/rl_algorithms.hpp"

#include <cmath>

namespace csa {

namespace {

Eigen::MatrixXd cumulative_rows(const Eigen::MatrixXd &M) {
  Eigen::MatrixXd c(M.rows(), M.cols());
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      acc += M(r, j);
      c(r, j) = acc;
    }
  }
  return c;
}

void check_value_length(const Mdp &mdp, const Eigen::VectorXd &V) {
  if (V.size() != mdp.n_states())
    throw DimensionError("value vector length does not match the number of states");
}

} // namespace

TrajectorySampler::TrajectorySampler(const Mdp &mdp, const Policy &behaviour)
    : policy_cdf_(cumulative_rows(behaviour.probs())) {
  if (behaviour.n_states() != mdp.n_states() || behaviour.n_actions() != mdp.n_actions())
    throw DimensionError("policy shape does not match the MDP");
  transition_cdf_.reserve(static_cast<std::size_t>(mdp.n_actions()));
  for (Eigen::Index a = 0; a < mdp.n_actions(); ++a)
    transition_cdf_.push_back(cumulative_rows(mdp.transition(a)));
}

TrajectorySampler::Step TrajectorySampler::step(Eigen::Index s, StreamRng &rng) const {
  const Eigen::Index a = sample_from_cumulative(policy_cdf_.row(s), rng.uniform());
  return {a, successor(s, a, rng)};
}

Eigen::Index TrajectorySampler::successor(Eigen::Index s, Eigen::Index a, StreamRng &rng) const {
  return sample_from_cumulative(transition_cdf_[static_cast<std::size_t>(a)].row(s), rng.uniform());
}

Eigen::VectorXd vtrace_sample(const VtraceConfig &config, const TrajectorySampler &sampler, const Eigen::VectorXd &V,
                              const StreamRng &rng, std::vector<TrajectoryTrace> *trace) {
  const Mdp &mdp = config.mdp;
  check_value_length(mdp, V);
  const double beta = mdp.beta();
  const double c_bar = config.params.c_bar;
  const double rho_bar = config.params.rho_bar;
  const Eigen::Index S = mdp.n_states();
  if (trace)
    trace->assign(static_cast<std::size_t>(S), {});
  Eigen::VectorXd out(S);
  for (Eigen::Index s0 = 0; s0 < S; ++s0) {
    StreamRng r = rng.split(static_cast<std::uint64_t>(s0));
    Eigen::Index s = s0;
    double trace_weight = 1.0; // prod_{j<t} c_j
    double discount = 1.0;
    double acc = 0.0;
    if (trace)
      (*trace)[static_cast<std::size_t>(s0)].states.push_back(s);
    for (std::int64_t t = 0; t < config.params.n; ++t) {
      const auto st = sampler.step(s, r);
      const double pb = config.behaviour(s, st.action);
      const double ratio = pb > 0.0 ? config.target(s, st.action) / pb : 0.0;
      const double rho = std::min(rho_bar, ratio);
      const double td = mdp.rewards()(s, st.action) + beta * V[st.next_state] - V[s];
      acc += discount * trace_weight * rho * td;
      trace_weight *= std::min(c_bar, ratio);
      discount *= beta;
      if (trace) {
        (*trace)[static_cast<std::size_t>(s0)].actions.push_back(st.action);
        (*trace)[static_cast<std::size_t>(s0)].states.push_back(st.next_state);
      }
      s = st.next_state;
    }
    out[s0] = V[s0] + acc;
  }
  return out;
}

Eigen::VectorXd tdn_sample(const TdnConfig &config, const TrajectorySampler &sampler, const Eigen::VectorXd &V,
                           const StreamRng &rng, std::vector<TrajectoryTrace> *trace) {
  const Mdp &mdp = config.mdp;
  check_value_length(mdp, V);
  const double beta = mdp.beta();
  const Eigen::Index S = mdp.n_states();
  if (trace)
    trace->assign(static_cast<std::size_t>(S), {});
  Eigen::VectorXd out(S);
  for (Eigen::Index s0 = 0; s0 < S; ++s0) {
    StreamRng r = rng.split(static_cast<std::uint64_t>(s0));
    Eigen::Index s = s0;
    double discount = 1.0;
    double acc = 0.0;
    if (trace)
      (*trace)[static_cast<std::size_t>(s0)].states.push_back(s);
    for (std::int64_t t = 0; t < config.n; ++t) {
      const auto st = sampler.step(s, r);
      acc += discount * mdp.rewards()(s, st.action);
      discount *= beta;
      if (trace) {
        (*trace)[static_cast<std::size_t>(s0)].actions.push_back(st.action);
        (*trace)[static_cast<std::size_t>(s0)].states.push_back(st.next_state);
      }
      s = st.next_state;
    }
    out[s0] = acc + discount * V[s];
  }
  return out;
}

Eigen::VectorXd qlearning_sample(const QLearningConfig &config, const TrajectorySampler &sampler,
                                 const Eigen::VectorXd &q, const StreamRng &rng) {
  const Mdp &mdp = config.mdp;
  const Eigen::Index S = mdp.n_states();
  const Eigen::Index A = mdp.n_actions();
  if (q.size() != S * A)
    throw DimensionError("qlearning_sample: Q has the wrong length");
  Eigen::VectorXd vmax(S);
  for (Eigen::Index s = 0; s < S; ++s)
    vmax[s] = q.segment(s * A, A).maxCoeff();
  Eigen::VectorXd out(S * A);
  for (Eigen::Index s = 0; s < S; ++s) {
    StreamRng r = rng.split(static_cast<std::uint64_t>(s));
    for (Eigen::Index a = 0; a < A; ++a) {
      const Eigen::Index next = sampler.successor(s, a, r);
      out[s * A + a] = mdp.rewards()(s, a) + mdp.beta() * vmax[next];
    }
  }
  return out;
}

Eigen::VectorXd vtrace_sample(const VtraceConfig &config, const Eigen::VectorXd &V, const StreamRng &rng) {
  return vtrace_sample(config, TrajectorySampler(config.mdp, config.behaviour), V, rng);
}

Eigen::VectorXd tdn_sample(const TdnConfig &config, const Eigen::VectorXd &V, const StreamRng &rng) {
  return tdn_sample(config, TrajectorySampler(config.mdp, config.policy), V, rng);
}

Eigen::VectorXd qlearning_sample(const QLearningConfig &config, const Eigen::VectorXd &q, const StreamRng &rng) {
  return qlearning_sample(config, TrajectorySampler(config.mdp, Policy::uniform(config.mdp.n_states(),
                                                                                config.mdp.n_actions())),
                          q, rng);
}

AlgorithmModel vtrace_model(const VtraceConfig &config) {
  validate(config.params);
  check_coverage(config.target, config.behaviour);
  auto cfg = std::make_shared<const VtraceConfig>(config);
  auto sampler = std::make_shared<const TrajectorySampler>(cfg->mdp, cfg->behaviour);
  const double A = vtrace_noise_constant(cfg->params, cfg->mdp.beta());

  AlgorithmModel m;
  m.x_star = value_of_policy(cfg->mdp, clipped_policy(cfg->target, cfg->behaviour, cfg->params.rho_bar));
  m.op.apply = [cfg](const Eigen::VectorXd &V) {
    return vtrace_operator(cfg->mdp, cfg->target, cfg->behaviour, cfg->params, V);
  };
  m.op.contraction_norm = Norm<double>::linf();
  m.op.gamma = vtrace_contraction_factor(cfg->target, cfg->behaviour, cfg->params, cfg->mdp.beta());
  m.op.fixed_point = m.x_star;
  m.oracle.sample = [cfg, sampler](const Eigen::VectorXd &V, StreamRng &rng) {
    return vtrace_sample(*cfg, *sampler, V, rng);
  };
  m.oracle.mean = m.op.apply;
  m.oracle.noise_model = {A, A, Norm<double>::linf()};
  return m;
}

AlgorithmModel tdn_model(const TdnConfig &config) {
  if (config.n < 1)
    throw PreconditionError("TD(n): n must be at least 1");
  auto cfg = std::make_shared<const TdnConfig>(config);
  auto sampler = std::make_shared<const TrajectorySampler>(cfg->mdp, cfg->policy);
  const double beta = cfg->mdp.beta();
  const double bn = std::pow(beta, static_cast<double>(cfg->n));
  const Norm<double> lam = Norm<double>::weighted_l2(stationary_distribution(cfg->mdp, cfg->policy));

  AlgorithmModel m;
  m.x_star = value_of_policy(cfg->mdp, cfg->policy);
  m.op.apply = [cfg](const Eigen::VectorXd &V) { return tdn_operator(cfg->mdp, cfg->policy, cfg->n, V); };
  m.op.contraction_norm = lam;
  m.op.gamma = bn;
  m.op.fixed_point = m.x_star;
  m.oracle.sample = [cfg, sampler](const Eigen::VectorXd &V, StreamRng &rng) {
    return tdn_sample(*cfg, *sampler, V, rng);
  };
  m.oracle.mean = m.op.apply;
  m.oracle.noise_model = {2.0 * (1.0 - bn) * (1.0 - bn) / ((1.0 - beta) * (1.0 - beta)), 2.0 * bn * bn, lam};
  return m;
}

AlgorithmModel qlearning_model(const QLearningConfig &config) {
  auto cfg = std::make_shared<const QLearningConfig>(config);
  const Eigen::Index S = cfg->mdp.n_states();
  const Eigen::Index A = cfg->mdp.n_actions();
  auto sampler = std::make_shared<const TrajectorySampler>(cfg->mdp, Policy::uniform(S, A));

  AlgorithmModel m;
  m.x_star = flatten_q(optimal_q(cfg->mdp));
  m.op.apply = [cfg, S, A](const Eigen::VectorXd &q) {
    return flatten_q(bellman_optimality(cfg->mdp, unflatten_q(q, S, A)));
  };
  m.op.contraction_norm = Norm<double>::linf();
  m.op.gamma = cfg->mdp.beta();
  m.op.fixed_point = m.x_star;
  m.oracle.sample = [cfg, sampler](const Eigen::VectorXd &q, StreamRng &rng) {
    return qlearning_sample(*cfg, *sampler, q, rng);
  };
  m.oracle.mean = m.op.apply;
  m.oracle.noise_model = {8.0, 8.0, Norm<double>::linf()};
  return m;
}

AlgorithmRun run_model(const AlgorithmModel &model, const Norm<double> &error_norm, const StepFn &schedule,
                       std::int64_t k_max, std::size_t paths, std::uint64_t seed, const Eigen::VectorXd &x0_in,
                       unsigned threads, bool keep_iterates) {
  if (paths == 0)
    throw PreconditionError("paths must be positive");
  const Eigen::VectorXd x0 = x0_in.size() == 0 ? Eigen::VectorXd::Zero(model.x_star.size()) : x0_in;
  if (x0.size() != model.x_star.size())
    throw DimensionError("initial iterate has the wrong length");
  RecordOptions opt;
  opt.x_star = model.x_star;
  opt.error_norm = error_norm;
  opt.record_iterates = keep_iterates;
  AlgorithmRun out;
  out.paths = run_paths(
      paths, StreamRng(seed), [&](const StreamRng &s) { return run_sa(model.oracle, x0, schedule, k_max, s, opt); },
      threads);
  out.error = aggregate(out.paths, &RunRecord::error_sq);
  out.x_star = model.x_star;
  const double e0 = eval(error_norm, Eigen::VectorXd(x0 - model.x_star));
  out.initial_err_sq = e0 * e0;
  out.x_star_norm = eval(error_norm, model.x_star);
  return out;
}

AlgorithmRun run_vtrace(const VtraceConfig &config, const StepFn &schedule, std::int64_t k_max, std::size_t paths,
                        std::uint64_t seed, const Eigen::VectorXd &x0, unsigned threads) {
  const AlgorithmModel m = vtrace_model(config);
  return run_model(m, Norm<double>::linf(), schedule, k_max, paths, seed, x0, threads);
}

AlgorithmRun run_tdn(const TdnConfig &config, const StepFn &schedule, std::int64_t k_max, std::size_t paths,
                     std::uint64_t seed, const Eigen::VectorXd &x0, unsigned threads, bool keep_iterates) {
  const AlgorithmModel m = tdn_model(config);
  return run_model(m, m.op.contraction_norm, schedule, k_max, paths, seed, x0, threads, keep_iterates);
}

AlgorithmRun run_qlearning(const QLearningConfig &config, const StepFn &schedule, std::int64_t k_max,
                           std::size_t paths, std::uint64_t seed, const Eigen::VectorXd &x0, unsigned threads) {
  const AlgorithmModel m = qlearning_model(config);
  return run_model(m, Norm<double>::linf(), schedule, k_max, paths, seed, x0, threads);
}

} // namespace csa
