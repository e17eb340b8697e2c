#include "csa/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csa/bounds.hpp"
#include "csa/envelope.hpp"
#include "csa/error.hpp"
#include "csa/io.hpp"
#include "csa/mdp.hpp"
#include "csa/rl_algorithms.hpp"
#include "csa/sa_engine.hpp"

namespace csa::harness {

namespace {

std::string fmt(double v) { return format_double(v); }

PropertyResult make(const std::string &suite, const std::string &prop, bool pass, const std::string &detail) {
  return {suite, prop, pass, detail};
}

double uniform_in(StreamRng &rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

Eigen::Index index_in(StreamRng &rng, Eigen::Index lo, Eigen::Index hi) {
  return lo + std::min<Eigen::Index>(hi - lo, static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(hi - lo + 1)));
}

// Random (MDP, pi, pi') on a small state space.
struct RandomInstance {
  Mdp mdp;
  Policy pi;
  Policy pi_prime;
};

RandomInstance random_instance(StreamRng rng) {
  const Eigen::Index S = index_in(rng, 2, 8);
  const Eigen::Index A = index_in(rng, 2, 4);
  const double beta = uniform_in(rng, 0.5, 0.95);
  const std::uint64_t s0 = rng();
  return {random_mdp(S, A, beta, s0), random_policy(S, A, s0 + 1), random_policy(S, A, s0 + 2)};
}

constexpr std::uint64_t kMdpSeed = 7;

} // namespace

VerifyOptions VerifyOptions::quick() {
  VerifyOptions o;
  o.sandwich_trials = 100;
  o.drift_points = 5;
  o.drift_samples = 2000;
  o.contraction_pairs = 100;
  o.fixed_point_draws = 5;
  o.noise_points = 3;
  o.noise_samples = 2000;
  o.lipschitz_pairs = 100;
  o.tightness_dims = {2, 8, 32, 128};
  o.tightness_k = 200;
  o.tightness_paths = 200;
  return o;
}

const std::vector<std::string> &suite_names() {
  static const std::vector<std::string> names = {"sandwich", "drift", "contraction", "noise", "lipschitz", "tightness"};
  return names;
}

std::vector<PropertyResult> verify_sandwich(const VerifyOptions &opt) {
  const StreamRng root = StreamRng(opt.seed).split(1);
  std::int64_t lower_fail = 0, upper_fail = 0;
  for (std::int64_t t = 0; t < opt.sandwich_trials; ++t) {
    StreamRng rng = root.split(static_cast<std::uint64_t>(t));
    const Eigen::Index d = index_in(rng, 1, opt.sandwich_max_dim);
    const double choice = rng.uniform();
    Norm<double> s = Norm<double>::lp(2.0);
    if (d >= 2 && choice < 0.25)
      s = Norm<double>::lp_log_dim(std::max<Eigen::Index>(d, 2));
    else
      s = Norm<double>::lp(uniform_in(rng, 2.0, 10.0));
    const double mu = std::exp(uniform_in(rng, std::log(0.01), std::log(10.0)));
    const Eigen::VectorXd x = std::exp(uniform_in(rng, -3.0, 3.0)) * rng.normal_vector(d);
    const SandwichVerdict v = sandwich_check(EnvelopeSpec<double>(Norm<double>::linf(), s, mu), x);
    lower_fail += !v.lower_ok;
    upper_fail += !v.upper_ok;
  }
  // Generic solver path: c = l_p, s = l_2.
  std::int64_t generic_fail = 0;
  const std::int64_t generic_trials = std::max<std::int64_t>(1, opt.sandwich_trials / 10);
  for (std::int64_t t = 0; t < generic_trials; ++t) {
    StreamRng rng = root.split(1000000 + static_cast<std::uint64_t>(t));
    const Eigen::Index d = index_in(rng, 1, opt.sandwich_max_dim);
    const double mu = std::exp(uniform_in(rng, std::log(0.05), std::log(5.0)));
    const Eigen::VectorXd x = rng.normal_vector(d);
    const SandwichVerdict v =
        sandwich_check(EnvelopeSpec<double>(Norm<double>::lp(uniform_in(rng, 2.5, 6.0)), Norm<double>::lp(2.0), mu), x);
    generic_fail += !(v.lower_ok && v.upper_ok);
  }
  const std::string n = std::to_string(opt.sandwich_trials);
  return {
      make("sandwich", "lower (1+mu/u_cs^2) M <= f, c=linf s=lp", lower_fail == 0,
           std::to_string(lower_fail) + "/" + n + " failures"),
      make("sandwich", "upper f <= (1+mu/l_cs^2) M, c=linf s=lp", upper_fail == 0,
           std::to_string(upper_fail) + "/" + n + " failures"),
      make("sandwich", "both sides, c=lp s=l2 (proximal gradient)", generic_fail == 0,
           std::to_string(generic_fail) + "/" + std::to_string(generic_trials) + " failures"),
  };
}

std::vector<PropertyResult> verify_drift_suite(const VerifyOptions &opt) {
  const Mdp mdp = random_mdp(5, 3, 0.9, kMdpSeed);
  const AlgorithmModel m = qlearning_model({mdp});
  const Eigen::Index d = m.x_star.size();
  const Corollary3Constants c3 = corollary3_constants(mdp.beta(), d, m.oracle.noise_model.B);
  const AlphaConstants &a = c3.alphas;
  const EnvelopeSpec<double> spec(Norm<double>::linf(), Norm<double>::lp(c3.p), a.mu);
  const double eps = a.alpha2 / (2.0 * a.alpha3);
  const StreamRng root = StreamRng(opt.seed).split(2);
  const double span = 1.0 / (1.0 - mdp.beta());
  std::int64_t fails = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < opt.drift_points; ++i) {
    StreamRng rng = root.split(2 * static_cast<std::uint64_t>(i));
    Eigen::VectorXd q(d);
    for (Eigen::Index j = 0; j < d; ++j)
      q[j] = uniform_in(rng, -span, 2.0 * span);
    const DriftEstimate e =
        verify_drift(spec, m.oracle, a, q, m.x_star, eps, opt.drift_samples, root.split(2 * i + 1));
    const double slack = e.rhs + 3.0 * e.lhs_stderr - e.lhs;
    worst = std::min(worst, slack / std::max(e.rhs, 1e-300));
    fails += !(e.lhs <= e.rhs + 3.0 * e.lhs_stderr);
  }
  return {make("drift", "E[M(x_{k+1}-x*)] <= one-step bound + 3 SE (Q-learning, eps = alpha2/(2 alpha3))", fails == 0,
               std::to_string(fails) + "/" + std::to_string(opt.drift_points) +
                   " failures, min relative slack " + fmt(worst) + ", eps " + fmt(eps))};
}

std::vector<PropertyResult> verify_contraction(const VerifyOptions &opt) {
  std::vector<PropertyResult> out;
  const StreamRng root = StreamRng(opt.seed).split(3);
  const Mdp mdp = random_mdp(10, 3, 0.9, kMdpSeed + 1);
  const Policy pi = random_policy(10, 3, kMdpSeed + 2);
  const Policy mu = random_policy(10, 3, kMdpSeed + 3);

  for (std::int64_t n : {1, 2, 3, 5}) {
    const AlgorithmModel m = tdn_model({mdp, pi, n});
    const ContractionReport r = check_contraction(m.op, 10, opt.contraction_pairs, root.split(10 + n));
    out.push_back(make("contraction", "TD(" + std::to_string(n) + ") beta^n-contraction in the Lambda norm",
                       r.violations == 0,
                       std::to_string(r.violations) + " violations, max ratio " + fmt(r.max_ratio) + " vs beta^n " +
                           fmt(m.op.gamma)));
    // Shifting V by a constant is scaled by exactly beta^n, so the factor is attained.
    StreamRng rng = root.split(50 + static_cast<std::uint64_t>(n));
    const Eigen::VectorXd x = rng.normal_vector(10);
    const Eigen::VectorXd y = x + Eigen::VectorXd::Constant(10, 3.0);
    const double ratio = eval(m.op.contraction_norm, Eigen::VectorXd(m.op.apply(y) - m.op.apply(x))) /
                         eval(m.op.contraction_norm, Eigen::VectorXd(y - x));
    out.push_back(make("contraction", "TD(" + std::to_string(n) + ") factor beta^n is attained on constant shifts",
                       std::abs(ratio - m.op.gamma) <= 1e-12, "ratio " + fmt(ratio)));
  }

  {
    std::int64_t violations = 0;
    double worst = 0.0;
    for (std::int64_t t = 0; t < 4; ++t) {
      StreamRng rng = root.split(100 + static_cast<std::uint64_t>(t));
      const double rho_bar = uniform_in(rng, 0.5, 3.0);
      const VtraceParams p{uniform_in(rng, 0.3, rho_bar), rho_bar, index_in(rng, 1, 5)};
      const AlgorithmModel m = vtrace_model({mdp, pi, mu, p});
      const ContractionReport r = check_contraction(m.op, 10, opt.contraction_pairs, rng.split(1));
      violations += r.violations;
      worst = std::max(worst, r.max_ratio / m.op.gamma);
    }
    out.push_back(make("contraction", "V-trace gamma-contraction in the sup norm", violations == 0,
                       std::to_string(violations) + " violations, max ratio/gamma " + fmt(worst)));
  }

  {
    double worst = 0.0;
    for (std::int64_t n = 1; n <= 20; ++n)
      for (double beta : {0.5, 0.9, 0.99}) {
        const double g = vtrace_contraction_factor(pi, pi, {1.0, 1.0, n}, beta);
        worst = std::max(worst, std::abs(g - std::pow(beta, static_cast<double>(n))));
      }
    out.push_back(make("contraction", "on-policy V-trace gamma equals beta^n", worst <= 1e-14,
                       "max |gamma - beta^n| = " + fmt(worst)));
  }

  {
    const AlgorithmModel m = qlearning_model({mdp});
    const ContractionReport r = check_contraction(m.op, 30, opt.contraction_pairs, root.split(200));
    out.push_back(make("contraction", "Bellman optimality beta-contraction in the sup norm", r.violations == 0,
                       std::to_string(r.violations) + " violations, max ratio " + fmt(r.max_ratio)));
  }

  double fp_worst = 0.0, clip_worst = 0.0;
  for (std::int64_t t = 0; t < opt.fixed_point_draws; ++t) {
    StreamRng rng = root.split(300 + static_cast<std::uint64_t>(t));
    const RandomInstance inst = random_instance(rng.split(0));
    const double rho_bar = uniform_in(rng, 0.3, 3.0);
    const VtraceParams p{uniform_in(rng, 0.2, rho_bar), rho_bar, index_in(rng, 1, 6)};
    const Eigen::VectorXd v = value_of_policy(inst.mdp, clipped_policy(inst.pi, inst.pi_prime, p.rho_bar));
    const Eigen::VectorXd tv = vtrace_operator(inst.mdp, inst.pi, inst.pi_prime, p, v);
    fp_worst = std::max(fp_worst, (tv - v).cwiseAbs().maxCoeff());

    const double rmax = rho_max(inst.pi, inst.pi_prime);
    const Eigen::VectorXd vc = value_of_policy(inst.mdp, clipped_policy(inst.pi, inst.pi_prime, rmax * 1.5));
    clip_worst = std::max(clip_worst, (vc - value_of_policy(inst.mdp, inst.pi)).cwiseAbs().maxCoeff());
  }
  out.push_back(make("contraction", "V-trace fixed point is V of the clipped policy", fp_worst < 1e-10,
                     "max ||T V - V||_inf = " + fmt(fp_worst)));
  out.push_back(make("contraction", "rho_bar >= rho_max leaves V_pi unchanged", clip_worst < 1e-10,
                     "max deviation " + fmt(clip_worst)));
  return out;
}

std::vector<PropertyResult> verify_noise(const VerifyOptions &opt) {
  const Mdp mdp = random_mdp(10, 3, 0.9, kMdpSeed + 1);
  const Policy pi = random_policy(10, 3, kMdpSeed + 2);
  const Policy mu = random_policy(10, 3, kMdpSeed + 3);
  std::vector<std::pair<std::string, AlgorithmModel>> models;
  models.emplace_back("Q-learning", qlearning_model({mdp}));
  models.emplace_back("TD(1)", tdn_model({mdp, pi, 1}));
  models.emplace_back("TD(3)", tdn_model({mdp, pi, 3}));
  models.emplace_back("V-trace", vtrace_model({mdp, pi, mu, {1.0, 1.5, 3}}));

  std::vector<PropertyResult> out;
  const StreamRng root = StreamRng(opt.seed).split(4);
  const double span = 1.0 / (1.0 - mdp.beta());
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto &[label, m] = models[i];
    std::int64_t fails = 0;
    double max_z = 0.0, max_ratio = 0.0;
    for (std::int64_t t = 0; t < opt.noise_points; ++t) {
      StreamRng rng = root.split(i).split(static_cast<std::uint64_t>(2 * t));
      Eigen::VectorXd x(m.x_star.size());
      for (Eigen::Index j = 0; j < x.size(); ++j)
        x[j] = uniform_in(rng, -span, 2.0 * span);
      const NoiseReport r = check_noise(m.oracle, x, opt.noise_samples, root.split(i).split(2 * t + 1));
      fails += !r.ok;
      max_z = std::max(max_z, r.max_mean_z);
      max_ratio = std::max(max_ratio, r.second_moment / r.envelope);
    }
    out.push_back(make("noise", label + " E||w||^2 <= A + B ||x||^2 + 3 SE", fails == 0,
                       std::to_string(fails) + "/" + std::to_string(opt.noise_points) +
                           " failures, max moment/envelope " + fmt(max_ratio)));
    out.push_back(make("noise", label + " noise has zero mean", max_z < 5.0, "max |mean|/SE " + fmt(max_z)));
  }
  return out;
}

std::vector<PropertyResult> verify_lipschitz(const VerifyOptions &opt) {
  const StreamRng root = StreamRng(opt.seed).split(5);
  std::int64_t fails = 0;
  double worst = 0.0;
  for (std::int64_t t = 0; t < opt.lipschitz_pairs; ++t) {
    StreamRng rng = root.split(static_cast<std::uint64_t>(t));
    const RandomInstance inst = random_instance(rng.split(0));
    // Mix towards pi' so both near and far pairs are covered.
    const double w = std::pow(rng.uniform(), 3.0);
    const Policy pi2((1.0 - w) * inst.pi.probs() + w * inst.pi_prime.probs());
    const LipschitzCheck c = policy_lipschitz_check(inst.mdp, inst.pi, pi2);
    fails += !c.ok;
    if (c.rhs > 0.0)
      worst = std::max(worst, c.lhs / c.rhs);
  }
  return {make("lipschitz", "||V_pi1 - V_pi2||_inf <= 2/(1-beta)^2 ||pi1 - pi2||_inf", fails == 0,
               std::to_string(fails) + "/" + std::to_string(opt.lipschitz_pairs) + " failures, max lhs/rhs " +
                   fmt(worst))};
}

std::vector<PropertyResult> verify_tightness(const VerifyOptions &opt) {
  const TightnessTable t = gaussian_average_experiment(opt.tightness_dims, opt.tightness_k, opt.tightness_paths,
                                                       StreamRng(opt.seed).split(6)(), opt.threads);
  return {
      make("tightness", "k E||x_k||_inf^2 affine in ln d with R^2 > 0.95", t.fit.r_squared > 0.95,
           "R^2 " + fmt(t.fit.r_squared) + ", slope " + fmt(t.fit.slope) + ", intercept " + fmt(t.fit.intercept)),
      make("tightness", "fitted slope in ln d is positive", t.fit.slope > 0.0, "slope " + fmt(t.fit.slope)),
  };
}

std::vector<PropertyResult> run_suite(const std::string &name, const VerifyOptions &opt) {
  if (name == "all") {
    std::vector<PropertyResult> all;
    for (const auto &n : suite_names()) {
      auto r = run_suite(n, opt);
      all.insert(all.end(), r.begin(), r.end());
    }
    return all;
  }
  if (name == "sandwich")
    return verify_sandwich(opt);
  if (name == "drift")
    return verify_drift_suite(opt);
  if (name == "contraction")
    return verify_contraction(opt);
  if (name == "noise")
    return verify_noise(opt);
  if (name == "lipschitz")
    return verify_lipschitz(opt);
  if (name == "tightness")
    return verify_tightness(opt);
  throw ConfigError("unknown verify suite '" + name + "'");
}

std::string format_report(const std::vector<PropertyResult> &results) {
  std::ostringstream os;
  for (const auto &r : results)
    os << (r.pass ? "PASS" : "FAIL") << "  " << r.suite << ": " << r.property << " [" << r.detail << "]\n";
  return os.str();
}

nlohmann::json report_json(const std::vector<PropertyResult> &results) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto &r : results)
    j.push_back({{"suite", r.suite}, {"property", r.property}, {"pass", r.pass}, {"detail", r.detail}});
  return j;
}

bool all_passed(const std::vector<PropertyResult> &results) {
  return std::all_of(results.begin(), results.end(), [](const PropertyResult &r) { return r.pass; });
}

} // namespace csa::harness
