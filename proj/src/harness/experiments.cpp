#include "csa/harness/experiments.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "csa/bounds.hpp"
#include "csa/error.hpp"
#include "csa/io.hpp"
#include "csa/mdp_io.hpp"
#include "csa/rl_algorithms.hpp"

namespace csa::harness {

namespace {

const IniConfig::Schema kSchema = {
    {"experiment", {"name", "kind", "seed", "paths", "k_max", "threads", "output_dir"}},
    {"mdp", {"file", "states", "actions", "beta", "seed"}},
    {"policy", {"kind", "seed"}},
    {"behaviour", {"kind", "seed"}},
    {"vtrace", {"c_bar", "rho_bar", "n"}},
    {"tdn", {"n", "n_list"}},
    {"schedule", {"kind", "eps", "xi", "K", "bound"}},
    {"init", {"x0"}},
    {"averaged", {"regime", "eps", "sigma", "angle", "x0"}},
    {"tightness", {"dims"}},
};

std::vector<std::int64_t> to_ints(const std::vector<double> &v, const std::string &what) {
  std::vector<std::int64_t> out;
  for (double x : v) {
    if (x != std::floor(x) || x < 1)
      throw ConfigError(what + ": expected positive integers");
    out.push_back(static_cast<std::int64_t>(x));
  }
  return out;
}

// What the bound column of a single-curve experiment holds.
struct BoundPlan {
  std::string name = "none";
  std::function<std::optional<double>(std::int64_t)> at;
};

struct SchedulePlan {
  StepFn fn;
  std::optional<StepsizeSchedule> schedule;
  std::string kind;
};

AveragedRegime parse_regime(const std::string &s) {
  if (s == "constant")
    return AveragedRegime::Constant;
  if (s == "inv_sqrt")
    return AveragedRegime::InvSqrt;
  if (s == "inv_k")
    return AveragedRegime::InvK;
  throw ConfigError("averaged regime must be constant, inv_sqrt or inv_k");
}

Eigen::VectorXd initial_iterate(const IniConfig &c, Eigen::Index dim) {
  if (!c.has("init", "x0") || c.get_string("init", "x0") == "zero")
    return Eigen::VectorXd::Zero(dim);
  const std::vector<double> v = c.get_list("init", "x0");
  if (static_cast<Eigen::Index>(v.size()) != dim)
    throw ConfigError("[init] x0 has length " + std::to_string(v.size()) + ", expected " + std::to_string(dim));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

// Alphas used by the generic Theorem 1 / Corollary 1-2 overlays.
AlphaConstants generic_alphas(const std::string &kind, const AlgorithmModel &m, std::int64_t tdn_n, double beta) {
  if (kind == "tdn")
    return theorem4_alphas(beta, tdn_n);
  return corollary3_constants(m.op.gamma, m.x_star.size(), m.oracle.noise_model.B).alphas;
}

SchedulePlan schedule_from_config(const ExperimentSpec &spec, const AlgorithmModel &m, const AlphaConstants &alphas,
                                  std::int64_t n_pairs) {
  const IniConfig &c = spec.config;
  SchedulePlan p;
  p.kind = c.get_string("schedule", "kind");
  if (p.kind == "constant") {
    p.schedule = StepsizeSchedule::constant(c.get_double("schedule", "eps"));
  } else if (p.kind == "polynomial") {
    const double eps = c.get_double("schedule", "eps");
    const double xi = c.get_double("schedule", "xi", 1.0);
    p.schedule = c.has("schedule", "K") ? StepsizeSchedule::polynomial(eps, xi, c.get_double("schedule", "K"))
                                        : build_schedule(alphas, eps, xi);
  } else if (p.kind == "theorem3") {
    if (spec.kind != "vtrace")
      throw ConfigError("schedule kind theorem3 applies to vtrace experiments only");
    p.schedule = theorem3_schedule(m.op.gamma, m.oracle.noise_model.A, m.x_star.size());
  } else if (p.kind == "theorem5b") {
    if (spec.kind != "qlearning")
      throw ConfigError("schedule kind theorem5b applies to qlearning experiments only");
    p.schedule = theorem5b_schedule(m.op.gamma, n_pairs);
  } else {
    throw ConfigError("schedule kind must be constant, polynomial, theorem3 or theorem5b");
  }
  const StepsizeSchedule s = *p.schedule;
  p.fn = [s](std::int64_t k) { return s(k); };
  return p;
}

BoundPlan plan_bound(const ExperimentSpec &spec, const AlgorithmModel &m, const AlphaConstants &alphas,
                     const SchedulePlan &sp, const AlgorithmRun &run, std::int64_t tdn_n, double beta) {
  const std::string requested = spec.config.get_string("schedule", "bound", "auto");
  const StepsizeSchedule &s = *sp.schedule;
  const double e0 = run.initial_err_sq;
  const double xs = run.x_star_norm;
  const double A = m.oracle.noise_model.A;
  const double B = m.oracle.noise_model.B;
  const std::int64_t d = m.x_star.size();
  const bool constant = s.kind() == StepsizeSchedule::Kind::Constant;

  std::vector<std::string> candidates;
  if (requested == "auto") {
    if (spec.kind == "qlearning")
      candidates = {sp.kind == "theorem5b" ? "theorem5b" : "theorem5a", "theorem1"};
    else if (spec.kind == "tdn")
      candidates = {"theorem4", "theorem1"};
    else
      candidates = {sp.kind == "theorem3" ? "theorem3" : "theorem1"};
  } else {
    candidates = {requested};
  }

  for (const std::string &name : candidates) {
    BoundPlan b;
    b.name = name;
    try {
      if (name == "none") {
        b.at = [](std::int64_t) { return std::optional<double>(); };
      } else if (name == "theorem1") {
        const auto seq = std::make_shared<std::vector<double>>(theorem1_bound(alphas, s, e0, A, B, xs, spec.k_max));
        b.at = [seq](std::int64_t k) { return std::optional<double>((*seq)[static_cast<std::size_t>(k)]); };
      } else if (name == "corollary1") {
        if (!constant)
          throw PreconditionError("corollary1 needs a constant stepsize");
        corollary1_bound(alphas, s.eps(), e0, A, B, xs, 0);
        b.at = [=](std::int64_t k) { return std::optional<double>(corollary1_bound(alphas, s.eps(), e0, A, B, xs, k)); };
      } else if (name == "corollary2") {
        if (constant)
          throw PreconditionError("corollary2 needs eps/(k+K)^xi stepsizes");
        if (s(0) > alphas.alpha2 / alphas.alpha3 * (1.0 + 1e-12))
          throw PreconditionError("corollary2 requires eps_0 <= alpha2/alpha3");
        b.at = [=](std::int64_t k) {
          return std::optional<double>(corollary2_bound_with_offset(alphas, s.eps(), s.xi(), s.K(), e0, A, B, xs, k));
        };
      } else if (name == "theorem3") {
        if (spec.kind != "vtrace" || sp.kind != "theorem3")
          throw PreconditionError("theorem3 needs a vtrace run with the theorem3 schedule");
        b.at = [=](std::int64_t k) { return std::optional<double>(theorem3_bound(m.op.gamma, A, d, e0, xs, k)); };
      } else if (name == "theorem4") {
        if (spec.kind != "tdn" || !constant)
          throw PreconditionError("theorem4 needs a tdn run with constant stepsize");
        theorem4_bound(beta, tdn_n, s.eps(), e0, xs, 0);
        b.at = [=](std::int64_t k) { return std::optional<double>(theorem4_bound(beta, tdn_n, s.eps(), e0, xs, k)); };
      } else if (name == "theorem5a") {
        if (spec.kind != "qlearning" || !constant)
          throw PreconditionError("theorem5a needs a qlearning run with constant stepsize");
        theorem5a_bound(beta, d, s.eps(), e0, xs, 0);
        b.at = [=](std::int64_t k) { return std::optional<double>(theorem5a_bound(beta, d, s.eps(), e0, xs, k)); };
      } else if (name == "theorem5b") {
        if (spec.kind != "qlearning" || sp.kind != "theorem5b")
          throw PreconditionError("theorem5b needs a qlearning run with the theorem5b schedule");
        b.at = [=](std::int64_t k) { return std::optional<double>(theorem5b_bound(beta, d, e0, xs, k)); };
      } else {
        throw ConfigError("unknown bound '" + name + "'");
      }
      return b;
    } catch (const PreconditionError &) {
      if (requested != "auto")
        throw;
    }
  }
  BoundPlan none;
  none.at = [](std::int64_t) { return std::optional<double>(); };
  return none;
}

CurveTable table_from_stats(const std::string &label, const CurveStats &c,
                            const std::function<std::optional<double>(std::int64_t)> &bound) {
  CurveTable t;
  t.label = label;
  for (std::size_t i = 0; i < c.k.size(); ++i)
    t.add_row(c.k[i], c.mean[i], c.stderr_[i], bound ? bound(c.k[i]) : std::nullopt);
  return t;
}

ExperimentOutput run_algorithm(const ExperimentSpec &spec) {
  const IniConfig &c = spec.config;
  const Mdp mdp = mdp_from_config(c);
  const Eigen::Index S = mdp.n_states();
  const Eigen::Index A = mdp.n_actions();

  AlgorithmModel model;
  std::int64_t tdn_n = 1;
  if (spec.kind == "qlearning") {
    model = qlearning_model({mdp});
  } else if (spec.kind == "tdn") {
    tdn_n = c.get_int("tdn", "n");
    model = tdn_model({mdp, policy_from_config(c, "policy", S, A), tdn_n});
  } else {
    VtraceParams params{c.get_double("vtrace", "c_bar"), c.get_double("vtrace", "rho_bar"), c.get_int("vtrace", "n")};
    model = vtrace_model({mdp, policy_from_config(c, "policy", S, A), policy_from_config(c, "behaviour", S, A), params});
  }
  const AlphaConstants alphas = generic_alphas(spec.kind, model, tdn_n, mdp.beta());
  const SchedulePlan sp = schedule_from_config(spec, model, alphas, S * A);
  const Eigen::VectorXd x0 = initial_iterate(c, model.x_star.size());
  // Check the requested bound's preconditions before spending time on paths.
  plan_bound(spec, model, alphas, sp, AlgorithmRun{}, tdn_n, mdp.beta());
  const AlgorithmRun run =
      run_model(model, model.op.contraction_norm, sp.fn, spec.k_max, spec.paths, spec.seed, x0, spec.threads);
  const BoundPlan bp = plan_bound(spec, model, alphas, sp, run, tdn_n, mdp.beta());

  ExperimentOutput out;
  out.tables.push_back(table_from_stats(spec.name, run.error, bp.at));
  out.summary["bound"] = bp.name;
  out.summary["gamma"] = model.op.gamma;
  out.summary["noise_A"] = model.oracle.noise_model.A;
  out.summary["noise_B"] = model.oracle.noise_model.B;
  out.summary["initial_error_sq"] = run.initial_err_sq;
  out.summary["fixed_point_norm"] = run.x_star_norm;
  out.summary["final_mean"] = run.error.mean.back();
  return out;
}

ExperimentOutput run_fig1_experiment(const ExperimentSpec &spec) {
  const IniConfig &c = spec.config;
  const Mdp mdp = mdp_from_config(c);
  const Policy pi = policy_from_config(c, "policy", mdp.n_states(), mdp.n_actions());
  const std::vector<std::int64_t> n_list = to_ints(c.get_list("tdn", "n_list"), "[tdn] n_list");
  if (c.get_string("schedule", "kind") != "constant")
    throw ConfigError("fig1 uses a constant stepsize");
  const Fig1Result r =
      run_fig1(mdp, pi, n_list, c.get_double("schedule", "eps"), spec.k_max, spec.paths, spec.seed, spec.threads);
  ExperimentOutput out;
  out.summary["metric"] = "squared l2 distance to V_pi";
  out.summary["early_k"] = r.early_k;
  out.summary["decay_fraction"] = r.decay_fraction;
  for (const auto &fc : r.cases) {
    out.tables.push_back(table_from_stats("n" + std::to_string(fc.n), fc.l2, {}));
    nlohmann::json j;
    j["n"] = fc.n;
    j["early_l2"] = fc.early_l2;
    j["decay_time"] = fc.decay_time;
    j["asymptotic_l2"] = fc.asymptotic_l2;
    j["asymptotic_linf"] = fc.asymptotic_linf;
    out.summary["cases"].push_back(j);
  }
  return out;
}

ExperimentOutput run_tightness_experiment(const ExperimentSpec &spec) {
  const std::vector<std::int64_t> dims =
      spec.config.has("tightness", "dims") ? to_ints(spec.config.get_list("tightness", "dims"), "[tightness] dims")
                                           : std::vector<std::int64_t>{2, 8, 32, 128, 512};
  const TightnessTable t = gaussian_average_experiment(dims, spec.k_max, spec.paths, spec.seed, spec.threads);
  ExperimentOutput out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    CurveTable tab;
    tab.label = "d" + std::to_string(dims[i]);
    for (std::size_t j = 0; j < t.k.size(); ++j)
      tab.add_row(t.k[j], t.mean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                  t.stderr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), std::nullopt);
    out.tables.push_back(std::move(tab));
  }
  out.summary["fit_target"] = "k_max * E||x_kmax||_inf^2 against ln d";
  out.summary["slope"] = t.fit.slope;
  out.summary["intercept"] = t.fit.intercept;
  out.summary["r_squared"] = t.fit.r_squared;
  return out;
}

ExperimentOutput run_averaged_experiment(const ExperimentSpec &spec) {
  const IniConfig &c = spec.config;
  const AveragedRegime regime = parse_regime(c.get_string("averaged", "regime"));
  const double eps = c.get_double("averaged", "eps");
  const double sigma = c.get_double("averaged", "sigma", 0.0);
  const double angle = c.get_double("averaged", "angle", std::numbers::pi / 3.0);
  Eigen::Vector2d x0(1.0, 1.0);
  if (c.has("averaged", "x0")) {
    const std::vector<double> v = c.get_list("averaged", "x0");
    if (v.size() != 2)
      throw ConfigError("[averaged] x0 must have two entries");
    x0 << v[0], v[1];
  }
  if (!(eps > 0.0 && eps < 1.0))
    throw PreconditionError("theorem2: eps must lie in (0, 1)");
  const NoisyOracle oracle = rotation_oracle(angle, sigma);
  const StepsizeSchedule s = averaged_schedule(regime, eps);
  const StepFn fn = [s](std::int64_t k) { return s(k); };
  const Eigen::VectorXd start = x0;
  const auto recs = run_paths(
      spec.paths, StreamRng(spec.seed),
      [&](const StreamRng &st) { return run_averaged(oracle, start, fn, spec.k_max, st); }, spec.threads);
  const CurveStats best = running_min_of_means(aggregate(recs, &RunRecord::residual_sq));
  const double D = x0.norm();
  const double A = oracle.noise_model.A;
  ExperimentOutput out;
  out.tables.push_back(table_from_stats(spec.name, best, [&](std::int64_t k) -> std::optional<double> {
    if (regime != AveragedRegime::Constant && k < 1)
      return std::nullopt;
    return theorem2_bound(D, A, eps, regime, k);
  }));
  out.summary["metric"] = "min over i <= k of E||H(x_i) - x_i||_2^2";
  out.summary["D"] = D;
  out.summary["noise_A"] = A;
  return out;
}

} // namespace

Mdp mdp_from_config(const IniConfig &c) {
  if (c.has("mdp", "file")) {
    for (const char *k : {"states", "actions", "beta", "seed"})
      if (c.has("mdp", k))
        throw ConfigError(std::string("[mdp] file cannot be combined with ") + k);
    return load_mdp(c.get_string("mdp", "file"));
  }
  const std::int64_t S = c.get_int("mdp", "states");
  const std::int64_t A = c.get_int("mdp", "actions");
  if (S < 1 || A < 1)
    throw ConfigError("[mdp] states and actions must be positive");
  return random_mdp(S, A, c.get_double("mdp", "beta"), static_cast<std::uint64_t>(c.get_int("mdp", "seed")));
}

Policy policy_from_config(const IniConfig &c, const std::string &section, Eigen::Index n_states,
                          Eigen::Index n_actions) {
  const std::string kind = c.get_string(section, "kind", "uniform");
  if (kind == "uniform") {
    if (c.has(section, "seed"))
      throw ConfigError("[" + section + "] seed is only used with kind = random");
    return Policy::uniform(n_states, n_actions);
  }
  if (kind == "random")
    return random_policy(n_states, n_actions, static_cast<std::uint64_t>(c.get_int(section, "seed")));
  throw ConfigError("[" + section + "] kind must be uniform or random");
}

ExperimentSpec load_experiment(const IniConfig &config, const std::string &output_dir_override) {
  config.check_schema(kSchema);
  ExperimentSpec s;
  s.config = config;
  s.name = config.get_string("experiment", "name");
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos)
    throw ConfigError("[experiment] name must be a plain file stem");
  s.kind = config.get_string("experiment", "kind");
  const std::int64_t paths = config.get_int("experiment", "paths");
  if (paths <= 0)
    throw ConfigError("[experiment] paths must be positive");
  s.paths = static_cast<std::size_t>(paths);
  s.k_max = config.get_int("experiment", "k_max");
  if (s.k_max < 0)
    throw ConfigError("[experiment] k_max must be nonnegative");
  s.seed = static_cast<std::uint64_t>(config.get_int("experiment", "seed", 1));
  const std::int64_t threads = config.get_int("experiment", "threads", 0);
  if (threads < 0)
    throw ConfigError("[experiment] threads must be nonnegative");
  s.threads = static_cast<unsigned>(threads);
  s.output_dir = resolve_output_dir(!output_dir_override.empty() ? output_dir_override
                                                                 : config.get_string("experiment", "output_dir", ""));

  static const std::set<std::string> kinds = {"qlearning", "tdn", "vtrace", "fig1", "tightness", "averaged"};
  if (!kinds.count(s.kind))
    throw ConfigError("[experiment] kind must be one of qlearning, tdn, vtrace, fig1, tightness, averaged");
  if (s.kind == "qlearning" || s.kind == "tdn" || s.kind == "vtrace" || s.kind == "fig1") {
    if (!config.has_section("mdp"))
      throw ConfigError("missing [mdp] section");
    if (!config.has("schedule", "kind"))
      throw ConfigError("missing [schedule] kind");
  }
  if (s.kind == "tdn" && !config.has("tdn", "n"))
    throw ConfigError("tdn experiments need [tdn] n");
  if (s.kind == "fig1" && !config.has("tdn", "n_list"))
    throw ConfigError("fig1 experiments need [tdn] n_list");
  if (s.kind == "vtrace")
    for (const char *k : {"c_bar", "rho_bar", "n"})
      if (!config.has("vtrace", k))
        throw ConfigError(std::string("vtrace experiments need [vtrace] ") + k);
  if (s.kind == "averaged")
    for (const char *k : {"regime", "eps"})
      if (!config.has("averaged", k))
        throw ConfigError(std::string("averaged experiments need [averaged] ") + k);
  if (s.kind == "tightness" && s.k_max < 1)
    throw ConfigError("tightness experiments need k_max >= 1");
  return s;
}

ExperimentOutput compute_experiment(const ExperimentSpec &spec) {
  if (spec.kind == "fig1")
    return run_fig1_experiment(spec);
  if (spec.kind == "tightness")
    return run_tightness_experiment(spec);
  if (spec.kind == "averaged")
    return run_averaged_experiment(spec);
  return run_algorithm(spec);
}

std::vector<std::filesystem::path> write_experiment(const ExperimentSpec &spec, const ExperimentOutput &out) {
  std::filesystem::create_directories(spec.output_dir);
  std::vector<std::filesystem::path> files;
  // render everything first so a failure leaves no partial output
  std::vector<std::pair<std::filesystem::path, std::string>> pending;
  if (out.tables.size() == 1) {
    pending.emplace_back(spec.output_dir / (spec.name + ".csv"), to_csv(out.tables.front()));
  } else {
    for (const auto &t : out.tables)
      pending.emplace_back(spec.output_dir / (spec.name + "-" + t.label + ".csv"), to_csv(t));
  }
  pending.emplace_back(spec.output_dir / (spec.name + ".svg"), render_svg(spec.name, out.tables));
  nlohmann::json meta;
  meta["name"] = spec.name;
  meta["kind"] = spec.kind;
  meta["spec_sha256"] = sha256_hex(spec.config.text());
  meta["seed"] = spec.seed;
  meta["paths"] = spec.paths;
  meta["k_max"] = spec.k_max;
  meta["summary"] = out.summary;
  for (const auto &p : pending)
    meta["files"].push_back(p.first.filename().string());
  pending.emplace_back(spec.output_dir / (spec.name + ".meta.json"), meta.dump(2) + "\n");
  for (const auto &[path, body] : pending) {
    write_file_atomic(path, body);
    files.push_back(path);
  }
  return files;
}

double decay_time(const CurveStats &c, double fraction) {
  if (c.mean.empty() || !(fraction > 0.0 && fraction < 1.0))
    throw PreconditionError("decay_time: needs a nonempty curve and a fraction in (0, 1)");
  const double target = fraction * c.mean.front();
  for (std::size_t i = 1; i < c.mean.size(); ++i) {
    if (c.mean[i] > target)
      continue;
    const double a = std::log(c.mean[i - 1]), b = std::log(c.mean[i]), t = std::log(target);
    const double w = a > b ? (a - t) / (a - b) : 1.0;
    return static_cast<double>(c.k[i - 1]) + w * static_cast<double>(c.k[i] - c.k[i - 1]);
  }
  return std::numeric_limits<double>::infinity();
}

double tail_mean(const CurveStats &c) {
  if (c.mean.empty())
    return 0.0;
  const std::size_t start = c.mean.size() - std::max<std::size_t>(1, c.mean.size() / 4);
  double s = 0.0;
  for (std::size_t i = start; i < c.mean.size(); ++i)
    s += c.mean[i];
  return s / static_cast<double>(c.mean.size() - start);
}

Fig1Result run_fig1(const Mdp &mdp, const Policy &pi, const std::vector<std::int64_t> &n_list, double eps,
                    std::int64_t k_max, std::size_t paths, std::uint64_t seed, unsigned threads,
                    std::int64_t early_k) {
  if (paths == 0)
    throw PreconditionError("fig1: paths must be positive");
  if (k_max < early_k)
    throw PreconditionError("fig1: k_max must be at least the early comparison point");
  Fig1Result r;
  r.early_k = early_k;
  const StepFn step = [eps](std::int64_t) { return eps; };
  for (std::int64_t n : n_list) {
    const AlgorithmRun run =
        run_tdn({mdp, pi, n}, step, k_max, paths, seed + static_cast<std::uint64_t>(n), {}, threads, true);
    std::vector<RunRecord> l2(run.paths.size()), linf(run.paths.size());
    for (std::size_t p = 0; p < run.paths.size(); ++p) {
      const RunRecord &rec = run.paths[p];
      l2[p].k = rec.k;
      linf[p].k = rec.k;
      for (const auto &x : rec.iterates) {
        const Eigen::VectorXd e = x - run.x_star;
        l2[p].error_sq.push_back(e.squaredNorm());
        linf[p].error_sq.push_back(e.cwiseAbs().maxCoeff() * e.cwiseAbs().maxCoeff());
      }
    }
    Fig1Case fc;
    fc.n = n;
    fc.l2 = aggregate(l2, &RunRecord::error_sq);
    fc.linf = aggregate(linf, &RunRecord::error_sq);
    for (std::size_t i = 0; i < fc.l2.k.size(); ++i)
      if (fc.l2.k[i] == early_k)
        fc.early_l2 = fc.l2.mean[i];
    fc.decay_time = decay_time(fc.l2, r.decay_fraction);
    fc.asymptotic_l2 = tail_mean(fc.l2);
    fc.asymptotic_linf = tail_mean(fc.linf);
    r.cases.push_back(std::move(fc));
  }
  return r;
}

NoisyOracle rotation_oracle(double angle, double sigma) {
  if (!(sigma >= 0.0))
    throw PreconditionError("rotation oracle: sigma must be nonnegative");
  Eigen::Matrix2d R;
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  NoisyOracle o;
  o.mean = [R](const Eigen::VectorXd &x) -> Eigen::VectorXd { return R * x; };
  o.sample = [R, sigma](const Eigen::VectorXd &x, StreamRng &rng) -> Eigen::VectorXd {
    if (sigma == 0.0)
      return R * x;
    return R * x + sigma * rng.normal_vector(2);
  };
  o.noise_model = {2.0 * sigma * sigma, 0.0, Norm<double>::lp(2.0)};
  return o;
}

} // namespace csa::harness
