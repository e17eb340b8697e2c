#include "csa/harness/commands.hpp"

#include <sstream>

#include "csa/bounds.hpp"
#include "csa/envelope.hpp"
#include "csa/error.hpp"
#include "csa/io.hpp"
#include "csa/sa_engine.hpp"

namespace csa::harness {

namespace {

const std::set<std::string> kGenericKeys = {"gamma", "mu",     "L",  "cs_lower",    "cs_upper", "es_lower", "es_upper",
                                            "A",     "B",      "e0", "x_star_norm", "eps",      "xi",       "K"};

std::set<std::string> keys_for(const std::string &theorem) {
  if (theorem == "1" || theorem == "c1" || theorem == "c2")
    return kGenericKeys;
  if (theorem == "c3")
    return {"gamma", "d", "A", "B", "e0", "x_star_norm", "eps", "xi", "K"};
  if (theorem == "2")
    return {"D", "A", "eps", "regime"};
  if (theorem == "3")
    return {"gamma", "A", "n_states", "e0", "x_star_norm"};
  if (theorem == "4")
    return {"beta", "n", "eps", "e0", "x_star_norm"};
  if (theorem == "5")
    return {"case", "beta", "n_pairs", "eps", "e0", "x_star_norm"};
  throw ConfigError("unknown theorem '" + theorem + "' (expected 1, c1, c2, c3, 2, 3, 4, 5)");
}

nlohmann::json alphas_json(const AlphaConstants &a) {
  return {{"alpha1", a.alpha1}, {"alpha2", a.alpha2}, {"alpha3", a.alpha3}, {"alpha4", a.alpha4}, {"mu", a.mu}};
}

nlohmann::json schedule_json(const StepsizeSchedule &s) {
  if (s.kind() == StepsizeSchedule::Kind::Constant)
    return {{"kind", "constant"}, {"eps", s.eps()}};
  return {{"kind", "polynomial"}, {"eps", s.eps()}, {"xi", s.xi()}, {"K", s.K()}};
}

using BoundAt = std::function<std::optional<double>(std::int64_t)>;

// Theorem 1 and Corollaries 1/2 share the same parameter handling once the
// alphas are known.
BoundAt generic_bound(const std::string &which, const AlphaConstants &a, const IniConfig &c, std::int64_t k_max,
                      nlohmann::json &info) {
  const double A = c.get_double("params", "A");
  const double B = c.get_double("params", "B", 0.0);
  const double e0 = c.get_double("params", "e0");
  const double xs = c.get_double("params", "x_star_norm", 0.0);
  const double eps = c.get_double("params", "eps");
  const double xi = c.get_double("params", "xi", which == "c1" ? 0.0 : (which == "c2" ? 1.0 : 0.0));
  info["alphas"] = alphas_json(a);
  info["eps_cap"] = a.alpha2 / a.alpha3;

  StepsizeSchedule s = StepsizeSchedule::constant(0.0);
  if (c.has("params", "K")) {
    if (xi == 0.0)
      throw ConfigError("[params] K only applies to eps/(k+K)^xi schedules");
    s = StepsizeSchedule::polynomial(eps, xi, c.get_double("params", "K"));
    if (s(0) > a.alpha2 / a.alpha3 * (1.0 + 1e-12))
      throw PreconditionError("requires eps_0 = eps/K^xi <= alpha2/alpha3");
  } else {
    s = build_schedule(a, eps, xi);
  }
  info["schedule"] = schedule_json(s);

  if (which == "c1") {
    if (xi != 0.0)
      throw ConfigError("corollary 1 uses a constant stepsize (xi = 0)");
    corollary1_bound(a, eps, e0, A, B, xs, 0);
    return [=](std::int64_t k) { return std::optional<double>(corollary1_bound(a, eps, e0, A, B, xs, k)); };
  }
  if (which == "c2") {
    if (xi == 0.0)
      throw ConfigError("corollary 2 needs xi in (0, 1]");
    info["case"] = static_cast<int>(corollary2_case(a, eps, xi));
    const double K = s.K();
    return [=](std::int64_t k) {
      return std::optional<double>(corollary2_bound_with_offset(a, eps, xi, K, e0, A, B, xs, k));
    };
  }
  auto seq = std::make_shared<std::vector<double>>(theorem1_bound(a, s, e0, A, B, xs, k_max));
  return [seq](std::int64_t k) { return std::optional<double>((*seq)[static_cast<std::size_t>(k)]); };
}

} // namespace

BoundsResult compute_bounds(const std::string &theorem, const IniConfig &c, std::int64_t k_max) {
  if (k_max < 0)
    throw ConfigError("--k-max must be nonnegative");
  c.check_schema({{"params", keys_for(theorem)}});
  BoundsResult r;
  r.info["theorem"] = theorem;
  BoundAt at;

  if (theorem == "1" || theorem == "c1" || theorem == "c2") {
    const EquivalenceConstants<double> cs{c.get_double("params", "cs_lower", 1.0), c.get_double("params", "cs_upper", 1.0)};
    const EquivalenceConstants<double> es{c.get_double("params", "es_lower", 1.0), c.get_double("params", "es_upper", 1.0)};
    const AlphaConstants a = compute_alphas(c.get_double("params", "gamma"), c.get_double("params", "mu"),
                                            c.get_double("params", "L"), cs, es, c.get_double("params", "B", 0.0));
    at = generic_bound(theorem, a, c, k_max, r.info);
  } else if (theorem == "c3") {
    const Corollary3Constants c3 = corollary3_constants(c.get_double("params", "gamma"), c.get_int("params", "d"),
                                                        c.get_double("params", "B", 0.0));
    r.info["p"] = c3.p;
    r.info["alpha1_within_three_halves"] = c3.alpha1_within_three_halves;
    const std::string which = c.get_double("params", "xi", 0.0) == 0.0 ? "c1" : "c2";
    r.info["form"] = which == "c1" ? "corollary1" : "corollary2";
    at = generic_bound(which, c3.alphas, c, k_max, r.info);
  } else if (theorem == "2") {
    const std::string name = c.get_string("params", "regime");
    AveragedRegime regime;
    if (name == "constant")
      regime = AveragedRegime::Constant;
    else if (name == "inv_sqrt")
      regime = AveragedRegime::InvSqrt;
    else if (name == "inv_k")
      regime = AveragedRegime::InvK;
    else
      throw ConfigError("[params] regime must be constant, inv_sqrt or inv_k");
    const double D = c.get_double("params", "D");
    const double A = c.get_double("params", "A");
    const double eps = c.get_double("params", "eps");
    theorem2_bound(D, A, eps, regime, 1);
    at = [=](std::int64_t k) -> std::optional<double> {
      if (k < 1 && regime != AveragedRegime::Constant)
        return std::nullopt;
      return theorem2_bound(D, A, eps, regime, k);
    };
  } else if (theorem == "3") {
    const double g = c.get_double("params", "gamma");
    const double A = c.get_double("params", "A");
    const std::int64_t S = c.get_int("params", "n_states");
    const double e0 = c.get_double("params", "e0");
    const double xs = c.get_double("params", "x_star_norm", 0.0);
    r.info["schedule"] = schedule_json(theorem3_schedule(g, A, S));
    at = [=](std::int64_t k) { return std::optional<double>(theorem3_bound(g, A, S, e0, xs, k)); };
  } else if (theorem == "4") {
    const double beta = c.get_double("params", "beta");
    const std::int64_t n = c.get_int("params", "n");
    const double eps = c.get_double("params", "eps");
    const double e0 = c.get_double("params", "e0");
    const double xs = c.get_double("params", "x_star_norm", 0.0);
    theorem4_bound(beta, n, eps, e0, xs, 0);
    r.info["eps_cap"] = theorem4_stepsize_cap(beta, n);
    at = [=](std::int64_t k) { return std::optional<double>(theorem4_bound(beta, n, eps, e0, xs, k)); };
  } else {
    const std::string which = c.get_string("params", "case");
    const double beta = c.get_double("params", "beta");
    const std::int64_t np = c.get_int("params", "n_pairs");
    const double e0 = c.get_double("params", "e0");
    const double xs = c.get_double("params", "x_star_norm", 0.0);
    if (which == "a") {
      const double eps = c.get_double("params", "eps");
      theorem5a_bound(beta, np, eps, e0, xs, 0);
      r.info["eps_cap"] = theorem5a_stepsize_cap(beta, np);
      at = [=](std::int64_t k) { return std::optional<double>(theorem5a_bound(beta, np, eps, e0, xs, k)); };
    } else if (which == "b") {
      if (c.has("params", "eps"))
        throw ConfigError("theorem 5(b) fixes its own stepsize; remove [params] eps");
      r.info["schedule"] = schedule_json(theorem5b_schedule(beta, np));
      at = [=](std::int64_t k) { return std::optional<double>(theorem5b_bound(beta, np, e0, xs, k)); };
    } else {
      throw ConfigError("[params] case must be a or b");
    }
  }

  r.table.label = "theorem " + theorem;
  for (std::int64_t k : recording_indices(k_max))
    r.table.add_row(k, std::nullopt, std::nullopt, at(k));
  return r;
}

std::string envelope_eval_csv(const IniConfig &spec, const std::vector<double> &xv, std::optional<double> tol) {
  spec.check_schema({{"envelope", {"c", "s", "mu"}}});
  if (xv.empty())
    throw ConfigError("--x must contain at least one entry");
  const Eigen::Index d = static_cast<Eigen::Index>(xv.size());
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xv.data(), d);
  const EnvelopeSpec<double> es(parse_norm(spec.get_string("envelope", "c"), d),
                                parse_norm(spec.get_string("envelope", "s"), d), spec.get_double("envelope", "mu"));
  const double t = tol ? *tol : default_tolerance(es, x);
  if (!(t > 0.0))
    throw ConfigError("--tol must be positive");
  const EnvelopeValue<double> v = evaluate(es, x, t);
  std::ostringstream os;
  os << "value";
  for (Eigen::Index i = 0; i < d; ++i)
    os << ",u" << (i + 1);
  os << ",residual\n" << format_double(v.value);
  for (Eigen::Index i = 0; i < d; ++i)
    os << "," << format_double(v.minimizer[i]);
  os << "," << format_double(v.residual) << "\n";
  return os.str();
}

} // namespace csa::harness
