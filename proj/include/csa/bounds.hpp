#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "csa/error.hpp"
#include "csa/norms.hpp"

namespace csa {

// All logarithms are natural.

struct AlphaConstants {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double alpha3 = 1.0;
  double alpha4 = 1.0;

  double gamma = 0.0;
  double mu = 1.0;
  double L = 1.0;
  double ell_cs = 1.0;
  double u_cs = 1.0;
  double ell_es = 1.0;
  double u_es = 1.0;
  double B = 0.0;
};

inline AlphaConstants compute_alphas(double gamma, double mu, double L, const EquivalenceConstants<double> &cs,
                                     const EquivalenceConstants<double> &es, double B) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw PreconditionError("compute_alphas: gamma must lie in (0, 1)");
  if (!(mu > 0.0))
    throw PreconditionError("compute_alphas: mu must be positive");
  if (!(L > 0.0))
    throw PreconditionError("compute_alphas: L must be positive");
  if (!(B >= 0.0))
    throw PreconditionError("compute_alphas: B must be nonnegative");
  if (!(cs.lower > 0.0 && es.lower > 0.0))
    throw PreconditionError("compute_alphas: equivalence constants must be positive");

  AlphaConstants a;
  a.gamma = gamma;
  a.mu = mu;
  a.L = L;
  a.ell_cs = cs.lower;
  a.u_cs = cs.upper;
  a.ell_es = es.lower;
  a.u_es = es.upper;
  a.B = B;

  const double lcs2 = cs.lower * cs.lower;
  const double ucs2 = cs.upper * cs.upper;
  const double les2 = es.lower * es.lower;
  const double ues2 = es.upper * es.upper;
  a.alpha1 = (1.0 + mu / lcs2) / (1.0 + mu / ucs2);
  a.alpha2 = 1.0 - gamma * std::sqrt(a.alpha1);
  a.alpha3 = 4.0 * ucs2 * ues2 * (B + 2.0) * L * (lcs2 + mu) / (mu * lcs2 * les2);
  a.alpha4 = a.alpha3 / (2.0 * (B + 2.0));
  if (!(a.alpha2 > 0.0))
    throw PreconditionError("compute_alphas: alpha2 <= 0, mu too large for this gamma");
  return a;
}

/// Constants obtained with c = e = l_inf, s = l_p, p = 4 ln d and
/// mu = (1/2 + 1/(2 gamma))^2 - 1.
struct Corollary3Constants {
  AlphaConstants alphas;
  double p = 2.0;
  // Closed-form caps that the exact constants are checked against.
  double alpha1_cap = std::sqrt(std::numbers::e);
  double alpha2_floor = 0.0;
  double alpha3_cap = 0.0;
  double alpha4_cap = 0.0;
  // The tighter cap alpha1 <= 3/2 only holds for gamma above roughly 0.243.
  bool alpha1_within_three_halves = true;
};

inline Corollary3Constants corollary3_constants(double gamma, std::int64_t d, double B) {
  if (d < 2)
    throw PreconditionError("corollary3_constants: d must be at least 2");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw PreconditionError("corollary3_constants: gamma must lie in (0, 1)");
  const double logd = std::log(static_cast<double>(d));
  const double p = 4.0 * logd;
  const double mu = std::pow(0.5 + 0.5 / gamma, 2) - 1.0;
  const double L = p - 1.0;
  const double upper = std::pow(static_cast<double>(d), 1.0 / p);
  const EquivalenceConstants<double> eq{1.0, upper};

  Corollary3Constants out;
  out.alphas = compute_alphas(gamma, mu, L, eq, eq, B);
  out.p = p;
  out.alpha2_floor = 0.5 * (1.0 - gamma);
  out.alpha3_cap = 32.0 * std::numbers::e * (B + 2.0) * logd / (1.0 - gamma);
  out.alpha4_cap = 16.0 * std::numbers::e * logd / (1.0 - gamma);
  out.alpha1_within_three_halves = out.alphas.alpha1 <= 1.5;

  const double slack = 1.0 + 1e-12;
  if (!(out.alphas.alpha1 <= out.alpha1_cap * slack) || !(out.alphas.alpha2 * slack >= out.alpha2_floor) ||
      !(out.alphas.alpha3 <= out.alpha3_cap * slack) || !(out.alphas.alpha4 <= out.alpha4_cap * slack))
    throw std::logic_error("corollary3_constants: closed-form caps violated");
  return out;
}

class StepsizeSchedule {
public:
  enum class Kind { Constant, Polynomial };

  static StepsizeSchedule constant(double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps))
      throw PreconditionError("stepsize must be a finite nonnegative number");
    StepsizeSchedule s;
    s.kind_ = Kind::Constant;
    s.eps_ = eps;
    return s;
  }

  /// eps / (k + K)^xi.
  static StepsizeSchedule polynomial(double eps, double xi, double K) {
    if (!(eps > 0.0) || !std::isfinite(eps))
      throw PreconditionError("stepsize scale must be positive");
    if (!(xi > 0.0 && xi <= 1.0))
      throw PreconditionError("stepsize exponent xi must lie in (0, 1]");
    if (!(K >= 1.0) || !std::isfinite(K))
      throw PreconditionError("stepsize offset K must be at least 1");
    StepsizeSchedule s;
    s.kind_ = Kind::Polynomial;
    s.eps_ = eps;
    s.xi_ = xi;
    s.K_ = K;
    return s;
  }

  double operator()(std::int64_t k) const {
    if (kind_ == Kind::Constant)
      return eps_;
    const double base = static_cast<double>(k) + K_;
    return xi_ == 1.0 ? eps_ / base : eps_ / std::pow(base, xi_);
  }

  Kind kind() const noexcept { return kind_; }
  double eps() const noexcept { return eps_; }
  double xi() const noexcept { return xi_; }
  double K() const noexcept { return K_; }

private:
  StepsizeSchedule() = default;

  Kind kind_ = Kind::Constant;
  double eps_ = 0.0;
  double xi_ = 0.0;
  double K_ = 1.0;
};

/// K formulas guaranteeing eps_0 <= alpha2/alpha3. xi = 0 requests a
/// constant schedule.
inline StepsizeSchedule build_schedule(const AlphaConstants &a, double eps, double xi) {
  const double ratio = a.alpha2 / a.alpha3;
  if (xi == 0.0) {
    if (eps > ratio * (1.0 + 1e-12))
      throw PreconditionError("constant stepsize requires eps <= alpha2/alpha3");
    return StepsizeSchedule::constant(eps);
  }
  if (!(xi > 0.0 && xi <= 1.0))
    throw PreconditionError("stepsize exponent xi must lie in (0, 1]");
  if (!(eps > 0.0))
    throw PreconditionError("stepsize scale must be positive");
  double K = std::max(1.0, eps / ratio);
  if (xi < 1.0) {
    K = std::max({1.0, std::pow(eps / ratio, 1.0 / xi), std::pow(2.0 * xi / (a.alpha2 * eps), 1.0 / (1.0 - xi))});
  }
  return StepsizeSchedule::polynomial(eps, xi, K);
}

struct NoiseModel {
  double A = 0.0;
  double B = 0.0;
  Norm<double> error_norm = Norm<double>::linf();
};

namespace detail {

inline double noise_level(double A, double B, double x_star_norm_c) {
  if (!(A >= 0.0) || !(B >= 0.0))
    throw PreconditionError("noise constants A, B must be nonnegative");
  return A + 2.0 * B * x_star_norm_c * x_star_norm_c;
}

inline bool close_to_one(double v) { return std::abs(v - 1.0) <= 8.0 * std::numeric_limits<double>::epsilon(); }

} // namespace detail

/// Bound sequence for k = 0..k_max.
inline std::vector<double> theorem1_bound(const AlphaConstants &a, const StepsizeSchedule &schedule,
                                          double initial_err_c_sq, double A, double B, double x_star_norm_c,
                                          std::int64_t k_max) {
  if (k_max < 0)
    throw PreconditionError("theorem1_bound: k_max must be nonnegative");
  if (schedule(0) > a.alpha2 / a.alpha3 * (1.0 + 1e-12))
    throw PreconditionError("theorem1_bound: requires eps_0 <= alpha2/alpha3; build the schedule with the K formulas");
  const double c = a.alpha4 * detail::noise_level(A, B, x_star_norm_c);
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1);
  double prod = 1.0;
  double acc = 0.0;
  out[0] = a.alpha1 * initial_err_c_sq;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const double e = schedule(k - 1);
    const double f = 1.0 - a.alpha2 * e;
    prod *= f;
    acc = acc * f + e * e;
    out[static_cast<std::size_t>(k)] = a.alpha1 * initial_err_c_sq * prod + c * acc;
  }
  return out;
}

inline double corollary1_bound(const AlphaConstants &a, double eps, double initial_err_c_sq, double A, double B,
                               double x_star_norm_c, std::int64_t k) {
  if (eps > a.alpha2 / a.alpha3 * (1.0 + 1e-12))
    throw PreconditionError("corollary1_bound: requires eps <= alpha2/alpha3");
  if (!(eps >= 0.0) || k < 0)
    throw PreconditionError("corollary1_bound: eps and k must be nonnegative");
  return a.alpha1 * initial_err_c_sq * std::pow(1.0 - a.alpha2 * eps, static_cast<double>(k)) +
         detail::noise_level(A, B, x_star_norm_c) * a.alpha4 * eps / a.alpha2;
}

enum class Corollary2Case { SlowRate = 1, Critical = 2, FastRate = 3, Polynomial = 4 };

inline Corollary2Case corollary2_case(const AlphaConstants &a, double eps, double xi) {
  if (!(xi > 0.0 && xi <= 1.0))
    throw PreconditionError("corollary2: xi must lie in (0, 1]");
  if (xi < 1.0)
    return Corollary2Case::Polynomial;
  const double ae = a.alpha2 * eps;
  if (detail::close_to_one(ae))
    return Corollary2Case::Critical;
  return ae < 1.0 ? Corollary2Case::SlowRate : Corollary2Case::FastRate;
}

/// Closed form with an explicit offset K.
inline double corollary2_bound_with_offset(const AlphaConstants &a, double eps, double xi, double K,
                                           double initial_err_c_sq, double A, double B, double x_star_norm_c,
                                           std::int64_t k) {
  if (k < 0)
    throw PreconditionError("corollary2_bound: k must be nonnegative");
  if (!(eps > 0.0))
    throw PreconditionError("corollary2_bound: eps must be positive");
  if (!(K >= 1.0))
    throw PreconditionError("corollary2_bound: K must be at least 1");
  const double c = detail::noise_level(A, B, x_star_norm_c);
  const double e0 = a.alpha1 * initial_err_c_sq;
  const double kk = static_cast<double>(k) + K;
  const double ae = a.alpha2 * eps;
  switch (corollary2_case(a, eps, xi)) {
  case Corollary2Case::SlowRate:
    return e0 * std::pow(K / kk, ae) + 4.0 * eps * eps * a.alpha4 / (1.0 - ae) * c / std::pow(kk, ae);
  case Corollary2Case::Critical:
    return e0 * K / kk + 4.0 * a.alpha4 / (a.alpha2 * a.alpha2) * c * std::log(kk) / kk;
  case Corollary2Case::FastRate:
    return e0 * std::pow(K / kk, ae) + 4.0 * std::numbers::e * eps * eps * a.alpha4 / (ae - 1.0) * c / kk;
  case Corollary2Case::Polynomial:
    return e0 * std::exp(-ae / (1.0 - xi) * (std::pow(kk, 1.0 - xi) - std::pow(K, 1.0 - xi))) +
           2.0 * eps * a.alpha4 / a.alpha2 * c / std::pow(kk, xi);
  }
  return 0.0;
}

/// Offset K from build_schedule.
inline double corollary2_bound(const AlphaConstants &a, double eps, double xi, double initial_err_c_sq, double A,
                               double B, double x_star_norm_c, std::int64_t k) {
  const StepsizeSchedule s = build_schedule(a, eps, xi);
  return corollary2_bound_with_offset(a, eps, xi, s.K(), initial_err_c_sq, A, B, x_star_norm_c, k);
}

enum class AveragedRegime { Constant, InvSqrt, InvK };

/// Schedule matching a regime: eps, eps/sqrt(k+1), eps/(k+1).
inline StepsizeSchedule averaged_schedule(AveragedRegime regime, double eps) {
  switch (regime) {
  case AveragedRegime::Constant: return StepsizeSchedule::constant(eps);
  case AveragedRegime::InvSqrt: return StepsizeSchedule::polynomial(eps, 0.5, 1.0);
  default: return StepsizeSchedule::polynomial(eps, 1.0, 1.0);
  }
}

inline double theorem2_bound(double D, double A, double eps, AveragedRegime regime, std::int64_t k, double B = 0.0) {
  if (B != 0.0)
    throw PreconditionError("theorem2_bound: requires noise with B = 0");
  if (!(eps > 0.0 && eps < 1.0))
    throw PreconditionError("theorem2_bound: eps must lie in (0, 1)");
  if (!(D >= 0.0) || !(A >= 0.0))
    throw PreconditionError("theorem2_bound: D and A must be nonnegative");
  if (k < 0)
    throw PreconditionError("theorem2_bound: k must be nonnegative");
  const double kd = static_cast<double>(k);
  switch (regime) {
  case AveragedRegime::Constant:
    return D * D / ((kd + 1.0) * (1.0 - eps) * eps) + A * eps / (1.0 - eps);
  case AveragedRegime::InvSqrt:
    if (k < 1)
      throw PreconditionError("theorem2_bound: the eps/sqrt(k+1) bound is defined for k >= 1");
    return (D * D + A * eps * eps * (1.0 + std::log(kd))) / (2.0 * (1.0 - eps) * eps * (std::sqrt(kd + 1.0) - 1.0));
  case AveragedRegime::InvK:
    if (k < 1)
      throw PreconditionError("theorem2_bound: the eps/(k+1) bound is defined for k >= 1");
    return (D * D + 2.0 * A * eps * eps) / ((1.0 - eps) * eps * std::log(kd + 1.0));
  }
  return 0.0;
}

// V-trace, eps_k = eps/(k+K) with eps = 4/(1-gamma), K = 64(A+2)log|S|/(1-gamma)^3.
inline StepsizeSchedule theorem3_schedule(double gamma, double A, std::int64_t n_states) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw PreconditionError("theorem3: gamma must lie in (0, 1)");
  if (n_states < 2)
    throw PreconditionError("theorem3: needs at least two states (log|S| > 0)");
  const double g = 1.0 - gamma;
  return StepsizeSchedule::polynomial(4.0 / g, 1.0,
                                      64.0 * (A + 2.0) * std::log(static_cast<double>(n_states)) / (g * g * g));
}

inline double theorem3_bound(double gamma, double A, std::int64_t n_states, double initial_err_sq,
                             double v_star_norm, std::int64_t k) {
  const StepsizeSchedule s = theorem3_schedule(gamma, A, n_states);
  if (!(A >= 0.0) || k < 0)
    throw PreconditionError("theorem3: A and k must be nonnegative");
  const double g = 1.0 - gamma;
  const double e2 = std::numbers::e * std::numbers::e;
  return 1024.0 * e2 * (initial_err_sq + 2.0 * v_star_norm * v_star_norm + 1.0) * (A + 2.0) *
         std::log(static_cast<double>(n_states)) / (g * g * g) / (static_cast<double>(k) + s.K());
}

inline double theorem4_stepsize_cap(double beta, std::int64_t n) {
  const double bn = std::pow(beta, static_cast<double>(n));
  return (1.0 - bn) / (16.0 * (1.0 + bn * bn));
}

/// Constants Theorem 4 reduces to (all equivalence constants 1, mu = 1).
inline AlphaConstants theorem4_alphas(double beta, std::int64_t n) {
  const double bn = std::pow(beta, static_cast<double>(n));
  return compute_alphas(bn, 1.0, 1.0, {1.0, 1.0}, {1.0, 1.0}, 2.0 * bn * bn);
}

inline double theorem4_bound(double beta, std::int64_t n, double eps, double initial_err_lambda_sq,
                             double v_pi_norm_lambda, std::int64_t k) {
  if (!(beta > 0.0 && beta < 1.0))
    throw PreconditionError("theorem4: beta must lie in (0, 1)");
  if (n < 1 || k < 0)
    throw PreconditionError("theorem4: n >= 1 and k >= 0 required");
  if (!(eps > 0.0) || eps > theorem4_stepsize_cap(beta, n) * (1.0 + 1e-12))
    throw PreconditionError("theorem4: requires 0 < eps <= (1-beta^n)/(16(1+beta^(2n)))");
  const double bn = std::pow(beta, static_cast<double>(n));
  const double q = 1.0 - bn;
  return initial_err_lambda_sq * std::pow(1.0 - q * eps, static_cast<double>(k)) +
         8.0 / q * (q * q / ((1.0 - beta) * (1.0 - beta)) + 2.0 * bn * bn * v_pi_norm_lambda * v_pi_norm_lambda) * eps;
}

inline double theorem5a_stepsize_cap(double beta, std::int64_t n_pairs) {
  if (n_pairs < 2)
    throw PreconditionError("theorem5: needs |S||A| >= 2");
  return (1.0 - beta) * (1.0 - beta) / (640.0 * std::numbers::e * std::log(static_cast<double>(n_pairs)));
}

inline double theorem5a_bound(double beta, std::int64_t n_pairs, double eps, double initial_err_sq,
                              double q_star_norm, std::int64_t k) {
  if (!(beta > 0.0 && beta < 1.0))
    throw PreconditionError("theorem5: beta must lie in (0, 1)");
  if (k < 0)
    throw PreconditionError("theorem5: k must be nonnegative");
  if (!(eps > 0.0) || eps > theorem5a_stepsize_cap(beta, n_pairs) * (1.0 + 1e-12))
    throw PreconditionError("theorem5(a): requires 0 < eps <= (1-beta)^2/(640 e log(|S||A|))");
  const double g = 1.0 - beta;
  return 1.5 * initial_err_sq * std::pow(1.0 - g * eps / 2.0, static_cast<double>(k)) +
         (1.0 + 2.0 * q_star_norm * q_star_norm) * 256.0 * std::numbers::e *
             std::log(static_cast<double>(n_pairs)) * eps / (g * g);
}

inline StepsizeSchedule theorem5b_schedule(double beta, std::int64_t n_pairs) {
  if (!(beta > 0.0 && beta < 1.0))
    throw PreconditionError("theorem5: beta must lie in (0, 1)");
  if (n_pairs < 2)
    throw PreconditionError("theorem5: needs |S||A| >= 2");
  const double g = 1.0 - beta;
  return StepsizeSchedule::polynomial(4.0 / g, 1.0,
                                      640.0 * std::numbers::e * std::log(static_cast<double>(n_pairs)) / (g * g * g));
}

inline double theorem5b_bound(double beta, std::int64_t n_pairs, double initial_err_sq, double q_star_norm,
                              std::int64_t k) {
  const StepsizeSchedule s = theorem5b_schedule(beta, n_pairs);
  if (k < 0)
    throw PreconditionError("theorem5: k must be nonnegative");
  const double g = 1.0 - beta;
  const double e2 = std::numbers::e * std::numbers::e;
  return 8192.0 * e2 * (1.0 + 2.0 * q_star_norm * q_star_norm + initial_err_sq) *
         std::log(static_cast<double>(n_pairs)) / (g * g * g) / (static_cast<double>(k) + s.K());
}

} // namespace csa
