#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Core>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "csa/error.hpp"
#include "csa/norms.hpp"

namespace csa {

// Generalized Moreau envelope of f(u) = 1/2 ||u||_c^2 smoothed by
// g(v) = 1/2 ||v||_s^2:
//
//   M(x) = min_u  1/2 ||u||_c^2 + 1/(2 mu) ||x - u||_s^2
//
// The squared smoothing norm must be smooth (l_p or weighted l_2).

template <typename Scalar = double>
struct EnvelopeSpec {
  Norm<Scalar> contraction_norm;
  Norm<Scalar> smoothing_norm;
  Scalar mu;
  Scalar L;

  EnvelopeSpec(Norm<Scalar> c, Norm<Scalar> s, Scalar mu_)
      : contraction_norm(std::move(c)), smoothing_norm(std::move(s)), mu(mu_), L(smoothness_constant(smoothing_norm)) {
    if (!(mu > Scalar(0)) || !std::isfinite(mu))
      throw std::invalid_argument("envelope: mu must be positive");
  }
};

template <typename Scalar = double>
struct EnvelopeValue {
  Scalar value = Scalar(0);
  VectorX<Scalar> minimizer;
  Scalar residual = Scalar(0);
};

enum class EnvelopeSolver {
  Auto,             // closed forms and the l_inf clipping reduction where they apply
  ProximalGradient, // always run the generic composite solver
};

struct EnvelopeOptions {
  EnvelopeSolver solver = EnvelopeSolver::Auto;
  std::int64_t max_iterations = 200000;
};

template <typename Scalar, typename Derived>
Scalar default_tolerance(const EnvelopeSpec<Scalar> &spec, const Eigen::MatrixBase<Derived> &x) {
  const Scalar n = eval(spec.contraction_norm, x);
  return Scalar(1e-8) * (Scalar(1) + n * n);
}

namespace detail {

template <typename Scalar, typename F>
Scalar monotone_root(F f, Scalar lo, Scalar hi) {
  // f increasing with f(lo) <= 0 <= f(hi).
  const Scalar flo = f(lo);
  const Scalar fhi = f(hi);
  if (flo >= Scalar(0))
    return lo;
  if (fhi <= Scalar(0))
    return hi;
  boost::uintmax_t iters = 200;
  boost::math::tools::eps_tolerance<Scalar> tol(std::numeric_limits<Scalar>::digits - 3);
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return (r.first + r.second) / Scalar(2);
}

// prox of lam * 1/2 ||.||_inf^2 by sort-and-scan over |v|.
template <typename Scalar>
VectorX<Scalar> prox_half_squared_linf(const VectorX<Scalar> &v, Scalar lam) {
  const Eigen::Index d = v.size();
  std::vector<Scalar> a(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    a[static_cast<std::size_t>(i)] = std::abs(v[i]);
  std::sort(a.begin(), a.end(), std::greater<Scalar>());
  Scalar t = Scalar(0);
  Scalar partial = Scalar(0);
  for (std::size_t m = 1; m <= a.size(); ++m) {
    partial += a[m - 1];
    const Scalar cand = partial / (lam + Scalar(m));
    const Scalar next = m < a.size() ? a[m] : Scalar(0);
    if (cand >= next) {
      t = cand;
      break;
    }
  }
  return v.cwiseMax(-t).cwiseMin(t);
}

// prox of lam * 1/2 ||.||_p^2. With a_i = |u_i| / ||u||_p the optimality
// conditions read a_i + lam a_i^(p-1) = |v_i| / r and sum a_i^p = 1, which
// is monotone in r = ||u||_p.
template <typename Scalar>
VectorX<Scalar> prox_half_squared_lp(const VectorX<Scalar> &v, Scalar lam, Scalar p) {
  const Eigen::Index d = v.size();
  const Scalar vmax = v.cwiseAbs().maxCoeff();
  if (vmax == Scalar(0))
    return VectorX<Scalar>::Zero(d);
  if (p == Scalar(2))
    return v / (Scalar(1) + lam);

  const Scalar pm1 = p - Scalar(1);
  VectorX<Scalar> a(d);
  auto solve_a = [&](Scalar r) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const Scalar c = std::abs(v[i]) / r;
      if (c == Scalar(0)) {
        a[i] = Scalar(0);
        continue;
      }
      const Scalar hi = std::min(c, std::pow(c / lam, Scalar(1) / pm1));
      a[i] = monotone_root<Scalar>([&](Scalar s) { return s + lam * std::pow(s, pm1) - c; }, Scalar(0), hi);
    }
  };
  // phi(r) = sum a(r)^p - 1 is decreasing in r.
  auto phi = [&](Scalar r) {
    solve_a(r);
    return Scalar(a.array().pow(p).sum()) - Scalar(1);
  };
  const Norm<Scalar> lpn = Norm<Scalar>::lp(p);
  Scalar hi = eval(lpn, v);
  Scalar lo = hi;
  for (int k = 0; k < 2000 && phi(lo) < Scalar(0); ++k)
    lo /= Scalar(2);
  Scalar r = hi;
  if (phi(hi) < Scalar(0)) {
    // bisection in log space down to 1e-12 relative width
    for (int k = 0; k < 200 && (hi - lo) > Scalar(1e-12) * hi; ++k) {
      const Scalar mid = std::sqrt(lo * hi);
      if (phi(mid) >= Scalar(0))
        lo = mid;
      else
        hi = mid;
    }
    r = (lo + hi) / Scalar(2);
  }
  solve_a(r);
  return (r * v.array().sign() * a.array()).matrix();
}

template <typename Scalar>
Scalar half_sq(const Norm<Scalar> &n, const VectorX<Scalar> &x) {
  const Scalar v = eval(n, x);
  return Scalar(0.5) * v * v;
}

} // namespace detail

/// argmin_u lam * 1/2 ||u||^2 + 1/2 ||u - v||_2^2.
template <typename Scalar, typename Derived>
VectorX<Scalar> prox_half_squared(const Norm<Scalar> &norm, const Eigen::MatrixBase<Derived> &v, Scalar lam) {
  norm.check_dimension(v.size());
  if (!(lam >= Scalar(0)))
    throw std::invalid_argument("prox: lambda must be nonnegative");
  const VectorX<Scalar> vv = v;
  if (lam == Scalar(0) || vv.size() == 0)
    return vv;
  switch (norm.kind()) {
  case NormKind::WeightedL2:
    return (vv.array() / (Scalar(1) + lam * norm.weights().array())).matrix();
  case NormKind::LInf:
    return detail::prox_half_squared_linf(vv, lam);
  default:
    return detail::prox_half_squared_lp(vv, lam, norm.p());
  }
}

namespace detail {

template <typename Scalar>
EnvelopeValue<Scalar> solve_proximal_gradient(const EnvelopeSpec<Scalar> &spec, const VectorX<Scalar> &x, Scalar tol,
                                              const EnvelopeOptions &opts) {
  const Norm<Scalar> &c = spec.contraction_norm;
  const Norm<Scalar> &s = spec.smoothing_norm;
  const Scalar mu = spec.mu;
  const Scalar step = mu / euclidean_smoothness(s);

  auto objective = [&](const VectorX<Scalar> &u) {
    return half_sq(c, u) + half_sq(s, VectorX<Scalar>(x - u)) / mu;
  };
  auto plain_step = [&](const VectorX<Scalar> &y) {
    const VectorX<Scalar> grad = -half_squared_gradient(s, VectorX<Scalar>(x - y)) / mu;
    return prox_half_squared(c, VectorX<Scalar>(y - step * grad), step);
  };

  VectorX<Scalar> u = x / (Scalar(1) + mu);
  Scalar fu = objective(u);
  VectorX<Scalar> y = u;
  Scalar t = Scalar(1);
  Scalar decrease = std::numeric_limits<Scalar>::infinity();
  for (std::int64_t it = 0; it < opts.max_iterations; ++it) {
    VectorX<Scalar> next = plain_step(y);
    Scalar fnext = objective(next);
    if (fnext > fu) {
      // restart momentum
      t = Scalar(1);
      next = plain_step(u);
      fnext = objective(next);
    }
    // plain step from the new point measures progress
    const VectorX<Scalar> probe = plain_step(next);
    const Scalar fprobe = objective(probe);
    decrease = std::max(Scalar(0), fnext - fprobe);
    const Scalar t_next = (Scalar(1) + std::sqrt(Scalar(1) + Scalar(4) * t * t)) / Scalar(2);
    const VectorX<Scalar> prev = u;
    if (fprobe <= fnext) {
      u = probe;
      fu = fprobe;
    } else {
      u = next;
      fu = fnext;
    }
    if (decrease < tol)
      return {fu, u, decrease};
    y = u + ((t - Scalar(1)) / t_next) * (u - prev);
    t = t_next;
  }
  throw ConvergenceError("envelope: proximal gradient did not reach tolerance", static_cast<double>(fu),
                         static_cast<double>(decrease));
}

// c = l_inf and s absolute (l_p or weighted l_2): the minimizer clips x at
// some level t, so M = min_t 1/2 t^2 + 1/(2 mu) ||(|x| - t)_+||_s^2.
template <typename Scalar>
EnvelopeValue<Scalar> solve_linf_clip(const EnvelopeSpec<Scalar> &spec, const VectorX<Scalar> &x) {
  const Norm<Scalar> &s = spec.smoothing_norm;
  const Scalar mu = spec.mu;
  const VectorX<Scalar> ax = x.cwiseAbs();
  auto excess = [&](Scalar t) { return VectorX<Scalar>((ax.array() - t).max(Scalar(0)).matrix()); };
  auto dphi = [&](Scalar t) { return t - half_squared_gradient(s, excess(t)).sum() / mu; };
  const Scalar t = monotone_root<Scalar>(dphi, Scalar(0), ax.maxCoeff());
  EnvelopeValue<Scalar> out;
  out.minimizer = x.cwiseMax(-t).cwiseMin(t);
  out.value = Scalar(0.5) * t * t + half_sq(s, excess(t)) / mu;
  // phi is 1-strongly convex in t
  const Scalar g = dphi(t);
  out.residual = Scalar(0.5) * g * g;
  return out;
}

} // namespace detail

/// Value and minimizer of the envelope at x.
template <typename Scalar, typename Derived>
EnvelopeValue<Scalar> evaluate(const EnvelopeSpec<Scalar> &spec, const Eigen::MatrixBase<Derived> &x, Scalar tol,
                               const EnvelopeOptions &opts = {}) {
  spec.contraction_norm.check_dimension(x.size());
  spec.smoothing_norm.check_dimension(x.size());
  if (!(tol > Scalar(0)))
    throw std::invalid_argument("envelope: tol must be positive");
  const VectorX<Scalar> xv = x;
  if (xv.size() == 0 || xv.cwiseAbs().maxCoeff() == Scalar(0))
    return {Scalar(0), VectorX<Scalar>::Zero(xv.size()), Scalar(0)};

  if (opts.solver == EnvelopeSolver::Auto) {
    if (spec.contraction_norm == spec.smoothing_norm) {
      const Scalar n = eval(spec.contraction_norm, xv);
      return {n * n / (Scalar(2) * (Scalar(1) + spec.mu)), xv / (Scalar(1) + spec.mu), Scalar(0)};
    }
    if (spec.contraction_norm.kind() == NormKind::LInf)
      return detail::solve_linf_clip(spec, xv);
  }
  return detail::solve_proximal_gradient(spec, xv, tol, opts);
}

template <typename Scalar, typename Derived>
EnvelopeValue<Scalar> evaluate(const EnvelopeSpec<Scalar> &spec, const Eigen::MatrixBase<Derived> &x) {
  return evaluate(spec, x, default_tolerance(spec, x));
}

/// (1/mu) grad g(x - u*).
template <typename Scalar, typename Derived>
VectorX<Scalar> gradient(const EnvelopeSpec<Scalar> &spec, const Eigen::MatrixBase<Derived> &x, Scalar tol,
                         const EnvelopeOptions &opts = {}) {
  const EnvelopeValue<Scalar> ev = evaluate(spec, x, tol, opts);
  return half_squared_gradient(spec.smoothing_norm, VectorX<Scalar>(x - ev.minimizer)) / spec.mu;
}

template <typename Scalar, typename Derived>
VectorX<Scalar> gradient(const EnvelopeSpec<Scalar> &spec, const Eigen::MatrixBase<Derived> &x) {
  return gradient(spec, x, default_tolerance(spec, x));
}

struct SandwichVerdict {
  bool lower_ok = false;
  bool upper_ok = false;
};

/// Checks (1 + mu/u_cs^2) M <= f(x) <= (1 + mu/l_cs^2) M with f = 1/2 ||x||_c^2.
/// `slack` defaults to 10 times the solver tolerance.
template <typename Scalar, typename Derived>
SandwichVerdict sandwich_check(const EnvelopeSpec<Scalar> &spec, const Eigen::MatrixBase<Derived> &x,
                               Scalar slack = Scalar(-1)) {
  const Eigen::Index d = x.size();
  const EquivalenceConstants<Scalar> cs = equivalence_constants(spec.contraction_norm, spec.smoothing_norm, d);
  const Scalar tol = default_tolerance(spec, x);
  if (slack < Scalar(0))
    slack = Scalar(10) * tol;
  const Scalar m = evaluate(spec, x, tol).value;
  const Scalar fx = detail::half_sq(spec.contraction_norm, VectorX<Scalar>(x));
  const Scalar lo_factor = Scalar(1) + spec.mu / (cs.upper * cs.upper);
  const Scalar hi_factor = Scalar(1) + spec.mu / (cs.lower * cs.lower);
  // m carries at most `slack` absolute error; scale it by the factors.
  return {lo_factor * m <= fx + lo_factor * slack, fx <= hi_factor * m + hi_factor * slack};
}

} // namespace csa
