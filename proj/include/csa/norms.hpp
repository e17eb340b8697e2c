#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "csa/error.hpp"

namespace csa {

enum class NormKind { Lp, LInf, WeightedL2 };

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One of l_p (2 <= p < inf), l_inf, or weighted l_2 with positive weights.
template <typename Scalar = double>
class Norm {
public:
  using Vector = VectorX<Scalar>;

  static Norm lp(Scalar p) {
    if (!(p >= Scalar(2)) || !std::isfinite(p))
      throw std::invalid_argument("Lp norm requires 2 <= p < inf");
    Norm n(NormKind::Lp);
    n.p_ = p;
    return n;
  }

  /// l_p with p = 4 ln d.
  static Norm lp_log_dim(Eigen::Index d) {
    if (d < 2)
      throw std::invalid_argument("lp_log_dim requires d >= 2");
    const Scalar p = Scalar(4) * std::log(Scalar(d));
    if (p < Scalar(2))
      throw std::invalid_argument("4 ln d < 2 for this d; use lp(2) instead");
    return lp(p);
  }

  static Norm linf() { return Norm(NormKind::LInf); }

  static Norm weighted_l2(Vector weights) {
    if (weights.size() == 0)
      throw std::invalid_argument("weighted l2 needs at least one weight");
    for (Eigen::Index i = 0; i < weights.size(); ++i)
      if (!(weights[i] > Scalar(0)) || !std::isfinite(weights[i]))
        throw std::invalid_argument("weighted l2 weights must be positive and finite");
    Norm n(NormKind::WeightedL2);
    n.weights_ = std::move(weights);
    return n;
  }

  NormKind kind() const noexcept { return kind_; }
  /// Exponent; +inf for l_inf and 2 for weighted l_2.
  Scalar p() const noexcept {
    switch (kind_) {
    case NormKind::Lp: return p_;
    case NormKind::LInf: return std::numeric_limits<Scalar>::infinity();
    default: return Scalar(2);
    }
  }
  const Vector &weights() const noexcept { return weights_; }

  /// -1 when any dimension is accepted.
  Eigen::Index dimension() const noexcept { return kind_ == NormKind::WeightedL2 ? weights_.size() : -1; }

  void check_dimension(Eigen::Index d) const {
    if (kind_ == NormKind::WeightedL2 && d != weights_.size())
      throw DimensionError("weighted l2 norm built for dimension " + std::to_string(weights_.size()) +
                           ", got " + std::to_string(d));
  }

  bool operator==(const Norm &o) const {
    if (kind_ != o.kind_)
      return false;
    if (kind_ == NormKind::Lp)
      return p_ == o.p_;
    if (kind_ == NormKind::WeightedL2)
      return weights_.size() == o.weights_.size() && weights_ == o.weights_;
    return true;
  }

  std::string describe() const {
    switch (kind_) {
    case NormKind::Lp: return "l" + std::to_string(static_cast<double>(p_));
    case NormKind::LInf: return "linf";
    default: return "weighted_l2[" + std::to_string(weights_.size()) + "]";
    }
  }

private:
  explicit Norm(NormKind k) : kind_(k) {}

  NormKind kind_;
  Scalar p_ = Scalar(2);
  Vector weights_;
};

/// ||x|| in the given norm. l_p is evaluated as m * ||x / m||_p with
/// m = ||x||_inf so that large exponents do not overflow.
template <typename Scalar, typename Derived>
Scalar eval(const Norm<Scalar> &norm, const Eigen::MatrixBase<Derived> &x) {
  norm.check_dimension(x.size());
  switch (norm.kind()) {
  case NormKind::LInf:
    return x.size() == 0 ? Scalar(0) : Scalar(x.cwiseAbs().maxCoeff());
  case NormKind::WeightedL2:
    return std::sqrt(Scalar((norm.weights().array() * x.array().square()).sum()));
  case NormKind::Lp: {
    if (x.size() == 0)
      return Scalar(0);
    const Scalar m = x.cwiseAbs().maxCoeff();
    if (m == Scalar(0))
      return Scalar(0);
    const Scalar p = norm.p();
    if (p == Scalar(2))
      return m * std::sqrt(Scalar((x.array().abs() / m).square().sum()));
    return m * std::pow(Scalar((x.array().abs() / m).pow(p).sum()), Scalar(1) / p);
  }
  }
  return Scalar(0);
}

/// L such that 1/2 ||.||^2 is L-smooth with respect to the same norm.
template <typename Scalar>
Scalar smoothness_constant(const Norm<Scalar> &norm) {
  switch (norm.kind()) {
  case NormKind::Lp: return norm.p() - Scalar(1);
  case NormKind::WeightedL2: return Scalar(1);
  default: throw UnsupportedNormError("1/2 ||x||_inf^2 is not smooth");
  }
}

/// Lipschitz constant of the gradient of 1/2 ||.||^2 measured in the
/// Euclidean norm on both sides. Used as the step-size scale by solvers
/// working in Euclidean geometry.
template <typename Scalar>
Scalar euclidean_smoothness(const Norm<Scalar> &norm) {
  switch (norm.kind()) {
  case NormKind::Lp: return norm.p() - Scalar(1);
  case NormKind::WeightedL2: return norm.weights().maxCoeff();
  default: throw UnsupportedNormError("1/2 ||x||_inf^2 is not smooth");
  }
}

/// Gradient of 1/2 ||x||^2. Zero at x = 0.
template <typename Scalar, typename Derived>
VectorX<Scalar> half_squared_gradient(const Norm<Scalar> &norm, const Eigen::MatrixBase<Derived> &x) {
  norm.check_dimension(x.size());
  switch (norm.kind()) {
  case NormKind::WeightedL2:
    return norm.weights().cwiseProduct(x);
  case NormKind::Lp: {
    const Scalar r = eval(norm, x);
    if (r == Scalar(0))
      return VectorX<Scalar>::Zero(x.size());
    const Scalar p = norm.p();
    if (p == Scalar(2))
      return x;
    return (r * x.array().sign() * (x.array().abs() / r).pow(p - Scalar(1))).matrix();
  }
  default:
    throw UnsupportedNormError("1/2 ||x||_inf^2 is not differentiable");
  }
}

/// Hoelder conjugate q with 1/p + 1/q = 1.
template <typename Scalar>
Scalar dual_exponent(Scalar p) {
  if (std::isinf(p))
    return Scalar(1);
  if (!(p > Scalar(1)))
    throw std::invalid_argument("dual_exponent requires p > 1");
  return p / (p - Scalar(1));
}

template <typename Scalar = double>
struct EquivalenceConstants {
  Scalar lower = Scalar(1);
  Scalar upper = Scalar(1);
};

/// Tight constants with lower * ||x||_from <= ||x||_to <= upper * ||x||_from
/// on R^d. Only pairs with known analytic values are supported.
template <typename Scalar>
EquivalenceConstants<Scalar> equivalence_constants(const Norm<Scalar> &from, const Norm<Scalar> &to,
                                                   Eigen::Index d) {
  if (d < 1)
    throw std::invalid_argument("equivalence_constants: d must be positive");
  from.check_dimension(d);
  to.check_dimension(d);
  if (from == to)
    return {Scalar(1), Scalar(1)};

  const bool from_p = from.kind() != NormKind::WeightedL2;
  const bool to_p = to.kind() != NormKind::WeightedL2;
  if (from_p && to_p) {
    // ||x||_b / ||x||_a ranges over [min(1, d^(1/b-1/a)), max(1, d^(1/b-1/a))].
    const Scalar inv_a = from.kind() == NormKind::LInf ? Scalar(0) : Scalar(1) / from.p();
    const Scalar inv_b = to.kind() == NormKind::LInf ? Scalar(0) : Scalar(1) / to.p();
    const Scalar f = std::pow(Scalar(d), inv_b - inv_a);
    return {std::min(Scalar(1), f), std::max(Scalar(1), f)};
  }
  if (from.kind() == NormKind::LInf && to.kind() == NormKind::WeightedL2)
    return {std::sqrt(to.weights().minCoeff()), std::sqrt(to.weights().sum())};
  if (from.kind() == NormKind::WeightedL2 && to.kind() == NormKind::LInf)
    return {Scalar(1) / std::sqrt(from.weights().sum()), Scalar(1) / std::sqrt(from.weights().minCoeff())};
  throw UnsupportedNormError("no tight equivalence constants for " + from.describe() + " -> " + to.describe());
}

} // namespace csa
