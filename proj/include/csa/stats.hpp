#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/QR>
#include <boost/accumulators/accumulators.hpp>
#include <boost/accumulators/statistics/stats.hpp>
#include <boost/accumulators/statistics/sum_kahan.hpp>

namespace csa {

/// Compensated running sum.
class CompensatedSum {
public:
  void add(double x) { acc_(x); }
  double value() const { return boost::accumulators::sum_kahan(acc_); }

private:
  boost::accumulators::accumulator_set<double, boost::accumulators::stats<boost::accumulators::tag::sum_kahan>> acc_;
};

/// Sample mean and standard error of the mean, both accumulated with
/// compensated summation. Results depend only on the multiset of samples
/// up to rounding of the compensated sums.
struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

class MeanAccumulator {
public:
  void add(double x) {
    sum_.add(x);
    sum_sq_.add(x * x);
    ++count_;
  }

  MeanEstimate estimate() const {
    MeanEstimate out;
    out.count = count_;
    if (count_ == 0)
      return out;
    const double n = static_cast<double>(count_);
    out.mean = sum_.value() / n;
    if (count_ > 1) {
      const double var = std::max(0.0, (sum_sq_.value() - n * out.mean * out.mean) / (n - 1.0));
      out.stderr_ = std::sqrt(var / n);
    }
    return out;
  }

private:
  CompensatedSum sum_;
  CompensatedSum sum_sq_;
  std::size_t count_ = 0;
};

inline MeanEstimate estimate_mean(std::span<const double> samples) {
  MeanAccumulator acc;
  for (double x : samples)
    acc.add(x);
  return acc.estimate();
}

/// Ordinary least squares y ~ intercept + slope * x.
struct AffineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

inline AffineFit fit_affine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_affine: need at least two paired samples");
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[static_cast<std::size_t>(i)];
    rhs[i] = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd fitted = design * coef;
  const double ss_res = (rhs - fitted).squaredNorm();
  const double ss_tot = (rhs.array() - rhs.mean()).matrix().squaredNorm();
  AffineFit fit;
  fit.intercept = coef[0];
  fit.slope = coef[1];
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

} // namespace csa
