#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "csa/bounds.hpp"
#include "csa/envelope.hpp"
#include "csa/error.hpp"
#include "csa/norms.hpp"
#include "csa/rng.hpp"
#include "csa/stats.hpp"

namespace csa {

// Stochastic approximation x_{k+1} = x_k + eps_k (sample(x_k) - x_k), where
// sample(x) = H(x) + w. Iteration k of a path draws from stream.split(k).

using StepFn = std::function<double(std::int64_t)>;

struct OperatorModel {
  std::function<Eigen::VectorXd(const Eigen::VectorXd &)> apply;
  Norm<double> contraction_norm = Norm<double>::linf();
  double gamma = 1.0;
  std::optional<Eigen::VectorXd> fixed_point;
};

struct NoisyOracle {
  std::function<Eigen::VectorXd(const Eigen::VectorXd &, StreamRng &)> sample;
  NoiseModel noise_model;
  /// Deterministic mean operator H; needed for residual recording.
  std::function<Eigen::VectorXd(const Eigen::VectorXd &)> mean;
};

struct RecordOptions {
  std::optional<Eigen::VectorXd> x_star;
  Norm<double> error_norm = Norm<double>::linf();
  const EnvelopeSpec<double> *envelope = nullptr;
  bool record_iterates = false;
  bool record_residual = false;
  bool every_iteration = false;
};

struct RunRecord {
  std::vector<std::int64_t> k;
  std::vector<double> error_sq;        // ||x_k - x*||^2 in the error norm
  std::vector<double> envelope;        // M(x_k - x*)
  std::vector<double> residual_sq;     // ||H(x_k) - x_k||_2^2
  std::vector<double> residual_min_sq; // min over i <= k of residual_sq
  std::vector<Eigen::VectorXd> iterates;
};

/// Every k up to 1000, then ceil(1.05^j), always ending with k_max.
inline std::vector<std::int64_t> recording_indices(std::int64_t k_max) {
  std::vector<std::int64_t> out;
  if (k_max < 0)
    return out;
  const std::int64_t dense = std::min<std::int64_t>(k_max, 1000);
  for (std::int64_t k = 0; k <= dense; ++k)
    out.push_back(k);
  double g = 1.0;
  while (true) {
    g *= 1.05;
    const auto k = static_cast<std::int64_t>(std::ceil(g));
    if (k > k_max)
      break;
    if (k > out.back())
      out.push_back(k);
  }
  if (out.back() != k_max)
    out.push_back(k_max);
  return out;
}

namespace detail {

inline void record_point(RunRecord &rec, const NoisyOracle &oracle, const RecordOptions &opt, std::int64_t k,
                         const Eigen::VectorXd &x, double &running_min) {
  rec.k.push_back(k);
  if (opt.x_star) {
    const Eigen::VectorXd err = x - *opt.x_star;
    const double e = eval(opt.error_norm, err);
    rec.error_sq.push_back(e * e);
    if (opt.envelope)
      rec.envelope.push_back(evaluate(*opt.envelope, err).value);
  }
  if (opt.record_residual) {
    const double r = (oracle.mean(x) - x).squaredNorm();
    running_min = std::min(running_min, r);
    rec.residual_sq.push_back(r);
    rec.residual_min_sq.push_back(running_min);
  }
  if (opt.record_iterates)
    rec.iterates.push_back(x);
}

} // namespace detail

inline RunRecord run_sa(const NoisyOracle &oracle, const Eigen::VectorXd &x0, const StepFn &schedule,
                        std::int64_t k_max, const StreamRng &stream, const RecordOptions &opt = {}) {
  if (k_max < 0)
    throw PreconditionError("run_sa: k_max must be nonnegative");
  if (opt.record_residual && !oracle.mean)
    throw PreconditionError("run_sa: residual recording needs the mean operator");
  if (opt.x_star && opt.x_star->size() != x0.size())
    throw DimensionError("run_sa: x_star and x0 differ in length");

  RunRecord rec;
  std::vector<std::int64_t> idx;
  if (opt.every_iteration) {
    idx.resize(static_cast<std::size_t>(k_max) + 1);
    for (std::int64_t k = 0; k <= k_max; ++k)
      idx[static_cast<std::size_t>(k)] = k;
  } else {
    idx = recording_indices(k_max);
  }
  double running_min = std::numeric_limits<double>::infinity();
  std::size_t next = 0;
  Eigen::VectorXd x = x0;
  for (std::int64_t k = 0;; ++k) {
    if (next < idx.size() && idx[next] == k) {
      detail::record_point(rec, oracle, opt, k, x, running_min);
      ++next;
    } else if (opt.record_residual) {
      running_min = std::min(running_min, (oracle.mean(x) - x).squaredNorm());
    }
    if (k == k_max)
      break;
    const double eps = schedule(k);
    if (eps != 0.0) {
      StreamRng rng = stream.split(static_cast<std::uint64_t>(k));
      const Eigen::VectorXd y = oracle.sample(x, rng);
      x += eps * (y - x);
    }
    if (!x.allFinite())
      throw NumericalError("run_sa: non-finite iterate at k = " + std::to_string(k + 1), k + 1);
  }
  return rec;
}

/// Averaged iteration for non-expansive H. Records the residual at every k.
inline RunRecord run_averaged(const NoisyOracle &oracle, const Eigen::VectorXd &x0, const StepFn &schedule,
                              std::int64_t k_max, const StreamRng &stream, RecordOptions opt = {}) {
  if (oracle.noise_model.B != 0.0)
    throw PreconditionError("run_averaged: requires a noise model with B = 0");
  opt.record_residual = true;
  opt.every_iteration = true;
  return run_sa(oracle, x0, schedule, k_max, stream, opt);
}

/// Runs `paths` independent paths; path p receives root.split(p). Results
/// are stored by path index so aggregation order never depends on thread
/// scheduling.
inline std::vector<RunRecord> run_paths(std::size_t paths, const StreamRng &root,
                                        const std::function<RunRecord(const StreamRng &)> &run,
                                        unsigned threads = 0) {
  std::vector<RunRecord> out(paths);
  if (paths == 0)
    return out;
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, paths));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t p = next.fetch_add(1);
      if (p >= paths)
        return;
      try {
        out[p] = run(root.split(p));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next.store(paths);
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }
  if (failure)
    std::rethrow_exception(failure);
  return out;
}

struct CurveStats {
  std::vector<std::int64_t> k;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

/// Path-wise mean and standard error of one recorded series.
inline CurveStats aggregate(const std::vector<RunRecord> &records, std::vector<double> RunRecord::*field) {
  CurveStats out;
  if (records.empty())
    return out;
  out.k = records.front().k;
  const std::size_t n = (records.front().*field).size();
  for (const auto &r : records)
    if ((r.*field).size() != n || r.k != out.k)
      throw DimensionError("aggregate: records have inconsistent lengths");
  out.mean.resize(n);
  out.stderr_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    MeanAccumulator acc;
    for (const auto &r : records)
      acc.add((r.*field)[i]);
    const MeanEstimate e = acc.estimate();
    out.mean[i] = e.mean;
    out.stderr_[i] = e.stderr_;
  }
  if (out.k.size() != n)
    out.k.resize(n);
  return out;
}

/// min over i <= k of the mean curve, carrying the standard error at the
/// minimising index.
inline CurveStats running_min_of_means(const CurveStats &c) {
  CurveStats out = c;
  double best = std::numeric_limits<double>::infinity();
  double best_se = 0.0;
  for (std::size_t i = 0; i < c.mean.size(); ++i) {
    if (c.mean[i] < best) {
      best = c.mean[i];
      best_se = c.stderr_[i];
    }
    out.mean[i] = best;
    out.stderr_[i] = best_se;
  }
  return out;
}

struct TightnessTable {
  std::vector<std::int64_t> d;
  std::vector<std::int64_t> k;
  Eigen::MatrixXd mean;    // rows: d, cols: k; E||x_k||_inf^2
  Eigen::MatrixXd stderr_; // same layout
  AffineFit fit;           // k_max * E||x_kmax||_inf^2 against log d
};

/// H = 0, eps_k = 1/(k+1), standard normal noise: x_k is the running mean.
inline TightnessTable gaussian_average_experiment(const std::vector<std::int64_t> &d_list, std::int64_t k_max,
                                                  std::size_t paths, std::uint64_t seed, unsigned threads = 0) {
  if (k_max < 1)
    throw PreconditionError("gaussian_average_experiment: k_max must be at least 1");
  if (paths == 0)
    throw PreconditionError("gaussian_average_experiment: paths must be positive");
  TightnessTable t;
  t.d = d_list;
  t.k = recording_indices(k_max);
  t.mean.resize(static_cast<Eigen::Index>(d_list.size()), static_cast<Eigen::Index>(t.k.size()));
  t.stderr_.resizeLike(t.mean);
  const StreamRng root(seed);
  const StepFn step = [](std::int64_t k) { return 1.0 / static_cast<double>(k + 1); };
  for (std::size_t i = 0; i < d_list.size(); ++i) {
    const Eigen::Index d = d_list[i];
    if (d < 1)
      throw PreconditionError("gaussian_average_experiment: dimensions must be positive");
    NoisyOracle oracle;
    oracle.sample = [d](const Eigen::VectorXd &, StreamRng &rng) { return rng.normal_vector(d); };
    oracle.noise_model = {static_cast<double>(d), 0.0, Norm<double>::lp(2.0)};
    RecordOptions opt;
    opt.x_star = Eigen::VectorXd::Zero(d);
    opt.error_norm = Norm<double>::linf();
    const auto recs = run_paths(
        paths, root.split(static_cast<std::uint64_t>(d)),
        [&](const StreamRng &s) { return run_sa(oracle, Eigen::VectorXd::Zero(d), step, k_max, s, opt); }, threads);
    const CurveStats c = aggregate(recs, &RunRecord::error_sq);
    for (std::size_t j = 0; j < t.k.size(); ++j) {
      t.mean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c.mean[j];
      t.stderr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c.stderr_[j];
    }
  }
  if (d_list.size() >= 2) {
    std::vector<double> x, y;
    const Eigen::Index last = t.mean.cols() - 1;
    for (std::size_t i = 0; i < d_list.size(); ++i) {
      x.push_back(std::log(static_cast<double>(d_list[i])));
      y.push_back(static_cast<double>(k_max) * t.mean(static_cast<Eigen::Index>(i), last));
    }
    t.fit = fit_affine(x, y);
  }
  return t;
}

struct DriftEstimate {
  double lhs = 0.0;        // Monte Carlo E[M(x' - x*)]
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double margin = 0.0;     // rhs - lhs - 3 stderr
};

/// One-step drift of the envelope from x with stepsize eps.
inline DriftEstimate verify_drift(const EnvelopeSpec<double> &spec, const NoisyOracle &oracle,
                                  const AlphaConstants &a, const Eigen::VectorXd &x,
                                  const std::optional<Eigen::VectorXd> &x_star, double eps, std::int64_t mc_samples,
                                  const StreamRng &stream) {
  if (!x_star)
    throw PreconditionError("verify_drift: the fixed point x* is required");
  if (mc_samples < 2)
    throw PreconditionError("verify_drift: need at least two samples");
  const Eigen::VectorXd &xs = *x_star;
  MeanAccumulator acc;
  for (std::int64_t i = 0; i < mc_samples; ++i) {
    StreamRng rng = stream.split(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd next = x + eps * (oracle.sample(x, rng) - x);
    acc.add(evaluate(spec, Eigen::VectorXd(next - xs)).value);
  }
  const MeanEstimate e = acc.estimate();
  const double m0 = evaluate(spec, Eigen::VectorXd(x - xs)).value;
  const double xs_norm = eval(spec.contraction_norm, xs);
  const double A = oracle.noise_model.A;
  const double B = oracle.noise_model.B;
  DriftEstimate d;
  d.lhs = e.mean;
  d.lhs_stderr = e.stderr_;
  d.rhs = (1.0 - 2.0 * a.alpha2 * eps + a.alpha3 * eps * eps) * m0 +
          a.alpha4 * (A + 2.0 * B * xs_norm * xs_norm) * eps * eps / (2.0 * (1.0 + a.mu / (a.ell_cs * a.ell_cs)));
  d.margin = d.rhs - d.lhs - 3.0 * d.lhs_stderr;
  return d;
}

struct ContractionReport {
  std::int64_t pairs = 0;
  std::int64_t violations = 0;
  double max_ratio = 0.0; // max ||H x - H y|| / ||x - y||
};

/// Random-pair refutation test of ||H(x) - H(y)|| <= gamma ||x - y|| + tol.
inline ContractionReport check_contraction(const OperatorModel &op, Eigen::Index dim, std::int64_t pairs,
                                           const StreamRng &stream, double scale = 10.0, double tol = 1e-10) {
  ContractionReport rep;
  rep.pairs = pairs;
  for (std::int64_t i = 0; i < pairs; ++i) {
    StreamRng rng = stream.split(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd x = scale * rng.normal_vector(dim);
    const Eigen::VectorXd y = scale * rng.normal_vector(dim);
    const double num = eval(op.contraction_norm, Eigen::VectorXd(op.apply(x) - op.apply(y)));
    const double den = eval(op.contraction_norm, Eigen::VectorXd(x - y));
    if (den > 0.0)
      rep.max_ratio = std::max(rep.max_ratio, num / den);
    if (num > op.gamma * den + tol)
      ++rep.violations;
  }
  return rep;
}

struct NoiseReport {
  double second_moment = 0.0; // E||w||_e^2
  double second_moment_stderr = 0.0;
  double envelope = 0.0;      // A + B ||x||_e^2
  double max_mean_z = 0.0;    // largest |mean w_i| / stderr_i
  bool ok = false;            // second_moment <= envelope + 3 stderr
};

/// Empirical noise statistics at a fixed point x, w = sample(x) - mean(x).
inline NoiseReport check_noise(const NoisyOracle &oracle, const Eigen::VectorXd &x, std::int64_t samples,
                               const StreamRng &stream) {
  if (!oracle.mean)
    throw PreconditionError("check_noise: the mean operator is required");
  if (samples < 2)
    throw PreconditionError("check_noise: need at least two samples");
  const Eigen::VectorXd hx = oracle.mean(x);
  const Norm<double> &en = oracle.noise_model.error_norm;
  MeanAccumulator sq;
  std::vector<MeanAccumulator> coord(static_cast<std::size_t>(x.size()));
  for (std::int64_t i = 0; i < samples; ++i) {
    StreamRng rng = stream.split(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd w = oracle.sample(x, rng) - hx;
    const double n = eval(en, w);
    sq.add(n * n);
    for (Eigen::Index j = 0; j < w.size(); ++j)
      coord[static_cast<std::size_t>(j)].add(w[j]);
  }
  NoiseReport r;
  const MeanEstimate e = sq.estimate();
  r.second_moment = e.mean;
  r.second_moment_stderr = e.stderr_;
  const double xn = eval(en, x);
  r.envelope = oracle.noise_model.A + oracle.noise_model.B * xn * xn;
  for (const auto &c : coord) {
    const MeanEstimate ce = c.estimate();
    if (ce.stderr_ > 0.0)
      r.max_mean_z = std::max(r.max_mean_z, std::abs(ce.mean) / ce.stderr_);
    else if (ce.mean != 0.0)
      r.max_mean_z = std::numeric_limits<double>::infinity();
  }
  r.ok = r.second_moment <= r.envelope + 3.0 * r.second_moment_stderr;
  return r;
}

} // namespace csa
