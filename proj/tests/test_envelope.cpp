#include <doctest.h>

#include <cmath>

#include "csa/envelope.hpp"
#include "csa/rng.hpp"
#include "oracles.hpp"

using csa::EnvelopeSpec;
using csa::Norm;
using Eigen::VectorXd;

namespace {

double objective(const EnvelopeSpec<double> &spec, const VectorXd &x, const VectorXd &u) {
  const double c = csa::eval(spec.contraction_norm, u);
  const double s = csa::eval(spec.smoothing_norm, VectorXd(x - u));
  return 0.5 * c * c + 0.5 * s * s / spec.mu;
}

double grid_envelope(const EnvelopeSpec<double> &spec, const VectorXd &x, double h) {
  const double r = x.cwiseAbs().maxCoeff() + 0.1;
  const auto f = [&](const VectorXd &u) { return objective(spec, x, u); };
  return oracle::grid_minimize(f, VectorXd::Constant(x.size(), -r), VectorXd::Constant(x.size(), r), h).value;
}

std::vector<EnvelopeSpec<double>> random_specs(csa::StreamRng &rng, Eigen::Index d) {
  const double mu = std::exp(-2.0 + 3.0 * rng.uniform());
  const VectorXd w = (rng.normal_vector(d).array().abs() + 0.1).matrix();
  return {EnvelopeSpec<double>(Norm<>::linf(), Norm<>::lp(2), mu),
          EnvelopeSpec<double>(Norm<>::linf(), Norm<>::lp(2 + 6 * rng.uniform()), mu),
          EnvelopeSpec<double>(Norm<>::lp(3), Norm<>::lp(2), mu),
          EnvelopeSpec<double>(Norm<>::lp(2), Norm<>::lp(4), mu),
          EnvelopeSpec<double>(Norm<>::linf(), Norm<>::weighted_l2(w), mu)};
}

} // namespace

TEST_CASE("closed form for identical l2 norms") {
  const EnvelopeSpec<double> spec(Norm<>::lp(2), Norm<>::lp(2), 0.5);
  const VectorXd x = (VectorXd(2) << 3, 4).finished();
  const auto v = csa::evaluate(spec, x);
  CHECK(v.value == doctest::Approx(25.0 / 3.0).epsilon(1e-14));
  CHECK(v.minimizer[0] == doctest::Approx(2.0));
  CHECK(v.minimizer[1] == doctest::Approx(8.0 / 3.0));
  const VectorXd g = csa::gradient(spec, x);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(8.0 / 3.0));

  // The generic solver lands on the same point.
  const auto pg = csa::evaluate(spec, x, 1e-12, {csa::EnvelopeSolver::ProximalGradient});
  CHECK(pg.value == doctest::Approx(25.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("zero input") {
  csa::StreamRng rng(1);
  for (const auto &spec : random_specs(rng, 3)) {
    const auto v = csa::evaluate(spec, VectorXd::Zero(3));
    CHECK(v.value == 0.0);
    CHECK(v.minimizer.isZero());
    CHECK(csa::gradient(spec, VectorXd::Zero(3)).isZero());
  }
}

TEST_CASE("sup-norm example against the grid oracle") {
  const EnvelopeSpec<double> spec(Norm<>::linf(), Norm<>::lp(2), 1.0);
  const VectorXd x = (VectorXd(2) << 1, 0).finished();
  const auto f = [&](const VectorXd &u) { return objective(spec, x, u); };
  const auto g = oracle::grid_minimize(f, VectorXd::Constant(2, -2), VectorXd::Constant(2, 2), 1e-3);
  const auto v = csa::evaluate(spec, x);
  CHECK(std::abs(v.value - g.value) <= 2e-3);
  CHECK(v.value <= g.value + 1e-12);
  // Here the minimizer is (1/2, 0) and M = 1/4.
  CHECK(v.value == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("evaluate agrees with grid minimization for d <= 3") {
  csa::StreamRng rng(2);
  for (int t = 0; t < 12; ++t) {
    const Eigen::Index d = 1 + t % 3;
    const VectorXd x = rng.normal_vector(d);
    for (const auto &spec : random_specs(rng, d)) {
      const auto v = csa::evaluate(spec, x);
      const double g = grid_envelope(spec, x, 1e-3);
      CHECK(std::abs(v.value - g) <= 2e-3);
      CHECK(v.value <= g + csa::default_tolerance(spec, x));
      CHECK(v.residual <= csa::default_tolerance(spec, x));
    }
  }
}

TEST_CASE("sup-norm clipping path agrees with the proximal-gradient solver") {
  csa::StreamRng rng(3);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index d = 1 + t % 12;
    const VectorXd x = 3.0 * rng.normal_vector(d);
    const EnvelopeSpec<double> spec(Norm<>::linf(), Norm<>::lp(2 + 8 * rng.uniform()), 0.05 + 2 * rng.uniform());
    const auto a = csa::evaluate(spec, x);
    const auto b = csa::evaluate(spec, x, 1e-13, {csa::EnvelopeSolver::ProximalGradient});
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-7));
  }
}

TEST_CASE("sandwich collapses to equality for identical norms") {
  csa::StreamRng rng(4);
  for (double p : {2.0, 3.0, 6.0}) {
    const EnvelopeSpec<double> spec(Norm<>::lp(p), Norm<>::lp(p), 0.7);
    for (int t = 0; t < 20; ++t) {
      const VectorXd x = rng.normal_vector(4);
      const double f = 0.5 * std::pow(csa::eval(spec.contraction_norm, x), 2);
      CHECK((1 + spec.mu) * csa::evaluate(spec, x).value == doctest::Approx(f).epsilon(1e-12));
      const auto s = csa::sandwich_check(spec, x);
      CHECK(s.lower_ok);
      CHECK(s.upper_ok);
    }
  }
}

TEST_CASE("sandwich bounds on random specs") {
  csa::StreamRng rng(5);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index d = 1 + t % 16;
    const VectorXd x = rng.normal_vector(d);
    const EnvelopeSpec<double> spec(Norm<>::linf(), Norm<>::lp(2 + 10 * rng.uniform()), std::exp(-3 + 5 * rng.uniform()));
    const auto s = csa::sandwich_check(spec, x);
    CHECK(s.lower_ok);
    CHECK(s.upper_ok);
  }
}

TEST_CASE("homogeneity, triangle property and smoothness of M") {
  csa::StreamRng rng(6);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index d = 2 + t % 6;
    for (const auto &spec : random_specs(rng, d)) {
      const VectorXd x = rng.normal_vector(d), y = rng.normal_vector(d);
      const double tt = 0.1 + 5 * rng.uniform();
      const double mx = csa::evaluate(spec, x, 1e-13).value;
      const double my = csa::evaluate(spec, y, 1e-13).value;
      CHECK(csa::evaluate(spec, VectorXd(tt * x), 1e-13).value == doctest::Approx(tt * tt * mx).epsilon(1e-6));
      const double mxy = csa::evaluate(spec, VectorXd(x + y), 1e-13).value;
      CHECK(std::sqrt(mxy) <= std::sqrt(mx) + std::sqrt(my) + 1e-6);
      const VectorXd g = csa::gradient(spec, x, 1e-13);
      const double sn = csa::eval(spec.smoothing_norm, VectorXd(x - y));
      CHECK(my <= mx + g.dot(y - x) + spec.L / (2 * spec.mu) * sn * sn + 1e-6);
    }
  }
}

TEST_CASE("gradient matches central finite differences") {
  csa::StreamRng rng(7);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 2 + t % 5;
    for (const auto &spec : random_specs(rng, d)) {
      const VectorXd x = rng.normal_vector(d);
      const VectorXd g = csa::gradient(spec, x, 1e-14);
      const double h = 1e-5;
      for (Eigen::Index i = 0; i < d; ++i) {
        VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd =
            (csa::evaluate(spec, xp, 1e-14).value - csa::evaluate(spec, xm, 1e-14).value) / (2 * h);
        CHECK(std::abs(fd - g[i]) <= 1e-4 * std::max(1.0, std::abs(g[i])));
      }
    }
  }
}

TEST_CASE("prox maps satisfy their optimality against grid search") {
  csa::StreamRng rng(8);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 1 + t % 2;
    const VectorXd v = 2.0 * rng.normal_vector(d);
    const double lam = 0.1 + 2 * rng.uniform();
    for (const Norm<> &n : {Norm<>::linf(), Norm<>::lp(3.5)}) {
      const VectorXd u = csa::prox_half_squared(n, v, lam);
      const auto f = [&](const VectorXd &z) {
        const double a = csa::eval(n, z);
        return 0.5 * lam * a * a + 0.5 * (z - v).squaredNorm();
      };
      const double r = v.cwiseAbs().maxCoeff() + 0.1;
      const auto g = oracle::grid_minimize(f, VectorXd::Constant(d, -r), VectorXd::Constant(d, r), 1e-4);
      CHECK(f(u) <= g.value + 1e-10);
      CHECK((u - g.point).cwiseAbs().maxCoeff() <= 1e-3);
    }
  }
}

TEST_CASE("solver budget exhaustion reports the best value") {
  // With s = l2 a single step is already exact, so use l4.
  const EnvelopeSpec<double> spec(Norm<>::lp(3), Norm<>::lp(4), 0.5);
  const VectorXd x = (VectorXd(3) << 1, -2, 3).finished();
  try {
    csa::evaluate(spec, x, 1e-15, {csa::EnvelopeSolver::ProximalGradient, 1});
    FAIL("expected ConvergenceError");
  } catch (const csa::ConvergenceError &e) {
    CHECK(e.best_value() > 0);
    CHECK(e.residual() > 0);
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS(EnvelopeSpec<double>(Norm<>::linf(), Norm<>::lp(2), 0.0));
  CHECK_THROWS(EnvelopeSpec<double>(Norm<>::lp(2), Norm<>::linf(), 1.0));
  const EnvelopeSpec<double> spec(Norm<>::linf(), Norm<>::weighted_l2(VectorXd::Constant(3, 1.0 / 3)), 1.0);
  CHECK_THROWS_AS(csa::evaluate(spec, VectorXd::Ones(2)), csa::DimensionError);
}
