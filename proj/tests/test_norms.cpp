#include <doctest.h>

#include <cmath>

#include "csa/norms.hpp"
#include "csa/rng.hpp"
#include "oracles.hpp"

using csa::Norm;
using Eigen::VectorXd;

TEST_CASE("eval examples") {
  CHECK(csa::eval(Norm<>::linf(), VectorXd((VectorXd(3) << 1, -3, 2).finished())) == 3.0);
  CHECK(csa::eval(Norm<>::lp(2), VectorXd((VectorXd(2) << 3, 4).finished())) == doctest::Approx(5.0).epsilon(1e-15));
  const Norm<> w = Norm<>::weighted_l2(VectorXd::Constant(2, 0.5));
  CHECK(csa::eval(w, VectorXd((VectorXd(2) << 2, 0).finished())) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(csa::eval(w, VectorXd::Ones(3)), csa::DimensionError);
}

TEST_CASE("construction rejects invalid norms") {
  CHECK_THROWS(Norm<>::lp(1.5));
  CHECK_THROWS(Norm<>::lp(std::numeric_limits<double>::infinity()));
  CHECK_THROWS(Norm<>::weighted_l2(VectorXd((VectorXd(2) << 1, 0).finished())));
  CHECK_THROWS(Norm<>::lp_log_dim(1));
}

TEST_CASE("lp evaluation agrees with a plain loop, including large p") {
  csa::StreamRng rng(1);
  for (int t = 0; t < 200; ++t) {
    const VectorXd x = rng.normal_vector(1 + t % 20);
    for (double p : {2.0, 3.0, 7.5, 40.0}) {
      CHECK(csa::eval(Norm<>::lp(p), x) == doctest::Approx(oracle::lp_norm(x, p)).epsilon(1e-12));
    }
  }
  // Scaled evaluation survives entries whose p-th power overflows.
  const VectorXd big = VectorXd::Constant(4, 1e300);
  CHECK(csa::eval(Norm<>::lp(55.0), big) == doctest::Approx(1e300 * std::pow(4.0, 1.0 / 55.0)).epsilon(1e-12));
}

TEST_CASE("homogeneity and triangle inequality") {
  csa::StreamRng rng(2);
  const VectorXd w = (rng.normal_vector(6).array().abs() + 0.1).matrix();
  const std::vector<Norm<>> norms = {Norm<>::lp(2), Norm<>::lp(5.5), Norm<>::lp_log_dim(6), Norm<>::linf(),
                                     Norm<>::weighted_l2(w)};
  for (int t = 0; t < 500; ++t) {
    const VectorXd x = rng.normal_vector(6), y = rng.normal_vector(6);
    const double s = 10.0 * rng.normal();
    for (const auto &n : norms) {
      CHECK(csa::eval(n, VectorXd(s * x)) == doctest::Approx(std::abs(s) * csa::eval(n, x)).epsilon(1e-12));
      CHECK(csa::eval(n, VectorXd(x + y)) <= csa::eval(n, x) + csa::eval(n, y) + 1e-12);
    }
  }
}

TEST_CASE("smoothness constants") {
  CHECK(csa::smoothness_constant(Norm<>::lp(2)) == 1.0);
  CHECK(csa::smoothness_constant(Norm<>::lp(4.0 * std::log(std::exp(1.0)))) == doctest::Approx(3.0));
  CHECK(csa::smoothness_constant(Norm<>::weighted_l2(VectorXd::Constant(3, 1.0 / 3))) == 1.0);
  CHECK_THROWS_AS(csa::smoothness_constant(Norm<>::linf()), csa::UnsupportedNormError);
}

TEST_CASE("gradient of half squared lp norm") {
  const Norm<> n = Norm<>::lp(3);
  CHECK(csa::half_squared_gradient(n, VectorXd::Zero(4)).isZero());
  csa::StreamRng rng(3);
  for (int t = 0; t < 50; ++t) {
    const VectorXd x = rng.normal_vector(5);
    const VectorXd g = csa::half_squared_gradient(n, x);
    // Analytic form ||x||^{2-p} sign(x) |x|^{p-1}.
    const double r = oracle::lp_norm(x, 3);
    for (Eigen::Index i = 0; i < 5; ++i) {
      const double expect = std::pow(r, -1.0) * (x[i] > 0 ? 1 : -1) * std::pow(std::abs(x[i]), 2.0);
      CHECK(g[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("smoothness inequality for lp and weighted l2") {
  csa::StreamRng rng(4);
  const std::vector<Norm<>> norms = {Norm<>::lp(2), Norm<>::lp(3), Norm<>::lp(9), Norm<>::lp_log_dim(7),
                                     Norm<>::weighted_l2((rng.normal_vector(7).array().abs() + 0.05).matrix())};
  for (const auto &n : norms) {
    const double L = csa::smoothness_constant(n);
    for (int t = 0; t < 500; ++t) {
      const VectorXd x = rng.normal_vector(7), y = rng.normal_vector(7);
      const double gx = 0.5 * std::pow(csa::eval(n, x), 2), gy = 0.5 * std::pow(csa::eval(n, y), 2);
      const double rhs = gx + csa::half_squared_gradient(n, x).dot(y - x) + 0.5 * L * std::pow(csa::eval(n, VectorXd(x - y)), 2);
      CHECK(gy <= rhs + 1e-10);
    }
  }
}

TEST_CASE("equivalence constants examples") {
  const auto c = csa::equivalence_constants(Norm<>::linf(), Norm<>::lp_log_dim(16), 16);
  CHECK(c.lower == 1.0);
  CHECK(c.upper == doctest::Approx(std::pow(16.0, 1.0 / (4.0 * std::log(16.0)))).epsilon(1e-14));
  CHECK(c.upper == doctest::Approx(std::exp(0.25)).epsilon(1e-14));

  const auto id = csa::equivalence_constants(Norm<>::lp(3), Norm<>::lp(3), 5);
  CHECK(id.lower == 1.0);
  CHECK(id.upper == 1.0);

  // Uniform weights over 4 states against the sup norm.
  const Norm<> w = Norm<>::weighted_l2(VectorXd::Constant(4, 0.25));
  const auto e = csa::equivalence_constants(Norm<>::linf(), w, 4);
  CHECK(e.lower == doctest::Approx(0.5));
  CHECK(e.upper == doctest::Approx(1.0));

  CHECK_THROWS_AS(csa::equivalence_constants(w, Norm<>::lp(3), 4), csa::UnsupportedNormError);
}

TEST_CASE("equivalence constants hold on random vectors and are attained") {
  csa::StreamRng rng(5);
  const Eigen::Index d = 9;
  const VectorXd w = (rng.normal_vector(d).array().abs() + 0.05).matrix();
  const std::vector<std::pair<Norm<>, Norm<>>> pairs = {
      {Norm<>::linf(), Norm<>::lp(4)},          {Norm<>::lp(4), Norm<>::linf()},
      {Norm<>::lp(2), Norm<>::lp(6)},           {Norm<>::linf(), Norm<>::lp_log_dim(d)},
      {Norm<>::linf(), Norm<>::weighted_l2(w)}, {Norm<>::weighted_l2(w), Norm<>::linf()}};
  for (const auto &[a, b] : pairs) {
    const auto c = csa::equivalence_constants(a, b, d);
    CHECK(c.lower <= 1.0 + 1e-15);
    CHECK(c.upper >= 1.0 - 1e-15);
    double lo = 1e300, hi = 0;
    for (int t = 0; t < 10000; ++t) {
      const VectorXd x = rng.normal_vector(d);
      const double ratio = csa::eval(b, x) / csa::eval(a, x);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    // Analytic extremizers: basis vectors and the all-ones vector.
    for (Eigen::Index i = 0; i <= d; ++i) {
      const VectorXd x = i < d ? VectorXd(VectorXd::Unit(d, i)) : VectorXd(VectorXd::Ones(d));
      const double ratio = csa::eval(b, x) / csa::eval(a, x);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(lo >= c.lower * (1 - 1e-12));
    CHECK(hi <= c.upper * (1 + 1e-12));
    CHECK(lo == doctest::Approx(c.lower).epsilon(1e-12));
    CHECK(hi == doctest::Approx(c.upper).epsilon(1e-12));
  }
}

TEST_CASE("norms are usable with other scalar types") {
  const Eigen::VectorXf x = (Eigen::VectorXf(2) << 3.0f, 4.0f).finished();
  CHECK(csa::eval(Norm<float>::lp(2.0f), x) == doctest::Approx(5.0f));
  using LD = long double;
  const csa::VectorX<LD> y = csa::VectorX<LD>::Constant(3, LD(2));
  CHECK(static_cast<double>(csa::eval(Norm<LD>::linf(), y)) == 2.0);
}

TEST_CASE("dual exponent") {
  CHECK(csa::dual_exponent(2.0) == 2.0);
  CHECK(csa::dual_exponent(4.0) == doctest::Approx(4.0 / 3.0));
  CHECK(csa::dual_exponent(std::numeric_limits<double>::infinity()) == 1.0);
}
