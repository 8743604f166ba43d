#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cutofflab/rng.hpp"
#include "cutofflab/wasserstein.hpp"
#include "support/oracles.hpp"

using namespace cutofflab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd gaussian_cloud(int n, int d, std::uint64_t key, double mean = 0.0) {
  RngStream rng(key, 0, 0);
  MatrixXd pts(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) pts(i, j) = mean + rng.normal();
  }
  return pts;
}

}  // namespace

TEST_CASE("identical measures have distance zero") {
  EmpiricalMeasure mu(gaussian_cloud(64, 2, 1));
  CHECK(wp_assignment(mu, mu, 2.0).value == 0.0);
  EmpiricalMeasure mu1(gaussian_cloud(64, 1, 2));
  CHECK(wp_exact_1d(mu1, mu1, 2.0).value == 0.0);
  CHECK(wp_sliced(mu, mu, 2.0, 8, 3).value == 0.0);
}

TEST_CASE("point masses") {
  MatrixXd a(1, 1), b(1, 1);
  a << 0.0;
  b << 3.0;
  CHECK(wp_exact_1d(EmpiricalMeasure(a), EmpiricalMeasure(b), 2.0).value ==
        doctest::Approx(3.0));
}

TEST_CASE("gaussian shift in one dimension matches the closed form") {
  const int n = 100000;
  EmpiricalMeasure mu1(gaussian_cloud(n, 1, 4, 0.0));
  EmpiricalMeasure mu2(gaussian_cloud(n, 1, 5, 1.0));
  const double oracle = oracles::gaussian_w2(0.0, 1.0, 1.0, 1.0);  // = 1
  CHECK(wp_exact_1d(mu1, mu2, 2.0).value == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("two-point planar shift") {
  MatrixXd a(2, 2), b(2, 2);
  a << 0.0, 0.0, 1.0, 0.0;
  b << 0.0, 1.0, 1.0, 1.0;
  CHECK(wp_assignment(EmpiricalMeasure(a), EmpiricalMeasure(b), 2.0).value ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("assignment agrees with the 1-d exact estimator") {
  EmpiricalMeasure mu1(gaussian_cloud(512, 1, 6));
  EmpiricalMeasure mu2(gaussian_cloud(512, 1, 7, 0.3));
  for (double p : {1.0, 2.0}) {
    CHECK(wp_assignment(mu1, mu2, p).value ==
          doctest::Approx(wp_exact_1d(mu1, mu2, p).value).epsilon(1e-12));
  }
}

TEST_CASE("assignment equals factorial brute force on small instances") {
  RngStream rng(99, 0, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 6.0);   // 2..7
    const int d = 1 + static_cast<int>(rng.uniform() * 3.0);   // 1..3
    MatrixXd a(n, d), b(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        a(i, j) = rng.normal();
        b(i, j) = rng.normal();
      }
    }
    for (double p : {0.5, 1.0, 2.0}) {
      MatrixXd cost(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          cost(i, j) = std::pow((a.row(i) - b.row(j)).norm(), p);
        }
      }
      const double brute = oracles::brute_force_assignment(cost) / n;
      const double expected = p >= 1.0 ? std::pow(brute, 1.0 / p) : brute;
      const double solved = wp_assignment(EmpiricalMeasure(a), EmpiricalMeasure(b), p).value;
      CHECK(solved == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("sliced distance is dominated by the exact distance") {
  RngStream rng(123, 0, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 16 + static_cast<int>(rng.uniform() * 48.0);
    MatrixXd a(n, 2), b(n, 2);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) {
        a(i, j) = rng.normal();
        b(i, j) = 0.5 + rng.normal();
      }
    }
    EmpiricalMeasure mu1(a), mu2(b);
    const double exact = wp_assignment(mu1, mu2, 2.0).value;
    const double sliced = wp_sliced(mu1, mu2, 2.0, 12, trial).value;
    CHECK(sliced <= exact + 1e-12);
  }
}

TEST_CASE("sliced seed stability") {
  EmpiricalMeasure mu1(gaussian_cloud(256, 3, 8));
  EmpiricalMeasure mu2(gaussian_cloud(256, 3, 9, 0.4));
  const double v1 = wp_sliced(mu1, mu2, 2.0, 256, 1).value;
  const double v2 = wp_sliced(mu1, mu2, 2.0, 256, 2).value;
  CHECK(v1 == doctest::Approx(v2).epsilon(0.05));
}

TEST_CASE("shift linearity is exact for p >= 1 on self-coupled clouds") {
  EmpiricalMeasure mu(gaussian_cloud(512, 2, 10));
  VectorXd u(2);
  u << 3.0, 4.0;
  for (double p : {1.0, 2.0}) {
    const auto report = verify_shift_linearity(mu, u, p);
    CHECK(report.pass);
    CHECK(report.lhs == doctest::Approx(5.0).epsilon(1e-9));
  }
  const auto zero_report = verify_shift_linearity(mu, VectorXd::Zero(2), 2.0);
  CHECK(zero_report.lhs == 0.0);
  CHECK(zero_report.pass);
}

TEST_CASE("shift bound for p < 1") {
  EmpiricalMeasure spread(5.0 * gaussian_cloud(512, 2, 11));
  VectorXd u(2);
  u << 0.2, 0.1;
  const auto report = verify_shift_linearity(spread, u, 0.5);
  CHECK(report.pass);
  CHECK(report.lower == 0.0);  // large spread swamps the lower bound
  CHECK(report.lhs <= report.rhs + report.tolerance);

  // concentrated cloud: the lower bound becomes active
  EmpiricalMeasure tight(0.01 * gaussian_cloud(512, 2, 12));
  VectorXd big(2);
  big << 2.0, 0.0;
  const auto tight_report = verify_shift_linearity(tight, big, 0.5);
  CHECK(tight_report.pass);
  CHECK(tight_report.lower > 0.0);
  CHECK(tight_report.lhs >= tight_report.lower - tight_report.tolerance);
}

TEST_CASE("translation invariance and homogeneity") {
  EmpiricalMeasure mu1(gaussian_cloud(128, 2, 13));
  EmpiricalMeasure mu2(gaussian_cloud(128, 2, 14, 0.5));
  VectorXd u1(2), u2(2);
  u1 << 1.0, -2.0;
  u2 << 0.25, 0.75;

  const auto identity = verify_translation_homogeneity(mu1, mu2, u1, u2, 1.0, 2.0);
  CHECK(identity.pass);

  const auto scaled = verify_translation_homogeneity(mu1, mu2, u1, u2, -2.0, 2.0);
  CHECK(scaled.pass);
  CHECK(scaled.factor == doctest::Approx(2.0));

  const auto fractional = verify_translation_homogeneity(mu1, mu2, u1, u2, 3.0, 0.5);
  CHECK(fractional.pass);
  CHECK(fractional.factor == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("outer exponent convention for p < 1") {
  // doubling all coordinates multiplies the reported value by 2^{0.5}
  EmpiricalMeasure mu1(gaussian_cloud(64, 2, 15));
  EmpiricalMeasure mu2(gaussian_cloud(64, 2, 16, 1.0));
  const double base = wp_assignment(mu1, mu2, 0.5).value;
  EmpiricalMeasure mu1x2(2.0 * mu1.points);
  EmpiricalMeasure mu2x2(2.0 * mu2.points);
  const double doubled = wp_assignment(mu1x2, mu2x2, 0.5).value;
  CHECK(doubled == doctest::Approx(std::pow(2.0, 0.5) * base).epsilon(1e-12));
}

TEST_CASE("metric axioms on samples") {
  EmpiricalMeasure a(gaussian_cloud(96, 2, 17));
  EmpiricalMeasure b(gaussian_cloud(96, 2, 18, 0.7));
  EmpiricalMeasure c(gaussian_cloud(96, 2, 19, -0.4));
  const double ab = wp_assignment(a, b, 2.0).value;
  const double ba = wp_assignment(b, a, 2.0).value;
  const double bc = wp_assignment(b, c, 2.0).value;
  const double ac = wp_assignment(a, c, 2.0).value;
  CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
  CHECK(ac <= ab + bc + 1e-9);
}

TEST_CASE("errors: caps, weights, dimensions") {
  EmpiricalMeasure mu1(gaussian_cloud(8, 2, 20));
  EmpiricalMeasure mu2(gaussian_cloud(8, 2, 21));
  CHECK_THROWS_AS(wp_assignment(mu1, mu2, 2.0, 4), SizeCapExceeded);
  EmpiricalMeasure small(gaussian_cloud(4, 2, 22));
  CHECK_THROWS_AS(wp_assignment(mu1, small, 2.0), UnequalWeights);
  EmpiricalMeasure d1(gaussian_cloud(8, 1, 23));
  CHECK_THROWS_AS(wp_assignment(mu1, d1, 2.0), DimensionMismatch);
  CHECK_THROWS_AS(wp_exact_1d(mu1, mu1, 2.0), DimensionMismatch);
  Eigen::VectorXd bad_weights = Eigen::VectorXd::Constant(8, 0.2);
  CHECK_THROWS_AS(EmpiricalMeasure(gaussian_cloud(8, 1, 24), bad_weights), DegenerateInput);
}

TEST_CASE("weighted 1-d transport") {
  MatrixXd a(2, 1), b(1, 1);
  a << 0.0, 1.0;
  b << 0.5;
  VectorXd wa(2), wb(1);
  wa << 0.5, 0.5;
  wb << 1.0;
  // both atoms move distance 0.5: W_1 = 0.5, W_2 = 0.5
  CHECK(wp_exact_1d(EmpiricalMeasure(a, wa), EmpiricalMeasure(b, wb), 1.0).value ==
        doctest::Approx(0.5));
  CHECK(wp_exact_1d(EmpiricalMeasure(a, wa), EmpiricalMeasure(b, wb), 2.0).value ==
        doctest::Approx(0.5));
}

TEST_CASE("wp_estimate: subsampled value tracks the full solution") {
  EmpiricalMeasure mu1(gaussian_cloud(3000, 1, 25));
  EmpiricalMeasure mu2(gaussian_cloud(3000, 1, 26, 1.0));
  WpEstimateOptions opts;
  opts.size_cap = 512;
  opts.seed = 5;
  const auto est = wp_estimate(mu1, mu2, 2.0, opts);
  CHECK(est.value == doctest::Approx(1.0).epsilon(0.08));
  CHECK(est.stderr_ > 0.0);

  // unequal counts resolve by subsampling the larger cloud
  EmpiricalMeasure mu3(gaussian_cloud(700, 1, 27, 1.0));
  const auto uneven = wp_estimate(mu1, mu3, 2.0, opts);
  CHECK(uneven.value == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("wp_estimate dispatches to exact transport for small equal clouds") {
  EmpiricalMeasure mu1(gaussian_cloud(300, 2, 28));
  EmpiricalMeasure mu2(gaussian_cloud(300, 2, 29, 0.5));
  WpEstimateOptions opts;
  opts.size_cap = 512;
  const auto est = wp_estimate(mu1, mu2, 2.0, opts);
  CHECK(est.value == doctest::Approx(wp_assignment(mu1, mu2, 2.0).value).epsilon(1e-12));
}
