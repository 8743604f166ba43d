#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "cutofflab/rng.hpp"
#include "support/oracles.hpp"

using namespace cutofflab;

TEST_CASE("philox draws are pure functions of (key, counter)") {
  RngStream a(42, 7, 3), b(42, 7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.raw64() == b.raw64());

  RngStream c(42, 7, 4);
  bool any_diff = false;
  RngStream a2(42, 7, 3);
  for (int i = 0; i < 16; ++i) any_diff = any_diff || (a2.raw64() != c.raw64());
  CHECK(any_diff);
}

TEST_CASE("streams with distinct trajectory ids are distinct") {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t traj = 0; traj < 1000; ++traj) {
    RngStream s(123, traj, 0);
    firsts.insert(s.raw64());
  }
  CHECK(firsts.size() == 1000);
}

TEST_CASE("uniform moments") {
  RngStream s(1, 0, 0);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 5e-3);
  CHECK(std::abs(sum_sq / n - 1.0 / 3.0) < 5e-3);
}

TEST_CASE("normal moments and tails") {
  RngStream s(2, 0, 0);
  const int n = 200000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = s.normal();
  CHECK(std::abs(oracles::mean(xs)) < 4.0 / std::sqrt(n));
  CHECK(std::abs(oracles::variance(xs) - 1.0) < 0.02);
  int beyond3 = 0;
  for (double x : xs) {
    if (std::abs(x) > 3.0) ++beyond3;
  }
  // P(|Z|>3) = 0.27%
  CHECK(std::abs(beyond3 / static_cast<double>(n) - 0.0027) < 0.001);
}

TEST_CASE("poisson mean and variance, including the splitting branch") {
  RngStream s(3, 0, 0);
  for (double lambda : {0.1, 2.5, 60.0}) {
    const int n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = static_cast<double>(s.poisson(lambda));
    CHECK(oracles::mean(xs) == doctest::Approx(lambda).epsilon(0.03));
    CHECK(oracles::variance(xs) == doctest::Approx(lambda).epsilon(0.05));
  }
}

TEST_CASE("derive_stream_key separates modules and jobs") {
  const auto a = derive_stream_key(1, 2, 3);
  CHECK(a == derive_stream_key(1, 2, 3));
  CHECK(a != derive_stream_key(1, 2, 4));
  CHECK(a != derive_stream_key(1, 3, 3));
  CHECK(a != derive_stream_key(2, 2, 3));
}
