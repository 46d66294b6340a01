#include <doctest.h>

#include <cmath>
#include <vector>

#include "roughvol/estimators.hpp"
#include "roughvol/rng.hpp"
#include "roughvol/simulate.hpp"

#include "helpers.hpp"

using namespace roughvol;

TEST_CASE("ecf of an all-zero block is degenerate with unit modulus") {
  std::vector<double> r(48, 0.0);
  auto est = ecf_block(r, kDefaultDeltaN, 1.0);
  CHECK(std::abs(est.l_hat) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(est.c_hat == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(est.degenerate);
}

TEST_CASE("ecf two-return block reduces to a cosine") {
  const double delta = kDefaultDeltaN;
  const double a = 3e-4;
  std::vector<double> r{a, -a};
  for (double u : {0.5, 1.7}) {
    auto est = ecf_block(r, delta, u);
    CHECK(est.l_hat.real() ==
          doctest::Approx(std::cos(u * a / std::sqrt(delta))).epsilon(1e-12));
    CHECK(est.l_hat.imag() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("ecf recovers the variance of gaussian returns") {
  const double delta = kDefaultDeltaN;
  const double c = 0.02;
  RandomStream s = rng_stream(51, 0, 0);
  std::vector<double> r(1000000);
  const double sd = std::sqrt(c * delta);
  for (auto& x : r) x = sd * s.normal();
  auto est = ecf_block(r, delta, 1.0);
  CHECK(est.c_hat == doctest::Approx(c).epsilon(0.05));
  CHECK(std::fabs(est.c_hat - c) < 0.001);
}

TEST_CASE("ecf bias shrinks with block size") {
  const double delta = kDefaultDeltaN;
  const double c = 0.02;
  const double u = 2.0;
  double errs[3];
  int idx = 0;
  for (int k : {100, 10000, 1000000}) {
    // Average the absolute deviation over a few repetitions.
    double err = 0.0;
    const int reps = 8;
    RandomStream s = rng_stream(52, std::uint64_t(k), 0);
    for (int rep = 0; rep < reps; ++rep) {
      std::vector<double> r(std::size_t(k), 0.0);
      const double sd = std::sqrt(c * delta);
      for (auto& x : r) x = sd * s.normal();
      err += std::fabs(ecf_block(r, delta, u).c_hat - c);
    }
    errs[idx++] = err / reps;
  }
  CHECK(errs[0] > errs[1]);
  CHECK(errs[1] > errs[2]);
}

TEST_CASE("ecf modulus never exceeds one") {
  RandomStream s = rng_stream(53, 0, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> r(20);
    for (auto& x : r) x = 0.01 * (s.uniform() - 0.5) * std::pow(10.0, -4.0 * s.uniform());
    auto est = ecf_block(r, kDefaultDeltaN, 0.1 + 5.0 * s.uniform());
    CHECK(std::abs(est.l_hat) <= 1.0 + 1e-12);
  }
}

TEST_CASE("ecf rejects zero exponent and empty blocks") {
  std::vector<double> r(10, 1e-4);
  CHECK_THROWS_AS(ecf_block(r, kDefaultDeltaN, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ecf_block({}, kDefaultDeltaN, 1.0), std::invalid_argument);
}

TEST_CASE("bipower of constant-magnitude returns is exact") {
  const double delta = kDefaultDeltaN;
  const double a = 2e-4;
  std::vector<double> day(200, a);
  for (std::size_t i = 1; i < day.size(); i += 2) day[i] = -a;
  auto res = bipower_block(day, 60, 48, delta);
  CHECK(!res.shortened);
  CHECK(res.n_products == 48);
  CHECK(res.c_hat == doctest::Approx(M_PI * a * a / (2.0 * delta)).epsilon(1e-12));
}

TEST_CASE("bipower recovers gaussian variance") {
  const double delta = kDefaultDeltaN;
  const double c = 0.02;
  RandomStream s = rng_stream(54, 0, 0);
  std::vector<double> day(1000001);
  const double sd = std::sqrt(c * delta);
  for (auto& x : day) x = sd * s.normal();
  auto res = bipower_block(day, 1, 1000000, delta);
  CHECK(std::fabs(res.c_hat - c) < 0.001);
}

TEST_CASE("bipower shortens at the day start") {
  std::vector<double> day(100, 1e-4);
  auto res = bipower_block(day, 0, 48, kDefaultDeltaN);
  CHECK(res.shortened);
  CHECK(res.n_products == 47);
}

TEST_CASE("bipower absorbs an outlier linearly, squared variance quadratically") {
  const double delta = kDefaultDeltaN;
  const double c = 0.02;
  RandomStream s = rng_stream(55, 0, 0);
  std::vector<double> day(148);
  const double sd = std::sqrt(c * delta);
  for (auto& x : day) x = sd * s.normal();
  double clean_bp = bipower_block(day, 60, 48, delta).c_hat;
  double clean_sq = 0.0;
  for (int i = 60; i < 108; ++i) clean_sq += day[std::size_t(i)] * day[std::size_t(i)];
  clean_sq /= 48.0 * delta;

  const double outlier = 100.0 * sd;
  day[80] = outlier;
  double jump_bp = bipower_block(day, 60, 48, delta).c_hat;
  double jump_sq = 0.0;
  for (int i = 60; i < 108; ++i) jump_sq += day[std::size_t(i)] * day[std::size_t(i)];
  jump_sq /= 48.0 * delta;

  // Bipower inflation is O(outlier * sd / k), the squared estimator's is
  // O(outlier^2 / k): the latter blows up two orders of magnitude more.
  CHECK(jump_sq / clean_sq > 50.0);
  CHECK(jump_bp / clean_bp < 10.0);
}

TEST_CASE("rv ratio conventions") {
  std::vector<double> flat(101, 3.7);
  CHECK(rv_ratio(flat) == 2.0);

  for (int n : {100, 1000}) {
    std::vector<double> line(std::size_t(n) + 1);
    for (int i = 0; i <= n; ++i) line[std::size_t(i)] = double(i) / double(n);
    CHECK(rv_ratio(line) ==
          doctest::Approx((2.0 * n - 1.0) / double(n)).epsilon(1e-12));
  }
}

TEST_CASE("rv ratio of fbm approaches 2^(2H-1)") {
  const int n = 1 << 14;
  for (double hurst : {0.3}) {
    FbmSampler sampler(hurst, n, 1.0);
    RandomStream s = rng_stream(56, 0, 0);
    double sum = 0.0;
    const int paths = 100;
    for (int p = 0; p < paths; ++p) sum += rv_ratio(sampler.sample(s));
    CHECK(std::fabs(sum / paths - std::pow(2.0, 2.0 * hurst - 1.0)) < 0.02);
  }
}

TEST_CASE("increment acf closed forms") {
  const int n = 1000;
  std::vector<double> line(std::size_t(n) + 1);
  for (int i = 0; i <= n; ++i) line[std::size_t(i)] = double(i) / double(n);
  auto acf = increment_acf(line, 2);
  CHECK(acf[0] == doctest::Approx(double(n - 1) / double(n)).epsilon(1e-12));

  std::vector<double> flat(101, 1.0);
  auto acf_flat = increment_acf(flat, 3);
  CHECK(acf_flat[0] == 1.0);  // 0/0 convention at lag 1
  CHECK(acf_flat[1] == 0.0);
}

TEST_CASE("random walk increments are uncorrelated") {
  RandomStream s = rng_stream(57, 0, 0);
  std::vector<double> path(100001, 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) path[i] = path[i - 1] + s.normal();
  auto acf = increment_acf(path, 1);
  CHECK(std::fabs(acf[0]) < 0.01);
}

TEST_CASE("fbm lag-1 acf matches the fGn identity at H=0.1") {
  const int n = 1 << 14;
  FbmSampler sampler(0.1, n, 1.0);
  RandomStream s = rng_stream(58, 0, 0);
  double sum = 0.0;
  const int paths = 100;
  for (int p = 0; p < paths; ++p) sum += increment_acf(sampler.sample(s), 1)[0];
  CHECK(std::fabs(sum / paths - (std::pow(2.0, -0.8) - 1.0)) < 0.02);
}

TEST_CASE("ratio and lag-1 acf satisfy the exact identity") {
  RandomStream s = rng_stream(59, 0, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 100 + int(s.uniform() * 900);
    std::vector<double> path(std::size_t(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i)
      path[std::size_t(i)] = path[std::size_t(i) - 1] + s.normal() * 0.01;
    double lhs = rv_ratio(path);
    double rhs = 1.0 + increment_acf(path, 1)[0];
    CHECK(std::fabs(lhs - rhs) <= 4.0 / double(n));
  }
}

TEST_CASE("estimators are shift invariant") {
  // Exact in real arithmetic; in doubles the shifted representation loses
  // low bits of each increment, so assert at a tight relative tolerance.
  RandomStream s = rng_stream(60, 0, 0);
  std::vector<double> day(200);
  for (auto& x : day) x = 1e-4 * s.normal();
  std::vector<double> path(201, 0.0);
  for (int i = 0; i < 200; ++i) path[std::size_t(i) + 1] = path[std::size_t(i)] + day[std::size_t(i)];
  std::vector<double> shifted(path);
  for (auto& x : shifted) x += 123.456;

  CHECK(rv_ratio(path) == doctest::Approx(rv_ratio(shifted)).epsilon(1e-9));
  auto a1 = increment_acf(path, 3);
  auto a2 = increment_acf(shifted, 3);
  for (std::size_t l = 0; l < a1.size(); ++l)
    CHECK(std::fabs(a1[l] - a2[l]) < 1e-9);
  std::vector<double> r1(200), r2(200);
  for (int i = 0; i < 200; ++i) {
    r1[std::size_t(i)] = path[std::size_t(i) + 1] - path[std::size_t(i)];
    r2[std::size_t(i)] = shifted[std::size_t(i) + 1] - shifted[std::size_t(i)];
  }
  CHECK(ecf_block(r1, kDefaultDeltaN, 1.3).c_hat ==
        doctest::Approx(ecf_block(r2, kDefaultDeltaN, 1.3).c_hat).epsilon(1e-9));
  CHECK(bipower_block(r1, 60, 48, kDefaultDeltaN).c_hat ==
        doctest::Approx(bipower_block(r2, 60, 48, kDefaultDeltaN).c_hat).epsilon(1e-9));
}

TEST_CASE("bipower is exactly scale equivariant") {
  RandomStream s = rng_stream(61, 0, 0);
  std::vector<double> day(200), scaled(200);
  for (int i = 0; i < 200; ++i) {
    day[std::size_t(i)] = 1e-4 * s.normal();
    scaled[std::size_t(i)] = 4.0 * day[std::size_t(i)];
  }
  double base = bipower_block(day, 60, 48, kDefaultDeltaN).c_hat;
  double four = bipower_block(scaled, 60, 48, kDefaultDeltaN).c_hat;
  CHECK(four == doctest::Approx(16.0 * base).epsilon(1e-12));
}
