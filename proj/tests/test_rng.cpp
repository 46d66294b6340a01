#include <doctest.h>

#include <cmath>
#include <vector>

#include "roughvol/rng.hpp"

#include "helpers.hpp"

using namespace roughvol;

TEST_CASE("identical triples give bitwise-identical draws") {
  RandomStream a = rng_stream(99, 3, 7);
  RandomStream b = rng_stream(99, 3, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct triples pass a two-sample KS test") {
  const std::size_t n = 1000000;
  RandomStream a = rng_stream(42, 0, 0);
  RandomStream b = rng_stream(42, 1, 0);
  std::vector<double> xa(n), xb(n);
  for (std::size_t i = 0; i < n; ++i) {
    xa[i] = a.uniform();
    xb[i] = b.uniform();
  }
  double d = oracle::ks_two_sample(xa, xb);
  double crit = oracle::kolmogorov_critical(0.01) * std::sqrt(2.0 / double(n));
  CHECK(d < crit);
}

TEST_CASE("uniform draws have mean one half") {
  RandomStream s = rng_stream(7, 5, 11);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += s.uniform();
  CHECK(std::fabs(sum / n - 0.5) < 0.002);
}

TEST_CASE("normals have unit variance and pass KS") {
  RandomStream s = rng_stream(3, 0, 0);
  const std::size_t n = 200000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = s.normal();
  CHECK(std::fabs(oracle::mean(xs)) < 0.01);
  CHECK(oracle::variance(xs) == doctest::Approx(1.0).epsilon(0.02));
  double d = oracle::ks_statistic(xs, oracle::normal_cdf_quad);
  CHECK(d < oracle::kolmogorov_critical(0.01) / std::sqrt(double(n)));
}

TEST_CASE("poisson matches mean and variance in both regimes") {
  RandomStream s = rng_stream(17, 0, 0);
  for (double mean : {0.05, 3.0, 50.0, 400.0}) {
    const int n = 200000;
    std::vector<double> xs(std::size_t(n), 0.0);
    for (auto& x : xs) x = double(s.poisson(mean));
    CHECK(oracle::mean(xs) == doctest::Approx(mean).epsilon(0.02));
    CHECK(oracle::variance(xs) == doctest::Approx(mean).epsilon(0.05));
  }
}

TEST_CASE("forked lanes are independent of the parent") {
  RandomStream s = rng_stream(1, 2, 3);
  RandomStream lane = s.fork(1);
  const std::size_t n = 100000;
  std::vector<double> xa(n), xb(n);
  for (std::size_t i = 0; i < n; ++i) {
    xa[i] = s.uniform();
    xb[i] = lane.uniform();
  }
  CHECK(std::fabs(oracle::correlation(xa, xb)) < 0.01);
}
