#include <doctest.h>

#include <cmath>
#include <vector>

#include "roughvol/math.hpp"
#include "roughvol/roughtest.hpp"
#include "roughvol/simulate.hpp"

#include "helpers.hpp"
#include "reference.hpp"

using namespace roughvol;

namespace {

TuningSpec lagged_tuning(double frak_l, int lo = 3, int hi = 5) {
  TuningSpec t;
  t.target_modulus = frak_l;
  t.scheme = EtaScheme::lagged_blocks;
  t.lag_lo = lo;
  t.lag_hi = hi;
  return t;
}

TuningSpec tod_tuning(double frak_l) {
  TuningSpec t;
  t.target_modulus = frak_l;
  t.scheme = EtaScheme::time_of_day;
  return t;
}

}  // namespace

TEST_CASE("block grid at production scale") {
  RandomStream s = rng_stream(70, 0, 0);
  PricePath path = testutil::gaussian_panel(1, 4620, 0.02, kDefaultDeltaN, s);
  BlockGrid grid = build_block_grid(path, 60, 48);
  CHECK(grid.blocks_per_day == 77);
  CHECK(grid.even_blocks() == 76);
  // Last block covers returns 4561..4608 (1-based).
  CHECK(grid.block_start(77) == 4560);
  CHECK(grid.block_start(77) + 48 == 4608);
}

TEST_CASE("block grid arithmetic and rejection") {
  RandomStream s = rng_stream(71, 0, 0);
  PricePath path = testutil::gaussian_panel(1, 120, 0.02, kDefaultDeltaN, s);
  CHECK(build_block_grid(path, 60, 48).blocks_per_day == 2);
  CHECK_THROWS_AS(build_block_grid(path, 60, 61), layout_error);
  // Fewer than 4 blocks per day cannot feed the differencing pipeline.
  CHECK_THROWS_AS(compute_spot_panel(path, build_block_grid(path, 60, 48),
                                     lagged_tuning(0.75)),
                  layout_error);
}

TEST_CASE("tuning constants for the usual target moduli") {
  CHECK(tod_tuning(0.95).theta() == doctest::Approx(0.32).epsilon(0.02));
  CHECK(tod_tuning(0.75).theta() == doctest::Approx(0.76).epsilon(0.01));
  CHECK(tod_tuning(0.50).theta() == doctest::Approx(1.18).epsilon(0.01));
}

TEST_CASE("exponent selection hits the target modulus on constant-vol data") {
  const double c = 0.02;
  RandomStream s = rng_stream(72, 0, 0);
  PricePath path = testutil::gaussian_panel(8, 1200, c, kDefaultDeltaN, s);
  BlockGrid grid = build_block_grid(path, 60, 48);
  TuningSpec tuning = tod_tuning(0.95);
  SpotVolPanel panel = compute_spot_panel(path, grid, tuning);

  double expected_u = 0.3203 / std::sqrt(c);
  double mean_u = 0.0, mean_mod = 0.0;
  int count = 0;
  for (const auto& row : panel.entries)
    for (const auto& e : row) {
      if (e.degenerate) continue;
      mean_u += e.u_used;
      // |L| = exp(-u^2 c / 2) when eta estimates c well.
      mean_mod += std::exp(0.5 * e.u_used * e.u_used * -c);
      ++count;
    }
  mean_u /= count;
  mean_mod /= count;
  CHECK(mean_u == doctest::Approx(expected_u).epsilon(0.03));
  CHECK(mean_mod == doctest::Approx(0.95).epsilon(0.011));
}

TEST_CASE("time-of-day eta over identical-bipower days is exact") {
  // Alternating-sign constant-magnitude returns: every block's bipower is
  // pi a^2 / (2 delta).
  const double a = 2e-4;
  PricePath path;
  path.delta_n = kDefaultDeltaN;
  for (int d = 0; d < 7; ++d) {
    TradingDay day;
    day.date = "d" + std::to_string(d + 1);
    day.log_prices.assign(481, 0.0);
    for (int i = 0; i < 480; ++i)
      day.log_prices[std::size_t(i) + 1] =
          day.log_prices[std::size_t(i)] + (i % 2 == 0 ? a : -a);
    path.days.push_back(std::move(day));
  }
  BlockGrid grid = build_block_grid(path, 60, 48);
  auto bp = bipower_panel(path, grid);
  double common = bp[0][1].c_hat;
  auto choice = select_exponent(bp, grid, tod_tuning(0.75), 6, 2);
  CHECK(!choice.degenerate);
  CHECK(choice.eta == doctest::Approx(common).epsilon(1e-12));
}

TEST_CASE("exponent selection matches the naive reference on random panels") {
  RandomStream s = rng_stream(73, 0, 0);
  PricePath path = testutil::gaussian_panel(8, 480, 0.03, kDefaultDeltaN, s);
  BlockGrid grid = build_block_grid(path, 60, 48);
  auto bp = bipower_panel(path, grid);
  for (const auto& tuning : {lagged_tuning(0.75), tod_tuning(0.75)}) {
    for (int day = 6; day <= 8; ++day) {
      for (int pair = 1; pair <= 4; ++pair) {
        auto got = select_exponent(bp, grid, tuning, day, pair);
        auto ref = reference::naive_eta(path, day, pair, 60, 48, tuning,
                                        grid.blocks_per_day);
        REQUIRE(ref.has_value());
        CHECK(got.eta == doctest::Approx(*ref).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("lagged eta wraps into the previous day") {
  RandomStream s = rng_stream(74, 0, 0);
  PricePath path = testutil::gaussian_panel(3, 480, 0.02, kDefaultDeltaN, s);
  BlockGrid grid = build_block_grid(path, 60, 48);
  auto bp = bipower_panel(path, grid);
  // Pair 1 of day 2: blocks 2-3..2-5 wrap to day 1 blocks 7,6,5.
  auto choice = select_exponent(bp, grid, lagged_tuning(0.75, 3, 5), 2, 1);
  CHECK(!choice.degenerate);
  double expect = (bp[0][6].c_hat + bp[0][5].c_hat + bp[0][4].c_hat) / 3.0;
  CHECK(choice.eta == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("identical days difference to zero") {
  RandomStream s = rng_stream(75, 0, 0);
  PricePath one = testutil::gaussian_panel(1, 480, 0.02, kDefaultDeltaN, s);
  PricePath path;
  path.delta_n = one.delta_n;
  for (int d = 0; d < 8; ++d) {
    TradingDay day = one.days[0];
    day.date = "d" + std::to_string(d + 1);
    path.days.push_back(std::move(day));
  }
  BlockGrid grid = build_block_grid(path, 60, 48);
  for (const auto& tuning : {tod_tuning(0.75), lagged_tuning(0.75)}) {
    DiffPanel diff = compute_diff_panel(path, grid, tuning);
    for (const auto& row : diff.values)
      for (double v : row) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("additively separable panels difference to zero") {
  SpotVolPanel panel;
  panel.grid.returns_per_block = 60;
  panel.grid.returns_used = 48;
  panel.grid.blocks_per_day = 9;
  panel.tuning = lagged_tuning(0.75);
  panel.first_day = 2;
  for (int d = 2; d <= 6; ++d) {
    std::vector<SpotVolEntry> row(8);
    for (int b = 1; b <= 8; ++b) {
      row[std::size_t(b - 1)].log_spot_var = 0.3 * double(b) + 1.7 * double(d);
      row[std::size_t(b - 1)].u_used = 1.0;
      row[std::size_t(b - 1)].eta_used = 1.0;
    }
    panel.entries.push_back(std::move(row));
  }
  DiffPanel diff = diff_from_panel(panel);
  REQUIRE(!diff.values.empty());
  for (const auto& row : diff.values)
    for (double v : row) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("null panel differences are centered") {
  SimScenario s;
  s.variance = HestonParams{0.02, 8.0, 0.45, -0.7, 0.02};
  RandomStream stream = rng_stream(76, 0, 0);
  SimOutput sim = simulate_heston(s, 28, stream);
  BlockGrid grid = build_block_grid(sim.prices, 60, 48);
  DiffPanel diff = compute_diff_panel(sim.prices, grid, tod_tuning(0.75));
  std::vector<double> vals;
  for (std::size_t d = 0; d < diff.values.size(); ++d)
    for (std::size_t j = 0; j < diff.values[d].size(); ++j)
      if (diff.valid[d][j]) vals.push_back(diff.values[d][j]);
  REQUIRE(vals.size() > 300);
  double se = std::sqrt(oracle::variance(vals) / double(vals.size()));
  CHECK(std::fabs(oracle::mean(vals)) / se < 2.58);
}

TEST_CASE("single summand gives a unit statistic") {
  DiffPanel diff;
  diff.first_even_block = 4;
  diff.last_even_block = 6;
  diff.product_days = {3};
  diff.values = {{0.4, -0.3}};
  diff.valid = {{1, 1}};
  TestReport rep = test_statistic(diff);
  CHECK(rep.n_summands == 1);
  CHECK(rep.statistic == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(rep.reject_at.at(0.05) == false);  // -1 > Phi^{-1}(0.05)
}

TEST_CASE("alternating differences attain the Cauchy-Schwarz bound") {
  DiffPanel diff;
  diff.first_even_block = 4;
  diff.product_days = {3};
  std::vector<double> row;
  std::vector<char> ok;
  for (int j = 0; j < 37; ++j) {
    row.push_back(j % 2 == 0 ? 1.0 : -1.0);
    ok.push_back(1);
  }
  diff.values = {row};
  diff.valid = {ok};
  TestReport rep = test_statistic(diff);
  CHECK(rep.n_summands == 36);
  CHECK(rep.statistic == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("self-normalized statistic of white noise is standard normal") {
  RandomStream s = rng_stream(77, 0, 0);
  std::vector<double> stats;
  const int reps = 500;
  for (int r = 0; r < reps; ++r) {
    DiffPanel diff;
    diff.first_even_block = 4;
    diff.product_days = {3};
    std::vector<double> row(10001);
    for (auto& v : row) v = s.normal();
    diff.values = {row};
    diff.valid = {std::vector<char>(row.size(), 1)};
    stats.push_back(test_statistic(diff).statistic);
  }
  double d = oracle::ks_statistic(stats, oracle::normal_cdf_quad);
  CHECK(d < oracle::kolmogorov_critical(0.01) / std::sqrt(double(reps)));
}

TEST_CASE("statistic is bounded by the square root of the summand count") {
  RandomStream s = rng_stream(78, 0, 0);
  for (int trial = 0; trial < 50; ++trial) {
    DiffPanel diff;
    diff.first_even_block = 4;
    diff.product_days = {3};
    std::vector<double> row(40);
    for (auto& v : row) v = s.normal() * std::pow(10.0, -2.0 * s.uniform());
    diff.values = {row};
    diff.valid = {std::vector<char>(row.size(), 1)};
    TestReport rep = test_statistic(diff);
    CHECK(std::fabs(rep.statistic) <= std::sqrt(double(rep.n_summands)) + 1e-12);
  }
}

TEST_CASE("degenerate inputs raise statistic errors") {
  DiffPanel diff;
  diff.first_even_block = 4;
  diff.product_days = {3};
  diff.values = {{0.1, 0.2}};
  diff.valid = {{1, 0}};
  CHECK_THROWS_AS(test_statistic(diff), numeric_error);  // no valid summand
  diff.valid = {{1, 1}};
  diff.values = {{0.0, 0.0}};
  CHECK_THROWS_AS(test_statistic(diff), numeric_error);  // zero sum of squares
}

TEST_CASE("run_test is deterministic and shift invariant") {
  RandomStream s = rng_stream(79, 0, 0);
  PricePath path = testutil::gaussian_panel(8, 480, 0.02, kDefaultDeltaN, s);
  TestReport a = run_test(path, 60, 48, lagged_tuning(0.75));
  TestReport b = run_test(path, 60, 48, lagged_tuning(0.75));
  CHECK(a.statistic == b.statistic);
  CHECK(a.n_summands == b.n_summands);

  // Shifts cancel in returns exactly in real arithmetic; doubles keep the
  // identity only to representation error.
  PricePath shifted = path;
  for (auto& day : shifted.days)
    for (auto& x : day.log_prices) x += 42.0;
  TestReport c = run_test(shifted, 60, 48, lagged_tuning(0.75));
  CHECK(c.statistic == doctest::Approx(a.statistic).epsilon(1e-7));
  CHECK(c.n_summands == a.n_summands);
}

TEST_CASE("summands depend only on their local window") {
  RandomStream s = rng_stream(80, 0, 0);
  PricePath path = testutil::gaussian_panel(10, 600, 0.02, kDefaultDeltaN, s);
  BlockGrid grid = build_block_grid(path, 60, 48);
  TuningSpec tuning = tod_tuning(0.75);
  DiffPanel base = compute_diff_panel(path, grid, tuning);

  // Product day 9 uses days 3..9 at most. Perturb day 1 heavily.
  PricePath far = path;
  for (auto& x : far.days[0].log_prices) x *= 1.7;
  DiffPanel far_diff = compute_diff_panel(far, grid, tuning);
  std::size_t day9 = 0;
  while (base.product_days[day9] != 9) ++day9;
  CHECK(far_diff.values[day9] == base.values[day9]);

  // Perturb day 9 returns inside block 10 only; dd(9, b<=8) must not move.
  PricePath late = path;
  for (std::size_t i = 541; i < 601; ++i) late.days[8].log_prices[i] += 5e-4 * double(i - 540);
  DiffPanel late_diff = compute_diff_panel(late, grid, tuning);
  // Blocks 1..8 cover returns 1..528; dd entries touch blocks b-1,b (<=8).
  for (std::size_t j = 0; j + 1 < base.values[day9].size(); ++j)
    CHECK(late_diff.values[day9][j] == base.values[day9][j]);
}

TEST_CASE("pipeline matches the naive quadruple-loop reference") {
  RandomStream s = rng_stream(81, 0, 0);
  for (int trial = 0; trial < 5; ++trial) {
    PricePath path = testutil::gaussian_panel(4, 160, 0.01 + 0.05 * s.uniform(),
                                              kDefaultDeltaN, s);
    TuningSpec tuning = lagged_tuning(0.75);
    TestReport got = run_test(path, 20, 16, tuning);
    reference::NaiveStat ref = reference::naive_statistic(path, 20, 16, tuning);
    CHECK(got.n_summands == ref.n_summands);
    CHECK(got.statistic == doctest::Approx(ref.statistic).epsilon(1e-12));
  }
}

TEST_CASE("diff series autocovariance sees designed correlation") {
  // A deterministic alternating series has lag-1 autocorrelation -1.
  DiffPanel diff;
  diff.first_even_block = 4;
  diff.product_days = {3};
  std::vector<double> row(100);
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = (j % 2 == 0) ? 1.0 : -1.0;
  diff.values = {row};
  diff.valid = {std::vector<char>(row.size(), 1)};
  auto acov = diff_series_acov(diff, 3);
  CHECK(acov[0] == doctest::Approx(-0.99).epsilon(0.02));
  CHECK(acov[1] == doctest::Approx(0.98).epsilon(0.02));
}
