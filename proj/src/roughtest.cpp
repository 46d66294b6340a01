#include "roughvol/roughtest.hpp"

#include <cmath>
#include <limits>

#include "roughvol/math.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace roughvol {

namespace {

std::vector<std::vector<double>> day_returns(const PricePath& path) {
  std::vector<std::vector<double>> out;
  out.reserve(path.days.size());
  for (const auto& d : path.days) {
    std::vector<double> r(d.log_prices.size() - 1);
    for (std::size_t i = 0; i + 1 < d.log_prices.size(); ++i)
      r[i] = d.log_prices[i + 1] - d.log_prices[i];
    out.push_back(std::move(r));
  }
  return out;
}

const double kDefaultAlphas[] = {0.01, 0.05, 0.10};

}  // namespace

BlockGrid build_block_grid(const PricePath& path, int pn, int kn) {
  if (pn < 2 || kn <= 1 || kn > pn)
    throw layout_error("grid", "need 1 < k_n <= p_n");
  std::size_t n_ret = path.returns_per_day();
  if (n_ret < std::size_t(pn))
    throw layout_error("grid", "days are shorter than one block");
  BlockGrid grid;
  grid.returns_per_block = pn;
  grid.returns_used = kn;
  grid.blocks_per_day = int(n_ret / std::size_t(pn));
  return grid;
}

std::vector<std::vector<BipowerResult>> bipower_panel(const PricePath& path,
                                                      const BlockGrid& grid) {
  auto rets = day_returns(path);
  std::vector<std::vector<BipowerResult>> panel(rets.size());
  for (std::size_t d = 0; d < rets.size(); ++d) {
    panel[d].resize(std::size_t(grid.blocks_per_day));
    for (int b = 1; b <= grid.blocks_per_day; ++b)
      panel[d][std::size_t(b - 1)] =
          bipower_block(rets[d], grid.block_start(b),
                        std::size_t(grid.returns_used), path.delta_n);
  }
  return panel;
}

ExponentChoice select_exponent(const std::vector<std::vector<BipowerResult>>& bipower,
                               const BlockGrid& grid, const TuningSpec& tuning,
                               int day, int pair) {
  const int B = grid.blocks_per_day;
  const long n_days = long(bipower.size());
  ExponentChoice out;
  double sum = 0.0;
  int count = 0;
  if (tuning.scheme == EtaScheme::lagged_blocks) {
    // Blocks 2p - l for l in [lag_lo, lag_hi], wrapping into earlier days.
    const long g = long(day - 1) * B + 2 * pair;  // global index of block 2p
    for (int l = tuning.lag_lo; l <= tuning.lag_hi; ++l) {
      long ref = g - l;
      if (ref < 1) continue;
      long d = (ref - 1) / B;
      long b = ref - d * B;
      sum += bipower[std::size_t(d)][std::size_t(b - 1)].c_hat;
      ++count;
    }
  } else {
    // Blocks 2p-1, 2p on the prior lookback days.
    if (day > tuning.lookback_days) {
      for (int d = day - tuning.lookback_days; d <= day - 1; ++d) {
        if (d < 1 || d > n_days) continue;
        sum += bipower[std::size_t(d - 1)][std::size_t(2 * pair - 2)].c_hat;
        sum += bipower[std::size_t(d - 1)][std::size_t(2 * pair - 1)].c_hat;
        count += 2;
      }
    }
  }
  if (count == 0) {
    out.degenerate = true;
    return out;
  }
  out.eta = sum / double(count);
  if (!(out.eta > 0.0)) {
    out.degenerate = true;
    return out;
  }
  out.u = tuning.theta() / std::sqrt(out.eta);
  return out;
}

SpotVolPanel compute_spot_panel(const PricePath& path, const BlockGrid& grid,
                                const TuningSpec& tuning) {
  tuning.validate();
  const int n_days = int(path.days.size());
  const int warmup = tuning.warmup_days();
  if (n_days < warmup + 2)
    throw layout_error("panel", "need at least warmup + 2 days");
  // The differencing needs even blocks up to index 4 on every day.
  if (grid.blocks_per_day < 4)
    throw layout_error("panel", "every day needs at least 4*p_n returns");
  auto bp = bipower_panel(path, grid);
  auto rets = day_returns(path);

  SpotVolPanel panel;
  panel.grid = grid;
  panel.tuning = tuning;
  panel.first_day = warmup + 1;
  const int n_eval = n_days - warmup;
  const int n_pairs = grid.even_blocks() / 2;
  panel.entries.assign(std::size_t(n_eval),
                       std::vector<SpotVolEntry>(std::size_t(grid.even_blocks())));

  // Block estimates are independent; slots are disjoint, so the result does
  // not depend on the schedule.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n_eval * n_pairs > 64 && !omp_in_parallel())
#endif
  for (long t = 0; t < long(n_eval) * n_pairs; ++t) {
    const int day = panel.first_day + int(t / n_pairs);
    const int pair = 1 + int(t % n_pairs);
    ExponentChoice choice = select_exponent(bp, grid, tuning, day, pair);
    for (int b = 2 * pair - 1; b <= 2 * pair; ++b) {
      SpotVolEntry& e =
          panel.entries[std::size_t(day - panel.first_day)][std::size_t(b - 1)];
      e.u_used = choice.u;
      e.eta_used = choice.eta;
      if (choice.degenerate) {
        e.degenerate = true;
        e.log_spot_var = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const auto& r = rets[std::size_t(day - 1)];
      auto est = ecf_block(
          std::span<const double>(r.data() + grid.block_start(b),
                                  std::size_t(grid.returns_used)),
          path.delta_n, choice.u);
      e.log_spot_var = est.log_spot_var;
      e.degenerate = est.degenerate;
    }
  }
  return panel;
}

DiffPanel diff_from_panel(const SpotVolPanel& panel) {
  const int warmup = panel.first_day - 1;
  const int n_days = warmup + int(panel.entries.size());
  const int b_even = panel.grid.even_blocks();
  DiffPanel diff;
  diff.first_even_block = 4;
  diff.last_even_block = b_even;
  // Products live on even-numbered post-warm-up days; the preceding day is
  // the day-differencing reference.
  for (int d = warmup + 2; d <= n_days; d += 2) {
    std::vector<double> row;
    std::vector<char> ok;
    for (int b = 4; b <= b_even; b += 2) {
      const auto& cur_hi = panel.at(d, b);
      const auto& cur_lo = panel.at(d, b - 1);
      const auto& ref_hi = panel.at(d - 1, b);
      const auto& ref_lo = panel.at(d - 1, b - 1);
      bool valid = !(cur_hi.degenerate || cur_lo.degenerate || ref_hi.degenerate ||
                     ref_lo.degenerate);
      row.push_back(valid ? (cur_hi.log_spot_var - cur_lo.log_spot_var) -
                                (ref_hi.log_spot_var - ref_lo.log_spot_var)
                          : 0.0);
      ok.push_back(char(valid));
    }
    diff.product_days.push_back(d);
    diff.values.push_back(std::move(row));
    diff.valid.push_back(std::move(ok));
  }
  if (diff.product_days.empty())
    throw layout_error("diff", "no product days past the warm-up horizon");
  return diff;
}

DiffPanel compute_diff_panel(const PricePath& path, const BlockGrid& grid,
                             const TuningSpec& tuning) {
  return diff_from_panel(compute_spot_panel(path, grid, tuning));
}

SummandSet collect_summands(const DiffPanel& diff) {
  SummandSet out;
  for (std::size_t d = 0; d < diff.values.size(); ++d) {
    const auto& row = diff.values[d];
    const auto& ok = diff.valid[d];
    // row[j] holds block b = first_even_block + 2j; pair with b - 2.
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (ok[j] && ok[j - 1])
        out.products.push_back(row[j] * row[j - 1]);
      else
        ++out.n_dropped;
    }
  }
  return out;
}

std::vector<double> diff_series_acov(const DiffPanel& diff, int max_lag) {
  std::vector<double> num(std::size_t(max_lag), 0.0);
  double den = 0.0;
  for (std::size_t d = 0; d < diff.values.size(); ++d) {
    const auto& row = diff.values[d];
    const auto& ok = diff.valid[d];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!ok[j]) continue;
      den += row[j] * row[j];
      for (int lag = 1; lag <= max_lag; ++lag) {
        if (j + std::size_t(lag) >= row.size()) break;
        if (ok[j + std::size_t(lag)])
          num[std::size_t(lag - 1)] += row[j] * row[j + std::size_t(lag)];
      }
    }
  }
  std::vector<double> acov(std::size_t(max_lag), 0.0);
  if (den > 0.0)
    for (int lag = 0; lag < max_lag; ++lag) acov[std::size_t(lag)] = num[std::size_t(lag)] / den;
  return acov;
}

TestReport test_statistic(const DiffPanel& diff, std::span<const double> alphas,
                          int acov_lags) {
  SummandSet s = collect_summands(diff);
  if (s.products.empty())
    throw numeric_error("statistic", "no valid summands");
  double num = 0.0, den = 0.0;
  for (double p : s.products) {
    num += p;
    den += p * p;
  }
  if (den == 0.0)
    throw numeric_error("statistic", "degenerate statistic: zero sum of squares");
  TestReport rep;
  rep.numerator = num;
  rep.denominator = den;
  rep.statistic = num / std::sqrt(den);
  rep.p_value = normal_cdf(rep.statistic);
  rep.n_summands = s.products.size();
  rep.n_dropped = s.n_dropped;
  if (alphas.empty()) alphas = kDefaultAlphas;
  for (double a : alphas)
    rep.reject_at[a] = rep.statistic < normal_quantile(a);
  rep.lag_acov = diff_series_acov(diff, acov_lags);
  return rep;
}

TestReport run_test(const PricePath& path, int pn, int kn, const TuningSpec& tuning,
                    std::span<const double> alphas) {
  path.validate();
  BlockGrid grid = build_block_grid(path, pn, kn);
  DiffPanel diff = compute_diff_panel(path, grid, tuning);
  return test_statistic(diff, alphas);
}

}  // namespace roughvol
