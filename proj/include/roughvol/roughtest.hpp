#pragma once

#include <span>
#include <vector>

#include "roughvol/estimators.hpp"
#include "roughvol/types.hpp"

namespace roughvol {

// Lay out blocks of p_n returns; block (d,b) uses the first k_n of them.
// Requires every day to have at least 4*p_n returns and a common length.
BlockGrid build_block_grid(const PricePath& path, int pn, int kn);

// Bipower spot variance for every (day, block); panel[day][block], 0-based.
std::vector<std::vector<BipowerResult>> bipower_panel(const PricePath& path,
                                                      const BlockGrid& grid);

struct ExponentChoice {
  double u = 0.0;
  double eta = 0.0;
  bool degenerate = false;
};

// The characteristic exponent for pair p (blocks 2p-1, 2p) of day d, built
// from bipower values strictly prior to block 2p-1 of day d. Days, pairs
// 1-based.
ExponentChoice select_exponent(const std::vector<std::vector<BipowerResult>>& bipower,
                               const BlockGrid& grid, const TuningSpec& tuning,
                               int day, int pair);

struct SpotVolEntry {
  double log_spot_var = 0.0;
  double u_used = 0.0;
  double eta_used = 0.0;
  bool degenerate = false;
};

// Per-(day, block) log spot-variance estimates with the exponent used.
// Entries exist for every day past the warm-up horizon.
struct SpotVolPanel {
  BlockGrid grid;
  TuningSpec tuning;
  int first_day = 1;  // 1-based index of the first evaluated day
  // entries[d - first_day][b - 1] for blocks 1..even_blocks()
  std::vector<std::vector<SpotVolEntry>> entries;

  const SpotVolEntry& at(int day, int block) const {
    return entries[std::size_t(day - first_day)][std::size_t(block - 1)];
  }
};

SpotVolPanel compute_spot_panel(const PricePath& path, const BlockGrid& grid,
                                const TuningSpec& tuning);

// Doubly differenced log-vol increments on product days: for even block b,
//   dd(d,b) = [c(d,b;u) - c(d,b-1;u)] - [c(d-1,b;u') - c(d-1,b-1;u')]
// with u = u(d, b/2) and u' = u(d-1, b/2). Product days are the
// even-numbered post-warm-up days; the day before each serves as reference.
struct DiffPanel {
  std::vector<int> product_days;            // 1-based day indices
  std::vector<std::vector<double>> values;  // per day, even b = 4,6,..,B_even
  std::vector<std::vector<char>> valid;     // false where a block is degenerate
  int first_even_block = 4;
  int last_even_block = 0;

  std::size_t blocks_per_row() const {
    return values.empty() ? 0 : values.front().size();
  }
};

DiffPanel diff_from_panel(const SpotVolPanel& panel);
DiffPanel compute_diff_panel(const PricePath& path, const BlockGrid& grid,
                             const TuningSpec& tuning);

// The products dd(d,b) * dd(d,b-2) for even b with b-2 >= first_even_block,
// both factors valid; each product touches disjoint block sets {b-1,b} and
// {b-3,b-2} of days d, d-1.
struct SummandSet {
  std::vector<double> products;
  std::size_t n_dropped = 0;
};
SummandSet collect_summands(const DiffPanel& diff);

// Self-normalized statistic sum(P) / sqrt(sum(P^2)), one-sided p-value
// Phi(T), rejection for T < Phi^{-1}(alpha) only. acov_lags controls the
// diagnostic autocovariances of the dd series.
TestReport test_statistic(const DiffPanel& diff,
                          std::span<const double> alphas = {},
                          int acov_lags = 7);

// Full pipeline: grid -> exponents -> spot panel -> diff panel -> statistic.
TestReport run_test(const PricePath& path, int pn, int kn, const TuningSpec& tuning,
                    std::span<const double> alphas = {});

// Normalized autocovariances of the dd series at lags 1..max_lag, pooled
// across product days (within-day products only).
std::vector<double> diff_series_acov(const DiffPanel& diff, int max_lag);

}  // namespace roughvol
