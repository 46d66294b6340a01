#pragma once

#include <complex>
#include <span>
#include <vector>

#include "roughvol/types.hpp"

namespace roughvol {

// Annualized spot variance below this floor marks a block degenerate; such
// blocks are excluded from the statistic rather than clamped into it.
inline constexpr double kSpotVarFloor = 1e-10;
// |ECF| below this is treated as numerically zero (c_hat capped).
inline constexpr double kEcfModulusFloor = 1e-12;

struct EcfEstimate {
  std::complex<double> l_hat;  // block ECF, |l_hat| <= 1
  double c_hat = 0.0;          // -(2/u^2) log|l_hat|
  double log_spot_var = 0.0;   // log(c_hat); NaN when degenerate
  double u = 0.0;
  bool degenerate = false;
};

// Empirical characteristic function of standardized returns over one block.
EcfEstimate ecf_block(std::span<const double> returns, double delta_n, double u);

struct BipowerResult {
  double c_hat = 0.0;
  int n_products = 0;
  bool shortened = false;  // block at the start of a day lacks a predecessor
};

// Bipower spot variance (pi / (2 m delta_n)) * sum |r_i||r_{i-1}| over the
// block [first, first+count) of a single day's returns; the predecessor is
// taken within the same day, shrinking the sum at the day start.
BipowerResult bipower_block(std::span<const double> day_returns,
                            std::size_t first, std::size_t count, double delta_n);

// Realized-variance ratio RV^{n,2}/RV^n of a discrete path on n+1 points,
// with the path extended flat beyond both ends and the convention 0/0 = 2.
// The limit is 2^(2H-1) for fractional paths, 1 for semimartingales, 2 for
// smooth paths.
double rv_ratio(std::span<const double> path);

// Sample autocorrelation of path increments, lags 1..max_lag, normalized by
// the sum of squared increments. At lag 1 a zero denominator returns 1, so
// rv_ratio(path) == 1 + increment_acf(path, 1)[0] identically.
std::vector<double> increment_acf(std::span<const double> path, int max_lag);

}  // namespace roughvol
