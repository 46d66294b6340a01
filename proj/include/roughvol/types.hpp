#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace roughvol {

// Business-time conventions: 1 year = 252 trading days, 1 trading day = 6.5 h
// = 4680 five-second steps.
inline constexpr int kTradingDaysPerYear = 252;
inline constexpr int kDefaultStepsPerDay = 4680;
inline constexpr double kDefaultDeltaN =
    1.0 / (double(kTradingDaysPerYear) * double(kDefaultStepsPerDay));

struct error : std::runtime_error {
  explicit error(const std::string& stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage(stage) {}
  std::string stage;
};
// Bad layout / inconsistent inputs (grid construction, file shape).
struct layout_error : error {
  using error::error;
};
// Numerical failure (quadrature non-convergence, degenerate statistic).
struct numeric_error : error {
  using error::error;
};

struct TradingDay {
  std::string date;                 // calendar identifier, e.g. "2016-03-07" or "d0001"
  std::vector<double> log_prices;   // N_d + 1 points on a regular grid
};

// A regular grid of log-prices organized by trading day. Returns are only
// ever formed within a day, never across the overnight boundary.
struct PricePath {
  std::vector<TradingDay> days;
  double delta_n = kDefaultDeltaN;  // grid spacing in years
  std::string meta;

  std::size_t n_days() const { return days.size(); }
  // Returns per day; throws layout_error if days are inconsistent.
  std::size_t returns_per_day() const;
  void validate() const;
};

struct HestonParams {
  double theta = 0.02;   // long-run variance
  double kappa = 8.0;    // mean reversion
  double nu = 0.45;      // vol of vol
  double rho = -0.7;     // driver correlation
  double v0 = 0.02;
};

struct RoughHestonParams {
  double hurst = 0.1;    // in (0, 1/2)
  double theta = 0.02;
  double kappa = 8.0;
  double nu = 0.10;
  double rho = -0.7;
  double v0 = 0.02;
};

using VarianceModel = std::variant<HestonParams, RoughHestonParams>;

struct JumpParams {
  double alpha = 0.5;    // Blumenthal-Getoor index in (0,2)
  double lambda = 500.0; // tempering rate
  double scale = 0.0;    // c; ignored when derive_scale
  bool derive_scale = true;  // c = 0.1 * lambda^(2-alpha) / Gamma(2-alpha)
};

struct NoiseParams {
  double sigma_noise = 1.55e-4;
  bool volatility_scaled = true;  // eps_i = sigma_noise * sqrt(V_i) * chi_i
};

struct GridSpec {
  int steps_per_day = kDefaultStepsPerDay;
  int drop_first = 60;      // returns discarded at the start of each day
  int days_per_block = 7;   // independent simulation blocks
  int kernel_window = 0;    // rough kernel truncation in steps; 0 = full memory
};

// Complete generative specification for one synthetic panel.
struct SimScenario {
  VarianceModel variance = HestonParams{};
  std::optional<JumpParams> jumps;
  std::optional<NoiseParams> noise;
  GridSpec grid;
  std::uint64_t seed = 0;

  void validate() const;       // throws std::invalid_argument
  double jump_scale() const;   // resolved c (0 when jumps are absent)
  double delta_n() const {
    return 1.0 / (double(kTradingDaysPerYear) * double(grid.steps_per_day));
  }
};

// (p_n, k_n, blocks-per-day) block layout of one trading day.
struct BlockGrid {
  int returns_per_block = 60;  // p_n
  int returns_used = 48;       // k_n <= p_n
  int blocks_per_day = 0;      // B = floor(N_d / p_n)

  int even_blocks() const { return blocks_per_day - (blocks_per_day % 2); }
  // First return index (0-based) covered by 1-based block b.
  std::size_t block_start(int b) const {
    return std::size_t(b - 1) * std::size_t(returns_per_block);
  }
};

enum class EtaScheme {
  lagged_blocks,  // mean bipower over blocks 2p-l, l in [lag_lo, lag_hi]
  time_of_day,    // mean bipower over the same pair on the prior lookback days
};

// Data-driven choice of the characteristic exponent u = theta / sqrt(eta).
struct TuningSpec {
  double target_modulus = 0.75;  // target |ECF|, in (0,1)
  EtaScheme scheme = EtaScheme::time_of_day;
  int lag_lo = 3;
  int lag_hi = 5;
  int lookback_days = 5;

  double theta() const { return std::sqrt(-2.0 * std::log(target_modulus)); }
  int warmup_days() const {
    return scheme == EtaScheme::time_of_day ? lookback_days : 1;
  }
  void validate() const;
};

// Outcome of the roughness test on one panel.
struct TestReport {
  double statistic = 0.0;  // numerator / sqrt(denominator)
  double p_value = 1.0;    // one-sided Phi(statistic)
  std::map<double, bool> reject_at;
  std::size_t n_summands = 0;  // valid products entering the sums
  std::size_t n_dropped = 0;   // products dropped due to degenerate blocks
  double numerator = 0.0;      // sum of products
  double denominator = 0.0;    // sum of squared products
  std::vector<double> lag_acov;  // normalized autocovariance of the
                                 // day-differenced series, lags 1..L
};

}  // namespace roughvol
