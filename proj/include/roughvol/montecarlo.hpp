#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roughvol/types.hpp"

namespace roughvol {

struct McScenario {
  SimScenario scenario;
  std::string label;
};

// Size/power experiment: independent blocks of days_per_block days per
// replication, products kept from each block's final day, pooled into one
// statistic per replication.
struct McPlan {
  std::vector<McScenario> scenarios;  // empty -> default_scenarios()
  std::vector<double> frak_l_grid{0.95, 0.75, 0.50};
  int n_days = 28;
  int n_reps = 200;
  double alpha = 0.05;
  std::uint64_t base_seed = 0;
  int pn = 60;
  int kn = 48;
  EtaScheme eta_scheme = EtaScheme::time_of_day;
  int lag_lo = 3;
  int lag_hi = 5;

  void validate() const;
};

struct McCell {
  std::string label;
  double frak_l = 0.0;
  double rejection_rate = 0.0;  // #rejections / #successful reps, exactly
  double mean_stat = 0.0;
  double sd_stat = 0.0;
  int n_reps = 0;
  int n_failed = 0;  // degenerate replications, excluded with a warning
  std::size_t n_summands = 0;
  std::size_t n_dropped = 0;
  std::vector<double> statistics;  // per successful replication, rep order
};

struct McReport {
  std::vector<McCell> cells;
  double alpha = 0.05;
  std::uint64_t base_seed = 0;
  double wall_seconds = 0.0;  // runtime metadata, not part of the comparable state
};

// Pure function of the plan: output independent of worker count and
// scheduling. workers <= 0 means all hardware threads.
McReport run_plan(const McPlan& plan, int workers = 0);

// Noise scale from the ratio r of daily realized variance at 5 seconds vs
// 5 minutes: sigma^2 = 0.5 * (1/252) * (r-1) / (4620 - 77 r).
// r <= 1 signals no noise (returns 0); a non-positive denominator is a
// domain error.
double calibrate_noise(double rv_ratio_5s_over_5min);
double calibrate_noise_variance(double rv_ratio_5s_over_5min);

// The six stock scenarios (three variance specs x two jump activities),
// all with volatility-scaled noise.
std::vector<McScenario> default_scenarios();
McScenario default_scenario(const std::string& label);

}  // namespace roughvol
