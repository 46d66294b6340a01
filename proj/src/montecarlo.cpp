#include "roughvol/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "roughvol/math.hpp"
#include "roughvol/parallel.hpp"
#include "roughvol/rng.hpp"
#include "roughvol/roughtest.hpp"
#include "roughvol/simulate.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace roughvol {

std::vector<McScenario> default_scenarios() {
  auto make = [](double hurst, double nu, double alpha, const std::string& label) {
    SimScenario s;
    if (hurst >= 0.5) {
      s.variance = HestonParams{0.02, 8.0, nu, -0.7, 0.02};
    } else {
      s.variance = RoughHestonParams{hurst, 0.02, 8.0, nu, -0.7, 0.02};
    }
    s.jumps = JumpParams{alpha, 500.0, 0.0, true};
    s.noise = NoiseParams{1.55e-4, true};
    return McScenario{s, label};
  };
  return {
      make(0.1, 0.10, 0.5, "V1-J1"), make(0.1, 0.10, 1.5, "V1-J2"),
      make(0.3, 0.22, 0.5, "V2-J1"), make(0.3, 0.22, 1.5, "V2-J2"),
      make(0.5, 0.45, 0.5, "V3-J1"), make(0.5, 0.45, 1.5, "V3-J2"),
  };
}

McScenario default_scenario(const std::string& label) {
  for (auto& s : default_scenarios())
    if (s.label == label) return s;
  throw std::invalid_argument("unknown scenario label: " + label);
}

void McPlan::validate() const {
  if (n_reps < 1) throw std::invalid_argument("plan: n_reps must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("plan: alpha must be in (0,1)");
  if (frak_l_grid.empty()) throw std::invalid_argument("plan: empty frak_L grid");
  for (double l : frak_l_grid)
    if (!(l > 0.0 && l < 1.0))
      throw std::invalid_argument("plan: frak_L values must be in (0,1)");
  auto scens = scenarios.empty() ? default_scenarios() : scenarios;
  for (const auto& s : scens) {
    s.scenario.validate();
    int dpb = s.scenario.grid.days_per_block;
    if (n_days % dpb != 0 || n_days < dpb)
      throw std::invalid_argument("plan: n_days must be a positive multiple of days_per_block");
  }
}

namespace {

struct RepAccum {
  std::vector<double> products;
  std::size_t dropped = 0;
  bool failed = false;
};

TuningSpec cell_tuning(const McPlan& plan, double frak_l) {
  TuningSpec t;
  t.target_modulus = frak_l;
  t.scheme = plan.eta_scheme;
  t.lag_lo = plan.lag_lo;
  t.lag_hi = plan.lag_hi;
  return t;
}

}  // namespace

McReport run_plan(const McPlan& plan, int workers) {
  plan.validate();
  const auto t_start = std::chrono::steady_clock::now();
  auto scens = plan.scenarios.empty() ? default_scenarios() : plan.scenarios;
  if (workers <= 0) workers = par::max_threads();

  McReport report;
  report.alpha = plan.alpha;
  report.base_seed = plan.base_seed;
  const double crit = normal_quantile(plan.alpha);

  for (std::size_t si = 0; si < scens.size(); ++si) {
    const auto& ms = scens[si];
    const int dpb = ms.scenario.grid.days_per_block;
    const int blocks_per_rep = plan.n_days / dpb;

    // Simulate each 7-day block once per replication and reuse the panel
    // across the frak_L grid (the exponent grid shares the paths).
    // blocks[rep][blk] -> per-frak_L products.
    std::vector<std::vector<std::vector<RepAccum>>> acc(
        plan.frak_l_grid.size(),
        std::vector<std::vector<RepAccum>>(std::size_t(plan.n_reps),
                                           std::vector<RepAccum>(std::size_t(blocks_per_rep))));

    const long n_tasks = long(plan.n_reps) * blocks_per_rep;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (long task = 0; task < n_tasks; ++task) {
      const int rep = int(task / blocks_per_rep);
      const int blk = int(task % blocks_per_rep);
      // Streams are keyed by (seed, rep, block) only, shared across scenario
      // cells: common random numbers tighten cross-scenario comparisons.
      RandomStream stream =
          rng_stream(plan.base_seed, std::uint64_t(rep), std::uint64_t(blk));
      SimOutput sim;
      try {
        sim = simulate_scenario(ms.scenario, dpb, stream);
      } catch (const std::exception&) {
        for (std::size_t li = 0; li < plan.frak_l_grid.size(); ++li)
          acc[li][std::size_t(rep)][std::size_t(blk)].failed = true;
        continue;
      }
      BlockGrid grid;
      try {
        grid = build_block_grid(sim.prices, plan.pn, plan.kn);
      } catch (const std::exception&) {
        for (std::size_t li = 0; li < plan.frak_l_grid.size(); ++li)
          acc[li][std::size_t(rep)][std::size_t(blk)].failed = true;
        continue;
      }
      for (std::size_t li = 0; li < plan.frak_l_grid.size(); ++li) {
        RepAccum& slot = acc[li][std::size_t(rep)][std::size_t(blk)];
        try {
          DiffPanel diff =
              compute_diff_panel(sim.prices, grid, cell_tuning(plan, plan.frak_l_grid[li]));
          SummandSet s = collect_summands(diff);
          slot.products = std::move(s.products);
          slot.dropped = s.n_dropped;
        } catch (const std::exception&) {
          slot.failed = true;
        }
      }
    }

    for (std::size_t li = 0; li < plan.frak_l_grid.size(); ++li) {
      McCell cell;
      cell.label = ms.label;
      cell.frak_l = plan.frak_l_grid[li];
      long long rejections = 0;
      for (int rep = 0; rep < plan.n_reps; ++rep) {
        double num = 0.0, den = 0.0;
        bool failed = false;
        std::size_t count = 0;
        for (int blk = 0; blk < blocks_per_rep; ++blk) {
          const RepAccum& slot = acc[li][std::size_t(rep)][std::size_t(blk)];
          if (slot.failed) {
            failed = true;
            break;
          }
          for (double p : slot.products) {
            num += p;
            den += p * p;
            ++count;
          }
          cell.n_dropped += slot.dropped;
        }
        if (failed || count == 0 || den == 0.0) {
          ++cell.n_failed;
          continue;
        }
        double stat = num / std::sqrt(den);
        cell.statistics.push_back(stat);
        cell.n_summands += count;
        if (stat < crit) ++rejections;
      }
      cell.n_reps = int(cell.statistics.size());
      if (cell.n_reps > 0) {
        cell.rejection_rate = double(rejections) / double(cell.n_reps);
        double mean = std::accumulate(cell.statistics.begin(), cell.statistics.end(), 0.0) /
                      double(cell.n_reps);
        double ss = 0.0;
        for (double s : cell.statistics) ss += (s - mean) * (s - mean);
        cell.mean_stat = mean;
        cell.sd_stat = cell.n_reps > 1 ? std::sqrt(ss / double(cell.n_reps - 1)) : 0.0;
      }
      report.cells.push_back(std::move(cell));
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

double calibrate_noise_variance(double r) {
  if (r <= 1.0) return 0.0;  // no-noise signal
  double denom = 4620.0 - 77.0 * r;
  if (denom <= 0.0)
    throw std::invalid_argument("calibrate_noise: ratio implies a non-positive denominator");
  return 0.5 * (1.0 / 252.0) * (r - 1.0) / denom;
}

double calibrate_noise(double r) { return std::sqrt(calibrate_noise_variance(r)); }

}  // namespace roughvol
