// Serial vs OpenMP comparison for the hot kernels: the rough-kernel
// convolution, the spot-variance panel, and the Monte Carlo runner.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "roughvol/montecarlo.hpp"
#include "roughvol/parallel.hpp"
#include "roughvol/rng.hpp"
#include "roughvol/roughtest.hpp"
#include "roughvol/simulate.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace roughvol;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

volatile double g_sink = 0.0;

void bench_chunked_dot(std::size_t n, int reps) {
  std::vector<double> w(n), a(n);
  RandomStream s(42);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = s.uniform();
    a[i] = s.uniform() - 0.5;
  }
  auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) g_sink = g_sink + par::chunked_dot_serial(w.data(), a.data(), n);
  double ts = seconds_since(t0);
  t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) g_sink = g_sink + par::chunked_dot_parallel(w.data(), a.data(), n);
  double tp = seconds_since(t0);
  std::printf("chunked_dot n=%-8zu serial %8.3f ms  parallel %8.3f ms  speedup %.2fx\n",
              n, 1e3 * ts / reps, 1e3 * tp / reps, ts / tp);
}

SimScenario rough_scenario() {
  SimScenario s = default_scenario("V1-J1").scenario;
  return s;
}

void bench_volterra(int days) {
  SimScenario s = rough_scenario();
  // Kernel dispatch picks the parallel path on large steps; force both ways
  // by thread count.
  auto run = [&](int threads) {
#ifdef _OPENMP
    int saved = omp_get_max_threads();
    omp_set_num_threads(threads);
#endif
    RandomStream stream = rng_stream(7, 0, 0);
    auto t0 = clock_type::now();
    SimOutput out = simulate_rough_heston(s, days, stream);
    double t = seconds_since(t0);
    g_sink = g_sink + out.prices.days.back().log_prices.back();
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
    return t;
  };
  double ts = run(1);
  double tp = run(par::max_threads());
  std::printf("rough_heston %d-day sim    serial %8.3f s   parallel %8.3f s   speedup %.2fx\n",
              days, ts, tp, ts / tp);
}

void bench_panel(int days, int reps) {
  SimScenario s = default_scenario("V3-J1").scenario;
  RandomStream stream = rng_stream(11, 0, 0);
  SimOutput sim = simulate_heston(s, days, stream);
  BlockGrid grid = build_block_grid(sim.prices, 60, 48);
  TuningSpec tuning;
  tuning.target_modulus = 0.75;
  auto run = [&](int threads) {
#ifdef _OPENMP
    int saved = omp_get_max_threads();
    omp_set_num_threads(threads);
#endif
    auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) {
      SpotVolPanel p = compute_spot_panel(sim.prices, grid, tuning);
      g_sink = g_sink + p.entries.back().back().log_spot_var;
    }
    double t = seconds_since(t0);
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
    return t;
  };
  double ts = run(1);
  double tp = run(par::max_threads());
  std::printf("spot panel %d days x%d     serial %8.3f ms  parallel %8.3f ms  speedup %.2fx\n",
              days, reps, 1e3 * ts / reps, 1e3 * tp / reps, ts / tp);
}

void bench_mc(int reps) {
  McPlan plan;
  plan.scenarios = {default_scenario("V3-J1")};
  plan.frak_l_grid = {0.75};
  plan.n_days = 14;
  plan.n_reps = reps;
  auto t0 = clock_type::now();
  McReport r1 = run_plan(plan, 1);
  double ts = seconds_since(t0);
  t0 = clock_type::now();
  McReport rn = run_plan(plan, par::max_threads());
  double tp = seconds_since(t0);
  bool same = r1.cells[0].statistics == rn.cells[0].statistics;
  std::printf("mc plan %d reps x 14d      serial %8.3f s   parallel %8.3f s   speedup %.2fx  identical=%s\n",
              reps, ts, tp, ts / tp, same ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = argc > 1 && std::string(argv[1]) == "--quick";
  std::printf("threads available: %d\n", par::max_threads());
  bench_chunked_dot(1 << 14, quick ? 200 : 2000);
  bench_chunked_dot(1 << 17, quick ? 50 : 500);
  bench_chunked_dot(1 << 20, quick ? 10 : 100);
  bench_panel(7, quick ? 5 : 20);
  bench_volterra(quick ? 1 : 7);
  bench_mc(quick ? 4 : 16);
  return 0;
}
