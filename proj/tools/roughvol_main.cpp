#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "roughvol/ingest.hpp"
#include "roughvol/io.hpp"
#include "roughvol/math.hpp"
#include "roughvol/montecarlo.hpp"
#include "roughvol/parallel.hpp"
#include "roughvol/rng.hpp"
#include "roughvol/roughtest.hpp"
#include "roughvol/simulate.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using nlohmann::json;
using namespace roughvol;

namespace {

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void log_info(const std::string& msg) {
  if (g_log_level >= 1) std::cerr << "[roughvol] " << msg << "\n";
}

struct TuningFlags {
  double frak_l = 0.75;
  std::string eta_scheme = "timeofday";

  TuningSpec parse() const {
    TuningSpec t;
    t.target_modulus = frak_l;
    if (eta_scheme == "timeofday") {
      t.scheme = EtaScheme::time_of_day;
    } else if (eta_scheme.rfind("lagged", 0) == 0) {
      t.scheme = EtaScheme::lagged_blocks;
      if (eta_scheme.size() > 7) {
        int lo = 0, hi = 0;
        if (std::sscanf(eta_scheme.c_str() + 7, "%d,%d", &lo, &hi) != 2)
          throw std::invalid_argument("--eta-scheme lagged expects lagged:l1,l2");
        t.lag_lo = lo;
        t.lag_hi = hi;
      }
    } else {
      throw std::invalid_argument("--eta-scheme must be timeofday or lagged:l1,l2");
    }
    t.validate();
    return t;
  }
};

void add_tuning_flags(CLI::App* cmd, TuningFlags& f) {
  cmd->add_option("--frakL", f.frak_l, "target ECF modulus in (0,1)")
      ->capture_default_str();
  cmd->add_option("--eta-scheme", f.eta_scheme,
                  "exponent scale scheme: timeofday | lagged:l1,l2")
      ->capture_default_str();
}

json resolved_config(const std::string& subcommand, const json& detail) {
  json j;
  j["subcommand"] = subcommand;
  j["config"] = detail;
  return j;
}

int run_simulate(const std::string& scenario_file, const std::string& model,
                 double hurst, int days, std::uint64_t seed, bool latent,
                 const std::string& out_prefix) {
  SimScenario scenario;
  if (!scenario_file.empty()) {
    scenario = scenario_from_json(load_json_file(scenario_file));
  } else {
    McScenario base = default_scenario(model);
    scenario = base.scenario;
    if (auto* r = std::get_if<RoughHestonParams>(&scenario.variance); r && hurst > 0.0)
      r->hurst = hurst;
  }
  scenario.seed = seed;
  scenario.validate();
  RandomStream stream = rng_stream(scenario.seed, 0, 0);
  SimOutput sim = simulate_scenario(scenario, days, stream);
  write_price_path_file(out_prefix + ".csv", sim.prices,
                        latent ? &sim.latent_variance : nullptr);
  json sidecar = resolved_config(
      "simulate", {{"scenario", scenario_to_json(scenario)}, {"n_days", days},
                   {"latent", latent}});
  write_json_file(out_prefix + ".json", sidecar);
  log_info("wrote " + out_prefix + ".csv (" + std::to_string(days) + " days)");
  return 0;
}

int run_test_cmd(const std::string& input, int pn, int kn, const TuningFlags& tf,
                 std::vector<double> alphas, const std::string& out,
                 const std::string& diffs_out) {
  TuningSpec tuning = tf.parse();
  PricePath path = read_price_path_file(input);
  if (alphas.empty()) alphas = {0.01, 0.05, 0.10};

  BlockGrid grid = build_block_grid(path, pn, kn);
  DiffPanel diff = compute_diff_panel(path, grid, tuning);
  TestReport rep = test_statistic(diff, alphas);

  if (!diffs_out.empty()) {
    std::ofstream ds(diffs_out);
    if (!ds) throw layout_error("csv", "cannot write " + diffs_out);
    ds << "day,block,value,valid\n";
    for (std::size_t d = 0; d < diff.values.size(); ++d)
      for (std::size_t j = 0; j < diff.values[d].size(); ++j)
        ds << diff.product_days[d] << ',' << diff.first_even_block + 2 * int(j) << ','
           << format_double(diff.values[d][j]) << ',' << int(diff.valid[d][j]) << "\n";
  }

  json j = report_to_json(rep);
  j["input"] = input;
  j["config"] = {{"pn", pn}, {"kn", kn}, {"tuning", tuning_to_json(tuning)},
                 {"alphas", alphas}};
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(out, j);
    log_info("wrote " + out);
  }
  return 0;
}

int run_montecarlo(const std::string& plan_file, std::vector<std::string> labels,
                   int reps, int days, std::vector<double> frak_ls,
                   std::uint64_t seed, int workers, const std::string& out,
                   const std::string& format) {
  McPlan plan;
  if (!plan_file.empty()) plan = plan_from_json(load_json_file(plan_file));
  if (reps > 0) plan.n_reps = reps;
  if (days > 0) plan.n_days = days;
  if (!frak_ls.empty()) plan.frak_l_grid = frak_ls;
  if (seed) plan.base_seed = seed;
  if (!labels.empty()) {
    plan.scenarios.clear();
    for (const auto& l : labels) plan.scenarios.push_back(default_scenario(l));
  }
  plan.validate();
  bool has_rough = false;
  for (const auto& s : plan.scenarios.empty() ? default_scenarios() : plan.scenarios)
    has_rough = has_rough ||
                std::holds_alternative<RoughHestonParams>(s.scenario.variance);
  // The rough kernel is O(N^2) per 7-day block; full-scale runs are hours.
  if (has_rough && double(plan.n_days) * plan.n_reps > 100 * 28)
    std::cerr << "[roughvol] warning: rough-kernel cost grows as (days/7) * reps"
                 " * (7 * steps_per_day)^2; this plan is far beyond desk scale"
                 " and may run for hours\n";
  log_info("running plan: " + std::to_string(plan.n_reps) + " reps x " +
           std::to_string(plan.n_days) + " days, workers=" +
           std::to_string(workers > 0 ? workers : par::max_threads()));
  McReport rep = run_plan(plan, workers);

  bool as_json = format == "json" ||
                 (format.empty() && out.size() > 5 && out.substr(out.size() - 5) == ".json");
  if (out.empty()) {
    write_mc_report_csv(std::cout, rep);
  } else if (as_json) {
    json j = mc_report_to_json(rep);
    j["plan"] = plan_to_json(plan);
    write_json_file(out, j);
    log_info("wrote " + out);
  } else {
    std::ofstream os(out);
    if (!os) throw layout_error("csv", "cannot write " + out);
    write_mc_report_csv(os, rep);
    json sidecar = resolved_config("montecarlo", {{"plan", plan_to_json(plan)}});
    write_json_file(out + ".json", sidecar);
    log_info("wrote " + out);
  }
  return 0;
}

int run_ingest(const std::string& input, const std::string& session_text, int step,
               double threshold, const std::string& exclude_file,
               const std::string& out) {
  SessionSpec session = parse_session(session_text);
  DayFilterConfig config;
  config.session = session;
  config.zero_return_threshold = threshold;
  if (!exclude_file.empty()) config.exclusion_dates = read_exclusion_file(exclude_file);

  RawTickFile ticks = read_ticks_file(input);
  ResampleResult grids = resample(ticks, session, step);
  FilterResult filtered = filter_days(grids, config);

  write_price_path_file(out, filtered.path);
  json log = json::array();
  for (const auto& d : grids.dropped)
    log.push_back({{"date", d.substr(0, d.find(':'))}, {"kept", false},
                   {"reason", d.substr(d.find(':') + 2)}});
  for (const auto& e : filtered.log)
    log.push_back({{"date", e.date}, {"kept", e.kept}, {"reason", e.reason}});
  json sidecar = resolved_config(
      "ingest", {{"input", input},
                 {"session", session_text},
                 {"step_seconds", step},
                 {"zero_return_threshold", threshold},
                 {"exclude_file", exclude_file}});
  sidecar["filter_log"] = log;
  sidecar["days_kept"] = filtered.path.days.size();
  write_json_file(out + ".json", sidecar);
  log_info("kept " + std::to_string(filtered.path.days.size()) + " days -> " + out);
  return 0;
}

int run_acf(const std::string& input, int max_lag, const std::string& out) {
  PricePath path = read_price_path_file(input);
  // Pool increment autocovariances across days; increments never span the
  // overnight boundary.
  std::vector<double> num(std::size_t(max_lag), 0.0);
  double den = 0.0;
  for (const auto& day : path.days) {
    const auto& x = day.log_prices;
    std::vector<double> inc(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) inc[i] = x[i + 1] - x[i];
    for (std::size_t i = 0; i < inc.size(); ++i) {
      den += inc[i] * inc[i];
      for (int lag = 1; lag <= max_lag; ++lag) {
        if (i + std::size_t(lag) >= inc.size()) break;
        num[std::size_t(lag - 1)] += inc[i] * inc[i + std::size_t(lag)];
      }
    }
  }
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw layout_error("csv", "cannot write " + out);
    os = &file;
  }
  *os << "lag,value\n";
  for (int lag = 1; lag <= max_lag; ++lag)
    *os << lag << ',' << format_double(den > 0.0 ? num[std::size_t(lag - 1)] / den : (lag == 1 ? 1.0 : 0.0))
        << "\n";
  if (!out.empty())
    write_json_file(out + ".json",
                    resolved_config("acf", {{"input", input}, {"max_lag", max_lag}}));
  return 0;
}

int run_calibrate(double ratio) {
  double var = calibrate_noise_variance(ratio);
  double sigma = calibrate_noise(ratio);
  if (var == 0.0) log_info("ratio <= 1: no-noise signal");
  std::printf("sigma2_noise %.6g\nsigma_noise %.6g\n", var, sigma);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric roughness test for spot volatility from high-frequency prices"};
  app.require_subcommand(1);
  // Global flags (--seed, --workers, --out, --log-level) may appear after
  // the subcommand name as well.
  app.fallthrough();

  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;
  app.add_option("--seed", seed, "base RNG seed")->capture_default_str();
  app.add_option("--workers", workers, "worker threads (0 = all)")->capture_default_str();
  app.add_option("--log-level", g_log_level, "0 quiet, 1 info, 2 debug")
      ->capture_default_str();
  app.add_option("--out", out, "output file (subcommand-specific default otherwise)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic price panel");
  std::string scenario_file, model = "V3-J1";
  double hurst = 0.0;
  int sim_days = 7;
  bool latent = false;
  std::string sim_out = "sim";
  sim->add_option("--scenario", scenario_file, "scenario JSON file");
  sim->add_option("--model", model, "built-in scenario label (V1..V3 x J1,J2)")
      ->capture_default_str();
  sim->add_option("--hurst", hurst, "override Hurst parameter for rough models");
  sim->add_option("--days", sim_days, "number of trading days")->capture_default_str();
  sim->add_flag("--latent", latent, "include latent variance column");
  sim->add_option("--out", sim_out, "output prefix (.csv/.json)")->capture_default_str();

  // test
  auto* tst = app.add_subcommand("test", "run the roughness test on a price panel");
  std::string test_input;
  int pn = 60, kn = 48;
  TuningFlags test_tuning;
  std::vector<double> alphas;
  std::string diffs_out;
  tst->add_option("input", test_input, "PricePath CSV")->required();
  tst->add_option("--pn", pn, "returns per block")->capture_default_str();
  tst->add_option("--kn", kn, "returns used per block")->capture_default_str();
  add_tuning_flags(tst, test_tuning);
  tst->add_option("--alpha", alphas, "significance level (repeatable)");
  tst->add_option("--diffs-out", diffs_out, "write the differenced series as CSV");

  // montecarlo
  auto* mc = app.add_subcommand("montecarlo", "size/power experiments");
  std::string plan_file, mc_format;
  std::vector<std::string> mc_labels;
  int mc_reps = 0, mc_days = 0;
  std::vector<double> mc_frak_ls;
  mc->add_option("--plan", plan_file, "plan JSON file");
  mc->add_option("--scenarios", mc_labels, "scenario labels (default: all six)");
  mc->add_option("--reps", mc_reps, "replications");
  mc->add_option("--days", mc_days, "days per replication (multiple of 7)");
  mc->add_option("--frakL", mc_frak_ls, "target ECF modulus (repeatable)");
  mc->add_option("--format", mc_format, "csv | json (default by extension)");

  // ingest
  auto* ing = app.add_subcommand("ingest", "tick CSV -> PricePath CSV");
  std::string ingest_input, session_text = "09:35-16:00", exclude_file;
  int step = 5;
  double threshold = 0.20;
  std::string ingest_out = "path.csv";
  ing->add_option("input", ingest_input, "tick CSV (timestamp,price)")->required();
  ing->add_option("--session", session_text, "session clock times")->capture_default_str();
  ing->add_option("--step", step, "grid step in seconds")->capture_default_str();
  ing->add_option("--threshold", threshold, "zero 5-minute-return fraction")
      ->capture_default_str();
  ing->add_option("--exclude-file", exclude_file, "file of dates to drop (one per line)");
  ing->add_option("--out", ingest_out, "output PricePath CSV")->capture_default_str();

  // acf
  auto* acf = app.add_subcommand("acf", "per-lag increment autocorrelations");
  std::string acf_input;
  int max_lag = 7;
  acf->add_option("input", acf_input, "PricePath CSV")->required();
  acf->add_option("--max-lag", max_lag, "largest lag")->capture_default_str();

  // calibrate-noise
  auto* cal = app.add_subcommand("calibrate-noise",
                                 "noise scale from the 5s/5min realized variance ratio");
  double ratio = 0.0;
  cal->add_option("ratio", ratio, "RV(5s)/RV(5min) daily median")->required();

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#endif

  try {
    if (sim->parsed())
      return run_simulate(scenario_file, model, hurst, sim_days, seed, latent,
                          out.empty() ? sim_out : out);
    if (tst->parsed())
      return run_test_cmd(test_input, pn, kn, test_tuning, alphas, out, diffs_out);
    if (mc->parsed())
      return run_montecarlo(plan_file, mc_labels, mc_reps, mc_days, mc_frak_ls, seed,
                            workers, out, mc_format);
    if (ing->parsed())
      return run_ingest(ingest_input, session_text, step, threshold, exclude_file,
                        out.empty() ? ingest_out : out);
    if (acf->parsed()) return run_acf(acf_input, max_lag, out);
    if (cal->parsed()) return run_calibrate(ratio);
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const layout_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    // Missing or malformed inputs are usage errors.
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
