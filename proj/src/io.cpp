#include "roughvol/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace roughvol {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_price_path_csv(std::ostream& out, const PricePath& path,
                          const std::vector<std::vector<double>>* latent) {
  if (latent && latent->size() != path.days.size())
    throw std::invalid_argument("write_price_path_csv: latent panel shape mismatch");
  out << "day,step,log_price";
  if (latent) out << ",latent_variance";
  out << "\n";
  for (std::size_t d = 0; d < path.days.size(); ++d) {
    const auto& day = path.days[d];
    if (latent && (*latent)[d].size() != day.log_prices.size())
      throw std::invalid_argument("write_price_path_csv: latent day length mismatch");
    for (std::size_t i = 0; i < day.log_prices.size(); ++i) {
      out << day.date << ',' << i << ',' << format_double(day.log_prices[i]);
      if (latent) out << ',' << format_double((*latent)[d][i]);
      out << "\n";
    }
  }
}

PricePath read_price_path_csv(std::istream& in) {
  PricePath path;
  std::string line;
  if (!std::getline(in, line))
    throw layout_error("csv", "empty price path file");
  // header: day,step,log_price[,...]
  if (line.rfind("day,step,log_price", 0) != 0)
    throw layout_error("csv", "expected header day,step,log_price");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string date, step_s, price_s;
    if (!std::getline(ls, date, ',') || !std::getline(ls, step_s, ',') ||
        !std::getline(ls, price_s, ','))
      throw layout_error("csv", "bad row at line " + std::to_string(line_no));
    double price = 0.0;
    auto res = std::from_chars(price_s.data(), price_s.data() + price_s.size(), price);
    if (res.ec != std::errc())
      throw layout_error("csv", "bad log_price at line " + std::to_string(line_no));
    if (path.days.empty() || path.days.back().date != date) {
      path.days.push_back(TradingDay{date, {}});
    }
    path.days.back().log_prices.push_back(price);
  }
  path.validate();
  return path;
}

PricePath read_price_path_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw layout_error("csv", "cannot open " + path);
  return read_price_path_csv(in);
}

void write_price_path_file(const std::string& path, const PricePath& p,
                           const std::vector<std::vector<double>>* latent) {
  std::ofstream out(path);
  if (!out) throw layout_error("csv", "cannot write " + path);
  write_price_path_csv(out, p, latent);
}

json scenario_to_json(const SimScenario& s) {
  json j;
  if (const auto* h = std::get_if<HestonParams>(&s.variance)) {
    j["variance"] = {{"model", "heston"},   {"theta", h->theta}, {"kappa", h->kappa},
                     {"nu", h->nu},         {"rho", h->rho},     {"v0", h->v0}};
  } else {
    const auto& r = std::get<RoughHestonParams>(s.variance);
    j["variance"] = {{"model", "rough_heston"}, {"hurst", r.hurst},  {"theta", r.theta},
                     {"kappa", r.kappa},        {"nu", r.nu},        {"rho", r.rho},
                     {"v0", r.v0}};
  }
  if (s.jumps) {
    j["jumps"] = {{"alpha", s.jumps->alpha},
                  {"lambda", s.jumps->lambda},
                  {"derive_scale", s.jumps->derive_scale}};
    if (!s.jumps->derive_scale) j["jumps"]["scale"] = s.jumps->scale;
  } else {
    j["jumps"] = nullptr;
  }
  if (s.noise) {
    j["noise"] = {{"sigma_noise", s.noise->sigma_noise},
                  {"volatility_scaled", s.noise->volatility_scaled}};
  } else {
    j["noise"] = nullptr;
  }
  j["grid"] = {{"steps_per_day", s.grid.steps_per_day},
               {"drop_first", s.grid.drop_first},
               {"days_per_block", s.grid.days_per_block},
               {"kernel_window", s.grid.kernel_window}};
  j["seed"] = s.seed;
  return j;
}

SimScenario scenario_from_json(const json& j) {
  SimScenario s;
  const auto& v = j.at("variance");
  std::string model = v.at("model").get<std::string>();
  if (model == "heston") {
    HestonParams h;
    h.theta = v.value("theta", h.theta);
    h.kappa = v.value("kappa", h.kappa);
    h.nu = v.value("nu", h.nu);
    h.rho = v.value("rho", h.rho);
    h.v0 = v.value("v0", h.theta);
    s.variance = h;
  } else if (model == "rough_heston") {
    RoughHestonParams r;
    r.hurst = v.at("hurst").get<double>();
    r.theta = v.value("theta", r.theta);
    r.kappa = v.value("kappa", r.kappa);
    r.nu = v.value("nu", r.nu);
    r.rho = v.value("rho", r.rho);
    r.v0 = v.value("v0", r.theta);
    s.variance = r;
  } else {
    throw std::invalid_argument("scenario: unknown variance model " + model);
  }
  if (j.contains("jumps") && !j.at("jumps").is_null()) {
    JumpParams jp;
    const auto& ja = j.at("jumps");
    jp.alpha = ja.at("alpha").get<double>();
    jp.lambda = ja.at("lambda").get<double>();
    jp.derive_scale = ja.value("derive_scale", !ja.contains("scale"));
    if (!jp.derive_scale) jp.scale = ja.at("scale").get<double>();
    s.jumps = jp;
  }
  if (j.contains("noise") && !j.at("noise").is_null()) {
    NoiseParams np;
    const auto& jn = j.at("noise");
    np.sigma_noise = jn.at("sigma_noise").get<double>();
    np.volatility_scaled = jn.value("volatility_scaled", true);
    s.noise = np;
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    s.grid.steps_per_day = g.value("steps_per_day", s.grid.steps_per_day);
    s.grid.drop_first = g.value("drop_first", s.grid.drop_first);
    s.grid.days_per_block = g.value("days_per_block", s.grid.days_per_block);
    s.grid.kernel_window = g.value("kernel_window", s.grid.kernel_window);
  }
  s.seed = j.value("seed", std::uint64_t(0));
  s.validate();
  return s;
}

json tuning_to_json(const TuningSpec& t) {
  json j;
  j["frak_L"] = t.target_modulus;
  j["theta"] = t.theta();
  if (t.scheme == EtaScheme::time_of_day) {
    j["eta_scheme"] = "timeofday";
    j["lookback_days"] = t.lookback_days;
  } else {
    j["eta_scheme"] = "lagged";
    j["lag_lo"] = t.lag_lo;
    j["lag_hi"] = t.lag_hi;
  }
  return j;
}

TuningSpec tuning_from_json(const json& j) {
  TuningSpec t;
  t.target_modulus = j.at("frak_L").get<double>();
  std::string scheme = j.value("eta_scheme", "timeofday");
  if (scheme == "timeofday") {
    t.scheme = EtaScheme::time_of_day;
    t.lookback_days = j.value("lookback_days", t.lookback_days);
  } else if (scheme == "lagged") {
    t.scheme = EtaScheme::lagged_blocks;
    t.lag_lo = j.value("lag_lo", t.lag_lo);
    t.lag_hi = j.value("lag_hi", t.lag_hi);
  } else {
    throw std::invalid_argument("tuning: unknown eta scheme " + scheme);
  }
  t.validate();
  return t;
}

json plan_to_json(const McPlan& p) {
  json j;
  j["scenarios"] = json::array();
  for (const auto& s : p.scenarios)
    j["scenarios"].push_back({{"label", s.label}, {"scenario", scenario_to_json(s.scenario)}});
  j["frak_L_grid"] = p.frak_l_grid;
  j["n_days"] = p.n_days;
  j["n_reps"] = p.n_reps;
  j["alpha"] = p.alpha;
  j["base_seed"] = p.base_seed;
  j["pn"] = p.pn;
  j["kn"] = p.kn;
  j["eta_scheme"] = p.eta_scheme == EtaScheme::time_of_day ? "timeofday" : "lagged";
  j["lag_lo"] = p.lag_lo;
  j["lag_hi"] = p.lag_hi;
  return j;
}

McPlan plan_from_json(const json& j) {
  McPlan p;
  if (j.contains("scenarios")) {
    for (const auto& js : j.at("scenarios")) {
      if (js.is_string()) {
        p.scenarios.push_back(default_scenario(js.get<std::string>()));
      } else if (js.contains("scenario")) {
        p.scenarios.push_back(
            {scenario_from_json(js.at("scenario")), js.value("label", "scenario")});
      } else {
        p.scenarios.push_back(default_scenario(js.at("label").get<std::string>()));
      }
    }
  }
  if (j.contains("frak_L_grid"))
    p.frak_l_grid = j.at("frak_L_grid").get<std::vector<double>>();
  p.n_days = j.value("n_days", p.n_days);
  p.n_reps = j.value("n_reps", p.n_reps);
  p.alpha = j.value("alpha", p.alpha);
  p.base_seed = j.value("base_seed", p.base_seed);
  p.pn = j.value("pn", p.pn);
  p.kn = j.value("kn", p.kn);
  std::string scheme = j.value("eta_scheme", "timeofday");
  p.eta_scheme = scheme == "lagged" ? EtaScheme::lagged_blocks : EtaScheme::time_of_day;
  p.lag_lo = j.value("lag_lo", p.lag_lo);
  p.lag_hi = j.value("lag_hi", p.lag_hi);
  p.validate();
  return p;
}

json report_to_json(const TestReport& r) {
  json j;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  json rej = json::object();
  for (const auto& [a, b] : r.reject_at) rej[format_double(a)] = b;
  j["reject_at"] = rej;
  j["n_summands"] = r.n_summands;
  j["n_dropped"] = r.n_dropped;
  j["numerator"] = r.numerator;
  j["denominator"] = r.denominator;
  j["lag_acov"] = r.lag_acov;
  return j;
}

json mc_report_to_json(const McReport& r) {
  json j;
  j["alpha"] = r.alpha;
  j["base_seed"] = r.base_seed;
  j["wall_seconds"] = r.wall_seconds;
  j["cells"] = json::array();
  for (const auto& c : r.cells) {
    j["cells"].push_back({{"label", c.label},
                          {"frak_L", c.frak_l},
                          {"rejection_rate", c.rejection_rate},
                          {"mean_stat", c.mean_stat},
                          {"sd_stat", c.sd_stat},
                          {"n_reps", c.n_reps},
                          {"n_failed", c.n_failed},
                          {"n_summands", c.n_summands},
                          {"n_dropped", c.n_dropped}});
  }
  return j;
}

void write_mc_report_csv(std::ostream& out, const McReport& r) {
  // Table shape: one row per scenario, one column per frak_L.
  std::vector<double> grid;
  std::vector<std::string> labels;
  for (const auto& c : r.cells) {
    bool seen = false;
    for (double g : grid) seen = seen || g == c.frak_l;
    if (!seen) grid.push_back(c.frak_l);
    bool lseen = false;
    for (const auto& l : labels) lseen = lseen || l == c.label;
    if (!lseen) labels.push_back(c.label);
  }
  out << "scenario";
  for (double g : grid) out << ",frakL=" << format_double(g);
  out << "\n";
  for (const auto& label : labels) {
    out << label;
    for (double g : grid) {
      for (const auto& c : r.cells)
        if (c.label == label && c.frak_l == g) out << ',' << format_double(c.rejection_rate);
    }
    out << "\n";
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw layout_error("json", "cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw layout_error("json", "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace roughvol
