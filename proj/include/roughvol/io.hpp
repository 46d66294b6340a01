#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "roughvol/montecarlo.hpp"
#include "roughvol/types.hpp"

namespace roughvol {

// Shortest round-trip decimal (std::to_chars), so CSV output is stable
// byte-for-byte across runs and platforms.
std::string format_double(double x);

// PricePath CSV: header "day,step,log_price" (plus ",latent_variance" when a
// latent panel is supplied; it must be aligned to the grid points).
void write_price_path_csv(std::ostream& out, const PricePath& path,
                          const std::vector<std::vector<double>>* latent = nullptr);
PricePath read_price_path_csv(std::istream& in);
PricePath read_price_path_file(const std::string& path);
void write_price_path_file(const std::string& path, const PricePath& p,
                           const std::vector<std::vector<double>>* latent = nullptr);

nlohmann::json scenario_to_json(const SimScenario& s);
SimScenario scenario_from_json(const nlohmann::json& j);

nlohmann::json tuning_to_json(const TuningSpec& t);
TuningSpec tuning_from_json(const nlohmann::json& j);

nlohmann::json plan_to_json(const McPlan& p);
McPlan plan_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const TestReport& r);
nlohmann::json mc_report_to_json(const McReport& r);
void write_mc_report_csv(std::ostream& out, const McReport& r);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace roughvol
