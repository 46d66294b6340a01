#include "roughvol/types.hpp"

#include <cmath>

#include "roughvol/math.hpp"

namespace roughvol {

std::size_t PricePath::returns_per_day() const {
  if (days.empty()) throw layout_error("path", "no trading days");
  std::size_t n = days.front().log_prices.size();
  for (const auto& d : days)
    if (d.log_prices.size() != n)
      throw layout_error("path", "inconsistent day lengths (" + d.date + ")");
  if (n < 3) throw layout_error("path", "days need at least 2 log-prices");
  return n - 1;
}

void PricePath::validate() const {
  if (!(delta_n > 0.0)) throw layout_error("path", "delta_n must be positive");
  returns_per_day();
  for (const auto& d : days)
    for (double x : d.log_prices)
      if (!std::isfinite(x))
        throw layout_error("path", "non-finite log-price on " + d.date);
}

void SimScenario::validate() const {
  auto check_common = [](double theta, double kappa, double nu, double rho, double v0) {
    if (!(theta > 0.0)) throw std::invalid_argument("scenario: theta must be positive");
    // kappa = 0 and nu = 0 are degenerate but well-defined (they shut the
    // drift or diffusion off), and the oracle tests rely on them.
    if (!(kappa >= 0.0)) throw std::invalid_argument("scenario: kappa must be non-negative");
    if (!(nu >= 0.0)) throw std::invalid_argument("scenario: nu must be non-negative");
    if (!(rho >= -1.0 && rho <= 1.0))
      throw std::invalid_argument("scenario: rho must be in [-1,1]");
    if (!(v0 > 0.0)) throw std::invalid_argument("scenario: v0 must be positive");
  };
  if (const auto* h = std::get_if<HestonParams>(&variance)) {
    check_common(h->theta, h->kappa, h->nu, h->rho, h->v0);
  } else {
    const auto& r = std::get<RoughHestonParams>(variance);
    check_common(r.theta, r.kappa, r.nu, r.rho, r.v0);
    if (!(r.hurst > 0.0 && r.hurst < 0.5))
      throw std::invalid_argument("scenario: hurst must be in (0, 1/2)");
  }
  if (jumps) {
    if (!(jumps->alpha > 0.0 && jumps->alpha < 2.0))
      throw std::invalid_argument("scenario: jump alpha must be in (0,2)");
    if (!(jumps->lambda > 0.0))
      throw std::invalid_argument("scenario: jump lambda must be positive");
    if (!jumps->derive_scale && !(jumps->scale > 0.0))
      throw std::invalid_argument("scenario: jump scale must be positive");
  }
  if (noise && !(noise->sigma_noise >= 0.0))
    throw std::invalid_argument("scenario: sigma_noise must be non-negative");
  if (grid.steps_per_day < 2)
    throw std::invalid_argument("scenario: steps_per_day must be >= 2");
  if (grid.drop_first < 0 || grid.drop_first >= grid.steps_per_day - 1)
    throw std::invalid_argument("scenario: drop_first out of range");
  if (grid.days_per_block < 1)
    throw std::invalid_argument("scenario: days_per_block must be >= 1");
}

double SimScenario::jump_scale() const {
  if (!jumps) return 0.0;
  if (jumps->derive_scale) return jump_scale_from(jumps->alpha, jumps->lambda);
  return jumps->scale;
}

void TuningSpec::validate() const {
  if (!(target_modulus > 0.0 && target_modulus < 1.0))
    throw std::invalid_argument("tuning: target modulus must be in (0,1)");
  if (scheme == EtaScheme::lagged_blocks) {
    if (lag_lo < 3)
      throw std::invalid_argument("tuning: lag_lo must be >= 3 (measurability)");
    if (lag_hi < lag_lo)
      throw std::invalid_argument("tuning: lag_hi must be >= lag_lo");
  } else if (lookback_days < 1) {
    throw std::invalid_argument("tuning: lookback_days must be >= 1");
  }
}

}  // namespace roughvol
