#include "roughvol/estimators.hpp"

#include <cmath>
#include <limits>

namespace roughvol {

EcfEstimate ecf_block(std::span<const double> returns, double delta_n, double u) {
  if (u == 0.0) throw std::invalid_argument("ecf_block: u must be nonzero");
  if (returns.empty()) throw std::invalid_argument("ecf_block: empty block");
  const double inv_sq = u / std::sqrt(delta_n);
  double re = 0.0, im = 0.0;
  for (double r : returns) {
    double phase = inv_sq * r;
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const double k = double(returns.size());
  EcfEstimate est;
  est.u = u;
  est.l_hat = std::complex<double>(re / k, im / k);
  double mod = std::abs(est.l_hat);
  if (mod < kEcfModulusFloor) {
    mod = kEcfModulusFloor;  // cap c_hat; block excludable downstream
    est.degenerate = true;
  }
  est.c_hat = -(2.0 / (u * u)) * std::log(mod);
  if (est.c_hat <= kSpotVarFloor) est.degenerate = true;
  est.log_spot_var = est.degenerate ? std::numeric_limits<double>::quiet_NaN()
                                    : std::log(est.c_hat);
  return est;
}

BipowerResult bipower_block(std::span<const double> day_returns, std::size_t first,
                            std::size_t count, double delta_n) {
  if (count == 0) throw std::invalid_argument("bipower_block: empty block");
  if (first + count > day_returns.size())
    throw std::invalid_argument("bipower_block: block exceeds day");
  BipowerResult res;
  // The predecessor return lives in the same day; the first return of a day
  // has none, so the sum shrinks and renormalizes.
  std::size_t lo = first == 0 ? 1 : first;
  res.shortened = first == 0;
  double sum = 0.0;
  for (std::size_t i = lo; i < first + count; ++i)
    sum += std::fabs(day_returns[i]) * std::fabs(day_returns[i - 1]);
  res.n_products = int(first + count - lo);
  if (res.n_products == 0)
    throw std::invalid_argument("bipower_block: no usable products");
  res.c_hat = M_PI / (2.0 * double(res.n_products) * delta_n) * sum;
  return res;
}

double rv_ratio(std::span<const double> path) {
  const std::size_t n_pts = path.size();
  if (n_pts < 3) throw std::invalid_argument("rv_ratio: need at least 3 points");
  const std::size_t n = n_pts - 1;
  double rv = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    double d = path[i] - path[i - 1];
    rv += d * d;
  }
  if (rv == 0.0) return 2.0;  // 0/0 convention
  // Flat extension beyond both ends turns the i=0 and i=n terms into single
  // increments.
  double rv2 = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    double hi = i + 1 <= n ? path[i + 1] : path[n];
    double lo = i >= 1 ? path[i - 1] : path[0];
    double d = hi - lo;
    rv2 += d * d;
  }
  return 0.5 * rv2 / rv;
}

std::vector<double> increment_acf(std::span<const double> path, int max_lag) {
  if (max_lag < 1) throw std::invalid_argument("increment_acf: max_lag must be >= 1");
  const std::size_t n_pts = path.size();
  if (n_pts < std::size_t(max_lag) + 2)
    throw std::invalid_argument("increment_acf: path too short for max_lag");
  const std::size_t n = n_pts - 1;
  std::vector<double> inc(n);
  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    inc[i] = path[i + 1] - path[i];
    denom += inc[i] * inc[i];
  }
  std::vector<double> acf(std::size_t(max_lag), 0.0);
  for (int lag = 1; lag <= max_lag; ++lag) {
    if (denom == 0.0) {
      acf[std::size_t(lag - 1)] = lag == 1 ? 1.0 : 0.0;  // 0/0 = 1 at lag 1
      continue;
    }
    double num = 0.0;
    for (std::size_t i = 0; i + std::size_t(lag) < n; ++i)
      num += inc[i] * inc[i + std::size_t(lag)];
    acf[std::size_t(lag - 1)] = num / denom;
  }
  return acf;
}

}  // namespace roughvol
