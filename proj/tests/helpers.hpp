#pragma once

// Test-side oracles, independent of the library implementation paths they
// check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "roughvol/rng.hpp"
#include "roughvol/types.hpp"

namespace oracle {

// Generic adaptive Simpson.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 40) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole,
          int d) -> double {
    double m = 0.5 * (lo + hi);
    double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
    double flm = f(lm), frm = f(rm);
    double left = (m - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    double right = (hi - m) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, m, flo, flm, fmid, left, d - 1) +
           rec(m, hi, fmid, frm, fhi, right, d - 1);
  };
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, depth);
}

// Phi via quadrature of the density; no erf/erfc involved.
inline double normal_cdf_quad(double x) {
  auto pdf = [](double t) {
    return 0.3989422804014326779 * std::exp(-0.5 * t * t);
  };
  if (x < -9.0) return 0.0;
  if (x > 9.0) return 1.0;
  if (x >= 0.0) return 0.5 + adaptive_simpson(pdf, 0.0, x, 1e-14);
  return 0.5 - adaptive_simpson(pdf, x, 0.0, 1e-14);
}

// Quantile by bisection on the quadrature CDF.
inline double normal_quantile_bisect(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (normal_cdf_quad(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Asymptotic Kolmogorov tail Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_q(double x) {
  if (x <= 0.0) return 1.0;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * std::exp(-2.0 * double(k) * double(k) * x * x);
    q += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, q));
}

inline double kolmogorov_critical(double alpha) {
  double lo = 0.2, hi = 3.0;
  for (int i = 0; i < 100; ++i) {
    double mid = 0.5 * (lo + hi);
    (kolmogorov_q(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// One-sample KS distance against a supplied CDF.
inline double ks_statistic(std::vector<double> xs,
                           const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  const double n = double(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double F = cdf(xs[i]);
    d = std::max(d, std::fabs(F - double(i) / n));
    d = std::max(d, std::fabs(double(i + 1) / n - F));
  }
  return d;
}

// Two-sample KS distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(double(i) / double(a.size()) -
                              double(j) / double(b.size())));
  }
  return d;
}

// Independent quadrature for the tempered tail mass: adaptive Simpson over
// dyadic pieces [eps 2^k, eps 2^{k+1}] until the integrand is dead.
inline double tail_mass_dyadic(double alpha, double lambda, double eps) {
  auto f = [&](double x) { return std::pow(x, -alpha - 1.0) * std::exp(-lambda * x); };
  double total = 0.0;
  double lo = eps;
  for (int k = 0; k < 200; ++k) {
    double hi = lo * 2.0;
    total += adaptive_simpson(f, lo, hi, 1e-15 * (1.0 + total));
    lo = hi;
    if (lambda * lo > 745.0) break;
  }
  return total;
}

// Power series for the truncated second moment, exact for lambda*eps < 1:
// integral_0^eps x^{1-a} e^{-lx} dx = sum_k (-l)^k/k! eps^{2-a+k}/(2-a+k).
inline double small_x2_series(double alpha, double lambda, double eps) {
  double sum = 0.0, term_pow = std::pow(eps, 2.0 - alpha), factorial = 1.0;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      factorial *= double(k);
      term_pow *= eps;
    }
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    double term = sign * std::pow(lambda, double(k)) / factorial * term_pow /
                  (2.0 - alpha + double(k));
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum) && k > 3) break;
  }
  return sum;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  double m = mean(xs), s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / double(xs.size() - 1);
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle

namespace testutil {

// Constant-variance Gaussian panel: returns ~ N(0, c * delta_n).
inline roughvol::PricePath gaussian_panel(int days, int returns_per_day, double c,
                                          double delta_n, roughvol::RandomStream& s) {
  roughvol::PricePath path;
  path.delta_n = delta_n;
  double sd = std::sqrt(c * delta_n);
  for (int d = 0; d < days; ++d) {
    roughvol::TradingDay day;
    char buf[16];
    std::snprintf(buf, sizeof buf, "d%04d", d + 1);
    day.date = buf;
    day.log_prices.resize(std::size_t(returns_per_day) + 1);
    day.log_prices[0] = 0.0;
    for (int i = 0; i < returns_per_day; ++i)
      day.log_prices[std::size_t(i) + 1] =
          day.log_prices[std::size_t(i)] + sd * s.normal();
    path.days.push_back(std::move(day));
  }
  return path;
}

}  // namespace testutil
