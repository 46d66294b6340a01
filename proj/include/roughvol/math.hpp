#pragma once

#include <cmath>

namespace roughvol {

inline double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

// Inverse standard normal CDF. Rational approximation refined by Halley
// steps on erfc, absolute error well below 1e-12.
double normal_quantile(double alpha);

// Jump scale c such that the second moment of the tempered-stable measure
// c * exp(-lambda|x|) / |x|^(alpha+1) dx equals 0.2:
// c = 0.1 * lambda^(2-alpha) / Gamma(2-alpha).
double jump_scale_from(double alpha, double lambda);

}  // namespace roughvol
