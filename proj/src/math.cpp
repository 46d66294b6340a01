#include "roughvol/math.hpp"

#include <stdexcept>

namespace roughvol {

namespace {

// Acklam's rational approximation to the inverse normal CDF (~1e-9 on its
// own); used as the starting point for Halley refinement below.
double quantile_initial(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("normal_quantile: alpha must be in (0,1)");
  double x = quantile_initial(alpha);
  // Two Halley steps drive the error to machine precision.
  for (int i = 0; i < 2; ++i) {
    double e = normal_cdf(x) - alpha;
    double d = normal_pdf(x);
    if (d <= 0.0) break;
    double u = e / d;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double jump_scale_from(double alpha, double lambda) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("jump_scale_from: alpha must be in (0,2)");
  if (!(lambda > 0.0))
    throw std::invalid_argument("jump_scale_from: lambda must be positive");
  return 0.1 * std::pow(lambda, 2.0 - alpha) / std::tgamma(2.0 - alpha);
}

}  // namespace roughvol
