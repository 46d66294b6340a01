#pragma once

#include <span>
#include <vector>

#include "roughvol/rng.hpp"
#include "roughvol/types.hpp"

namespace roughvol {

// One simulated panel. All per-day series are aligned to the retained
// observation grid (the first grid.drop_first returns of each simulated day
// are discarded before building the output).
struct SimOutput {
  PricePath prices;  // observed path: y when noise is on, else x
  std::vector<std::vector<double>> latent_variance;      // per day, N_d+1 grid points
  std::vector<std::vector<double>> latent_clean_prices;  // x, present iff noise is on
  std::vector<std::vector<double>> jump_increments;      // per day, N_d realized jump sums

  bool has_noise() const { return !latent_clean_prices.empty(); }
};

// Full-truncation Euler on the observation grid.
SimOutput simulate_heston(const SimScenario& scenario, int n_days, RandomStream& stream);

// Volterra-Euler with left-point kernel weights ((k-i)*delta)^(H-1/2);
// O(N^2) per simulated segment unless grid.kernel_window truncates the memory.
SimOutput simulate_rough_heston(const SimScenario& scenario, int n_days, RandomStream& stream);

// Dispatch on scenario.variance.
SimOutput simulate_scenario(const SimScenario& scenario, int n_days, RandomStream& stream);

// One-sided tail mass  integral_eps^inf exp(-lambda x) x^(-alpha-1) dx
// (adaptive Gauss-Kronrod; numeric_error on non-convergence).
double tempered_tail_mass(double alpha, double lambda, double eps);
// One-sided truncated second moment  integral_0^eps x^(1-alpha) exp(-lambda x) dx.
double tempered_small_x2(double alpha, double lambda, double eps);

// Small-jump cutoff choice: bisection for a small-jump variance share of
// `small_share` of the total jump variance, then relaxed upward until the
// expected big-jump count per step at V = v_ref stays within `step_budget`.
struct JumpCutoff {
  double eps = 0.0;
  double big_intensity = 0.0;   // Lambda_eps = 2c * tail mass, per unit V-time
  double small_var_rate = 0.0;  // s^2_eps = 2c * truncated second moment
  bool intensity_capped = false;
};
JumpCutoff select_jump_cutoff(double alpha, double lambda, double scale,
                              double delta_n, double v_ref,
                              double step_budget = 4.0,
                              double small_share = 1e-4);

// Per-step tempered-stable jump sums, time-changed by the variance path:
// big jumps (|x| > eps_cut) are compound Poisson with rejection-sampled
// sizes and random sign; small jumps are replaced by a centered Gaussian
// with the matching variance. The symmetric measure needs no compensator.
std::vector<double> simulate_jump_increments(double alpha, double lambda, double scale,
                                             std::span<const double> variance_path,
                                             double delta_n, double eps_cut,
                                             RandomStream& stream);

// y = x + sigma_noise * sqrt(V) * chi (or + sigma_noise * chi when not
// volatility-scaled), chi i.i.d. standard normal at every grid point.
SimOutput add_noise(const SimOutput& clean, double sigma_noise,
                    bool volatility_scaled, RandomStream& stream);

// Exact-in-law fractional Brownian motion on {0, T/n, ..., T}.
// Cholesky factorization of the fBm covariance for n <= cholesky_limit,
// circulant embedding of fractional Gaussian noise otherwise, with a
// Cholesky fallback if the embedding has a materially negative eigenvalue.
class FbmSampler {
 public:
  enum class Method { cholesky, circulant };

  FbmSampler(double hurst, int n, double horizon, int cholesky_limit = 4096);

  // Path of n+1 points starting at 0. Consumes draws from `stream`.
  std::vector<double> sample(RandomStream& stream);

  Method method() const { return method_; }
  double hurst() const { return hurst_; }

 private:
  std::vector<double> sample_fgn(RandomStream& stream);
  void build_cholesky();
  bool build_circulant();  // false if a negative eigenvalue forces fallback

  double hurst_;
  int n_;
  double horizon_;
  Method method_;
  std::vector<double> chol_;          // lower-triangular factor, row-major
  std::vector<double> eig_sqrt_;      // sqrt(lambda_k / M) for the embedding
  std::size_t embed_size_ = 0;
  std::vector<double> fgn_cache_;
  bool has_cache_ = false;
};

std::vector<double> simulate_fbm(double hurst, int n, double horizon, RandomStream& stream);

}  // namespace roughvol
