#include "roughvol/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "roughvol/fft.hpp"
#include "roughvol/math.hpp"
#include "roughvol/parallel.hpp"

namespace roughvol {

namespace {

// ---------------- adaptive quadrature ----------------

// Gauss-Kronrod 7-15 nodes/weights on [-1,1].
constexpr double kGK15Nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kGK15Weights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kG7Weights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

template <typename F>
std::pair<double, double> gk15(const F& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    double v = f(c + h * kGK15Nodes[i]);
    k += kGK15Weights[i] * v;
    if (i % 2 == 1) g += kG7Weights[i / 2] * v;
  }
  return {k * h, std::fabs((k - g) * h)};
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double rel_tol,
                   const char* what) {
  struct Seg {
    double a, b, val, err;
  };
  auto [v0, e0] = gk15(f, a, b);
  std::vector<Seg> segs{{a, b, v0, e0}};
  for (int iter = 0; iter < 2000; ++iter) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].val;
      err += segs[i].err;
      if (segs[i].err > segs[worst].err) worst = i;
    }
    if (err <= rel_tol * std::fabs(total) + 1e-300) return total;
    Seg s = segs[worst];
    double m = 0.5 * (s.a + s.b);
    auto [vl, el] = gk15(f, s.a, m);
    auto [vr, er] = gk15(f, m, s.b);
    segs[worst] = {s.a, m, vl, el};
    segs.push_back({m, s.b, vr, er});
  }
  throw numeric_error("quadrature", std::string(what) + ": no convergence after 2000 subdivisions");
}

// ---------------- per-day windowing ----------------

struct FullGrid {
  int n_days = 0;
  int spd = 0;
  int drop = 0;
  std::size_t n_steps() const { return std::size_t(n_days) * std::size_t(spd); }
};

std::string day_label(int d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "d%04d", d + 1);
  return buf;
}

// Slice full-grid series into the retained per-day view.
SimOutput window_output(const FullGrid& g, double delta_n,
                        const std::vector<double>& x,
                        const std::vector<double>& v,
                        const std::vector<double>& jumps,
                        const std::string& meta) {
  SimOutput out;
  out.prices.delta_n = delta_n;
  out.prices.meta = meta;
  const int points = g.spd - g.drop + 1;
  out.prices.days.reserve(std::size_t(g.n_days));
  out.latent_variance.reserve(std::size_t(g.n_days));
  out.jump_increments.reserve(std::size_t(g.n_days));
  for (int d = 0; d < g.n_days; ++d) {
    const std::size_t lo = std::size_t(d) * g.spd + std::size_t(g.drop);
    TradingDay day;
    day.date = day_label(d);
    day.log_prices.assign(x.begin() + long(lo), x.begin() + long(lo + points));
    out.prices.days.push_back(std::move(day));
    out.latent_variance.emplace_back(v.begin() + long(lo), v.begin() + long(lo + points));
    out.jump_increments.emplace_back(jumps.begin() + long(lo),
                                     jumps.begin() + long(lo + points - 1));
  }
  return out;
}

// Correlated driver increments plus independent per-call lanes for jumps
// and noise. Lane keys are drawn from the parent stream up front so that
// repeated simulations off one stream stay independent throughout.
struct Drivers {
  std::vector<double> db, dw;
  RandomStream jumps{0};
  RandomStream noise{0};
};

Drivers draw_drivers(const FullGrid& g, double delta_n, double rho,
                     RandomStream& stream) {
  Drivers d;
  d.jumps = RandomStream(stream.next_u64());
  d.noise = RandomStream(stream.next_u64());
  const std::size_t n = g.n_steps();
  d.db.resize(n);
  d.dw.resize(n);
  const double sq = std::sqrt(delta_n);
  const double orth = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  for (std::size_t k = 0; k < n; ++k) {
    double z1 = stream.normal();
    double z2 = stream.normal();
    d.db[k] = z1 * sq;
    d.dw[k] = (rho * z1 + orth * z2) * sq;
  }
  return d;
}

std::vector<double> jump_path(const SimScenario& scenario,
                              const std::vector<double>& variance,
                              double delta_n, RandomStream& stream) {
  const std::size_t n = variance.size() - 1;
  if (!scenario.jumps) return std::vector<double>(n, 0.0);
  const auto& jp = *scenario.jumps;
  const double c = scenario.jump_scale();
  double v_ref = std::visit([](const auto& m) { return m.theta; }, scenario.variance);
  JumpCutoff cut = select_jump_cutoff(jp.alpha, jp.lambda, c, delta_n, v_ref);
  return simulate_jump_increments(jp.alpha, jp.lambda, c,
                                  std::span<const double>(variance.data(), n),
                                  delta_n, cut.eps, stream);
}

SimOutput assemble(const SimScenario& scenario, const FullGrid& g,
                   std::vector<double>& v, Drivers& drv, const std::string& meta) {
  const double delta_n = scenario.delta_n();
  const std::size_t n = g.n_steps();
  std::vector<double> jumps = jump_path(scenario, v, delta_n, drv.jumps);
  std::vector<double> x(n + 1);
  x[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    x[k + 1] = x[k] + std::sqrt(v[k]) * drv.dw[k] + jumps[k];
  SimOutput out = window_output(g, delta_n, x, v, jumps, meta);
  if (scenario.noise && scenario.noise->sigma_noise > 0.0)
    out = add_noise(out, scenario.noise->sigma_noise,
                    scenario.noise->volatility_scaled, drv.noise);
  return out;
}

}  // namespace

SimOutput simulate_heston(const SimScenario& scenario, int n_days,
                          RandomStream& stream) {
  scenario.validate();
  const auto* p = std::get_if<HestonParams>(&scenario.variance);
  if (!p) throw std::invalid_argument("simulate_heston: scenario is not Heston");
  const FullGrid g{n_days, scenario.grid.steps_per_day, scenario.grid.drop_first};
  const double delta_n = scenario.delta_n();
  Drivers drv = draw_drivers(g, delta_n, p->rho, stream);

  const std::size_t n = g.n_steps();
  std::vector<double> v(n + 1);
  v[0] = p->v0;
  for (std::size_t k = 0; k < n; ++k) {
    double vk = v[k];
    double next = vk + p->kappa * (p->theta - vk) * delta_n +
                  p->nu * std::sqrt(vk) * drv.db[k];
    v[k + 1] = next > 0.0 ? next : 0.0;  // full truncation
  }
  return assemble(scenario, g, v, drv, "heston");
}

SimOutput simulate_rough_heston(const SimScenario& scenario, int n_days,
                                RandomStream& stream) {
  scenario.validate();
  const auto* p = std::get_if<RoughHestonParams>(&scenario.variance);
  if (!p) throw std::invalid_argument("simulate_rough_heston: scenario is not rough Heston");
  const FullGrid g{n_days, scenario.grid.steps_per_day, scenario.grid.drop_first};
  const double delta_n = scenario.delta_n();
  Drivers drv = draw_drivers(g, delta_n, p->rho, stream);

  const std::size_t n = g.n_steps();
  const double inv_gamma = 1.0 / std::tgamma(p->hurst + 0.5);
  // Left-point kernel weights by age: w[m] = (m*delta)^(H-1/2), m = 1..n.
  std::vector<double> w(n + 1, 0.0);
  for (std::size_t m = 1; m <= n; ++m)
    w[m] = std::pow(double(m) * delta_n, p->hurst - 0.5);

  const std::size_t window =
      scenario.grid.kernel_window > 0 ? std::size_t(scenario.grid.kernel_window) : n;

  std::vector<double> v(n + 1);
  v[0] = p->v0;
  // History stored reversed so the convolution reads both arrays forward:
  // hist[n-1-i] = kappa(theta - V_i)delta + nu sqrt(V_i) dB_i.
  std::vector<double> hist(n);
  hist[n - 1] = p->kappa * (p->theta - p->v0) * delta_n +
                p->nu * std::sqrt(p->v0) * drv.db[0];
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t len = std::min(k, window);
    // sum_{m=1..len} w[m] * a[k-m]; hist is reversed so both reads are forward
    double conv = par::chunked_dot(w.data() + 1, hist.data() + (n - k), len);
    double raw = p->v0 + inv_gamma * conv;
    double vk = raw > 0.0 ? raw : 0.0;
    v[k] = vk;
    if (k < n)
      hist[n - 1 - k] = p->kappa * (p->theta - vk) * delta_n +
                        p->nu * std::sqrt(vk) * drv.db[k];
  }
  return assemble(scenario, g, v, drv, "rough_heston");
}

SimOutput simulate_scenario(const SimScenario& scenario, int n_days,
                            RandomStream& stream) {
  if (std::holds_alternative<HestonParams>(scenario.variance))
    return simulate_heston(scenario, n_days, stream);
  return simulate_rough_heston(scenario, n_days, stream);
}

// ---------------- tempered-stable jumps ----------------

double tempered_tail_mass(double alpha, double lambda, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("tempered_tail_mass: eps must be positive");
  const double le = lambda * eps;
  if (le > 700.0) return 0.0;
  // x = eps * e^s maps the tail onto [0, s_max] with a double-exponential decay.
  const double s_max = std::log(746.0 / le);
  auto f = [&](double s) {
    double x = eps * std::exp(s);
    return std::pow(x, -alpha) * std::exp(-lambda * x);
  };
  return adaptive_gk(f, 0.0, s_max, 1e-12, "tail mass");
}

double tempered_small_x2(double alpha, double lambda, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("tempered_small_x2: eps must be positive");
  // x = eps * u^(1/(2-alpha)) removes the endpoint singularity exactly.
  const double beta = 1.0 / (2.0 - alpha);
  auto f = [&](double u) {
    double x = eps * std::pow(u, beta);
    return std::exp(-lambda * x);
  };
  return std::pow(eps, 2.0 - alpha) * beta * adaptive_gk(f, 0.0, 1.0, 1e-12, "small x2");
}

JumpCutoff select_jump_cutoff(double alpha, double lambda, double scale,
                              double delta_n, double v_ref, double step_budget,
                              double small_share) {
  if (!(alpha > 0.0 && alpha < 2.0) || !(lambda > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("select_jump_cutoff: bad jump parameters");
  const double total_var = 2.0 * scale * std::tgamma(2.0 - alpha) /
                           std::pow(lambda, 2.0 - alpha);
  const double target = small_share * total_var;
  // s^2_eps is increasing in eps: bisect on log(eps).
  double lo = std::log(1e-30), hi = std::log(1e3);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double s2 = 2.0 * scale * tempered_small_x2(alpha, lambda, std::exp(mid));
    (s2 > target ? hi : lo) = mid;
  }
  double eps = std::exp(0.5 * (lo + hi));
  bool capped = false;
  const double max_intensity = step_budget / (delta_n * v_ref);
  if (2.0 * scale * tempered_tail_mass(alpha, lambda, eps) > max_intensity) {
    // Tail mass is decreasing in eps: raise eps until the budget holds.
    capped = true;
    double llo = std::log(eps), lhi = std::log(1e3);
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (llo + lhi);
      double li = 2.0 * scale * tempered_tail_mass(alpha, lambda, std::exp(mid));
      (li > max_intensity ? llo : lhi) = mid;
    }
    eps = std::exp(0.5 * (llo + lhi));
  }
  JumpCutoff cut;
  cut.eps = eps;
  cut.big_intensity = 2.0 * scale * tempered_tail_mass(alpha, lambda, eps);
  cut.small_var_rate = 2.0 * scale * tempered_small_x2(alpha, lambda, eps);
  cut.intensity_capped = capped;
  return cut;
}

std::vector<double> simulate_jump_increments(double alpha, double lambda,
                                             double scale,
                                             std::span<const double> variance_path,
                                             double delta_n, double eps_cut,
                                             RandomStream& stream) {
  const std::size_t n = variance_path.size();
  std::vector<double> out(n, 0.0);
  if (scale == 0.0) return out;
  if (!(eps_cut > 0.0))
    throw std::invalid_argument("simulate_jump_increments: eps_cut must be positive");
  if (!(alpha > 0.0 && alpha < 2.0) || !(lambda > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("simulate_jump_increments: bad jump parameters");

  const double big_intensity = 2.0 * scale * tempered_tail_mass(alpha, lambda, eps_cut);
  const double small_var = 2.0 * scale * tempered_small_x2(alpha, lambda, eps_cut);
  const double inv_alpha = 1.0 / alpha;

  // Size sampler for |x| > eps: Pareto proposal eps * U^(-1/alpha), accept
  // with probability exp(-lambda (x - eps)).
  auto draw_size = [&]() {
    for (int tries = 0; tries < 100000; ++tries) {
      double x = eps_cut * std::pow(stream.uniform_pos(), -inv_alpha);
      if (!std::isfinite(x)) continue;
      if (std::log(stream.uniform_pos()) <= -lambda * (x - eps_cut)) return x;
    }
    throw numeric_error("jumps", "tail rejection sampler failed to accept");
  };

  for (std::size_t k = 0; k < n; ++k) {
    double vk = variance_path[k];
    if (vk < 0.0) throw std::invalid_argument("simulate_jump_increments: negative variance");
    if (vk == 0.0) continue;
    double sum = 0.0;
    long long count = stream.poisson(vk * delta_n * big_intensity);
    for (long long j = 0; j < count; ++j) {
      double x = draw_size();
      sum += (stream.next_u64() & 1u) ? x : -x;
    }
    sum += std::sqrt(vk * delta_n * small_var) * stream.normal();
    out[k] = sum;
  }
  return out;
}

SimOutput add_noise(const SimOutput& clean, double sigma_noise,
                    bool volatility_scaled, RandomStream& stream) {
  if (volatility_scaled && clean.latent_variance.empty())
    throw std::invalid_argument("add_noise: latent variance required");
  SimOutput out = clean;
  if (sigma_noise == 0.0) return out;
  out.latent_clean_prices.clear();
  for (std::size_t d = 0; d < clean.prices.days.size(); ++d) {
    const auto& xs = clean.prices.days[d].log_prices;
    out.latent_clean_prices.push_back(xs);
    auto& ys = out.prices.days[d].log_prices;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double s = volatility_scaled
                     ? sigma_noise * std::sqrt(clean.latent_variance[d][i])
                     : sigma_noise;
      ys[i] = xs[i] + s * stream.normal();
    }
  }
  return out;
}

// ---------------- fractional Brownian motion ----------------

namespace {

// Autocovariance of unit-spacing fGn: 0.5(|k+1|^2H - 2|k|^2H + |k-1|^2H).
double fgn_acov(double hurst, double k) {
  double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::fabs(k + 1.0), h2) - 2.0 * std::pow(std::fabs(k), h2) +
                std::pow(std::fabs(k - 1.0), h2));
}

}  // namespace

FbmSampler::FbmSampler(double hurst, int n, double horizon, int cholesky_limit)
    : hurst_(hurst), n_(n), horizon_(horizon), method_(Method::cholesky) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument("FbmSampler: hurst must be in (0,1)");
  if (n < 2) throw std::invalid_argument("FbmSampler: n must be >= 2");
  if (!(horizon > 0.0)) throw std::invalid_argument("FbmSampler: horizon must be positive");
  if (n <= cholesky_limit) {
    build_cholesky();
  } else if (build_circulant()) {
    method_ = Method::circulant;
  } else {
    // Negative embedding eigenvalue: fall back to the exact factorization.
    build_cholesky();
  }
}

void FbmSampler::build_cholesky() {
  const std::size_t n = std::size_t(n_);
  const double dt = horizon_ / double(n_);
  std::vector<double> cov(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double ti = dt * double(i + 1);
    for (std::size_t j = 0; j <= i; ++j) {
      double tj = dt * double(j + 1);
      cov[i * n + j] = 0.5 * (std::pow(ti, 2.0 * hurst_) + std::pow(tj, 2.0 * hurst_) -
                              std::pow(ti - tj, 2.0 * hurst_));
    }
  }
  chol_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = cov[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= chol_[i * n + k] * chol_[j * n + k];
      if (i == j) {
        if (s <= 0.0) throw numeric_error("fbm", "covariance not positive definite");
        chol_[i * n + i] = std::sqrt(s);
      } else {
        chol_[i * n + j] = s / chol_[j * n + j];
      }
    }
  }
  method_ = Method::cholesky;
}

bool FbmSampler::build_circulant() {
  const std::size_t m = next_pow2(std::size_t(n_));
  const std::size_t M = 2 * m;
  std::vector<std::complex<double>> c(M, 0.0);
  for (std::size_t j = 0; j <= m; ++j) c[j] = fgn_acov(hurst_, double(j));
  for (std::size_t j = 1; j < m; ++j) c[M - j] = c[j];
  fft_pow2(c);
  double max_eig = 0.0, min_eig = 0.0;
  for (const auto& e : c) {
    max_eig = std::max(max_eig, e.real());
    min_eig = std::min(min_eig, e.real());
  }
  if (min_eig < -1e-8 * max_eig) return false;
  eig_sqrt_.resize(M);
  for (std::size_t k = 0; k < M; ++k)
    eig_sqrt_[k] = std::sqrt(std::max(c[k].real(), 0.0) / double(M));
  embed_size_ = M;
  return true;
}

std::vector<double> FbmSampler::sample_fgn(RandomStream& stream) {
  const std::size_t n = std::size_t(n_);
  if (method_ == Method::cholesky) {
    std::vector<double> z(n);
    for (auto& v : z) v = stream.normal();
    // Cholesky gives levels directly; convert to increments.
    std::vector<double> fgn(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double level = 0.0;
      const double* row = chol_.data() + i * n;
      for (std::size_t j = 0; j <= i; ++j) level += row[j] * z[j];
      fgn[i] = level - prev;
      prev = level;
    }
    // Normalize to unit-spacing fGn so both methods share the scaling below.
    const double dt = horizon_ / double(n_);
    const double inv = std::pow(dt, -hurst_);
    for (auto& v : fgn) v *= inv;
    return fgn;
  }
  if (has_cache_) {
    has_cache_ = false;
    return std::move(fgn_cache_);
  }
  const std::size_t M = embed_size_;
  std::vector<std::complex<double>> y(M);
  for (std::size_t k = 0; k < M; ++k) {
    double u = stream.normal();
    double v = stream.normal();
    y[k] = std::complex<double>(u * eig_sqrt_[k], v * eig_sqrt_[k]);
  }
  fft_pow2(y);
  std::vector<double> fgn(n), other(n);
  for (std::size_t i = 0; i < n; ++i) {
    fgn[i] = y[i].real();
    other[i] = y[i].imag();
  }
  fgn_cache_ = std::move(other);
  has_cache_ = true;
  return fgn;
}

std::vector<double> FbmSampler::sample(RandomStream& stream) {
  std::vector<double> fgn = sample_fgn(stream);
  const double scale = std::pow(horizon_ / double(n_), hurst_);
  std::vector<double> path(std::size_t(n_) + 1);
  path[0] = 0.0;
  for (std::size_t i = 0; i < std::size_t(n_); ++i)
    path[i + 1] = path[i] + scale * fgn[i];
  return path;
}

std::vector<double> simulate_fbm(double hurst, int n, double horizon,
                                 RandomStream& stream) {
  FbmSampler sampler(hurst, n, horizon);
  return sampler.sample(stream);
}

}  // namespace roughvol
