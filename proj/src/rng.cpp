#include "roughvol/rng.hpp"

#include <cmath>

namespace roughvol {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  std::uint64_t p = std::uint64_t(a) * std::uint64_t(b);
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

}  // namespace

std::array<std::uint32_t, 4> RandomStream::philox_block(std::uint64_t counter) const {
  std::uint32_t c0 = std::uint32_t(counter);
  std::uint32_t c1 = std::uint32_t(counter >> 32);
  std::uint32_t c2 = 0x2f635f5eu;  // fixed lane words; the key carries identity
  std::uint32_t c3 = 0x5be0cd19u;
  std::uint32_t k0 = std::uint32_t(key_);
  std::uint32_t k1 = std::uint32_t(key_ >> 32);
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c0, hi0, lo0);
    mulhilo(kPhiloxM1, c2, hi1, lo1);
    std::uint32_t n0 = hi1 ^ c1 ^ k0;
    std::uint32_t n1 = lo1;
    std::uint32_t n2 = hi0 ^ c3 ^ k1;
    std::uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return {c0, c1, c2, c3};
}

std::uint64_t RandomStream::next_u64() {
  if (buf_pos_ >= 4) {
    buf_ = philox_block(counter_++);
    buf_pos_ = 0;
  }
  std::uint64_t lo = buf_[std::size_t(buf_pos_)];
  std::uint64_t hi = buf_[std::size_t(buf_pos_ + 1)];
  buf_pos_ += 2;
  return lo | (hi << 32);
}

double RandomStream::normal() {
  if (has_normal_cache_) {
    has_normal_cache_ = false;
    return normal_cache_;
  }
  double u1 = uniform_pos();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 6.283185307179586477 * u2;
  normal_cache_ = r * std::sin(t);
  has_normal_cache_ = true;
  return r * std::cos(t);
}

long long RandomStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean < 30.0) {
    // Knuth product method.
    double limit = std::exp(-mean);
    double prod = uniform_pos();
    long long n = 0;
    while (prod > limit) {
      prod *= uniform_pos();
      ++n;
    }
    return n;
  }
  // PTRS transformed rejection (Hormann 1993), exact for mean >= 10.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform_pos();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return (long long)k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = -mean + k * log_mean - std::lgamma(k + 1.0);
    if (lhs <= rhs) return (long long)k;
  }
}

}  // namespace roughvol
