#pragma once

#include <complex>
#include <vector>

namespace roughvol {

// In-place iterative radix-2 FFT; size must be a power of two.
// inverse=true applies the conjugate transform without the 1/n factor.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse = false);

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace roughvol
