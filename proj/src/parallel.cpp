#include "roughvol/parallel.hpp"

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace roughvol::par {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool in_parallel() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

namespace {

inline double chunk_dot(const double* w, const double* a, std::size_t lo,
                        std::size_t hi) {
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += w[i] * a[i];
  return s;
}

}  // namespace

double chunked_dot_serial(const double* w, const double* a, std::size_t n) {
  double total = 0.0;
  for (std::size_t lo = 0; lo < n; lo += kChunk) {
    std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
    total += chunk_dot(w, a, lo, hi);
  }
  return total;
}

double chunked_dot_parallel(const double* w, const double* a, std::size_t n) {
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  if (n_chunks <= 1) return chunked_dot_serial(w, a, n);
  double stack_part[64];
  std::vector<double> heap_part;
  double* part = stack_part;
  if (n_chunks > 64) {
    heap_part.resize(n_chunks);
    part = heap_part.data();
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t c = 0; c < (std::ptrdiff_t)n_chunks; ++c) {
    std::size_t lo = std::size_t(c) * kChunk;
    std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
    part[c] = chunk_dot(w, a, lo, hi);
  }
  // Chunk partials combine in index order: identical for any thread count.
  double total = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) total += part[c];
  return total;
}

double chunked_dot(const double* w, const double* a, std::size_t n) {
  // Fork overhead swamps the gain below ~32 chunks.
  if (n >= 32 * kChunk && !in_parallel() && max_threads() > 1)
    return chunked_dot_parallel(w, a, n);
  return chunked_dot_serial(w, a, n);
}

}  // namespace roughvol::par
