#pragma once

#include <cstddef>

namespace roughvol::par {

// Number of OpenMP threads available (1 in serial builds).
int max_threads();
// True when called from inside an active parallel region.
bool in_parallel();

// Dot product sum_i w[i]*a[i] accumulated over fixed 2048-element chunks
// combined in index order, so the result is bitwise identical for any
// thread count, including serial execution. This is the rough-kernel
// convolution step, the hot inner loop of the simulator.
double chunked_dot_serial(const double* w, const double* a, std::size_t n);
double chunked_dot_parallel(const double* w, const double* a, std::size_t n);
// Dispatch: parallel when n is large enough and no outer region is active.
double chunked_dot(const double* w, const double* a, std::size_t n);

inline constexpr std::size_t kChunk = 2048;

}  // namespace roughvol::par
