#pragma once

#include <array>
#include <cstdint>

namespace roughvol {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream (Philox-4x32-10). The key identifies the stream, the
// 128-bit counter is a pure draw counter, so streams are cheap to construct,
// independent across distinct keys, and reproducible under any scheduling.
// Instances are single-owner: the Box-Muller cache and draw counter are
// mutable state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  // Independent substream; `tag` distinguishes lanes of one logical stream
  // (e.g. diffusion vs jumps vs noise).
  RandomStream fork(std::uint64_t tag) const {
    return RandomStream(splitmix64(key_ ^ (tag + 0xa5a5a5a5a5a5a5a5ULL)));
  }

  std::uint64_t next_u64();
  // Uniform on [0, 1), 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  double normal();
  // Exact Poisson sampling; product method for small means, transformed
  // rejection (PTRS) for large ones.
  long long poisson(double mean);

  std::uint64_t key() const { return key_; }

 private:
  std::array<std::uint32_t, 4> philox_block(std::uint64_t counter) const;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;  // empty
  double normal_cache_ = 0.0;
  bool has_normal_cache_ = false;
};

// The stream for (seed, replication, day_block). Identical triples yield
// identical streams; distinct triples yield independent streams.
inline RandomStream rng_stream(std::uint64_t seed, std::uint64_t replication,
                               std::uint64_t day_block) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ (replication + 0x9e3779b97f4a7c15ULL));
  k = splitmix64(k ^ (day_block + 0xd1b54a32d192ed03ULL));
  return RandomStream(k);
}

}  // namespace roughvol
