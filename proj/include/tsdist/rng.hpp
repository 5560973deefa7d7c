#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tsdist::rng {

// splitmix64 finalizer; used to turn arbitrary 64-bit material into
// well-mixed seeds.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over bytes.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Per-stream seed derivation: mixing the user seed with a name hash keeps
// each dataset's draw sequence independent of the order datasets are
// processed in.
inline uint64_t stream_seed(uint64_t seed, std::string_view stream_name) {
  return splitmix64(splitmix64(seed) ^ fnv1a64(stream_name));
}

using Engine = std::mt19937_64;

inline Engine make_engine(uint64_t seed, std::string_view stream_name) {
  return Engine(stream_seed(seed, stream_name));
}

// Unbiased draw from [0, n) by rejecting the incomplete top interval.
// std::uniform_int_distribution is implementation-defined, so raw engine
// words are mapped explicitly to keep output reproducible everywhere.
inline uint64_t bounded(Engine& eng, uint64_t n) {
  const uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
  for (;;) {
    uint64_t r = eng();
    if (r >= threshold) return r % n;
  }
}

// Uniform double in [0, 1) from the top 53 bits.
inline double u01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * u01(eng);
}

}  // namespace tsdist::rng
