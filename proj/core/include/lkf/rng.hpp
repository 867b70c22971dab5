#pragma once

#include <cstdint>
#include <string_view>

namespace lkf {

// splitmix64 generator. Standard-library engines/distributions are avoided on
// purpose: every random draw in this project must be reproducible bit-for-bit
// from a seed, independent of the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // uniform integer in [0, n), n > 0
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool next_bool() { return (next_u64() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// Derives an independent stream seed from (seed, tag) pairs, e.g. one stream
// per layer name or per training sample.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  Rng r(seed ^ (tag + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
  return r.next_u64();
}

}  // namespace lkf
