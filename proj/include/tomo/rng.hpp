#pragma once

#include <cmath>
#include <cstdint>

namespace tomo {

// Finalizer with full avalanche (SplitMix64 mixing function).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based seed for a (sweep point, channel) Monte Carlo task. Every
// task gets an independent stream derived from the run seed and its own
// indices, so results do not depend on scheduling or worker count.
inline std::uint64_t task_seed(std::uint64_t seed, std::uint64_t snr_idx,
                               std::uint64_t chan_idx) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (snr_idx + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (chan_idx + 0x632be59bd9b4e019ULL));
  return h;
}

// xoshiro256++ with SplitMix64 seeding. Self-contained so that streams are
// reproducible bit-for-bit independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : s_) {
      s += 0x9e3779b97f4a7c15ULL;
      w = mix64(s);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second deviate is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n). Multiply-shift; bias is O(n / 2^64).
  int next_index(int n) {
    return static_cast<int>(
        (static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n)) >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tomo
