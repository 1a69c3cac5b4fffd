#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace styler {

// All randomness in a run is derived from one config seed. Stages draw from
// labeled substreams: substream(seed, "lora.noise") etc. The label is hashed
// (FNV-1a) into the seed, which then initializes a mt19937_64 engine via a
// splitmix64 scramble. mt19937_64 output is fully specified by the standard,
// so streams are reproducible; distributions below are hand-rolled because
// std:: distribution algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

  static uint64_t fnv1a(std::string_view label) {
    uint64_t h = 1469598103934665603ull;
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return h;
  }

  static Rng substream(uint64_t seed, std::string_view label) {
    return Rng(seed ^ fnv1a(label));
  }

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0,1) on the 2^-24 grid. Multiples of 2^-24 survive the
  // latent codec's affine map bit-exactly, which the procedural dataset
  // relies on.
  float uniform() {
    return static_cast<float>(next_u64() >> 40) * 0x1p-24f;
  }

  float uniform(float lo, float hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) via Lemire's multiply-shift with rejection.
  uint64_t uniform_int(uint64_t n) {
    if (n == 0) return 0;
    while (true) {
      uint64_t x = next_u64();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      uint64_t lo = static_cast<uint64_t>(m);
      if (lo >= n || lo >= static_cast<uint64_t>(-static_cast<int64_t>(n)) % n) {
        return static_cast<uint64_t>(m >> 64);
      }
    }
  }

  // Box-Muller in double, emitted as float. Pairs are cached.
  float normal() {
    if (have_spare_) {
      have_spare_ = false;
      return static_cast<float>(spare_);
    }
    double u1 = 0.0;
    while (u1 <= 0.0) {
      u1 = static_cast<double>(next_u64() >> 11) * 0x1p-53;
    }
    double u2 = static_cast<double>(next_u64() >> 11) * 0x1p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return static_cast<float>(r * std::cos(a));
  }

 private:
  static uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace styler
