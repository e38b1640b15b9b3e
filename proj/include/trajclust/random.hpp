#pragma once

#include <cstdint>
#include <string_view>

namespace trajclust {

// splitmix64. Small, fast, and identical on every platform, which is what the
// reproducibility contract needs; stdlib distributions are not portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0,n), unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool next_bool() { return (next_u64() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

// One top-level seed drives every randomized component; children are keyed by
// a label (and optional index) so streams never collide or alias.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the label
  for (unsigned char c : label) {
    h = (h ^ c) * 1099511628211ull;
  }
  Rng mix(base ^ h ^ (0xA24BAED4963EE407ull * (index + 1)));
  return mix.next_u64();
}

}  // namespace trajclust
