#ifndef HANKELPGD_RNG_HPP
#define HANKELPGD_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace hankelpgd {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic sub-stream seed from a master seed and up to three grid
/// coordinates. Trials seeded this way are independent of thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(master + 0x9E3779B97F4A7C15ull);
  s = mix64(s ^ (a + 0xD1B54A32D192ED03ull));
  s = mix64(s ^ (b + 0x8CB92BA72F3D8DD7ull));
  s = mix64(s ^ (c + 0xA24BAED4963EE407ull));
  return s;
}

/// Seeded random source with portable draw helpers. The engine is the
/// bit-exact std::mt19937_64; the distributions below are hand-rolled so that
/// streams are reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, bound) by rejection.
  std::uint64_t uniform_index(std::uint64_t bound) {
    for (;;) {
      const std::uint64_t x = engine_();
      const std::uint64_t r = x % bound;
      if (x - r <= std::numeric_limits<std::uint64_t>::max() - (bound - 1)) {
        return r;
      }
    }
  }

  /// Standard real normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Standard complex normal: Re and Im i.i.d. N(0, 1/2), unit variance total.
  std::complex<double> complex_gaussian() {
    return {normal() * M_SQRT1_2, normal() * M_SQRT1_2};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hankelpgd

#endif  // HANKELPGD_RNG_HPP
