#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rmc {

/// splitmix64 step; used to derive independent sub-seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic seed for stream (a, b, c) under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= 0x6a09e667f3bcc909ULL + a;
  splitmix64(s);
  s ^= 0xbb67ae8584caa73bULL + b;
  splitmix64(s);
  s ^= 0x3c6ef372fe94f82bULL + c;
  return splitmix64(s);
}

/// Deterministic random stream. mt19937_64 supplies bits; the
/// uniform/normal/integer conversions are implemented here so that draws are
/// bit-identical across standard libraries (std:: distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal() {
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % bound;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace rmc
