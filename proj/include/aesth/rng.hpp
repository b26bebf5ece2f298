#ifndef AESTH_RNG_HPP
#define AESTH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace aesth {

// Splitmix64 step; used to derive independent child seeds from a root seed
// so that per-tree / per-epoch streams are fixed regardless of evaluation
// order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(root ^ splitmix64(stream + 1));
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  // 53-bit mantissa draw, identical across standard library implementations.
  return (rng() >> 11) * 0x1.0p-53;
}

inline double normal(Rng& rng, double mean = 0.0, double sd = 1.0) {
  // Box-Muller without cached second value; keeps the stream layout fixed.
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
}

// Uniform integer in [0, n) by rejection; unbiased and stable across
// implementations.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

}  // namespace aesth

#endif
