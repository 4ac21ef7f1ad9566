#pragma once

#include <complex>
#include <cstdint>

namespace nls {

// Counter-based random draws: every value is a pure function of
// (seed, key1, key2, counter), so samples are order-independent and
// bit-reproducible under any parallel schedule.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::int64_t k1, std::int64_t k2,
                         std::uint64_t counter) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(k1) * 0xd6e8feb86659fd93ULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(k2) * 0xca5a826395121157ULL);
  h = splitmix64(h ^ counter);
  return h;
}

// Uniform in (0, 1]; never returns 0 so it is safe under log().
inline double uniform01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Complex Gaussian, mean zero, E|g|^2 = 1 (Re and Im are iid N(0, 1/2)).
inline std::complex<double> complex_gaussian(std::uint64_t seed, std::int64_t k1,
                                             std::int64_t k2, std::uint64_t draw) {
  const double u1 = uniform01(key(seed, k1, k2, 2 * draw));
  const double u2 = uniform01(key(seed, k1, k2, 2 * draw + 1));
  const double amp = std::sqrt(-std::log(u1));
  return {amp * std::cos(2.0 * M_PI * u2), amp * std::sin(2.0 * M_PI * u2)};
}

inline double real_gaussian(std::uint64_t seed, std::int64_t k1, std::int64_t k2,
                            std::uint64_t draw) {
  const double u1 = uniform01(key(seed, k1, k2, 4 * draw));
  const double u2 = uniform01(key(seed, k1, k2, 4 * draw + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace rng
}  // namespace nls
