#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace lgw {

using node_id = std::uint32_t;
using Rng = std::mt19937_64;

// Error categories map one-to-one onto the CLI exit codes.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// splitmix64 finalizer; derives independent stream seeds from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) from 53 random bits. Portable across standard
// libraries, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Fisher-Yates with uniform_index so shuffles are reproducible everywhere.
template <class Range>
void shuffle(Range& r, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(std::size(r));
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_index(rng, i);
    std::swap(r[i - 1], r[j]);
  }
}

}  // namespace lgw
