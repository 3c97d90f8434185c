#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sfcsim {

// All randomness funnels through this wrapper. Distributions are hand-rolled
// on top of mt19937_64 so that a given seed produces the same stream on every
// platform and toolchain (std:: distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 bits of entropy.
  double real01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * real01(); }

  // Inclusive bounds. Modulo bias is negligible for the small ranges used here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(gen_() % span);
  }

  double normal() {
    // Box-Muller, one value per call; the pair's second member is discarded
    // to keep the stream position independent of call parity.
    double u1 = real01();
    double u2 = real01();
    while (u1 <= 0.0) u1 = real01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive independent stream seeds from one
// master seed without correlated low bits.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace sfcsim
