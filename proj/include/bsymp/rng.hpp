#pragma once

#include <cstdint>
#include <random>

#include "bsymp/rational.hpp"

namespace bsymp {

// Deterministic sampling helpers. std::uniform_real_distribution is
// implementation-defined, so reports that must be byte-identical across
// platforms draw doubles straight from the engine bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double uniform(double lo, double hi) {
    const std::uint64_t bits = engine_() >> 11;  // 53 random bits
    const double u = static_cast<double>(bits) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  bool coin() { return (engine_() & 1u) != 0; }

  // Random nonzero rational with small numerator/denominator.
  Rational rational(std::int64_t num_lo, std::int64_t num_hi, std::int64_t den_hi = 6) {
    std::int64_t n = uniform_int(num_lo, num_hi);
    std::int64_t d = uniform_int(1, den_hi);
    return Rational(n, d);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace bsymp
