#pragma once

#include <cstdint>
#include <random>

namespace psh {

// Platform-stable draws on top of mt19937_64 (whose output sequence is fixed
// by the standard, unlike the std:: distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform-ish integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  // Integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  // True with probability num/den.
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace psh
