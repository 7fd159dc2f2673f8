#pragma once

#include <cstdint>
#include <random>

namespace qchan {

inline constexpr std::uint64_t default_seed = 0x5EED;

/// Mixes (seed, index) into an independent stream seed, so that workers can
/// draw from disjoint deterministic streams regardless of execution order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t index) : gen_(derive_seed(seed, index)) {}

  double uniform() { return unif_(gen_); }
  double normal() { return norm_(gen_); }
  std::uint64_t raw() { return gen_(); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace qchan
