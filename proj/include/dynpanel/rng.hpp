#pragma once

#include <cstdint>
#include <random>

namespace dynpanel {

/// splitmix64 finalizer; used to derive independent per-replication seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of stream `index` under a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// mt19937_64 with platform-independent variate transforms (the standard
/// library distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal, Marsaglia polar method.
  double normal();
  /// Student t with integer degrees of freedom.
  double student_t(int dof);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dynpanel
