#include "dynpanel/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace dynpanel {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return mix64(base ^ mix64(index)); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::student_t(int dof) {
  if (dof < 1) throw std::invalid_argument("student_t: dof must be positive");
  const double z = normal();
  double chi2 = 0.0;
  for (int k = 0; k < dof; ++k) {
    const double g = normal();
    chi2 += g * g;
  }
  return z / std::sqrt(chi2 / dof);
}

}  // namespace dynpanel
