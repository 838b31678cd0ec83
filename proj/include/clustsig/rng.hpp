#ifndef CLUSTSIG_RNG_HPP
#define CLUSTSIG_RNG_HPP

#include <cmath>
#include <cstdint>

namespace clustsig {

// Counter-based pseudo-random generator (SplitMix64 output function).
//
// The i-th output is a fixed 64-bit hash of (seed, i), so a stream can be
// reproduced, split, or skipped without touching hidden state. Every
// stochastic routine in this library takes an explicit seed and draws a
// fixed number of variates per call, which keeps whole experiments
// bit-reproducible across runs and across trial orderings.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(seed) {}

  std::uint64_t next_u64() { return mix64(key_, counter_++); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1): never returns an exact endpoint.
  double uniform01_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse CDF applied to one uniform.
  // No rejection loop, so the draw count per call is always exactly one.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Student-t with `dof` degrees of freedom: Z / sqrt(chi2_dof / dof),
  // where the chi-square is a sum of `dof` squared normals. Consumes
  // exactly dof + 1 normal draws.
  double student_t(int dof) {
    double z = normal();
    double s = 0.0;
    for (int i = 0; i < dof; ++i) {
      double g = normal();
      s += g * g;
    }
    return z / std::sqrt(s / dof);
  }

  // Uniform integer in [0, n).
  int below(int n) { return static_cast<int>(uniform01() * n) % n; }

  // Independent child seed for stream `index` (trial splitting).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ 0x6A09E667F3BCC909ull, index);
  }

 private:
  static std::uint64_t mix64(std::uint64_t key, std::uint64_t ctr) {
    std::uint64_t z = key + 0x9E3779B97F4A7C15ull * (ctr + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace clustsig

#endif
