#pragma once

#include <cmath>
#include <cstdint>

namespace coggen {

// Counter-based generator built on the SplitMix64 finalizer. Every draw is a
// pure function of (seed, stream, counter), so parallel consumers can pull
// from disjoint counter ranges and still reproduce bit-identical sequences.
class counter_rng {
public:
  // Stream tags keep independent consumers (mask generation, noise
  // injection, parameter init, ...) on non-overlapping sequences even when
  // they share a user-facing seed.
  enum stream : std::uint64_t {
    mask_stream = 1,
    noise_stream = 2,
    init_stream = 3,
    phantom_stream = 4,
    theory_stream = 5,
  };

  counter_rng(std::uint64_t seed, std::uint64_t stream_tag)
      : key_(mix64(seed ^ mix64(stream_tag * 0x9E3779B97F4A7C15ull))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ + 0x9E3779B97F4A7C15ull * (counter + 1));
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; never zero, so it is safe under log().
  double uniform_pos(std::uint64_t counter) const {
    return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller pair of independent standard normals. Consumes counters
  // (2*counter, 2*counter + 1) of a dedicated sub-sequence.
  void gaussian_pair(std::uint64_t counter, double& z0, double& z1) const {
    const double u1 = uniform_pos(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    z0 = radius * std::cos(angle);
    z1 = radius * std::sin(angle);
  }

  double gaussian(std::uint64_t counter) const {
    double z0, z1;
    gaussian_pair(counter, z0, z1);
    return z0;
  }

private:
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace coggen
