#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qpg {

// splitmix64: used to decorrelate user seeds and to derive independent
// substream seeds. Two successive outputs of one state never collide with
// another stream's outputs for distinct seeds in practice.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic Gaussian/uniform source. std::normal_distribution is
// implementation-defined, so normals are produced by an explicit Box-Muller
// transform: same seed, same sequence, on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  // Substream derivation: never share a generator across parallel work items;
  // give each item substream(seed, index) instead.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x5851f42d4c957f2dULL * (index + 1));
    return Rng(splitmix64(s));
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; one spare is cached, so calls consume
  // the underlying stream in pairs.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t raw() { return engine_(); }

 private:
  static std::uint64_t mix(std::uint64_t seed) {
    std::uint64_t s = seed;
    return splitmix64(s);
  }

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qpg
