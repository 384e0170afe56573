#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace teamsim::des {

// Seeded stream with platform-independent variates. std::mt19937_64 output
// is fully specified by the standard; the std:: distributions are not, so
// every variate is derived here by inverse CDF.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exponential with the given rate; strictly positive.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  bool bernoulli(double p) { return p > 0.0 && uniform() < p; }

  // Index drawn proportionally to `weights` (assumed to sum to ~1).
  std::size_t categorical(std::span<const double> weights) {
    double u = uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      acc += weights[i];
      if (u < acc) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; derives independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace teamsim::des
