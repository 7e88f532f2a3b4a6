#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace hexcell {

// SplitMix64 finalizer.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a tag path, e.g.
// DeriveSeed(run_seed, {kActionStream, episode, agent}).
uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> tags);

// Counter-based uniform draw in (0, 1). The same (seed, a, b, c) always maps
// to the same value, which lets per-pair random streams be evaluated in any
// order.
double HashUniform(uint64_t seed, uint64_t a, uint64_t b, uint64_t c);

// Stream tags used across the project.
enum StreamTag : uint64_t {
  kMobilityStream = 1,
  kFadingStream = 2,
  kEpisodeStream = 3,
  kActionStream = 4,
  kShuffleStream = 5,
  kInitStream = 6,
  kEvalStream = 7,
  kFrequencyStream = 8,
  kSweepStream = 9,
  kSyntheticLoadStream = 10,
};

// Sequential generator. Distribution transforms are written out here rather
// than taken from <random> so that streams are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Standard normal via Box-Muller (no cached spare).
  double Normal();
  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n);
  // Index drawn with probability proportional to weights[i].
  std::size_t Categorical(std::span<const double> weights);

  template <class It>
  void Shuffle(It first, It last) {
    const auto n = static_cast<uint64_t>(last - first);
    for (uint64_t i = n; i > 1; --i) {
      std::swap(first[i - 1], first[UniformInt(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hexcell
