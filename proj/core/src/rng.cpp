#include "hexcell/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hexcell {

uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> tags) {
  uint64_t h = Mix64(base);
  for (uint64_t tag : tags) {
    h = Mix64(h ^ Mix64(tag + 0x632be59bd9b4e019ULL));
  }
  return h;
}

double HashUniform(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t h = Mix64(seed ^ Mix64(a));
  h = Mix64(h ^ Mix64(b + 0x2545f4914f6cdd1dULL));
  h = Mix64(h ^ Mix64(c + 0x9e3779b97f4a7c15ULL));
  // 53 bits, shifted by half an ulp so the result is strictly inside (0, 1).
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t Rng::UniformInt(uint64_t n) {
  if (n == 0) throw std::invalid_argument("UniformInt: empty range");
  // Rejection sampling on the top of the range to avoid modulo bias.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % n;
  uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

std::size_t Rng::Categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("Categorical: no mass");
  const double u = Uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding can leave u == total; return the last index with mass.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

}  // namespace hexcell
