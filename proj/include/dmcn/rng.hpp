#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace dmcn {

// std::normal_distribution and std::shuffle are implementation-defined, so
// reproducible streams are hand-rolled on top of mt19937.

inline double uniform01(std::mt19937& gen) {
  return (gen() + 0.5) * (1.0 / 4294967296.0);
}

// Box-Muller standard normal.
inline double gaussian(std::mt19937& gen) {
  const double u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Fisher-Yates.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = gen() % i;
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace dmcn
