#pragma once
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace unidec {

// Deterministic Gaussian sampling. std::normal_distribution is not pinned by
// the standard, so draws go through an explicit Box-Muller with bits taken
// straight from mt19937_64; a given seed yields the same stream everywhere.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  // uniform in (0, 1]
  double uniform() { return ((gen() >> 11) + 1.0) * 0x1p-53; }

  double gaussian() {
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  std::complex<double> gaussian_complex() {
    double u1 = uniform(), u2 = uniform();
    double a = std::sqrt(-2.0 * std::log(u1));
    double p = 6.283185307179586476925287 * u2;
    return {a * std::cos(p), a * std::sin(p)};
  }
};

}  // namespace unidec
