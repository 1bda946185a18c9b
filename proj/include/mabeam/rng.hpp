// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>

namespace mabeam {

// One SplitMix64 step. Used to derive decorrelated sub-stream seeds from a
// base seed (e.g. the solver initialization stream of a given trial).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic double-precision generator on top of std::mt19937_64.
//
// The uniform and Gaussian transforms are written out explicitly instead of
// going through the <random> distribution templates, whose output is
// implementation-defined. With a fixed seed this class produces the same
// stream on every toolchain, which is what makes trial seeds portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [-1, 1).
  double uniform_pm1() { return 2.0 * uniform() - 1.0; }

  // One Box-Muller pair of independent standard normals. Always consumes
  // exactly two engine words; nothing is cached between calls.
  std::pair<double, double> normal_pair() {
    // Shift u1 into (0, 1] so the logarithm stays finite.
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  // Circularly-symmetric complex Gaussian with unit variance,
  // i.e. real and imaginary parts are N(0, 1/2).
  std::complex<double> complex_normal() {
    const auto [re, im] = normal_pair();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

 private:
  std::mt19937_64 engine_;
};

// Matrix of i.i.d. unit-variance complex Gaussians, filled column-major.
inline arma::cx_mat random_complex(Rng& rng, arma::uword rows,
                                   arma::uword cols) {
  arma::cx_mat out(rows, cols);
  for (arma::uword j = 0; j < cols; ++j)
    for (arma::uword i = 0; i < rows; ++i) out(i, j) = rng.complex_normal();
  return out;
}

}  // namespace mabeam
