#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "kgframes/complex_matrix.hpp"

namespace kgf {

// Counter-based deterministic generator. The whole stream is a pure function
// of (seed, stream, call index):
//
//   mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//            z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//            return z ^ (z >> 31)
//   base  =  mix(seed ^ mix(stream + 0x9E3779B97F4A7C15))
//   out_i =  mix(base + i * 0x9E3779B97F4A7C15), i = 1, 2, ...
//
// Uniform doubles take the top 53 bits; normals are Box-Muller pairs; complex
// normals have independent N(0, 1/2) parts. Any implementation of these
// constants reproduces the instance stream bit for bit.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix(seed ^ mix(stream + kGamma))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(base_ + (++counter_) * kGamma); }

  // Uniform in [0, 1).
  double next_unit() { return (double)(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double next_unit_open() { return (double)((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double next_normal() {
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Standard complex normal: real and imaginary parts N(0, 1/2).
  cplx next_cnormal() {
    const double re = next_normal();
    const double im = next_normal();
    return cplx(re, im) * std::sqrt(0.5);
  }

  // Uniform integer in [0, n) via 128-bit multiply-shift.
  std::uint64_t next_below(std::uint64_t n) {
    return (std::uint64_t)(((__uint128_t)next_u64() * n) >> 64);
  }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t base_ = 0;
  std::uint64_t counter_ = 0;
};

// Matrix with iid standard complex normal entries.
inline Mat ginibre(CounterRng& rng, std::size_t rows, std::size_t cols) {
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.next_cnormal();
  return m;
}

// Haar-ish unitary from Gram-Schmidt on a Ginibre draw, with a deterministic
// phase fix per column.
inline Mat random_unitary(CounterRng& rng, std::size_t n) {
  Mat g = ginibre(rng, n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cplx dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += std::conj(g(i, k)) * g(i, j);
        for (std::size_t i = 0; i < n; ++i) g(i, j) -= dot * g(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(g(i, j));
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) {  // essentially impossible; keep determinism anyway
      for (std::size_t i = 0; i < n; ++i) g(i, j) = (i == j) ? 1.0 : 0.0;
      nrm = 1.0;
    }
    const cplx lead = g(0, j);
    const double alead = std::abs(lead);
    const cplx phase = alead > 0.0 ? std::conj(lead) / alead : cplx(1.0, 0.0);
    const cplx scale = phase / nrm;
    for (std::size_t i = 0; i < n; ++i) g(i, j) *= scale;
  }
  return g;
}

}  // namespace kgf
