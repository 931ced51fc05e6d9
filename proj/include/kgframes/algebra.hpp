#pragma once

#include <algorithm>
#include <cmath>

#include "kgframes/complex_matrix.hpp"
#include "kgframes/eig.hpp"
#include "kgframes/svd.hpp"

namespace kgf {

// Elements of the coefficient algebra are d x d complex matrices; Mat carries
// them directly. The functions below realize the *-algebra structure: the
// involution is the conjugate transpose, the norm is the operator norm, and
// positivity is the Loewner order.

using AlgElem = Mat;

inline AlgElem involution(const AlgElem& a) { return a.adjoint(); }

inline double op_norm(const Mat& a) { return spectral_norm(a); }

inline bool is_positive(const AlgElem& a, double tol = kDefaultTol) {
  if (!a.is_square()) throw DimensionMismatch("is_positive: square matrix required");
  const double scale = op_norm(a);
  const double t = scaled_tol(tol, scale);
  if (op_norm(a - a.adjoint()) > t) return false;
  if (a.rows() == 0) return true;
  return lambda_min(hermitian_part(a)) >= -t;
}

inline bool loewner_leq(const AlgElem& a, const AlgElem& b, double tol = kDefaultTol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("loewner_leq: dimension mismatch");
  return is_positive(b - a, tol);
}

// Positive square root via the spectral calculus. Eigenvalues are clamped at
// zero, within the positivity tolerance of the precondition.
inline AlgElem sqrt_pos(const AlgElem& a, double tol = kDefaultTol) {
  if (!is_positive(a, tol)) throw NotPositive("sqrt_pos: matrix is not positive semidefinite");
  const Spectrum sp = hermitian_eig(hermitian_part(a), 1.0);
  const std::size_t n = a.rows();
  Mat d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = std::sqrt(std::max(0.0, sp.eigenvalues[i]));
  return sp.basis * d * sp.basis.adjoint();
}

// |a| = (a* a)^{1/2}
inline AlgElem abs_elem(const AlgElem& a, double tol = kDefaultTol) {
  if (!a.is_square()) throw DimensionMismatch("abs_elem: square matrix required");
  return sqrt_pos(involution(a) * a, tol);
}

}  // namespace kgf
