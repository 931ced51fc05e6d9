#pragma once

#include <optional>
#include <vector>

#include "kgframes/algebra.hpp"
#include "kgframes/complex_matrix.hpp"
#include "kgframes/svd.hpp"

namespace kgf {

// The module H over the d x d matrix algebra is the space of length-n block
// rows: an element is stored flat as a d x (n*d) matrix [x_1 ... x_n]. The
// algebra-valued inner product is <x,y> = sum_i x_i y_i^* = X Y^*.
//
// Every adjointable module map A^n -> A^m is right multiplication of the flat
// block row by an (n*d) x (m*d) complex matrix, and the adjoint is the
// conjugate transpose of that matrix. This collapses all operator-level work
// (pseudoinverses, spectra, positivity) onto ordinary dense matrices:
// composition apply-x-then-y has underlying matrix U_x * U_y, operator norms
// are largest singular values, and submodules are row spaces.

struct ModuleVec {
  std::size_t alg_dim = 0;   // d
  std::size_t length = 0;    // n
  Mat flat;                  // d x (n*d)

  ModuleVec() = default;
  ModuleVec(std::size_t d, std::size_t n, Mat m) : alg_dim(d), length(n), flat(std::move(m)) {
    if (flat.rows() != d || flat.cols() != d * n)
      throw DimensionMismatch("ModuleVec: flat storage must be d x (n*d)");
  }

  static ModuleVec zero(std::size_t d, std::size_t n) { return ModuleVec(d, n, Mat(d, n * d)); }

  Mat block(std::size_t i) const { return flat.block(0, i * alg_dim, alg_dim, alg_dim); }
  void set_block(std::size_t i, const Mat& b) { flat.set_block(0, i * alg_dim, b); }
};

struct AdjOp {
  std::size_t alg_dim = 0;   // d
  std::size_t src_len = 0;   // n
  std::size_t dst_len = 0;   // m
  Mat u;                     // (n*d) x (m*d)

  AdjOp() = default;
  AdjOp(std::size_t d, std::size_t n, std::size_t m, Mat mat)
      : alg_dim(d), src_len(n), dst_len(m), u(std::move(mat)) {
    if (u.rows() != n * d || u.cols() != m * d)
      throw DimensionMismatch("AdjOp: underlying matrix must be (n*d) x (m*d)");
  }

  static AdjOp identity(std::size_t d, std::size_t n) {
    return AdjOp(d, n, n, Mat::identity(n * d));
  }
  static AdjOp zero(std::size_t d, std::size_t n, std::size_t m) {
    return AdjOp(d, n, m, Mat(n * d, m * d));
  }

  Mat block(std::size_t i, std::size_t j) const {
    return u.block(i * alg_dim, j * alg_dim, alg_dim, alg_dim);
  }
  bool same_space(const AdjOp& o) const {
    return alg_dim == o.alg_dim && src_len == o.src_len && dst_len == o.dst_len;
  }
};

inline AdjOp operator+(const AdjOp& a, const AdjOp& b) {
  if (!a.same_space(b)) throw DimensionMismatch("AdjOp+: operators live on different modules");
  return AdjOp(a.alg_dim, a.src_len, a.dst_len, a.u + b.u);
}

inline AdjOp operator-(const AdjOp& a, const AdjOp& b) {
  if (!a.same_space(b)) throw DimensionMismatch("AdjOp-: operators live on different modules");
  return AdjOp(a.alg_dim, a.src_len, a.dst_len, a.u - b.u);
}

inline AdjOp operator*(const cplx& s, const AdjOp& a) {
  return AdjOp(a.alg_dim, a.src_len, a.dst_len, s * a.u);
}
inline AdjOp operator*(double s, const AdjOp& a) { return cplx(s, 0.0) * a; }

inline AlgElem inner(const ModuleVec& x, const ModuleVec& y) {
  if (x.alg_dim != y.alg_dim || x.length != y.length)
    throw DimensionMismatch("inner: vectors live in different modules");
  return x.flat * y.flat.adjoint();
}

inline double module_norm(const ModuleVec& x) { return std::sqrt(op_norm(inner(x, x))); }

inline ModuleVec apply(const AdjOp& t, const ModuleVec& x) {
  if (x.alg_dim != t.alg_dim || x.length != t.src_len)
    throw DimensionMismatch("apply: vector does not match operator source");
  return ModuleVec(t.alg_dim, t.dst_len, x.flat * t.u);
}

inline AdjOp adjoint(const AdjOp& t) { return AdjOp(t.alg_dim, t.dst_len, t.src_len, t.u.adjoint()); }

// Apply-left-to-right composition: compose(s, t) maps x to t(s(x)).
inline AdjOp compose(const AdjOp& s, const AdjOp& t) {
  if (s.alg_dim != t.alg_dim || s.dst_len != t.src_len)
    throw DimensionMismatch("compose: destination of the first leg must match source of the second");
  return AdjOp(s.alg_dim, s.src_len, t.dst_len, s.u * t.u);
}

inline double op_norm(const AdjOp& t) { return spectral_norm(t.u); }

inline AdjOp pinv(const AdjOp& t, double tol = kDefaultTol) {
  return AdjOp(t.alg_dim, t.dst_len, t.src_len, pinv(t.u, tol));
}

// Largest g with ||t x|| >= g ||x|| for every module element x.
inline double min_gain(const AdjOp& t) { return std::sqrt(row_min_gain_sq(t.u)); }

inline bool is_surjective(const AdjOp& t, double tol = kDefaultTol) {
  return min_gain(adjoint(t)) > std::max(tol, kRankFloor) * op_norm(t);
}

// Projection matrix (right multiplication) onto the row space of m.
inline Mat row_space_projector(const Mat& m, double tol = kDefaultTol) {
  return pinv(m, tol) * m;
}

// True when the module range of tp sits inside the module range of t.
inline bool range_inclusion(const AdjOp& tp, const AdjOp& t, double tol = kDefaultTol) {
  if (tp.alg_dim != t.alg_dim || tp.dst_len != t.dst_len)
    throw DimensionMismatch("range_inclusion: operators must share a destination module");
  const Mat residual = tp.u - tp.u * row_space_projector(t.u, tol);
  return spectral_norm(residual) <= scaled_tol(tol, op_norm(tp));
}

// Reduced solution q of the factorization t(q(x)) = tp(x); requires the range
// inclusion to hold. The returned operator is the minimal-norm solution.
inline AdjOp douglas_solve(const AdjOp& t, const AdjOp& tp, double tol = kDefaultTol) {
  if (tp.alg_dim != t.alg_dim || tp.dst_len != t.dst_len)
    throw DimensionMismatch("douglas_solve: operators must share a destination module");
  if (!range_inclusion(tp, t, tol))
    throw NoSolution("douglas_solve: range inclusion fails, the equation has no solution");
  return AdjOp(t.alg_dim, tp.src_len, t.src_len, tp.u * pinv(t.u, tol));
}

// Least lambda with tp tp^* <= lambda t t^* in the Loewner order, or empty
// when the ranges rule any lambda out.
inline std::optional<double> majorizes(const AdjOp& t, const AdjOp& tp, double tol = kDefaultTol) {
  if (tp.alg_dim != t.alg_dim || tp.dst_len != t.dst_len)
    throw DimensionMismatch("majorizes: operators must share a destination module");
  if (!range_inclusion(tp, t, tol)) return std::nullopt;
  const double s = spectral_norm(tp.u * pinv(t.u, tol));
  return s * s;
}

// A submodule given by a generating operator; the submodule is the range.
struct Submodule {
  AdjOp generator;  // range(generator) inside A^{generator.dst_len}

  std::size_t alg_dim() const { return generator.alg_dim; }
  std::size_t ambient_len() const { return generator.dst_len; }

  bool contains(const ModuleVec& x, double tol = kDefaultTol) const {
    if (x.alg_dim != generator.alg_dim || x.length != generator.dst_len)
      throw DimensionMismatch("Submodule::contains: vector lives in a different module");
    const Mat residual = x.flat - x.flat * row_space_projector(generator.u, tol);
    return spectral_norm(residual) <= scaled_tol(tol, module_norm(x));
  }

  // Orthonormal rows spanning the submodule, as a k x (ambient*d) matrix.
  Mat orthonormal_rows(double tol = kDefaultTol) const {
    const Svd s = svd(generator.u, tol);
    const std::size_t rank = s.numerical_rank(tol);
    const std::size_t cols = generator.u.cols();
    Mat rows(rank, cols);
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < cols; ++j) rows(i, j) = std::conj(s.v(j, i));
    return rows;
  }

  static Submodule full(std::size_t d, std::size_t n) { return Submodule{AdjOp::identity(d, n)}; }
};

}  // namespace kgf
