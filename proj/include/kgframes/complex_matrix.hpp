#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "kgframes/errors.hpp"

namespace kgf {

using cplx = std::complex<double>;

constexpr double kDefaultTol = 1e-9;

// Relative tolerance contract used throughout: tol scaled by max(1, scale).
inline double scaled_tol(double tol, double scale) {
  return tol * std::max(1.0, scale);
}

// Dense complex matrix, row-major. Value type: all operations return fresh
// matrices, nothing is mutated in place by the free functions below.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static Mat zero(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return a_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<cplx>& data() { return a_; }
  const std::vector<cplx>& data() const { return a_; }

  bool all_finite() const {
    for (const cplx& z : a_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  Mat adjoint() const {
    Mat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  Mat conj() const {
    Mat r(rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = std::conj(a_[k]);
    return r;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const cplx& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& z : a_) m = std::max(m, std::abs(z));
    return m;
  }

  Mat block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
    Mat b(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
    return b;
  }

  void set_block(std::size_t i0, std::size_t j0, const Mat& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

inline void require_same_shape(const Mat& a, const Mat& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string(who) + ": shape mismatch");
}

inline Mat operator+(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "operator+");
  Mat r = a;
  for (std::size_t k = 0; k < r.data().size(); ++k) r.data()[k] += b.data()[k];
  return r;
}

inline Mat operator-(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "operator-");
  Mat r = a;
  for (std::size_t k = 0; k < r.data().size(); ++k) r.data()[k] -= b.data()[k];
  return r;
}

inline Mat operator*(const cplx& s, const Mat& a) {
  Mat r = a;
  for (cplx& z : r.data()) z *= s;
  return r;
}

inline Mat operator*(double s, const Mat& a) { return cplx(s, 0.0) * a; }

inline Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("operator*: inner dimension mismatch");
  Mat r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

inline Mat hermitian_part(const Mat& a) {
  if (!a.is_square()) throw DimensionMismatch("hermitian_part: square matrix required");
  Mat r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return r;
}

inline Mat hstack(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("hstack: row count mismatch");
  Mat r(a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

inline Mat vstack(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("vstack: column count mismatch");
  Mat r(a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

// Pairwise reduction keeps per-atom sums associative to roundoff, so results
// do not depend on evaluation order.
inline Mat pairwise_sum(std::vector<Mat> terms) {
  if (terms.empty()) throw DimensionMismatch("pairwise_sum: no terms");
  while (terms.size() > 1) {
    std::vector<Mat> next;
    next.reserve((terms.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2) next.push_back(terms[i] + terms[i + 1]);
    if (terms.size() % 2 == 1) next.push_back(terms.back());
    terms.swap(next);
  }
  return terms.front();
}

}  // namespace kgf
