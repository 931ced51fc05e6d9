#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kgframes/complex_matrix.hpp"

namespace kgf {

// Real spectrum of a Hermitian element plus a unitary eigenbasis.
// Eigenvalues ascending; each eigenvector's first significant component is
// rotated to the positive real axis so the basis is reproducible.
struct Spectrum {
  std::vector<double> eigenvalues;
  Mat basis;  // columns are eigenvectors

  Mat reconstruct() const {
    const std::size_t n = eigenvalues.size();
    Mat d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = eigenvalues[i];
    return basis * d * basis.adjoint();
  }
};

namespace detail {

inline double offdiag_frobenius(const Mat& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += 2.0 * std::norm(a(i, j));
  return std::sqrt(s);
}

// One cyclic sweep of two-sided complex Jacobi rotations on the Hermitian
// matrix b, accumulating the unitary in v (b <- u^* b u, v <- v u).
inline void jacobi_sweep(Mat& b, Mat* v, double drop_tol) {
  const std::size_t n = b.rows();
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const cplx apq = b(p, q);
      const double r = std::abs(apq);
      if (r <= drop_tol) {
        b(p, q) = 0.0;
        b(q, p) = 0.0;
        continue;
      }
      // Phase factor makes the (p,q) entry real, then a real Givens rotation
      // annihilates it.
      const cplx phase = apq / r;  // e^{i phi}
      const double app = b(p, p).real();
      const double aqq = b(q, q).real();
      const double tau = (aqq - app) / (2.0 * r);
      double t;
      if (tau >= 0.0)
        t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
      else
        t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;

      // u_pp = c, u_pq = s, u_qp = -conj(phase) s, u_qq = conj(phase) c
      const cplx uqp = -std::conj(phase) * s;
      const cplx uqq = std::conj(phase) * c;

      for (std::size_t i = 0; i < n; ++i) {  // columns: b <- b u
        const cplx bip = b(i, p), biq = b(i, q);
        b(i, p) = c * bip + uqp * biq;
        b(i, q) = s * bip + uqq * biq;
      }
      for (std::size_t j = 0; j < n; ++j) {  // rows: b <- u^* b
        const cplx bpj = b(p, j), bqj = b(q, j);
        b(p, j) = c * bpj + std::conj(uqp) * bqj;
        b(q, j) = s * bpj + std::conj(uqq) * bqj;
      }
      b(p, q) = 0.0;
      b(q, p) = 0.0;
      b(p, p) = b(p, p).real();
      b(q, q) = b(q, q).real();
      if (v) {
        for (std::size_t i = 0; i < n; ++i) {
          const cplx vip = (*v)(i, p), viq = (*v)(i, q);
          (*v)(i, p) = c * vip + uqp * viq;
          (*v)(i, q) = s * vip + uqq * viq;
        }
      }
    }
  }
}

inline void phase_normalize_columns(Mat& v) {
  for (std::size_t j = 0; j < v.cols(); ++j) {
    double big = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) big = std::max(big, std::abs(v(i, j)));
    if (big == 0.0) continue;
    std::size_t lead = 0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > 1e-10 * big) {
        lead = i;
        break;
      }
    }
    const cplx z = v(lead, j);
    const double az = std::abs(z);
    if (az == 0.0) continue;
    const cplx w = std::conj(z) / az;
    for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) *= w;
    v(lead, j) = cplx(v(lead, j).real(), 0.0);
  }
}

}  // namespace detail

// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi.
// Throws NotHermitian when the input is not Hermitian to within
// tol * max(1, ||a||_F).
inline Spectrum hermitian_eig(const Mat& a, double tol = kDefaultTol) {
  if (!a.is_square()) throw DimensionMismatch("hermitian_eig: square matrix required");
  const std::size_t n = a.rows();
  const double scale = a.frobenius_norm();
  const double herm_defect = (a - a.adjoint()).frobenius_norm();
  if (herm_defect > scaled_tol(tol, scale) * 2.0)
    throw NotHermitian("hermitian_eig: matrix deviates from its adjoint beyond tolerance");

  Mat b = hermitian_part(a);
  Mat v = Mat::identity(n);
  if (n > 1) {
    const double conv = 1e-14 * std::max(1e-300, scale);
    for (int sweep = 0; sweep < 100; ++sweep) {
      if (detail::offdiag_frobenius(b) <= conv) break;
      detail::jacobi_sweep(b, &v, conv / (double)(n * n));
    }
  }

  std::vector<double> lam(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = b(i, i).real();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return lam[x] < lam[y]; });

  Spectrum sp;
  sp.eigenvalues.resize(n);
  sp.basis = Mat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    sp.eigenvalues[j] = lam[idx[j]];
    for (std::size_t i = 0; i < n; ++i) sp.basis(i, j) = v(i, idx[j]);
  }
  detail::phase_normalize_columns(sp.basis);
  return sp;
}

// Eigenvalues only (no basis accumulation); same ordering contract.
inline std::vector<double> hermitian_eigenvalues(const Mat& a, double tol = kDefaultTol) {
  if (!a.is_square()) throw DimensionMismatch("hermitian_eigenvalues: square matrix required");
  const std::size_t n = a.rows();
  const double scale = a.frobenius_norm();
  const double herm_defect = (a - a.adjoint()).frobenius_norm();
  if (herm_defect > scaled_tol(tol, scale) * 2.0)
    throw NotHermitian("hermitian_eigenvalues: matrix deviates from its adjoint beyond tolerance");
  Mat b = hermitian_part(a);
  if (n > 1) {
    const double conv = 1e-14 * std::max(1e-300, scale);
    for (int sweep = 0; sweep < 100; ++sweep) {
      if (detail::offdiag_frobenius(b) <= conv) break;
      detail::jacobi_sweep(b, nullptr, conv / (double)(n * n));
    }
  }
  std::vector<double> lam(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = b(i, i).real();
  std::sort(lam.begin(), lam.end());
  return lam;
}

inline double lambda_max(const Mat& hermitian) {
  const std::vector<double> lam = hermitian_eigenvalues(hermitian);
  return lam.empty() ? 0.0 : lam.back();
}

inline double lambda_min(const Mat& hermitian) {
  const std::vector<double> lam = hermitian_eigenvalues(hermitian);
  return lam.empty() ? 0.0 : lam.front();
}

// Cheap positive-semidefiniteness test via diagonally pivoted Cholesky with a
// slack shift: accepts h when h + slack*I factors. Used as the oracle inside
// pencil bisections, where only the sign matters and a full eig would be
// wasteful.
inline bool psd_within(const Mat& h, double slack) {
  if (!h.is_square()) throw DimensionMismatch("psd_within: square matrix required");
  Mat b = hermitian_part(h);
  const std::size_t n = b.rows();
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(b(i, i).real()));
  const double zero_tol = std::max(slack, 1e-15 * std::max(1.0, diag_scale));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double dmax = b(k, k).real();
    for (std::size_t i = k + 1; i < n; ++i)
      if (b(i, i).real() > dmax) {
        dmax = b(i, i).real();
        piv = i;
      }
    if (dmax + slack <= zero_tol) {
      // All remaining pivots are negligible; PSD demands the whole trailing
      // block be negligible too.
      const double off_tol = 4.0 * zero_tol + 1e-13 * std::max(1.0, diag_scale);
      for (std::size_t i = k; i < n; ++i) {
        if (b(i, i).real() + slack < -3.0 * zero_tol) return false;
        for (std::size_t j = k; j < i; ++j)
          if (std::abs(b(i, j)) > off_tol) return false;
      }
      return true;
    }
    if (piv != k) {
      for (std::size_t i = 0; i < n; ++i) std::swap(b(i, k), b(i, piv));
      for (std::size_t j = 0; j < n; ++j) std::swap(b(k, j), b(piv, j));
    }
    const double d = b(k, k).real() + slack;
    const double root = std::sqrt(d);
    for (std::size_t i = k + 1; i < n; ++i) b(i, k) /= root;
    for (std::size_t j = k + 1; j < n; ++j) {
      const cplx ljk = std::conj(b(j, k));
      for (std::size_t i = k + 1; i < n; ++i) b(i, j) -= b(i, k) * ljk;
    }
  }
  return true;
}

}  // namespace kgf
