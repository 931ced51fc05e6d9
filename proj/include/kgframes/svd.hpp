#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "kgframes/complex_matrix.hpp"
#include "kgframes/eig.hpp"

namespace kgf {

// Singular values of an exactly rank-deficient matrix come back from the
// Gram route as noise up to ~1e-8 of sigma_max; rank decisions never trust
// anything below this floor, whatever tolerance the caller passes.
constexpr double kRankFloor = 1e-7;

// m = u * diag(sigma) * v^*, sigma descending, u and v full square unitaries.
struct Svd {
  Mat u;
  std::vector<double> sigma;
  Mat v;

  std::size_t numerical_rank(double tol = kDefaultTol) const {
    if (sigma.empty() || sigma.front() <= 0.0) return 0;
    const double cut = std::max(tol, kRankFloor) * sigma.front();
    std::size_t r = 0;
    while (r < sigma.size() && sigma[r] > cut) ++r;
    return r;
  }
};

namespace detail {

// Modified Gram-Schmidt on the columns of m (in place); returns the number of
// columns kept (columns with residual below drop are zeroed and moved last).
inline void mgs_orthonormalize(Mat& m) {
  const std::size_t r = m.rows(), c = m.cols();
  for (std::size_t j = 0; j < c; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cplx dot = 0.0;
        for (std::size_t i = 0; i < r; ++i) dot += std::conj(m(i, k)) * m(i, j);
        for (std::size_t i = 0; i < r; ++i) m(i, j) -= dot * m(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < r; ++i) nrm += std::norm(m(i, j));
    nrm = std::sqrt(nrm);
    if (nrm > 0.0)
      for (std::size_t i = 0; i < r; ++i) m(i, j) /= nrm;
  }
}

// Extends the first `have` orthonormal columns of basis (rows x rows) to a
// full unitary, drawing replacement directions from the canonical basis.
inline void complete_basis(Mat& basis, std::size_t have) {
  const std::size_t n = basis.rows();
  std::size_t filled = have;
  for (std::size_t e = 0; e < n && filled < n; ++e) {
    std::vector<cplx> cand(n, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < filled; ++k) {
        cplx dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += std::conj(basis(i, k)) * cand[i];
        for (std::size_t i = 0; i < n; ++i) cand[i] -= dot * basis(i, k);
      }
    }
    double nrm = 0.0;
    for (const cplx& z : cand) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    if (nrm < 0.5) continue;  // canonical direction already covered
    for (std::size_t i = 0; i < n; ++i) basis(i, filled) = cand[i] / nrm;
    ++filled;
  }
}

}  // namespace detail

// Singular value decomposition built on the Hermitian eigensolver applied to
// the smaller Gram matrix, with the paired side recovered by multiplication
// and re-orthonormalized so degenerate singular-value clusters stay unitary.
inline Svd svd(const Mat& m, double tol = kDefaultTol) {
  const std::size_t p = m.rows(), q = m.cols();
  if (p == 0 || q == 0) throw DimensionMismatch("svd: empty matrix");
  const bool rows_small = p <= q;
  const Mat gram = rows_small ? m * m.adjoint() : m.adjoint() * m;
  Spectrum es = hermitian_eig(gram, 1.0);  // gram is Hermitian by construction
  const std::size_t k = gram.rows();

  Svd out;
  out.sigma.assign(std::min(p, q), 0.0);
  Mat small_side(k, k);  // descending reorder of the eigenbasis
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t src = k - 1 - j;
    out.sigma[j] = std::sqrt(std::max(0.0, es.eigenvalues[src]));
    for (std::size_t i = 0; i < k; ++i) small_side(i, j) = es.basis(i, src);
  }

  const double smax = out.sigma.empty() ? 0.0 : out.sigma.front();
  const double cut = std::max(tol, kRankFloor) * smax;
  std::size_t rank = 0;
  while (rank < out.sigma.size() && out.sigma[rank] > cut) ++rank;
  // Below the floor the Gram route only produces noise; report exact zeros.
  for (std::size_t j = rank; j < out.sigma.size(); ++j) out.sigma[j] = 0.0;

  const std::size_t other = rows_small ? q : p;
  Mat recovered(other, other);
  const Mat cross = rows_small ? m.adjoint() : m;  // maps small side to other side
  for (std::size_t j = 0; j < rank; ++j) {
    for (std::size_t i = 0; i < other; ++i) {
      cplx acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += cross(i, t) * small_side(t, j);
      recovered(i, j) = acc / out.sigma[j];
    }
  }
  detail::mgs_orthonormalize(recovered);
  detail::complete_basis(recovered, rank);

  if (rows_small) {
    out.u = small_side;
    out.v = recovered;
  } else {
    out.u = recovered;
    out.v = small_side;
  }
  return out;
}

// Largest singular value. Uses the smaller Gram matrix directly.
inline double spectral_norm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const Mat gram = (m.rows() <= m.cols()) ? m * m.adjoint() : m.adjoint() * m;
  return std::sqrt(std::max(0.0, lambda_max(gram)));
}

// Smallest eigenvalue of m m^*, as a squared row-side gain. This is the
// square of the best constant g with ||w m|| >= g ||w|| over row vectors w.
inline double row_min_gain_sq(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  if (m.cols() == 0) return 0.0;
  return std::max(0.0, lambda_min(m * m.adjoint()));
}

// Moore-Penrose pseudoinverse with the numerical rank cutoff sigma > tol*sigma_max.
inline Mat pinv(const Mat& m, double tol = kDefaultTol) {
  const Svd s = svd(m, tol);
  const std::size_t rank = s.numerical_rank(tol);
  Mat r(m.cols(), m.rows());
  for (std::size_t t = 0; t < rank; ++t) {
    const double inv = 1.0 / s.sigma[t];
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const cplx vi = s.v(i, t) * inv;
      if (vi == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < m.rows(); ++j) r(i, j) += vi * std::conj(s.u(j, t));
    }
  }
  return r;
}

// Smallest nonzero singular value (0 when the matrix is numerically zero).
inline double smallest_positive_sigma(const Mat& m, double tol = kDefaultTol) {
  const Svd s = svd(m, tol);
  const std::size_t rank = s.numerical_rank(tol);
  return rank == 0 ? 0.0 : s.sigma[rank - 1];
}

}  // namespace kgf
