#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "kgframes/module.hpp"

namespace kgf {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Finite weighted measure space: atoms 1..N with strictly positive weights.
struct MeasureSpace {
  std::vector<double> weights;

  std::size_t atom_count() const { return weights.size(); }

  void validate() const {
    if (weights.empty()) throw DimensionMismatch("MeasureSpace: at least one atom required");
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w))
        throw DimensionMismatch("MeasureSpace: weights must be positive and finite");
  }
};

// A family of operators from the source module A^n into per-atom destination
// modules A^{m_xi}, together with the measure. Integrals over the atoms are
// weighted sums; the weights live in the direct-sum inner product, and the
// stacked synthesis/analysis representation folds sqrt(weight) into each
// block so direct-sum norms come out right.
struct GFrameFamily {
  std::size_t alg_dim = 0;
  std::size_t source_len = 0;
  MeasureSpace space;
  std::vector<AdjOp> members;

  void validate() const {
    space.validate();
    if (members.size() != space.atom_count())
      throw DimensionMismatch("GFrameFamily: one member per atom required");
    for (const AdjOp& m : members) {
      if (m.alg_dim != alg_dim || m.src_len != source_len)
        throw DimensionMismatch("GFrameFamily: member does not act on the source module");
      if (!m.u.all_finite()) throw DimensionMismatch("GFrameFamily: member entries must be finite");
    }
  }

  std::size_t atom_count() const { return members.size(); }
  std::size_t total_dst_len() const {
    std::size_t s = 0;
    for (const AdjOp& m : members) s += m.dst_len;
    return s;
  }
};

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct FrameReport {
  bool is_bessel = true;
  double bessel_bound = 0.0;
  bool is_kg_frame = false;
  double optimal_lower = 0.0;  // +infinity when the lower condition is vacuous
  std::optional<double> tight_constant;
  bool is_parseval = false;
  bool degenerate_k = false;       // the comparison operator vanishes
  bool vacuous_submodule = false;  // restriction to the zero submodule
  std::optional<double> lower_closed_form;  // resolvent route, when applicable
  double tol = kDefaultTol;
};

inline std::vector<ModuleVec> analysis(const GFrameFamily& f, const ModuleVec& x) {
  if (x.alg_dim != f.alg_dim || x.length != f.source_len)
    throw DimensionMismatch("analysis: vector does not match the family source");
  std::vector<ModuleVec> out;
  out.reserve(f.members.size());
  for (const AdjOp& m : f.members) out.push_back(apply(m, x));
  return out;
}

inline ModuleVec synthesis(const GFrameFamily& f, const std::vector<ModuleVec>& coeff) {
  if (coeff.size() != f.atom_count())
    throw DimensionMismatch("synthesis: one coefficient block per atom required");
  std::vector<Mat> terms;
  terms.reserve(coeff.size());
  for (std::size_t k = 0; k < coeff.size(); ++k) {
    if (coeff[k].alg_dim != f.alg_dim || coeff[k].length != f.members[k].dst_len)
      throw DimensionMismatch("synthesis: coefficient block does not match member destination");
    terms.push_back(f.space.weights[k] * (coeff[k].flat * f.members[k].u.adjoint()));
  }
  return ModuleVec(f.alg_dim, f.source_len, pairwise_sum(std::move(terms)));
}

// Weighted direct-sum inner product of two coefficient fields.
inline AlgElem direct_sum_inner(const GFrameFamily& f, const std::vector<ModuleVec>& a,
                                const std::vector<ModuleVec>& b) {
  if (a.size() != f.atom_count() || b.size() != f.atom_count())
    throw DimensionMismatch("direct_sum_inner: coefficient field size mismatch");
  std::vector<Mat> terms;
  terms.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    terms.push_back(f.space.weights[k] * inner(a[k], b[k]));
  return pairwise_sum(std::move(terms));
}

// Synthesis operator on the stacked direct sum A^{sum m_xi} (weights folded in
// as sqrt factors, so the stacked copy is isometric to the weighted sum).
inline AdjOp synthesis_op(const GFrameFamily& f) {
  Mat stacked;
  bool first = true;
  for (std::size_t k = 0; k < f.members.size(); ++k) {
    const Mat blockmat = std::sqrt(f.space.weights[k]) * f.members[k].u.adjoint();
    stacked = first ? blockmat : vstack(stacked, blockmat);
    first = false;
  }
  return AdjOp(f.alg_dim, f.total_dst_len(), f.source_len, std::move(stacked));
}

inline AdjOp analysis_op(const GFrameFamily& f) { return adjoint(synthesis_op(f)); }

// S = sum_xi nu_xi member_xi^* member_xi, a positive endomorphism of the source.
inline AdjOp frame_operator(const GFrameFamily& f) {
  f.validate();
  std::vector<Mat> terms;
  terms.reserve(f.members.size());
  for (std::size_t k = 0; k < f.members.size(); ++k)
    terms.push_back(f.space.weights[k] * (f.members[k].u * f.members[k].u.adjoint()));
  return AdjOp(f.alg_dim, f.source_len, f.source_len, pairwise_sum(std::move(terms)));
}

inline double bessel_bound(const GFrameFamily& f) {
  const AdjOp s = frame_operator(f);
  return std::max(0.0, lambda_max(hermitian_part(s.u)));
}

// sup { t >= 0 : s - t*w is PSD } for Hermitian PSD s, w; +infinity when w
// vanishes. 60-step bisection against the Cholesky PSD oracle.
inline double psd_pencil_sup(const Mat& s, const Mat& w) {
  if (s.rows() != w.rows() || s.cols() != w.cols())
    throw DimensionMismatch("psd_pencil_sup: shape mismatch");
  const double wmax = std::max(0.0, lambda_max(hermitian_part(w)));
  const double smax = std::max(0.0, lambda_max(hermitian_part(s)));
  if (wmax <= 1e-14 * std::max(1.0, smax)) return kInfinity;
  if (smax <= 0.0) return 0.0;
  const double slack = 1e-12 * std::max(1.0, smax);
  double hi = smax / wmax;  // valid cap: t * wmax <= smax at w's top eigenvector
  if (psd_within(hermitian_part(s) - hi * hermitian_part(w), slack)) return hi;
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psd_within(hermitian_part(s) - mid * hermitian_part(w), slack))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

namespace detail {

inline Mat kk_adjoint_form(const AdjOp& k) { return k.u.adjoint() * k.u; }

}  // namespace detail

// Optimal lower frame bound of the family for the comparison operator k:
// the largest a >= 0 with  a * <k^* f, k^* f>  <=  <S f, f>  for every f.
inline double optimal_lower_bound(const GFrameFamily& f, const AdjOp& k, double tol = kDefaultTol) {
  if (k.alg_dim != f.alg_dim || k.src_len != f.source_len || k.dst_len != f.source_len)
    throw DimensionMismatch("optimal_lower_bound: k must be an endomorphism of the source");
  if (op_norm(k) <= tol) return kInfinity;  // vacuous comparison
  const AdjOp s = frame_operator(f);
  return psd_pencil_sup(s.u, detail::kk_adjoint_form(k));
}

// Closed-form route for the same bound, valid when range(k) sits inside
// range(S): 1 / lambda_max(k S^dagger k^*). Empty when the range condition
// fails.
inline std::optional<double> lower_bound_closed_form(const GFrameFamily& f, const AdjOp& k,
                                                     double tol = kDefaultTol) {
  if (k.alg_dim != f.alg_dim || k.src_len != f.source_len || k.dst_len != f.source_len)
    throw DimensionMismatch("lower_bound_closed_form: k must be an endomorphism of the source");
  if (op_norm(k) <= tol) return kInfinity;
  const Mat s = hermitian_part(frame_operator(f).u);
  const Mat sdag = pinv(s, tol);
  const Mat proj = sdag * s;  // projector onto the range of s
  const double defect = spectral_norm(k.u - k.u * proj);
  if (defect > scaled_tol(tol, op_norm(k))) return std::nullopt;
  const double top = lambda_max(hermitian_part(k.u * sdag * k.u.adjoint()));
  if (top <= 0.0) return kInfinity;
  return 1.0 / top;
}

namespace detail {

inline FrameReport report_from_forms(const Mat& s_form, const Mat& w_form, double k_norm,
                                     double tol) {
  FrameReport rep;
  rep.tol = tol;
  rep.bessel_bound = std::max(0.0, lambda_max(hermitian_part(s_form)));
  rep.is_bessel = true;
  const double w_scale = std::sqrt(std::max(0.0, lambda_max(hermitian_part(w_form))));
  if (k_norm <= tol || w_scale <= tol * std::max(1.0, k_norm)) {
    rep.degenerate_k = true;
    rep.optimal_lower = kInfinity;
    rep.is_kg_frame = true;
    return rep;
  }
  rep.optimal_lower = psd_pencil_sup(s_form, w_form);
  rep.is_kg_frame = rep.optimal_lower > tol;
  if (rep.is_kg_frame && std::isfinite(rep.optimal_lower)) {
    const double delta = rep.optimal_lower;
    const double defect = spectral_norm(hermitian_part(s_form) - delta * hermitian_part(w_form));
    if (defect <= scaled_tol(tol, lambda_max(hermitian_part(s_form)))) {
      rep.tight_constant = delta;
      rep.is_parseval = std::abs(delta - 1.0) <= scaled_tol(tol, 1.0);
    }
  }
  return rep;
}

}  // namespace detail

inline FrameReport check_kg_frame(const GFrameFamily& f, const AdjOp& k, double tol = kDefaultTol) {
  if (k.alg_dim != f.alg_dim || k.src_len != f.source_len || k.dst_len != f.source_len)
    throw DimensionMismatch("check_kg_frame: k must be an endomorphism of the source");
  const AdjOp s = frame_operator(f);
  FrameReport rep = detail::report_from_forms(s.u, detail::kk_adjoint_form(k), op_norm(k), tol);
  if (!rep.degenerate_k) {
    if (auto cf = lower_bound_closed_form(f, k, tol)) rep.lower_closed_form = *cf;
  }
  return rep;
}

// Same verdicts with both sides of the sandwich restricted to a submodule:
// the quadratic forms are conjugated by an orthonormal basis of the range.
inline FrameReport check_kg_frame_on(const GFrameFamily& f, const AdjOp& k, const Submodule& sub,
                                     double tol = kDefaultTol) {
  if (k.alg_dim != f.alg_dim || k.src_len != f.source_len || k.dst_len != f.source_len)
    throw DimensionMismatch("check_kg_frame_on: k must be an endomorphism of the source");
  if (sub.alg_dim() != f.alg_dim || sub.ambient_len() != f.source_len)
    throw DimensionMismatch("check_kg_frame_on: submodule lives in a different module");
  const Mat basis = sub.orthonormal_rows(tol);
  if (basis.rows() == 0) {
    FrameReport rep;
    rep.tol = tol;
    rep.vacuous_submodule = true;
    rep.degenerate_k = true;
    rep.is_kg_frame = true;
    rep.optimal_lower = kInfinity;
    rep.bessel_bound = 0.0;
    return rep;
  }
  const AdjOp s = frame_operator(f);
  const Mat s_r = basis * s.u * basis.adjoint();
  const Mat w_r = basis * detail::kk_adjoint_form(k) * basis.adjoint();
  return detail::report_from_forms(s_r, w_r, op_norm(k), tol);
}

// Cross synthesis sum_xi nu_xi member_xi^* partner_xi as an endomorphism of
// the source; equals (synthesis of f) composed after (analysis of g).
inline AdjOp cross_synthesis(const GFrameFamily& f, const GFrameFamily& g) {
  if (f.alg_dim != g.alg_dim || f.source_len != g.source_len ||
      f.atom_count() != g.atom_count())
    throw DimensionMismatch("cross_synthesis: families live on different spaces");
  std::vector<Mat> terms;
  terms.reserve(f.atom_count());
  for (std::size_t k = 0; k < f.atom_count(); ++k) {
    if (f.members[k].dst_len != g.members[k].dst_len)
      throw ShapeMismatch("cross_synthesis: per-atom destination dimensions differ");
    if (std::abs(f.space.weights[k] - g.space.weights[k]) >
        1e-12 * std::max(1.0, std::abs(f.space.weights[k])))
      throw DimensionMismatch("cross_synthesis: families carry different measures");
    terms.push_back(f.space.weights[k] * (g.members[k].u * f.members[k].u.adjoint()));
  }
  return AdjOp(f.alg_dim, f.source_len, f.source_len, pairwise_sum(std::move(terms)));
}

// Duality test: k equals the cross synthesis of the two families.
inline bool is_k_dual(const GFrameFamily& f, const GFrameFamily& g, const AdjOp& k,
                      double tol = kDefaultTol) {
  if (k.alg_dim != f.alg_dim || k.src_len != f.source_len || k.dst_len != f.source_len)
    throw DimensionMismatch("is_k_dual: k must be an endomorphism of the source");
  const AdjOp cross = cross_synthesis(f, g);
  return spectral_norm(k.u - cross.u) <= scaled_tol(tol, op_norm(k));
}

}  // namespace kgf
