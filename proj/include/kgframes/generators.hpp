#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "kgframes/algebra.hpp"
#include "kgframes/constructions.hpp"
#include "kgframes/rng.hpp"
#include "kgframes/scenario.hpp"

namespace kgf {

// Upper ends of the dimension ranges an instance is drawn from; lower ends
// are all 1.
struct TrialDims {
  std::size_t d_max = 4;      // algebra dimension
  std::size_t n_max = 6;      // source module length
  std::size_t atoms_max = 8;  // measure atoms
  std::size_t m_max = 4;      // per-atom destination length
};

struct GeneratedInstance {
  std::optional<Scenario> scenario;  // empty when generation was abandoned
  std::string note;
};

namespace gen {

inline std::vector<double> draw_weights(CounterRng& rng, std::size_t count) {
  std::vector<double> w(count);
  for (double& x : w) x = rng.next_in(0.5, 1.5);
  return w;
}

// Atom destination lengths whose total covers the source (sum m >= n + 1
// whenever the budget allows), so random families have invertible frame
// operators.
inline std::vector<std::size_t> draw_atom_dims(CounterRng& rng, std::size_t atoms,
                                               std::size_t m_max, std::size_t n) {
  std::vector<std::size_t> m(atoms);
  std::size_t total = 0;
  for (std::size_t& x : m) {
    x = 1 + rng.next_below(m_max);
    total += x;
  }
  while (total < n + 1) {
    m.push_back(m_max);
    total += m_max;
  }
  return m;
}

inline std::vector<Mat> draw_members(CounterRng& rng, std::size_t d, std::size_t n,
                                     const std::vector<std::size_t>& m) {
  std::size_t total = 0;
  for (std::size_t x : m) total += x;
  const double scale = 1.0 / std::sqrt((double)(total * d));
  std::vector<Mat> out;
  out.reserve(m.size());
  for (std::size_t x : m) out.push_back(scale * ginibre(rng, n * d, x * d));
  return out;
}

inline Mat conditioned_square(CounterRng& rng, std::size_t k, double min_ratio = 0.2,
                              int tries = 64) {
  for (int t = 0; t < tries; ++t) {
    Mat g = (1.0 / std::sqrt((double)k)) * ginibre(rng, k, k);
    const Svd s = svd(g);
    if (!s.sigma.empty() && s.sigma.back() > min_ratio * s.sigma.front()) return g;
  }
  return Mat::identity(k);  // deterministic fallback; practically unreachable
}

inline Mat rank_deficient_square(CounterRng& rng, std::size_t k, std::size_t rank) {
  const double scale = 1.0 / std::sqrt((double)k);
  return scale * (ginibre(rng, k, rank) * ginibre(rng, rank, k));
}

inline Mat diag_from(const std::vector<cplx>& entries) {
  Mat m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

inline Mat inv_sqrt_pd(const Mat& s) {
  const Spectrum sp = hermitian_eig(hermitian_part(s), 1.0);
  Mat d(s.rows(), s.rows());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const double lam = std::max(sp.eigenvalues[i], 0.0);
    d(i, i) = lam > 1e-13 * std::max(1.0, sp.eigenvalues.back()) ? 1.0 / std::sqrt(lam) : 0.0;
  }
  return sp.basis * d * sp.basis.adjoint();
}

inline Mat sqrt_psd(const Mat& s) {
  const Spectrum sp = hermitian_eig(hermitian_part(s), 1.0);
  Mat d(s.rows(), s.rows());
  for (std::size_t i = 0; i < s.rows(); ++i)
    d(i, i) = std::sqrt(std::max(sp.eigenvalues[i], 0.0));
  return sp.basis * d * sp.basis.adjoint();
}

// Members m_xi with sum nu_xi m_xi m_xi^* equal to the prescribed PSD target:
// random members, whitened, then colored by the target's square root.
inline std::vector<Mat> tight_members(CounterRng& rng, const Mat& target, std::size_t d,
                                      std::size_t n, const std::vector<std::size_t>& m,
                                      const std::vector<double>& weights) {
  std::vector<Mat> g = draw_members(rng, d, n, m);
  std::vector<Mat> terms;
  terms.reserve(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) terms.push_back(weights[k] * (g[k] * g[k].adjoint()));
  const Mat coloring = sqrt_psd(target) * inv_sqrt_pd(pairwise_sum(std::move(terms)));
  for (Mat& mk : g) mk = coloring * mk;
  return g;
}

inline Mat polynomial_in(CounterRng& rng, const Mat& k, int degree) {
  const std::size_t n = k.rows();
  Mat acc = rng.next_cnormal() * Mat::identity(n);
  Mat power = Mat::identity(n);
  for (int p = 1; p <= degree; ++p) {
    power = power * k;
    acc = acc + rng.next_cnormal() * power;
  }
  return acc;
}

inline Mat conditioned_polynomial_in(CounterRng& rng, const Mat& k, double min_ratio = 0.05,
                                     int tries = 64) {
  for (int t = 0; t < tries; ++t) {
    Mat p = polynomial_in(rng, k, 2);
    const Svd s = svd(p);
    if (!s.sigma.empty() && s.sigma.front() > 1e-6 &&
        s.sigma.back() > min_ratio * s.sigma.front())
      return (1.0 / s.sigma.front()) * p;  // normalized so norms stay desk-scale
  }
  return Mat::identity(k.rows());
}

inline Scenario base_scenario(const std::string& kind, std::size_t d, std::size_t n,
                              std::vector<double> weights, std::vector<std::size_t> m,
                              std::vector<Mat> members) {
  Scenario s;
  s.theorem = kind;
  s.alg_dim = d;
  s.source_len = n;
  s.weights = std::move(weights);
  s.atom_dims = std::move(m);
  s.family = std::move(members);
  return s;
}

// Two-block layout with disjoint atom support: family one lives on the first
// block of atoms, family two on the second, so their cross synthesis is zero.
struct SplitLayout {
  std::vector<double> weights;
  std::vector<std::size_t> atom_dims;
  std::size_t split = 0;  // first atom index of the second block
};

inline SplitLayout draw_split_layout(CounterRng& rng, const TrialDims& dims, std::size_t n) {
  const std::size_t half_max = std::max<std::size_t>(1, dims.atoms_max / 2);
  std::vector<std::size_t> m1 = draw_atom_dims(rng, 1 + rng.next_below(half_max), dims.m_max, n);
  std::vector<std::size_t> m2 = draw_atom_dims(rng, 1 + rng.next_below(half_max), dims.m_max, n);
  SplitLayout lay;
  lay.split = m1.size();
  lay.atom_dims = m1;
  lay.atom_dims.insert(lay.atom_dims.end(), m2.begin(), m2.end());
  lay.weights = draw_weights(rng, lay.atom_dims.size());
  return lay;
}

inline std::vector<Mat> split_members(CounterRng& rng, std::size_t d, std::size_t n,
                                      const SplitLayout& lay, bool first_block) {
  std::vector<Mat> all = draw_members(rng, d, n, lay.atom_dims);
  for (std::size_t k = 0; k < all.size(); ++k) {
    const bool in_first = k < lay.split;
    if (in_first != first_block) all[k] = Mat(all[k].rows(), all[k].cols());
  }
  return all;
}

}  // namespace gen

// Deterministic instance generator: the scenario is a pure function of
// (seed, stream, dims, kind). Constructive recipes enforce each construction's
// hypotheses; the note says which flavor was drawn.
inline GeneratedInstance generate_instance(std::uint64_t seed, std::uint64_t stream,
                                           const TrialDims& dims, const std::string& kind) {
  if (!known_theorem_ids().count(kind))
    throw ParseError("generate_instance: unsupported kind '" + kind + "'");
  CounterRng rng(seed, stream);
  GeneratedInstance out;
  const std::size_t d = 1 + rng.next_below(dims.d_max);
  const std::size_t n = 1 + rng.next_below(dims.n_max);
  const std::size_t nd = n * d;
  const std::uint64_t flavor = stream;

  if (kind == "frame-check" || kind == "1.9") {
    const std::size_t atoms = 1 + rng.next_below(dims.atoms_max);
    std::vector<std::size_t> m = gen::draw_atom_dims(rng, atoms, dims.m_max, n);
    Scenario s = gen::base_scenario(kind, d, n, gen::draw_weights(rng, m.size()), m,
                                    gen::draw_members(rng, d, n, m));
    if (kind == "frame-check") {
      Mat k;
      switch (flavor % 3) {
        case 0:
          k = gen::conditioned_square(rng, nd);
          out.note = "full-rank k";
          break;
        case 1:
          if (nd > 1) {
            k = gen::rank_deficient_square(rng, nd, 1 + rng.next_below(nd - 1));
            out.note = "rank-deficient k";
          } else {
            k = gen::conditioned_square(rng, nd);
            out.note = "full-rank k";
          }
          break;
        default:
          k = rng.next_in(0.5, 2.0) * Mat::identity(nd);
          out.note = "scaled identity k";
          break;
      }
      s.operators.emplace("K", std::move(k));
    } else {
      out.note = "synthesis/analysis instance";
    }
    out.scenario = std::move(s);
    return out;
  }

  if (kind == "2.1" || kind == "2.2") {
    const std::size_t atoms = 1 + rng.next_below(dims.atoms_max);
    std::vector<std::size_t> m = gen::draw_atom_dims(rng, atoms, dims.m_max, n);
    Scenario s = gen::base_scenario(kind, d, n, gen::draw_weights(rng, m.size()), m,
                                    gen::draw_members(rng, d, n, m));
    const Mat k = gen::conditioned_square(rng, nd, kind == "2.2" ? 0.1 : 0.0);
    Mat theta;
    if (kind == "2.1" && flavor % 4 == 3) {
      theta = rng.next_in(0.5, 2.0) * Mat::identity(nd);
      out.note = "scalar theta";
    } else if (kind == "2.2" && flavor % 7 == 6) {
      theta = Mat(nd, nd);
      out.note = "zero theta (hypothesis failure path)";
    } else {
      theta = gen::conditioned_polynomial_in(rng, k);
      out.note = "polynomial theta";
    }
    s.operators.emplace("K", k);
    s.operators.emplace("Theta", std::move(theta));
    out.scenario = std::move(s);
    return out;
  }

  if (kind == "2.3") {
    const std::size_t atoms = 1 + rng.next_below(dims.atoms_max);
    std::vector<std::size_t> m = gen::draw_atom_dims(rng, atoms, dims.m_max, n);
    std::vector<double> weights = gen::draw_weights(rng, m.size());
    const Mat u = random_unitary(rng, nd);
    std::vector<cplx> dvals(nd), evals(nd);
    for (std::size_t i = 0; i < nd; ++i) {
      dvals[i] = std::polar(rng.next_in(0.4, 1.4), rng.next_in(0.0, 6.28));
      evals[i] = std::polar(rng.next_in(0.4, 1.4), rng.next_in(0.0, 6.28));
    }
    const bool surjective = flavor % 2 == 0;
    if (!surjective) {
      const std::size_t kill = 1 + rng.next_below(std::max<std::size_t>(1, nd / 2));
      for (std::size_t i = 0; i < kill && i < nd; ++i) evals[i] = 0.0;
    }
    const Mat k = u.adjoint() * gen::diag_from(dvals) * u;
    const Mat theta = u.adjoint() * gen::diag_from(evals) * u;
    const double delta = rng.next_in(0.5, 2.0);
    const Mat target = delta * (k.adjoint() * k);
    Scenario s = gen::base_scenario(kind, d, n, weights, m,
                                    gen::tight_members(rng, target, d, n, m, weights));
    s.operators.emplace("K", k);
    s.operators.emplace("Theta", theta);
    out.note = surjective ? "surjective theta" : "rank-deficient theta";
    out.scenario = std::move(s);
    return out;
  }

  if (kind == "2.4") {
    const std::size_t atoms = 1 + rng.next_below(dims.atoms_max);
    std::vector<std::size_t> m = gen::draw_atom_dims(rng, atoms, dims.m_max, n);
    Scenario s = gen::base_scenario(kind, d, n, gen::draw_weights(rng, m.size()), m,
                                    gen::draw_members(rng, d, n, m));
    if (flavor % 2 == 0 || nd == 1) {
      const Mat t = gen::conditioned_square(rng, nd);
      const Mat x = gen::conditioned_square(rng, nd);
      s.operators.emplace("T", t);
      s.operators.emplace("Theta", t * x);
      s.operators.emplace("K", gen::conditioned_polynomial_in(rng, x));
      out.note = "full-rank transfer";
    } else {
      const Mat a = random_unitary(rng, nd);
      const std::size_t r = 1 + rng.next_below(nd - 1);
      const std::size_t rk = 1 + rng.next_below(r);
      std::vector<cplx> dv(nd, 0.0), dpv(nd, 0.0), fv(nd, 0.0);
      for (std::size_t i = 0; i < r; ++i) {
        dv[i] = std::polar(rng.next_in(0.4, 1.4), rng.next_in(0.0, 6.28));
        dpv[i] = std::polar(rng.next_in(0.4, 1.4), rng.next_in(0.0, 6.28));
      }
      for (std::size_t i = 0; i < rk; ++i)
        fv[i] = std::polar(rng.next_in(0.4, 1.4), rng.next_in(0.0, 6.28));
      s.operators.emplace("T", a.adjoint() * gen::diag_from(dv) * a);
      s.operators.emplace("Theta", a.adjoint() * gen::diag_from(dpv) * a);
      s.operators.emplace("K", a.adjoint() * gen::diag_from(fv) * a);
      out.note = "rank-deficient transfer";
    }
    out.scenario = std::move(s);
    return out;
  }

  if (kind == "2.5") {
    const std::size_t atoms = 1 + rng.next_below(dims.atoms_max);
    std::vector<std::size_t> m = gen::draw_atom_dims(rng, atoms, dims.m_max, n);
    std::vector<double> weights = gen::draw_weights(rng, m.size());
    Mat k;
    bool factored = false;
    if (flavor % 6 == 5) {
      k = Mat(nd, nd);
      out.note = "zero k (all conditions false)";
    } else if (flavor % 2 == 1 && nd > 1) {
      k = gen::rank_deficient_square(rng, nd, 1 + rng.next_below(nd - 1));
      out.note = "rank-deficient k against a generic family (all conditions false)";
    } else {
      k = gen::conditioned_square(rng, nd);
      factored = true;
      out.note = "factored family (all conditions true)";
    }
    std::vector<Mat> members = gen::draw_members(rng, d, n, m);
    if (factored)
      for (Mat& mem : members) mem = k.adjoint() * mem;
    Scenario s = gen::base_scenario(kind, d, n, weights, m, std::move(members));
    s.operators.emplace("K", std::move(k));
    out.scenario = std::move(s);
    return out;
  }

  if (kind == "2.6") {
    const std::size_t atoms = 1 + rng.next_below(dims.atoms_max);
    std::vector<std::size_t> m = gen::draw_atom_dims(rng, atoms, dims.m_max, n);
    std::vector<double> weights = gen::draw_weights(rng, m.size());
    if (flavor % 2 == 0 || nd == 1) {
      Scenario s = gen::base_scenario(kind, d, n, weights, m, gen::draw_members(rng, d, n, m));
      s.operators.emplace("K1", gen::conditioned_square(rng, nd));
      s.operators.emplace("K2", gen::conditioned_square(rng, nd));
      out.note = "generic sum instance";
      out.scenario = std::move(s);
      return out;
    }
    const bool inclusion = flavor % 4 == 1;
    Mat k1 = inclusion ? gen::conditioned_square(rng, nd)
                       : gen::rank_deficient_square(rng, nd, 1 + rng.next_below(nd - 1));
    Mat k2;
    if (inclusion) {
      k2 = (1.0 / std::sqrt((double)nd)) * ginibre(rng, nd, nd) * k1;
      out.note = "tight instance, range inclusion holds";
    } else {
      k2 = gen::conditioned_square(rng, nd);
      out.note = "tight instance, range inclusion fails";
    }
    const double delta = rng.next_in(0.5, 2.0);
    const Mat target = delta * (k1.adjoint() * k1);
    Scenario s = gen::base_scenario(kind, d, n, weights, m,
                                    gen::tight_members(rng, target, d, n, m, weights));
    s.operators.emplace("K1", std::move(k1));
    s.operators.emplace("K2", std::move(k2));
    out.scenario = std::move(s);
    return out;
  }

  if (kind == "3.1i") {
    const std::size_t atoms = 1 + rng.next_below(dims.atoms_max);
    std::vector<std::size_t> m = gen::draw_atom_dims(rng, atoms, dims.m_max, n);
    std::vector<double> weights = gen::draw_weights(rng, m.size());
    std::vector<Mat> members = gen::draw_members(rng, d, n, m);
    const std::size_t rank = (flavor % 3 == 2 && nd > 1) ? 1 + rng.next_below(nd - 1) : nd;
    const Mat g = ginibre(rng, nd, rank);
    const Mat k1 = (1.0 / (double)nd) * (g * g.adjoint());
    GFrameFamily fam;
    fam.alg_dim = d;
    fam.source_len = n;
    fam.space.weights = weights;
    for (std::size_t idx = 0; idx < members.size(); ++idx)
      fam.members.emplace_back(d, n, m[idx], members[idx]);
    const Mat s_mat = hermitian_part(frame_operator(fam).u);
    const Mat canonical = k1 * pinv(s_mat);
    std::vector<Mat> partner;
    partner.reserve(members.size());
    for (const Mat& mem : members) partner.push_back(canonical * mem);
    Scenario s = gen::base_scenario(kind, d, n, weights, m, std::move(members));
    s.family2 = std::move(partner);
    s.operators.emplace("K1", k1);
    out.note = rank == nd ? "positive k1, canonical dual" : "rank-deficient positive k1";
    out.scenario = std::move(s);
    return out;
  }

  if (kind == "3.1ii") {
    const gen::SplitLayout lay = gen::draw_split_layout(rng, dims, n);
    Scenario s = gen::base_scenario(kind, d, n, lay.weights, lay.atom_dims,
                                    gen::split_members(rng, d, n, lay, true));
    s.family2 = gen::split_members(rng, d, n, lay, false);
    s.operators.emplace("K1", gen::conditioned_square(rng, nd));
    s.operators.emplace("K2", gen::conditioned_square(rng, nd));
    out.note = "disjoint-support pair";
    out.scenario = std::move(s);
    return out;
  }

  if (kind == "3.2") {
    const Mat theta1 = gen::conditioned_square(rng, nd);
    const Mat k1 = gen::conditioned_square(rng, nd);
    const Mat k2 = pinv(theta1) * k1 * theta1;
    Scenario s;
    if (flavor % 2 == 0) {
      const gen::SplitLayout lay = gen::draw_split_layout(rng, dims, n);
      s = gen::base_scenario(kind, d, n, lay.weights, lay.atom_dims,
                             gen::split_members(rng, d, n, lay, true));
      s.family2 = gen::split_members(rng, d, n, lay, false);
      Mat theta2 = flavor % 10 == 4 ? Mat(nd, nd)
                                    : (1.0 / std::sqrt((double)nd)) * ginibre(rng, nd, nd);
      s.operators.emplace("Theta2", std::move(theta2));
      out.note = "orthogonal families, free theta2";
    } else {
      const std::size_t atoms = 1 + rng.next_below(dims.atoms_max);
      std::vector<std::size_t> m = gen::draw_atom_dims(rng, atoms, dims.m_max, n);
      std::vector<double> weights = gen::draw_weights(rng, m.size());
      s = gen::base_scenario(kind, d, n, weights, m, gen::draw_members(rng, d, n, m));
      s.family2 = gen::draw_members(rng, d, n, m);
      // Scale theta2 until the quadratic partner-energy term dominates the
      // cross terms, which makes the positivity hypothesis hold outright.
      const Mat w0 = gen::conditioned_square(rng, nd);
      GFrameFamily f = s.build_family(false);
      GFrameFamily g2 = s.build_family(true);
      const Mat cross = cross_synthesis(f, g2).u;
      const Mat s_g = hermitian_part(frame_operator(g2).u);
      const Mat quad = hermitian_part(w0.adjoint() * s_g * w0);
      const Mat lin = hermitian_part(w0.adjoint() * cross * theta1 +
                                     theta1.adjoint() * cross.adjoint() * w0);
      const double lmin = std::max(lambda_min(quad), 1e-9);
      const double t = 2.0 * spectral_norm(lin) / lmin + 0.1;
      s.operators.emplace("Theta2", t * w0);
      out.note = "generic families, scaled theta2";
    }
    s.operators.emplace("Theta1", theta1);
    s.operators.emplace("K1", k1);
    s.operators.emplace("K2", k2);
    out.scenario = std::move(s);
    return out;
  }

  if (kind == "3.3") {
    const gen::SplitLayout lay = gen::draw_split_layout(rng, dims, n);
    Scenario s = gen::base_scenario(kind, d, n, lay.weights, lay.atom_dims,
                                    gen::split_members(rng, d, n, lay, true));
    s.family2 = gen::split_members(rng, d, n, lay, false);
    const Mat k1 = gen::conditioned_square(rng, nd);
    const Mat theta1 = gen::conditioned_square(rng, nd);
    Mat theta2;
    if (flavor % 2 == 1) {
      theta2 = theta1;
      s.alpha1 = s.alpha2 = rng.next_in(0.3, 2.0);
      out.note = "forced sum route (difference vanishes)";
    } else if (flavor % 6 == 4) {
      theta2 = Mat(nd, nd);
      s.alpha1 = rng.next_in(0.3, 2.0);
      s.alpha2 = rng.next_in(0.3, 2.0);
      out.note = "zero theta2 reduction";
    } else {
      theta2 = gen::conditioned_square(rng, nd);
      s.alpha1 = rng.next_in(0.3, 2.0);
      s.alpha2 = rng.next_in(0.3, 2.0);
      // Keep the difference route well conditioned so condition (ii) holds.
      for (int tries = 0; tries < 64; ++tries) {
        const Svd qs = svd(s.alpha1 * theta1 - s.alpha2 * theta2);
        if (qs.numerical_rank() == nd && qs.sigma.back() > 0.05 * qs.sigma.front()) break;
        theta2 = gen::conditioned_square(rng, nd);
      }
      out.note = "generic difference route";
    }
    s.operators.emplace("K1", k1);
    s.operators.emplace("K2", gen::conditioned_square(rng, nd));
    s.operators.emplace("Theta1", theta1);
    s.operators.emplace("Theta2", theta2);
    out.scenario = std::move(s);
    return out;
  }

  throw ParseError("generate_instance: unsupported kind '" + kind + "'");
}

}  // namespace kgf
