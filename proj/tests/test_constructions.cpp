#include <doctest.h>

#include "test_helpers.hpp"

using namespace kgf;
using helpers::diag;

namespace {

GFrameFamily parseval_identity(std::size_t d, std::size_t n) {
  GFrameFamily f;
  f.alg_dim = d;
  f.source_len = n;
  f.space.weights = {1.0};
  f.members.push_back(AdjOp::identity(d, n));
  return f;
}

GFrameFamily random_frame(CounterRng& rng, std::size_t d, std::size_t n) {
  return helpers::random_family(rng, d, n, {n, 2}, {rng.next_in(0.7, 1.3), rng.next_in(0.7, 1.3)});
}

// Second family on the same measure space as the first.
GFrameFamily partner_frame(CounterRng& rng, const GFrameFamily& f) {
  std::vector<std::size_t> ms;
  for (const AdjOp& m : f.members) ms.push_back(m.dst_len);
  return helpers::random_family(rng, f.alg_dim, f.source_len, ms, f.space.weights);
}

}  // namespace

TEST_CASE("precompose_adjoint: scaling by 2 exactly quadruples both bounds") {
  CounterRng rng(60, 0);
  const std::size_t d = 1, n = 3;
  const GFrameFamily f = random_frame(rng, d, n);
  const AdjOp k(d, n, n, (1.0 / std::sqrt(3.0)) * ginibre(rng, 3, 3));
  const FrameReport base = check_kg_frame(f, k);

  const AdjOp twice(d, n, n, 2.0 * Mat::identity(3));
  const ConstructionResult r = precompose_adjoint(f, k, twice);
  CHECK(r.hypotheses_ok);
  CHECK(r.claimed.lower == doctest::Approx(4.0 * base.optimal_lower).epsilon(1e-12));
  CHECK(r.claimed.upper == doctest::Approx(4.0 * base.bessel_bound).epsilon(1e-12));
  CHECK(r.certified.lower == doctest::Approx(4.0 * base.optimal_lower).epsilon(1e-12));
  CHECK(r.certified.upper == doctest::Approx(4.0 * base.bessel_bound).epsilon(1e-12));
  CHECK(envelope_check(r).ok());
}

TEST_CASE("precompose_adjoint: identity leaves the family untouched") {
  CounterRng rng(61, 0);
  const std::size_t d = 2, n = 2;
  const GFrameFamily f = random_frame(rng, d, n);
  const AdjOp k(d, n, n, (0.5) * ginibre(rng, 4, 4));
  const FrameReport base = check_kg_frame(f, k);
  const ConstructionResult r = precompose_adjoint(f, k, AdjOp::identity(d, n));
  CHECK(r.hypotheses_ok);
  for (std::size_t a = 0; a < f.members.size(); ++a)
    CHECK((r.family.members[a].u - f.members[a].u).max_abs() == 0.0);
  CHECK(r.certified.lower == doctest::Approx(base.optimal_lower).epsilon(1e-12));
  CHECK(r.certified.upper == doctest::Approx(base.bessel_bound).epsilon(1e-12));
  CHECK(r.claimed.lower == doctest::Approx(base.optimal_lower).epsilon(1e-12));
}

TEST_CASE("precompose_adjoint: commuting polynomial stays inside the envelope") {
  CounterRng rng(62, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + rng.next_below(2), n = 1 + rng.next_below(3);
    const GFrameFamily f = random_frame(rng, d, n);
    const Mat kmat = gen::conditioned_square(rng, n * d);
    const Mat theta = gen::conditioned_polynomial_in(rng, kmat);
    const ConstructionResult r =
        precompose_adjoint(f, AdjOp(d, n, n, kmat), AdjOp(d, n, n, theta));
    CHECK(r.hypotheses_ok);
    CHECK(envelope_check(r).ok());
    CHECK(r.report.is_kg_frame);
  }
}

TEST_CASE("recover_frame_check verdicts") {
  CounterRng rng(63, 0);
  const std::size_t d = 1, n = 3;
  const GFrameFamily f = random_frame(rng, d, n);
  const Mat kmat = gen::conditioned_square(rng, 3, 0.3);
  const AdjOp k(d, n, n, kmat);

  const VerdictRecord with_identity = recover_frame_check(f, k, AdjOp::identity(d, n));
  CHECK(with_identity.hypotheses_ok);
  CHECK(with_identity.conclusion);
  CHECK(with_identity.consistent);

  const VerdictRecord with_zero = recover_frame_check(f, k, AdjOp::zero(d, n, n));
  CHECK_FALSE(with_zero.hypotheses_ok);  // composed family collapses
  CHECK(with_zero.consistent);           // implication is vacuous
}

TEST_CASE("tight_surjectivity_equivalence on tiny examples") {
  // Parseval single-atom family, K = I.
  const GFrameFamily f = parseval_identity(1, 2);
  const AdjOp k = AdjOp::identity(1, 2);

  const VerdictRecord both_true = tight_surjectivity_equivalence(f, k, AdjOp::identity(1, 2));
  CHECK(both_true.check("theta_surjective"));
  CHECK(both_true.check("composed_is_frame"));
  CHECK(both_true.consistent);

  const AdjOp defective(1, 2, 2, diag({1.0, 0.0}));
  const VerdictRecord both_false = tight_surjectivity_equivalence(f, k, defective);
  CHECK_FALSE(both_false.check("theta_surjective"));
  CHECK_FALSE(both_false.check("composed_is_frame"));
  CHECK(both_false.consistent);

  // Not tight: two distinct-weight identity atoms for K = diag(1, 0).
  GFrameFamily loose = parseval_identity(1, 2);
  loose.members[0] = AdjOp(1, 2, 2, diag({1.0, 0.4}));
  CHECK_THROWS_AS(
      tight_surjectivity_equivalence(loose, AdjOp::identity(1, 2), AdjOp::identity(1, 2)),
      NotTight);
}

TEST_CASE("transfer_frame: theta equal to t reduces to a range projection") {
  CounterRng rng(64, 0);
  const std::size_t d = 1, n = 3;
  const GFrameFamily f = random_frame(rng, d, n);
  const Mat kmat = gen::conditioned_square(rng, 3);
  AdjOp t(d, n, n, gen::conditioned_square(rng, 3));

  // Invertible t with theta = t: everything plays on the full space and the
  // claimed constants match the certified ones.
  ConstructionResult r = transfer_frame(f, AdjOp(d, n, n, kmat), t, t);
  CHECK(r.hypotheses_ok);
  CHECK(envelope_check(r).ok());
  // P is the identity on range(t) here, so claimed == base bounds.
  CHECK(r.claimed.lower == doctest::Approx(r.metrics.at("base_lower_on_range_t")).epsilon(1e-7));
  CHECK(r.claimed.upper == doctest::Approx(r.metrics.at("base_upper_on_range_t")).epsilon(1e-7));
}

TEST_CASE("transfer_frame: shared-kernel construction stays inside the envelope") {
  CounterRng rng(65, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t d = 1, n = 3;
    const GFrameFamily f = random_frame(rng, d, n);
    const Mat a = random_unitary(rng, 3);
    std::vector<cplx> dv(3, 0.0), dpv(3, 0.0), fv(3, 0.0);
    for (int i = 0; i < 2; ++i) {
      dv[i] = std::polar(rng.next_in(0.4, 1.4), rng.next_in(0.0, 6.28));
      dpv[i] = std::polar(rng.next_in(0.4, 1.4), rng.next_in(0.0, 6.28));
    }
    fv[0] = std::polar(rng.next_in(0.4, 1.4), rng.next_in(0.0, 6.28));
    const AdjOp t(d, n, n, a.adjoint() * gen::diag_from(dv) * a);
    const AdjOp theta(d, n, n, a.adjoint() * gen::diag_from(dpv) * a);
    const AdjOp k(d, n, n, a.adjoint() * gen::diag_from(fv) * a);
    const ConstructionResult r = transfer_frame(f, k, t, theta);
    CHECK(r.hypotheses_ok);
    CHECK(envelope_check(r).ok());
    CHECK(r.report.is_kg_frame);
  }
}

TEST_CASE("range_equality_characterization: Parseval family with K = I") {
  const GFrameFamily f = parseval_identity(2, 2);
  const RangeEqResult r = range_equality_characterization(f, AdjOp::identity(2, 2));
  CHECK(r.verdict.check("range_equality"));
  CHECK(r.verdict.check("two_sided_sandwich"));
  CHECK(r.verdict.check("factorization"));
  CHECK(r.verdict.consistent);
  REQUIRE(r.factor_family.has_value());
  // The partner family reproduces the original members through K^*.
  for (std::size_t a = 0; a < f.members.size(); ++a)
    CHECK((r.factor_family->members[a].u - f.members[a].u).max_abs() < 1e-9);
}

TEST_CASE("range_equality_characterization: zero K against a nonzero family") {
  CounterRng rng(66, 0);
  const GFrameFamily f = random_frame(rng, 1, 2);
  const RangeEqResult r = range_equality_characterization(f, AdjOp::zero(1, 2, 2));
  CHECK_FALSE(r.verdict.check("range_equality"));
  CHECK_FALSE(r.verdict.check("two_sided_sandwich"));
  CHECK_FALSE(r.verdict.check("factorization"));
  CHECK(r.verdict.consistent);
}

TEST_CASE("range_equality_characterization: forward construction round-trips") {
  CounterRng rng(67, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t d = 1 + rng.next_below(2), n = 1 + rng.next_below(3);
    const std::size_t nd = n * d;
    Mat kmat = gen::conditioned_square(rng, nd);
    if (trial % 2 == 1 && nd > 1)
      kmat = gen::rank_deficient_square(rng, nd, 1 + rng.next_below(nd - 1));
    GFrameFamily f = random_frame(rng, d, n);
    for (AdjOp& m : f.members) m = AdjOp(d, n, m.dst_len, kmat.adjoint() * m.u);
    const RangeEqResult r = range_equality_characterization(f, AdjOp(d, n, n, kmat));
    CHECK(r.verdict.check("range_equality"));
    CHECK(r.verdict.check("two_sided_sandwich"));
    CHECK(r.verdict.check("factorization"));
    CHECK(r.verdict.consistent);
    REQUIRE(r.factor_family.has_value());
    for (std::size_t a = 0; a < f.members.size(); ++a) {
      const Mat rebuilt = kmat.adjoint() * r.factor_family->members[a].u;
      CHECK((rebuilt - f.members[a].u).max_abs() <
            1e-9 * std::max(1.0, f.members[a].u.max_abs()));
    }
  }
}

TEST_CASE("k_sum_frame: identity operators on a Parseval family") {
  const GFrameFamily f = parseval_identity(1, 2);
  const ConstructionResult r = k_sum_frame(f, AdjOp::identity(1, 2), AdjOp::identity(1, 2));
  CHECK(r.hypotheses_ok);
  // S = I, K1 + K2 = 2I: optimal lower is 1/4.
  CHECK(r.certified.lower == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(envelope_check(r).ok());
  CHECK(r.check("tight_for_k1"));
  CHECK(r.check("range_k2_in_k1"));
  CHECK(r.check("tight_equivalence"));
}

TEST_CASE("k_sum_frame: zero second operator reduces to the first") {
  CounterRng rng(68, 0);
  const GFrameFamily f = random_frame(rng, 1, 2);
  const AdjOp k1(1, 2, 2, gen::conditioned_square(rng, 2));
  const ConstructionResult r = k_sum_frame(f, k1, AdjOp::zero(1, 2, 2));
  CHECK(r.hypotheses_ok);  // the zero operator is vacuously certified
  const FrameReport base = check_kg_frame(f, k1);
  CHECK(r.certified.lower == doctest::Approx(base.optimal_lower).epsilon(1e-9));
}

TEST_CASE("dual_sum: Parseval family against itself") {
  const GFrameFamily f = parseval_identity(2, 2);
  const ConstructionResult r = dual_sum(f, f, AdjOp::identity(2, 2));
  CHECK(r.hypotheses_ok);
  CHECK(r.check("frame_operator_identity"));
  CHECK(r.certified.lower == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r.certified.upper == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(envelope_check(r).ok());
  // The additive upper claim B1 + B2 = 2 is genuinely exceeded here (certified 4).
  CHECK(r.certified.upper > r.claimed.upper + 1.0);
}

TEST_CASE("dual_sum: zero partner with zero K1 degenerates gracefully") {
  CounterRng rng(69, 0);
  const GFrameFamily f = random_frame(rng, 1, 2);
  GFrameFamily zero = f;
  for (AdjOp& m : zero.members) m = AdjOp::zero(1, 2, m.dst_len);
  const ConstructionResult r = dual_sum(f, zero, AdjOp::zero(1, 2, 2));
  CHECK(r.check("frame_operator_identity"));
  CHECK((frame_operator(r.family).u - frame_operator(f).u).max_abs() < 1e-12);
}

TEST_CASE("dual_sum rejects non-positive or non-dual inputs") {
  CounterRng rng(70, 0);
  const GFrameFamily f = parseval_identity(1, 2);
  CHECK_THROWS_AS(dual_sum(f, f, AdjOp(1, 2, 2, diag({1.0, -1.0}))), NotPositive);
  // Positive K1 that is not the cross synthesis of (f, f).
  CHECK_THROWS_AS(dual_sum(f, f, AdjOp(1, 2, 2, diag({0.5, 0.5}))), DualityFailed);
}

TEST_CASE("orthogonal_sum: disjoint blocks add energies") {
  CounterRng rng(71, 0);
  const std::size_t d = 1, n = 2;
  GFrameFamily f, g;
  f.alg_dim = g.alg_dim = d;
  f.source_len = g.source_len = n;
  f.space.weights = g.space.weights = {1.0, 0.8};
  f.members.emplace_back(d, n, 2, ginibre(rng, 2, 2));
  f.members.emplace_back(d, n, 2, Mat(2, 2));
  g.members.emplace_back(d, n, 2, Mat(2, 2));
  g.members.emplace_back(d, n, 2, ginibre(rng, 2, 2));
  const AdjOp k1(d, n, n, gen::conditioned_square(rng, 2));
  const AdjOp k2(d, n, n, gen::conditioned_square(rng, 2));
  const ConstructionResult r = orthogonal_sum(f, g, k1, k2);
  CHECK(r.check("energy_additivity"));
  CHECK(r.hypotheses_ok);
  CHECK(envelope_check(r).ok());
  CHECK((frame_operator(r.family).u - (frame_operator(f).u + frame_operator(g).u)).max_abs() <
        1e-12);
}

TEST_CASE("orthogonal_sum: zero partner with zero k2 reduces to the first family") {
  CounterRng rng(78, 0);
  const GFrameFamily f = random_frame(rng, 1, 2);
  GFrameFamily zero = f;
  for (AdjOp& m : zero.members) m = AdjOp::zero(1, 2, m.dst_len);
  const AdjOp k1(1, 2, 2, gen::conditioned_square(rng, 2));
  const ConstructionResult r = orthogonal_sum(f, zero, k1, AdjOp::zero(1, 2, 2));
  CHECK(r.hypotheses_ok);  // zero comparison operator is vacuously certified
  CHECK(r.check("energy_additivity"));
  const FrameReport base = check_kg_frame(f, k1);
  CHECK(r.certified.lower == doctest::Approx(base.optimal_lower).epsilon(1e-9));
  CHECK(r.certified.upper == doctest::Approx(base.bessel_bound).epsilon(1e-12));
  CHECK(!r.discrepancy_notes.empty());  // the degenerate second bound is called out
}

TEST_CASE("orthogonal_sum rejects overlapping synthesis") {
  CounterRng rng(72, 0);
  const GFrameFamily f = parseval_identity(1, 2);
  CHECK_THROWS_AS(orthogonal_sum(f, f, AdjOp::identity(1, 2), AdjOp::identity(1, 2)),
                  NotOrthogonal);
}

TEST_CASE("weighted_operator_sum: degenerate second term reduces to the family") {
  CounterRng rng(73, 0);
  const std::size_t d = 1, n = 3;
  const GFrameFamily f = random_frame(rng, d, n);
  const GFrameFamily g = partner_frame(rng, f);
  const AdjOp k1(d, n, n, gen::conditioned_square(rng, 3));
  const ConstructionResult r = weighted_operator_sum(
      f, g, k1, k1, AdjOp::identity(d, n), AdjOp::zero(d, n, n));
  CHECK(r.hypotheses_ok);
  const FrameReport base = check_kg_frame(f, k1);
  CHECK(r.certified.lower == doctest::Approx(base.optimal_lower).epsilon(1e-12));
  CHECK(r.certified.upper == doctest::Approx(base.bessel_bound).epsilon(1e-12));
  CHECK(r.claimed.lower == doctest::Approx(base.optimal_lower).epsilon(1e-9));
  for (std::size_t a = 0; a < f.members.size(); ++a)
    CHECK((r.family.members[a].u - f.members[a].u).max_abs() == 0.0);
}

TEST_CASE("weighted_operator_sum: doubled family via equal inputs") {
  CounterRng rng(74, 0);
  const std::size_t d = 1, n = 2;
  const GFrameFamily f = random_frame(rng, d, n);
  const AdjOp k1(d, n, n, gen::conditioned_square(rng, 2));
  const ConstructionResult r = weighted_operator_sum(
      f, f, k1, k1, AdjOp::identity(d, n), AdjOp::identity(d, n));
  CHECK(r.hypotheses_ok);  // the cross-plus-energy operator is 2 S + S >= 0
  for (std::size_t a = 0; a < f.members.size(); ++a)
    CHECK((r.family.members[a].u - 2.0 * f.members[a].u).max_abs() < 1e-14);
  CHECK(envelope_check(r).ok());
}

TEST_CASE("scalar_weighted_sum: zero second term reduces to a scaled precomposition") {
  CounterRng rng(75, 0);
  const std::size_t d = 1, n = 2;
  const GFrameFamily f = random_frame(rng, d, n);
  const GFrameFamily g = partner_frame(rng, f);
  const AdjOp k1(d, n, n, gen::conditioned_square(rng, 2));
  const AdjOp k2(d, n, n, gen::conditioned_square(rng, 2));
  const AdjOp theta1(d, n, n, gen::conditioned_square(rng, 2));
  const ConstructionResult r = scalar_weighted_sum(f, g, k1, k2, theta1,
                                                   AdjOp::zero(d, n, n), 1.0, 1.0);
  CHECK(r.hypotheses_ok);
  const ConstructionResult pre = precompose_adjoint(f, k2, theta1);
  CHECK(r.certified.upper == doctest::Approx(pre.certified.upper).epsilon(1e-12));
  CHECK(r.certified.lower == doctest::Approx(pre.certified.lower).epsilon(1e-9));
  CHECK(envelope_check(r).ok());
}

TEST_CASE("scalar_weighted_sum: vanishing difference forces the sum route") {
  CounterRng rng(76, 0);
  const std::size_t d = 1, n = 2;
  GFrameFamily f, g;
  f.alg_dim = g.alg_dim = d;
  f.source_len = g.source_len = n;
  f.space.weights = g.space.weights = {1.0, 1.0};
  f.members.emplace_back(d, n, 2, ginibre(rng, 2, 2));
  f.members.emplace_back(d, n, 2, Mat(2, 2));
  g.members.emplace_back(d, n, 2, Mat(2, 2));
  g.members.emplace_back(d, n, 2, ginibre(rng, 2, 2));
  const AdjOp k1(d, n, n, gen::conditioned_square(rng, 2));
  const AdjOp k2(d, n, n, gen::conditioned_square(rng, 2));
  const AdjOp theta = AdjOp::identity(d, n);
  const ConstructionResult r = scalar_weighted_sum(f, g, k1, k2, theta, theta, 1.0, 1.0);
  CHECK_FALSE(r.check("condition_ii"));  // difference route collapses to zero
  CHECK(r.check("condition_i"));
  CHECK(r.hypotheses_ok);
  CHECK(envelope_check(r).ok());
  CHECK(r.metrics.at("route_is_q") == 0.0);
}

TEST_CASE("construction dimension errors throw") {
  CounterRng rng(77, 0);
  const GFrameFamily f = parseval_identity(1, 2);
  CHECK_THROWS_AS(precompose_adjoint(f, AdjOp::identity(1, 3), AdjOp::identity(1, 2)),
                  DimensionMismatch);
  CHECK_THROWS_AS(precompose_adjoint(f, AdjOp::identity(1, 2), AdjOp::identity(1, 3)),
                  DimensionMismatch);
  GFrameFamily mismatched = f;
  mismatched.members[0] = AdjOp::zero(1, 2, 3);
  CHECK_THROWS_AS(sum_family(f, mismatched), ShapeMismatch);
}
