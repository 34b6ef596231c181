#include <gtest/gtest.h>

#include <random>

#include "bakerfr/core_maps.hpp"
#include "oracles.hpp"

using namespace bakerfr;
using oracle::q;

namespace {

using P = PhasePoint<Rational>;

std::vector<P> prime_points(std::size_t count, std::uint64_t seed) {
  constexpr std::int64_t prime = 1000003;
  std::mt19937_64 rng(seed);
  std::vector<P> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back({q(1 + static_cast<std::int64_t>(rng() % (prime - 1)), prime),
                   q(1 + static_cast<std::int64_t>(rng() % (prime - 1)), prime)});
  return out;
}

}  // namespace

TEST(SimpleBaker, SymmetricCaseIsAreaPreserving) {
  const auto m = build_simple_baker(q(1, 2));
  for (const auto& b : m.branches()) EXPECT_EQ(b.jacobian(), 1);
}

TEST(SimpleBaker, JacobiansAtTwoThirds) {
  const auto m = build_simple_baker(q(2, 3));
  EXPECT_EQ(m.jacobian_at({q(1, 3), q(1, 2)}), q(1, 2));
  EXPECT_EQ(m.jacobian_at({q(5, 6), q(1, 2)}), 2);
}

TEST(SimpleBaker, PointThroughBranchA) {
  const auto m = build_simple_baker(q(3, 4));
  EXPECT_EQ(m.apply({q(1, 2), q(1, 2)}), (P{q(2, 3), q(1, 8)}));
  EXPECT_EQ(m.region_of({q(1, 2), q(1, 2)}), Region::A);
}

TEST(SimpleBaker, RejectsParameterOutsideUnitInterval) {
  EXPECT_THROW(build_simple_baker(q(0)), ConstructionError);
  EXPECT_THROW(build_simple_baker(q(1)), ConstructionError);
  EXPECT_THROW(build_simple_baker(q(3, 2)), ConstructionError);
}

TEST(SimpleBaker, StableUnstableReciprocity) {
  const Rational l = q(2, 3);
  const auto m = build_simple_baker(l);
  const auto& a = m.branches()[0];
  const auto& b = m.branches()[1];
  EXPECT_EQ(a.stable_factor(), 1 / b.unstable_factor());
  EXPECT_EQ(b.stable_factor(), 1 / a.unstable_factor());
  EXPECT_EQ(a.unstable_factor(), 1 / l);
  EXPECT_EQ(a.stable_factor(), 1 - l);
}

TEST(GeneralizedBaker, EquilibriumHasUnitJacobians) {
  const auto m = build_generalized_baker(q(1, 4));
  for (const auto& b : m.branches()) EXPECT_EQ(b.jacobian(), 1);
}

TEST(GeneralizedBaker, JacobiansAtOneEighth) {
  const auto m = build_generalized_baker(q(1, 8));
  EXPECT_EQ(m.jacobian_at({q(1, 16), q(1, 3)}), 1);
  EXPECT_EQ(m.jacobian_at({q(1, 4), q(1, 3)}), q(2, 3));
  EXPECT_EQ(m.jacobian_at({q(5, 8), q(1, 3)}), q(3, 2));
  EXPECT_EQ(m.jacobian_at({q(7, 8), q(1, 3)}), 1);
}

TEST(GeneralizedBaker, OriginMapsThroughA) {
  const auto m = build_generalized_baker(q(1, 8));
  EXPECT_EQ(m.apply({q(0), q(0)}), (P{q(1, 2), q(3, 4)}));
  EXPECT_EQ(m.apply_inverse({q(1, 2), q(3, 4)}), (P{q(0), q(0)}));
}

TEST(GeneralizedBaker, RejectsParameterOutsideRange) {
  EXPECT_THROW(build_generalized_baker(q(0)), ConstructionError);
  EXPECT_THROW(build_generalized_baker(q(1, 3)), ConstructionError);
  EXPECT_NO_THROW(build_generalized_baker(q(1, 4)));
}

TEST(GeneralizedBaker, BoundaryConvention) {
  const Rational l = q(1, 8);
  const auto m = build_generalized_baker(l);
  EXPECT_EQ(m.region_of({l, q(1, 2)}), Region::B);
  EXPECT_EQ(m.region_of({q(1, 2), q(1, 2)}), Region::C);
  EXPECT_EQ(m.region_of({q(3, 4), q(0)}), Region::D);
  EXPECT_EQ(m.region_of({q(1), q(1)}), Region::D);
}

TEST(GeneralizedBaker, MatchesHandWrittenFormula) {
  for (const Rational& l : {q(1, 8), q(1, 5), q(3, 13)}) {
    const auto m = build_generalized_baker(l);
    for (const auto& p : prime_points(200, 3)) {
      const auto o = oracle::generalized_baker(l, {p.x, p.y});
      EXPECT_EQ(m.apply(p), (P{o.first, o.second}));
    }
  }
}

TEST(GeneralizedBaker, ImagesTileTheSquare) {
  const auto m = build_generalized_baker(q(1, 8));
  EXPECT_TRUE(m.invertible());
  Rational area(0);
  for (const auto& b : m.branches()) area += b.image().area();
  EXPECT_EQ(area, 1);
}

TEST(Involution, SimpleMirror) {
  const auto g = build_involution(MapKind::Simple).cast<double>();
  const auto p = g.apply({0.3, 0.4});
  EXPECT_DOUBLE_EQ(p.x, 0.6);
  EXPECT_DOUBLE_EQ(p.y, 0.7);
}

TEST(Involution, GeneralizedValues) {
  const auto g = build_involution(MapKind::Generalized);
  // Corrected form: the x-components of the two printed branches are exchanged.
  EXPECT_EQ(g.apply({q(1, 4), q(1, 2)}), (P{q(3, 4), q(1, 2)}));
  const auto o = oracle::generalized_involution({q(1, 4), q(1, 2)});
  EXPECT_EQ(g.apply({q(1, 4), q(1, 2)}), (P{o.first, o.second}));
  const P p{q(7, 10), q(1, 5)};
  EXPECT_EQ(g.apply(g.apply(p)), p);
  EXPECT_EQ(g.apply_inverse(p), g.apply(p));
  EXPECT_EQ(g.region_of({q(1, 2), q(0)}), Region::B);
}

TEST(Involution, UnitJacobian) {
  for (const auto kind : {MapKind::Simple, MapKind::Generalized})
    for (const auto& b : build_involution(kind).branches()) EXPECT_EQ(b.jacobian(), 1);
}

TEST(Perturbation, FlipsLowerHalfOfStripOnly) {
  const Rational l = q(1, 8);
  const auto n = build_perturbation_N(l, q(1, 4), q(1, 16));
  EXPECT_EQ(n.apply({q(9, 32), q(1, 4)}), (P{q(9, 32), q(3, 4)}));
  EXPECT_EQ(n.apply({q(9, 32), q(3, 4)}), (P{q(9, 32), q(3, 4)}));
  EXPECT_EQ(n.apply({q(1, 8), q(1, 4)}), (P{q(1, 8), q(1, 4)}));
  EXPECT_EQ(n.apply({q(3, 5), q(1, 5)}), (P{q(3, 5), q(1, 5)}));
  EXPECT_FALSE(n.invertible());
  EXPECT_THROW(n.apply_inverse({q(9, 32), q(3, 4)}), UnsupportedOperation);
}

TEST(Perturbation, StripMustLieInB) {
  const Rational l = q(1, 8);
  EXPECT_THROW(build_perturbation_N(l, q(1, 16), q(1, 32)), ConstructionError);
  EXPECT_THROW(build_perturbation_N(l, q(7, 16), q(1, 16)), ConstructionError);
  EXPECT_NO_THROW(build_perturbation_N(l, q(1, 4), q(0)));
}

TEST(Composite, EqualsSequentialApplication) {
  const Rational l = q(1, 8);
  const auto strip = default_strip(l);
  const auto k = build_composite_K(l, strip);
  const auto m = build_generalized_baker(l);
  const auto n = build_perturbation_N(l, strip.x_tilde, strip.eps);
  for (const auto& p : prime_points(300, 11)) EXPECT_EQ(k.apply(p), m.apply(n.apply(p)));
  EXPECT_FALSE(k.invertible());
  EXPECT_THROW(k.apply_inverse({q(1, 3), q(1, 3)}), UnsupportedOperation);
}

TEST(Composite, ZeroWidthStripGivesM) {
  const Rational l = q(1, 8);
  const auto k = build_composite_K(l, {q(1, 4), q(0)});
  const auto m = build_generalized_baker(l);
  for (const auto& p : prime_points(100, 5)) EXPECT_EQ(k.apply(p), m.apply(p));
}

TEST(Inverse, RoundTripOnRandomPoints) {
  for (const auto& m : {build_simple_baker(q(2, 3)), build_generalized_baker(q(1, 8))})
    for (const auto& p : prime_points(100, 17)) EXPECT_EQ(m.apply_inverse(m.apply(p)), p);
}

TEST(Reversibility, GMGMOnExamplePoint) {
  const auto m = build_generalized_baker(q(1, 8));
  const auto g = build_involution(MapKind::Generalized);
  const P p{q(3, 10), q(3, 5)};
  EXPECT_EQ(g.apply(m.apply(p)), (P{q(3, 5), q(8, 15)}));
  EXPECT_EQ(g.apply(m.apply(g.apply(m.apply(p)))), p);
}

TEST(Reversibility, SimpleMapSuite) {
  const auto rep = verify_reversibility(build_simple_baker(q(2, 3)), build_involution(MapKind::Simple),
                                        prime_points(1000, 1));
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.points_checked, 1000U);
  ASSERT_EQ(rep.conjugacy.size(), 2U);
  EXPECT_EQ(rep.conjugacy[0].second, Region::B);
  EXPECT_EQ(rep.conjugacy[1].second, Region::A);
}

TEST(Reversibility, GeneralizedMapSuite) {
  const auto rep = verify_reversibility(build_generalized_baker(q(1, 8)), build_involution(MapKind::Generalized),
                                        prime_points(1000, 2));
  EXPECT_TRUE(rep.passed());
  const std::vector<std::pair<Region, std::optional<Region>>> expected{
      {Region::A, Region::A}, {Region::B, Region::C}, {Region::C, Region::B}, {Region::D, Region::D}};
  EXPECT_EQ(rep.conjugacy, expected);
}

TEST(Reversibility, CompositeIsDetectedAsIrreversible) {
  const Rational l = q(1, 8);
  const auto strip = default_strip(l);
  const auto rep = verify_reversibility(build_composite_K(l, strip), build_involution(MapKind::Generalized),
                                        prime_points(1000, 4));
  EXPECT_FALSE(rep.pointwise_ok());
  for (const auto& v : rep.violations) {
    if (v.identity != "GMGM=I") continue;
    // every failure traces back to the strip
    const auto gk = build_involution(MapKind::Generalized).apply(build_composite_K(l, strip).apply(v.point));
    const bool start_in_strip = v.point.x >= strip.x_tilde && v.point.x < strip.x_tilde + strip.eps;
    const bool back_in_strip = gk.x >= strip.x_tilde && gk.x < strip.x_tilde + strip.eps;
    EXPECT_TRUE(start_in_strip || back_in_strip);
  }
  EXPECT_TRUE(rep.conjugacy_ok);
}

TEST(Reversibility, WrongInvolutionFails) {
  // The involution with the two x-components exchanged back.
  std::vector<AffineBranch<Rational>> b;
  b.emplace_back(Rect<Rational>{q(0), q(1, 2), q(0), q(1)},
                 AffineAction<Rational>{q(0), q(-1, 2), q(-2), q(0), q(1, 2), q(1)}, Region::A);
  b.emplace_back(Rect<Rational>{q(1, 2), q(1), q(0), q(1)},
                 AffineAction<Rational>{q(0), q(-1, 2), q(-2), q(0), q(1), q(2)}, Region::B);
  const PiecewiseAffineMap<Rational> g("printed_G", std::move(b));
  const auto rep = verify_reversibility(build_generalized_baker(q(1, 8)), g, prime_points(50, 9));
  EXPECT_FALSE(rep.passed());
}

TEST(Construction, RejectsOverlapAndGaps) {
  std::vector<AffineBranch<Rational>> b;
  b.emplace_back(Rect<Rational>{q(0), q(1, 2), q(0), q(1)}, AffineAction<Rational>::identity(), Region::A);
  EXPECT_THROW(PiecewiseAffineMap<Rational>("gap", b), ConstructionError);
  b.emplace_back(Rect<Rational>{q(1, 4), q(1), q(0), q(1)}, AffineAction<Rational>::identity(), Region::B);
  EXPECT_THROW(PiecewiseAffineMap<Rational>("overlap", b), ConstructionError);
}

TEST(Construction, DeclaredJacobianIsChecked) {
  EXPECT_THROW(AffineBranch<Rational>(Rect<Rational>{q(0), q(1), q(0), q(1)},
                                      AffineAction<Rational>{q(2), q(0), q(0), q(1), q(0), q(0)}, Region::A, q(1)),
               ConstructionError);
}

TEST(Iteration, StaysRationalAndInside) {
  const auto m = build_generalized_baker(q(1, 8));
  P p{q(1, 3), q(1, 5)};
  for (int k = 0; k < 40; ++k) {
    p = m.apply(p);
    EXPECT_GE(p.x, 0);
    EXPECT_LE(p.x, 1);
    EXPECT_GE(p.y, 0);
    EXPECT_LE(p.y, 1);
  }
  EXPECT_EQ(iterate_inverse(m, iterate(m, P{q(1, 3), q(1, 5)}, 40), 40), (P{q(1, 3), q(1, 5)}));
}
