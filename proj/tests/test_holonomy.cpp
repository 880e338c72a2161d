#include <gtest/gtest.h>

#include <cmath>

#include "fnmetric/holonomy.hpp"

using namespace fnmetric;

namespace {

FNPoint point_on(const PantsDecomposition& P, double l, double tw) {
  FNPoint X;
  for (const auto& [c, rec] : P.curves())
    X.set_base(c, {l, rec.kind == CurveKind::Interior ? tw : 0.0});
  return X;
}

}  // namespace

TEST(Words, ParseAndFormat) {
  const Word w = parse_word("A B^-1 t:a^2");
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[1].power, -1);
  EXPECT_EQ(w[2].gen, "t:a");
  EXPECT_EQ(parse_word(format_word(w)), w);
  EXPECT_EQ(format_word(inverse(parse_word("A B"))), "B^-1 A^-1");
}

TEST(BuildRep, TorusIsConsistent) {
  const HolonomyRep rep = build_torus_rep({0.8, 1.1, 0.3});
  EXPECT_TRUE(rep.check().empty());
  EXPECT_NEAR(rep.length(rep.word("alpha")), 1.1, 1e-12);
  EXPECT_NEAR(rep.length(rep.word("boundary")), 0.8, 1e-10);
}

TEST(BuildRep, SphereIsConsistent) {
  const HolonomyRep rep = build_sphere_rep({{0.5, 1.0, 1.5, 2.0}, 0.7, 1.3});
  EXPECT_TRUE(rep.check().empty());
  EXPECT_NEAR(rep.length(rep.word("alpha")), 0.7, 1e-12);
}

TEST(BuildRep, LengthsAndTwistsReadBack) {
  const auto P = five_holed_sphere();
  FNPoint X = point_on(P, 1.0, 0.0);
  X.set_base("a", {0.9, 0.4});
  X.set_base("C1", {1.4, -0.7});
  X.set_base("D2", {0.3, 0.0});
  const HolonomyRep rep = build_rep(P, X);
  EXPECT_TRUE(rep.check().empty());
  for (std::size_t p = 0; p < P.pants().size(); ++p)
    for (int k = 0; k < 3; ++k)
      EXPECT_NEAR(length_of(rep.cuff(p, k)), X.length(P.pants()[p].cuffs[k]), 1e-10);
  EXPECT_NEAR(measured_twist(rep, "a"), 0.4, 1e-10);
  EXPECT_NEAR(measured_twist(rep, "C1"), -0.7, 1e-10);
}

TEST(BuildRep, ConjugationPreservesTraces) {
  const HolonomyRep rep = build_sphere_rep({{1.0, 1.0, 1.0, 1.0}, 1.2, -0.8});
  const Mat2 by = Mat2{2.0, 1.0, 0.3, 0.65}.normalized();
  const HolonomyRep c = conjugated(rep, by);
  EXPECT_TRUE(c.check().empty());
  for (const auto& [n, w] : rep.words)
    EXPECT_NEAR(c.eval(w).trace(), rep.eval(w).trace(), 1e-10 * std::abs(rep.eval(w).trace())) << n;
}

TEST(BuildRep, CuspGivesParabolicHole) {
  const HolonomyRep rep = build_torus_rep({0.0, 1.0, 0.5});
  EXPECT_TRUE(rep.check().empty());
  EXPECT_NEAR(std::abs(rep.eval(rep.word("boundary")).trace()), 2.0, 1e-9);
}

TEST(BuildRep, CheckReportsBrokenRelation) {
  HolonomyRep rep = build_torus_rep({0.8, 1.1, 0.3});
  rep.generators["P0.0"] = rep.generators["P0.0"] * translation(0.1);
  EXPECT_FALSE(rep.check().empty());
}

TEST(MeasureDual, TorusClosedFormForZeroTwist) {
  // with no twist the dual satisfies cosh(l'/2) = sqrt((cosh l + cosh(l0/2)) / 2) / sinh(l/2)
  for (double l : {0.3, 1.0, 2.5}) {
    const DualMeasurement m = measure_dual(TorusMoveInput{0.0, l, 0.0});
    const double want = 2.0 * std::acosh(std::sqrt(0.5 * (std::cosh(l) + 1.0)) / std::sinh(0.5 * l));
    EXPECT_NEAR(m.l_prime / want, 1.0, 1e-12);
    EXPECT_NEAR(m.tau_prime, 0.0, 1e-8);
  }
}

TEST(MeasureDual, ResidualsSmall) {
  const DualMeasurement m = measure_dual(SphereMoveInput{{0.5, 1.0, 1.5, 2.0}, 0.7, 1.3});
  EXPECT_LT(m.residual, 1e-9);
  EXPECT_LT(m.sign_residual, 1e-9);
}

TEST(Shear, BoundaryLengthIsAbsShearSum) {
  const ShearTriple s{0.8, -0.3, 0.6};
  const HolonomyRep rep = shear_to_rep(s);
  EXPECT_TRUE(rep.check().empty());
  EXPECT_NEAR(rep.length(rep.word("boundary")), std::abs(0.8 - 0.3 + 0.6), 1e-10);
}

TEST(Shear, ZeroSumGivesCusp) {
  const HolonomyRep rep = shear_to_rep({0.8, -0.3, -0.5});
  EXPECT_NEAR(std::abs(rep.eval(rep.word("boundary")).trace()), 2.0, 1e-12);
  EXPECT_TRUE(rep.check().empty());
}

TEST(Shear, NonFiniteRejected) { EXPECT_THROW(shear_to_rep({INFINITY, 0.0, 0.0}), Error); }
