#include <gtest/gtest.h>

#include <cmath>

#include "fnmetric/hyperbolic_core.hpp"

using namespace fnmetric;

namespace {

// Distance between two disjoint axes, read off their endpoints.
double axis_distance(const Mat2& g, const Mat2& h) {
  const auto a = fixed_points(g);
  const Mat2 m = to_axis(a[0], a[1]);
  const auto b = fixed_points(h);
  const double p = apply(m, b[0]), q = apply(m, b[1]);
  return std::acosh(std::abs(p + q) / std::abs(p - q));
}

}  // namespace

TEST(Mat2, InverseAndDeterminant) {
  const Mat2 m{2.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(m.det(), 1.0);
  const Mat2 id = m * m.inverse();
  EXPECT_LT(id.max_abs_diff(Mat2::identity()), 1e-15);
}

TEST(Mat2, PowerMatchesRepeatedProduct) {
  const Mat2 m{1.0, 1.0, 1.0, 2.0};
  EXPECT_LT(power(m, 3).max_abs_diff(m * m * m), 1e-12);
  EXPECT_LT(power(m, -2).max_abs_diff((m * m).inverse()), 1e-12);
  EXPECT_EQ(power(m, 0).max_abs_diff(Mat2::identity()), 0.0);
}

TEST(Mat2, NormalizedHasUnitDeterminant) {
  const Mat2 m{3.0, 1.0, 2.0, 4.0};
  EXPECT_NEAR(m.normalized().det(), 1.0, 1e-15);
}

TEST(Lengths, TraceRoundTrip) {
  for (double l : {1e-3, 0.1, 1.0, 5.0, 30.0})
    EXPECT_NEAR(trace_to_length(length_to_trace(l)) / l, 1.0, 1e-9) << l;
}

TEST(Lengths, TracesWithinToleranceOfTwoReadAsCusps) {
  // |trace| - 2 = l^2 / 4 to leading order, below the parabolic tolerance here
  EXPECT_EQ(trace_to_length(length_to_trace(1e-6)), 0.0);
}

TEST(Lengths, NegativeTraceUsesAbsoluteValue) {
  EXPECT_DOUBLE_EQ(trace_to_length(-3.0), trace_to_length(3.0));
  EXPECT_NEAR(trace_to_length(3.0), 1.92484730023841379, 1e-15);
}

TEST(Lengths, ParabolicIsZero) {
  EXPECT_EQ(trace_to_length(2.0), 0.0);
  EXPECT_EQ(trace_to_length(-2.0 - 1e-12), 0.0);
}

TEST(Lengths, EllipticThrows) {
  try {
    trace_to_length(1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EllipticElement);
  }
}

TEST(Lengths, Acosh1pKeepsSmallArguments) {
  EXPECT_NEAR(acosh1p(1e-12) / 1.4142135623729771977e-6, 1.0, 1e-14);
}

TEST(Collar, LowerBoundIsAbsLog) {
  EXPECT_DOUBLE_EQ(collar_lower_bound(1e-3), std::abs(std::log(1e-3)));
  EXPECT_THROW(collar_lower_bound(0.0), Error);
}

TEST(FixedPoints, RepellingThenAttracting) {
  const Mat2 t = translation(2.0);
  const auto f = fixed_points(t);
  EXPECT_EQ(f[0], 0.0);
  EXPECT_TRUE(std::isinf(f[1]));
  const Mat2 g = conj(Mat2{1.0, 2.0, 0.5, 2.0}, t);
  const auto h = fixed_points(g);
  EXPECT_NEAR(apply(g, h[0]), h[0], 1e-12);
  EXPECT_NEAR(apply(g, h[1]), h[1], 1e-12);
  // points near the attracting end move toward it
  const double z = h[1] + 1e-3;
  EXPECT_LT(std::abs(apply(g, z) - h[1]), std::abs(z - h[1]));
}

TEST(FixedPoints, ToAxisSendsPairToZeroAndInfinity) {
  const Mat2 m = to_axis(-1.0, 3.0);
  EXPECT_NEAR(apply(m, -1.0), 0.0, 1e-15);
  EXPECT_TRUE(std::isinf(apply(m, 3.0)));
  EXPECT_NEAR(m.det(), 1.0, 1e-15);
}

TEST(PantsGroup, ProductIsIdentityAndTracesMatchLengths) {
  for (auto l : {std::array<double, 3>{1.0, 2.0, 0.5}, {0.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, {3.0, 0.2, 1.5}}) {
    const auto g = pants_group(l[0], l[1], l[2]);
    const Mat2 p = g[0] * g[1] * g[2];
    EXPECT_LT(p.max_abs_diff(Mat2::identity()), 1e-12);
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(g[k].det(), 1.0, 1e-12);
      EXPECT_NEAR(g[k].trace(), -length_to_trace(l[k]), 1e-12);
    }
  }
}

TEST(PantsGroup, HalfLengthsMatchAxisDistances) {
  const std::array<double, 3> l{1.0, 2.0, 0.7};
  const auto g = pants_group(l[0], l[1], l[2]);
  const auto d = pants_half_lengths(l[0], l[1], l[2]);
  for (int k = 0; k < 3; ++k)
    EXPECT_NEAR(d[k], axis_distance(g[(k + 1) % 3], g[(k + 2) % 3]), 1e-10) << k;
}

TEST(PantsGroup, CuspGivesInfiniteSeparation) {
  const auto d = pants_half_lengths(0.0, 1.0, 1.0);
  EXPECT_TRUE(std::isinf(d[1]));
  EXPECT_TRUE(std::isinf(d[2]));
  EXPECT_TRUE(std::isfinite(d[0]));
  EXPECT_THROW(pants_half_lengths(-1.0, 1.0, 1.0), Error);
}

TEST(CuffFrame, AxisOnImaginaryLineWithFootAtI) {
  const auto g = pants_group(1.0, 2.0, 0.7);
  const Mat2 f = cuff_frame(g[0], {g[1], g[2]}, g[1]);
  const Mat2 a = f * g[0] * f.inverse();
  const auto fp = fixed_points(a);
  EXPECT_NEAR(std::min(std::abs(fp[0]), std::abs(fp[1])), 0.0, 1e-12);
  EXPECT_NEAR(foot_position(f, g[1]), 0.0, 1e-12);
}

TEST(Crossing, PerpendicularAxesHaveZeroCosine) {
  const Mat2 g = translation(1.0);
  // axis from -1 to 1
  const Mat2 k = conj(Mat2{1.0, -1.0, 1.0, 1.0}.normalized(), translation(1.0));
  EXPECT_NEAR(crossing_cos(g, k), 0.0, 1e-12);
  EXPECT_TRUE(std::isnan(crossing_cos(g, g)));
}

TEST(AngleType, RejectsOutOfRange) {
  EXPECT_THROW(Angle(0.0), Error);
  EXPECT_THROW(Angle(M_PI), Error);
  EXPECT_NEAR(Angle(M_PI / 3).cos(), 0.5, 1e-15);
}
