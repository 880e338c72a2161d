#include <gtest/gtest.h>

#include <cmath>

#include "fnmetric/move_transforms.hpp"

using namespace fnmetric;

// Expected values computed independently to 50 digits from trace identities
// (tests/oracles/trace_oracle.py); tau_prime there is reported with the
// sign opposite to tau.

namespace {

constexpr double kRel = 1e-12;

void expect_rel(double got, double want, double tol = kRel) {
  if (want == 0.0) {
    EXPECT_NEAR(got, 0.0, tol);
  } else {
    EXPECT_NEAR(got / want, 1.0, tol) << "got " << got << " want " << want;
  }
}

struct TorusCase {
  double l0, l, tau, l_prime, tau_prime;
};

struct SphereCase {
  std::array<double, 4> holes;
  double l, tau, l_prime, abs_tau_prime;
};

const TorusCase kTorus[] = {
    {0.0, 1.0, 0.0, 2.8136582274945905055, 0.0},
    {0.0, 1.0, 0.7, 2.94801629963738356, -0.34879664802801919746},
    {1.0, 1.0, 0.7, 3.0022512541407742286, -0.34682660147064753095},
    {0.5, 0.3, -1.2, 5.5431552562172745856, 0.16152435640928225014},
    {2.0, 2.5, 1.9, 2.4090680496442143302, -1.9528897890286294544},
};

const SphereCase kSphere[] = {
    {{0.0, 0.0, 0.0, 0.0}, 1.0, 0.0, 8.3385238772995027852, 0.0},
    {{0.0, 0.0, 0.0, 0.0}, 1.0, 0.5, 8.4660063604995510172, 0.12366013518134503635},
    {{1.0, 1.0, 1.0, 1.0}, 1.2, -0.8, 8.40224541608101974, 0.22909711263745525142},
    {{0.5, 1.0, 1.5, 2.0}, 0.7, 1.3, 11.428714428086632173, 0.19997332687316782814},
    {{2.0, 0.0, 1.0, 0.3}, 2.5, -1.9, 7.0398960118056752113, 0.93294996426271417177},
    {{0.5, 1.0, 1.5, 2.0}, 0.7, 0.0, 10.630898265219045793, 0.0},
    {{1.0, 1.0, 1.0, 1.0}, 1.2, 0.0, 8.0801289220701404469, 0.0},
};

}  // namespace

TEST(TorusMove, MatchesTraceOracle) {
  for (const auto& c : kTorus) {
    const MoveResult r = torus_move({c.l0, c.l, c.tau});
    expect_rel(r.l_prime, c.l_prime);
    expect_rel(r.tau_prime, c.tau_prime);
    EXPECT_FALSE(r.domain_narrowed);
  }
}

TEST(SphereMove, MatchesTraceOracle) {
  for (const auto& c : kSphere) {
    const MoveResult r = sphere_move({c.holes, c.l, c.tau});
    expect_rel(r.l_prime, c.l_prime);
    expect_rel(std::abs(r.tau_prime), c.abs_tau_prime);
    if (c.tau != 0.0) EXPECT_EQ(r.tau_prime > 0.0, c.tau < 0.0);
  }
}

TEST(TorusMove, OracleMeasurementAgrees) {
  for (const auto& c : kTorus) {
    const DualMeasurement m = measure_dual(TorusMoveInput{c.l0, c.l, c.tau});
    expect_rel(m.l_prime, c.l_prime, 1e-10);
    EXPECT_NEAR(m.tau_prime, c.tau_prime, 1e-8);
  }
}

TEST(SphereMove, OracleMeasurementAgrees) {
  for (const auto& c : kSphere) {
    const DualMeasurement m = measure_dual(SphereMoveInput{c.holes, c.l, c.tau});
    expect_rel(m.l_prime, c.l_prime, 1e-10);
    EXPECT_NEAR(std::abs(m.tau_prime), c.abs_tau_prime, 1e-8);
  }
}

TEST(Moves, CertifiedSignAgreesWithOracle) {
  for (const auto& c : kTorus) {
    const TorusMoveInput in{c.l0, c.l, c.tau};
    EXPECT_FALSE(certify_sign(in, torus_move(in)).abs_only);
  }
  for (const auto& c : kSphere) {
    const SphereMoveInput in{c.holes, c.l, c.tau};
    EXPECT_FALSE(certify_sign(in, sphere_move(in)).abs_only);
  }
}

TEST(Moves, TinyLengthIsClampedAndFlagged) {
  const MoveResult r = torus_move({0.0, 1e-15, 0.0});
  EXPECT_TRUE(r.domain_narrowed);
  EXPECT_TRUE(std::isfinite(r.l_prime));
  EXPECT_TRUE(sphere_move({{0.0, 0.0, 0.0, 0.0}, 1e-13, 0.0}).domain_narrowed);
}

TEST(Moves, InvalidInputsRejected) {
  EXPECT_THROW(torus_move({0.0, 0.0, 0.0}), Error);
  EXPECT_THROW(torus_move({-1.0, 1.0, 0.0}), Error);
  EXPECT_THROW(sphere_move({{0.0, -0.1, 0.0, 0.0}, 1.0, 0.0}), Error);
  EXPECT_THROW(sphere_move({{0.0, 0.0, 0.0, 0.0}, 1.0, NAN}), Error);
}

TEST(Moves, MovingTwiceRestoresCoordinates) {
  const TorusMoveInput t{0.4, 1.3, -0.6};
  const MoveResult t1 = torus_move(t);
  const MoveResult t2 = torus_move({t.l0, t1.l_prime, t1.tau_prime});
  expect_rel(t2.l_prime, t.l, 1e-12);
  expect_rel(t2.tau_prime, t.tau, 1e-12);

  const SphereMoveInput s{{0.5, 1.0, 1.5, 2.0}, 0.7, 1.3};
  const MoveResult s1 = sphere_move(s);
  const auto& h = s.holes;
  const MoveResult s2 = sphere_move({{h[0], h[3], h[2], h[1]}, s1.l_prime, s1.tau_prime});
  expect_rel(s2.l_prime, s.l, 1e-12);
  expect_rel(s2.tau_prime, s.tau, 1e-12);
}

TEST(Moves, SphereGrowthRatioBoundedByCoshT) {
  for (double t : {0.1, 1.0, 3.0}) {
    const double r = sphere_growth_ratio({0.5, 1.0, 1.5, 2.0}, 0.7, t);
    EXPECT_GT(r, 1.0);
    EXPECT_LE(r, std::cosh(t));
  }
}

TEST(MovePoint, FiveHoledSphereRoundTrip) {
  const auto P = five_holed_sphere();
  FNPoint X;
  X.set_base("a", {0.9, 0.4});
  X.set_base("C1", {1.4, -0.7});
  for (const char* h : {"C2", "C3", "C4", "D1", "D2"}) X.set_base(h, {0.6, 0.0});
  const MovedPoint m1 = move_fn_point(X, P, "a");
  EXPECT_TRUE(m1.point.oracle_required().empty());
  ASSERT_EQ(m1.measured.size(), 1u);
  EXPECT_EQ(m1.measured[0], CurveId("C1"));
  const SphereMoveInput in{{1.4, 0.6, 0.6, 0.6}, 0.9, 0.4};
  expect_rel(m1.point.length("a'"), sphere_move(in).l_prime);

  const MovedPoint m2 = move_fn_point(m1.point, m1.decomposition, "a'");
  EXPECT_TRUE(isomorphic(m2.decomposition, P));
  for (const auto& [c, rec] : P.curves()) {
    expect_rel(m2.point.length(c), X.length(c), 1e-9);
    EXPECT_NEAR(m2.point.twist(c), X.twist(c), 1e-9) << c;
  }
}

TEST(MovePoint, UnmeasuredNeighboursStayFlagged) {
  const auto P = five_holed_sphere();
  FNPoint X;
  for (const auto& [c, rec] : P.curves()) X.set_base(c, {1.0, 0.0});
  const MovedPoint m = move_fn_point(X, P, "a", false);
  EXPECT_EQ(m.point.oracle_required().count("C1"), 1u);
  EXPECT_TRUE(m.measured.empty());
}
