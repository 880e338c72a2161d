#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "error.hpp"
#include "format.hpp"
#include "holonomy.hpp"
#include "move_transforms.hpp"
#include "pants_complex.hpp"

namespace fnmetric {

inline double relative_error(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::abs(want);
}

// ---- closed forms vs oracle ----

/// Formula variants for harness self-tests.
enum class Fault { None, TorusTwistDropsHole };

struct EquivalenceConfig {
  std::size_t samples = 1000;
  std::uint64_t seed = 7;
  double tolerance = 1e-8;
  Fault fault = Fault::None;
};

struct EquivalenceReport {
  std::size_t samples = 0;
  double max_torus = 0.0;
  double max_sphere = 0.0;
  std::string worst_input;
  double seconds = 0.0;
  double tolerance = 1e-8;

  double max_error() const { return std::max(max_torus, max_sphere); }
  bool pass() const { return max_error() <= tolerance; }
};

namespace detail {

inline MoveResult faulty_torus_move(const TorusMoveInput& in) {
  MoveResult r = torus_move(in);
  const double sh = std::sinh(0.5 * in.l);
  const double m = std::cosh(in.l) + std::cosh(0.5 * in.l0);
  const double ch = std::cosh(0.5 * in.tau);
  const double mag = 2.0 * std::asinh(sh * std::sinh(0.5 * std::abs(in.tau)) * std::sqrt(m / (ch * ch * m)));
  r.tau_prime = in.tau > 0.0 ? -mag : mag;
  return r;
}

inline std::string describe(const TorusMoveInput& in) {
  return "torus l0=" + format_double(in.l0) + " l=" + format_double(in.l) + " tau=" + format_double(in.tau);
}

inline std::string describe(const SphereMoveInput& in) {
  return "sphere holes=" + format_double(in.holes[0]) + "," + format_double(in.holes[1]) + "," +
         format_double(in.holes[2]) + "," + format_double(in.holes[3]) + " l=" + format_double(in.l) +
         " tau=" + format_double(in.tau);
}

}  // namespace detail

/// torus_move and sphere_move against twist recovery on the oracle, on
/// (l', |tau'|); l in [0.1, 3], tau in [-2, 2], holes in [0, 2].
inline EquivalenceReport run_equivalence(const EquivalenceConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ul(0.1, 3.0), ut(-2.0, 2.0), uh(0.0, 2.0);
  std::vector<TorusMoveInput> tori;
  std::vector<SphereMoveInput> spheres;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    const double l = ul(rng), tau = ut(rng), l0 = uh(rng);
    tori.push_back({l0, l, tau});
    SphereMoveInput s;
    for (auto& h : s.holes) h = uh(rng);
    s.l = ul(rng);
    s.tau = ut(rng);
    spheres.push_back(s);
  }
  struct Errs {
    double torus, sphere;
  };
  const auto errs = parallel_map(cfg.samples, [&](std::size_t i) {
    const auto& t = tori[i];
    const MoveResult a = cfg.fault == Fault::TorusTwistDropsHole ? detail::faulty_torus_move(t) : torus_move(t);
    const DualMeasurement b = measure_dual(t);
    const double et = std::max(relative_error(a.l_prime, b.l_prime),
                               relative_error(std::abs(a.tau_prime), std::abs(b.tau_prime)));
    const auto& s = spheres[i];
    const MoveResult c = sphere_move(s);
    const DualMeasurement d = measure_dual(s);
    const double es = std::max(relative_error(c.l_prime, d.l_prime),
                               relative_error(std::abs(c.tau_prime), std::abs(d.tau_prime)));
    return Errs{et, es};
  });
  EquivalenceReport rep;
  rep.samples = cfg.samples;
  rep.tolerance = cfg.tolerance;
  double worst = -1.0;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    rep.max_torus = std::max(rep.max_torus, errs[i].torus);
    rep.max_sphere = std::max(rep.max_sphere, errs[i].sphere);
    if (errs[i].torus > worst) worst = errs[i].torus, rep.worst_input = detail::describe(tori[i]);
    if (errs[i].sphere > worst) worst = errs[i].sphere, rep.worst_input = detail::describe(spheres[i]);
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---- cusps ----

struct CuspReport {
  double torus_gap = 0.0;    // closed form, hole 1e-4 vs cusp
  double sphere_gap = 0.0;
  double oracle_gap = 0.0;   // oracle lengths, hole 1e-4 vs cusp
  std::vector<double> steps;
  std::vector<double> shear_gaps;  // jump across the cusp locus per step

  bool pass(double tol = 1e-6) const {
    if (!(torus_gap < tol && sphere_gap < tol && oracle_gap < tol)) return false;
    for (std::size_t i = 1; i < shear_gaps.size(); ++i)
      if (!(shear_gaps[i] < shear_gaps[i - 1])) return false;
    return !shear_gaps.empty() && shear_gaps.back() < shear_gaps.front() * 1e-3;
  }
};

namespace detail {

inline double shear_lengths_gap(const ShearTriple& lo, const ShearTriple& hi) {
  const HolonomyRep a = shear_to_rep(lo), b = shear_to_rep(hi);
  double g = 0.0;
  for (const char* w : {"A", "B", "A B", "A B^-1", "A B A^-1 B^-1"}) {
    const double x = std::abs(a.eval(w).trace()), y = std::abs(b.eval(w).trace());
    const double lx = x <= 2.0 ? 0.0 : length_of(a.eval(w)), ly = y <= 2.0 ? 0.0 : length_of(b.eval(w));
    g = std::max(g, std::abs(lx - ly));
  }
  return g;
}

}  // namespace detail

/// Hole length 1e-4 vs 0 on the closed forms and the oracle; shear path
/// (s_a, s_b, s_c + u) sampled at u = -h/2, h/2 around the cusp locus.
inline CuspReport run_cusp_continuity(double small = 1e-4) {
  CuspReport r;
  for (double l : {0.2, 1.0, 2.5})
    for (double tau : {-1.5, 0.0, 0.7}) {
      const MoveResult a = torus_move({small, l, tau}), b = torus_move({0.0, l, tau});
      r.torus_gap = std::max({r.torus_gap, std::abs(a.l_prime - b.l_prime), std::abs(a.tau_prime - b.tau_prime)});
      for (int k = 0; k <= 4; ++k) {
        SphereMoveInput s{{0.5, 1.0, 1.5, 2.0}, l, tau}, z = s;
        for (int i = 0; i < 4; ++i)
          if (k == 4 || i == k) s.holes[i] = small, z.holes[i] = 0.0;
        const MoveResult c = sphere_move(s), d = sphere_move(z);
        r.sphere_gap =
            std::max({r.sphere_gap, std::abs(c.l_prime - d.l_prime), std::abs(c.tau_prime - d.tau_prime)});
      }
      const DualMeasurement m = measure_dual(TorusMoveInput{small, l, tau});
      const DualMeasurement n = measure_dual(TorusMoveInput{0.0, l, tau});
      r.oracle_gap = std::max({r.oracle_gap, std::abs(m.l_prime - n.l_prime),
                               std::abs(std::abs(m.tau_prime) - std::abs(n.tau_prime))});
    }
  const double sa = 0.8, sb = -0.3;
  const double sc = -(sa + sb);
  for (double h = 1e-1; h >= 1e-6 * 0.99; h /= 10.0) {
    r.steps.push_back(h);
    r.shear_gaps.push_back(detail::shear_lengths_gap({sa, sb, sc - h / 2}, {sa, sb, sc + h / 2}));
  }
  return r;
}

// ---- metric axioms ----

struct AxiomReport {
  std::size_t triples = 0;
  std::size_t symmetry_failures = 0;
  std::size_t triangle_failures = 0;
  std::size_t identity_failures = 0;
  std::string first_failure;

  bool pass() const { return symmetry_failures == 0 && triangle_failures == 0 && identity_failures == 0; }
};

/// Exact symmetry, identity and triangle inequality on random triples; half
/// on S_{0,5}, half on the ladder with finitely supported overrides.
inline AxiomReport run_metric_axioms(std::size_t triples, std::uint64_t seed) {
  AxiomReport r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ul(0.05, 4.0), ut(-3.0, 3.0);
  std::uniform_int_distribution<long> ui(-50, 50);
  std::uniform_int_distribution<int> un(0, 6);
  const PantsDecomposition S = five_holed_sphere();
  const PantsDecomposition L = PantsDecomposition::ladder(LadderSpec{});
  const FNPoint base = ladder_base_point(0.5);
  auto finite_point = [&] {
    FNPoint X;
    for (const auto& [c, rec] : S.curves()) X.set_base(c, {ul(rng), rec.kind == CurveKind::Interior ? ut(rng) : 0.0});
    return X;
  };
  auto ladder_point = [&] {
    FNPoint X = base;
    const int n = un(rng);
    for (int k = 0; k < n; ++k) {
      const char* roles[] = {"a", "e", "b1", "b2"};
      const std::string role = roles[ui(rng) & 3];
      const CurveId c = ladder_curve(role, ui(rng));
      X.set(c, {ul(rng), role == "a" || role == "e" ? ut(rng) : 0.0});
    }
    return X;
  };
  auto note = [&](const std::string& what) {
    if (r.first_failure.empty()) r.first_failure = what + " at triple " + std::to_string(r.triples);
  };
  for (std::size_t i = 0; i < triples; ++i) {
    const bool finite = i % 2 == 0;
    const PantsDecomposition& P = finite ? S : L;
    const FNPoint X = finite ? finite_point() : ladder_point();
    const FNPoint Y = finite ? finite_point() : ladder_point();
    const FNPoint Z = finite ? finite_point() : ladder_point();
    const double xy = fn_distance(X, Y, P), yx = fn_distance(Y, X, P);
    const double yz = fn_distance(Y, Z, P), xz = fn_distance(X, Z, P);
    ++r.triples;
    if (xy != yx) ++r.symmetry_failures, note("symmetry");
    if (!(xz <= xy + yz)) ++r.triangle_failures, note("triangle");
    if (fn_distance(X, X, P) != 0.0) ++r.identity_failures, note("identity");
  }
  return r;
}

// ---- round trips ----

struct RoundTripReport {
  std::size_t samples = 0;
  double max_length = 0.0;  // relative
  double max_twist = 0.0;   // relative, on |tau|
  std::string worst_input;

  bool pass(double tol = 1e-9) const { return max_length <= tol && max_twist <= tol; }
};

/// alpha -> alpha' -> alpha on the closed forms and on S_{0,5} points,
/// compared on (l, |tau|).
inline RoundTripReport run_round_trip(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ul(0.1, 3.0), ut(-2.0, 2.0), uh(0.0, 2.0);
  struct Case {
    TorusMoveInput torus;
    SphereMoveInput sphere;
    FNPoint point;
  };
  const PantsDecomposition P = five_holed_sphere();
  std::vector<Case> cases;
  for (std::size_t i = 0; i < samples; ++i) {
    Case c;
    c.torus = {uh(rng), ul(rng), ut(rng)};
    for (auto& h : c.sphere.holes) h = uh(rng);
    c.sphere.l = ul(rng);
    c.sphere.tau = ut(rng);
    for (const auto& [curve, rec] : P.curves())
      c.point.set_base(curve, {ul(rng), rec.kind == CurveKind::Interior ? ut(rng) : 0.0});
    cases.push_back(std::move(c));
  }
  struct Err {
    double length, twist;
  };
  const auto errs = parallel_map(samples, [&](std::size_t i) {
    const Case& c = cases[i];
    Err e{0.0, 0.0};
    auto take = [&](double l, double l_back, double tau, double tau_back) {
      e.length = std::max(e.length, relative_error(l_back, l));
      e.twist = std::max(e.twist, relative_error(std::abs(tau_back), std::abs(tau)));
    };
    const MoveResult t1 = torus_move(c.torus);
    const MoveResult t2 = torus_move({c.torus.l0, t1.l_prime, t1.tau_prime});
    take(c.torus.l, t2.l_prime, c.torus.tau, t2.tau_prime);
    const auto& h = c.sphere.holes;
    const MoveResult s1 = sphere_move(c.sphere);
    // the dual sees the holes in the order (x, z, w, y)
    const MoveResult s2 = sphere_move({{h[0], h[3], h[2], h[1]}, s1.l_prime, s1.tau_prime});
    take(c.sphere.l, s2.l_prime, c.sphere.tau, s2.tau_prime);
    const MovedPoint m1 = move_fn_point(c.point, P, "a");
    const MovedPoint m2 = move_fn_point(m1.point, m1.decomposition, m1.move.dual);
    for (const auto& [curve, rec] : P.curves())
      take(c.point.length(curve), m2.point.length(curve), c.point.twist(curve), m2.point.twist(curve));
    return e;
  });
  RoundTripReport r;
  r.samples = samples;
  double worst = -1.0;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    r.max_length = std::max(r.max_length, errs[i].length);
    r.max_twist = std::max(r.max_twist, errs[i].twist);
    const double w = std::max(errs[i].length, errs[i].twist);
    if (w > worst) worst = w, r.worst_input = detail::describe(cases[i].torus) + " / " + detail::describe(cases[i].sphere);
  }
  return r;
}

}  // namespace fnmetric
