#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "error.hpp"
#include "holonomy.hpp"
#include "hyperbolic_core.hpp"
#include "pants_complex.hpp"
#include "wide_real.hpp"

namespace fnmetric {

/// Shortest alpha length the closed forms are evaluated at; smaller inputs
/// are clamped and flagged.
inline constexpr double kMinMoveLength = 1e-12;

struct MoveResult {
  double l_prime = 0.0;
  double tau_prime = 0.0;
  bool abs_only = false;
  bool domain_narrowed = false;
};

namespace detail {

inline double opposite_sign(double mag, double tau) {
  if (tau == 0.0 || mag == 0.0) return 0.0;
  return tau > 0.0 ? -mag : mag;
}

inline double clamp_length(double l, bool& narrowed) {
  if (l < kMinMoveLength) {
    narrowed = true;
    return kMinMoveLength;
  }
  return l;
}

}  // namespace detail

/// Dual coordinates after the elementary move on a one-holed torus.
inline MoveResult torus_move(const TorusMoveInput& in) {
  check_input(in);
  MoveResult r;
  const double l = detail::clamp_length(in.l, r.domain_narrowed);
  const double c0 = std::cosh(0.5 * in.l0);
  const double sh = std::sinh(0.5 * l);
  const double ch_t = std::cosh(0.5 * in.tau);
  const double m = std::cosh(l) + c0;
  const double x = ch_t * std::sqrt(0.5 * m) / sh;
  r.l_prime = 2.0 * std::acosh(x);
  const double bp = ch_t * ch_t * m + sh * sh * (c0 - 1.0);
  const double mag = 2.0 * std::asinh(sh * std::sinh(0.5 * std::abs(in.tau)) * std::sqrt(m / bp));
  r.tau_prime = detail::opposite_sign(mag, in.tau);
  return r;
}

namespace detail {

struct SphereTerms {
  double A, B, X;
};

inline SphereTerms sphere_terms(const std::array<double, 4>& holes, double l, double tau) {
  const double c1 = std::cosh(0.5 * holes[0]), c2 = std::cosh(0.5 * holes[1]);
  const double c3 = std::cosh(0.5 * holes[2]), c4 = std::cosh(0.5 * holes[3]);
  const double ch = std::cosh(0.5 * l);
  const double sh = std::sinh(0.5 * l);
  const double A = c1 * c2 + c3 * c4 + ch * (c1 * c3 + c2 * c4);
  const double B = std::sqrt(ch * ch + 2.0 * c1 * c4 * ch + c1 * c1 + c4 * c4 - 1.0) *
                   std::sqrt(ch * ch + 2.0 * c2 * c3 * ch + c2 * c2 + c3 * c3 - 1.0);
  return {A, B, (A + std::cosh(tau) * B) / (sh * sh)};
}

}  // namespace detail

/// Ratio cosh(l'_t/2) / cosh(l'/2) between twisted and untwisted sphere
/// configurations; bounded by cosh t.
inline double sphere_growth_ratio(const std::array<double, 4>& holes, double l, double t) {
  const auto s = detail::sphere_terms(holes, l, t);
  return (s.A + std::cosh(t) * s.B) / (s.A + s.B);
}

/// Dual coordinates after the elementary move on a four-holed sphere.
inline MoveResult sphere_move(const SphereMoveInput& in) {
  check_input(in);
  MoveResult r;
  const double l = detail::clamp_length(in.l, r.domain_narrowed);
  const auto& h = in.holes;
  const auto s = detail::sphere_terms(h, l, in.tau);
  r.l_prime = 2.0 * std::acosh(s.X);
  const double sigma = std::sqrt((s.X - 1.0) * (s.X + 1.0));
  const double c1 = std::cosh(0.5 * h[0]), c2 = std::cosh(0.5 * h[1]);
  const double c3 = std::cosh(0.5 * h[2]), c4 = std::cosh(0.5 * h[3]);
  const double F = std::sqrt(c1 * c1 + c2 * c2 + 2.0 * c1 * c2 * s.X + sigma * sigma) *
                   std::sqrt(c3 * c3 + c4 * c4 + 2.0 * c3 * c4 * s.X + sigma * sigma);
  const double mag = std::asinh(std::sinh(std::abs(in.tau)) * s.B * sigma / (std::sinh(0.5 * l) * F));
  r.tau_prime = detail::opposite_sign(mag, in.tau);
  return r;
}

/// Reruns the sign-word match on the oracle; clears abs_only when the
/// oracle agrees with the sign of tau_prime.
template <typename Input>
MoveResult certify_sign(const Input& in, MoveResult r) {
  const DualMeasurement m = measure_dual(in);
  const bool tiny = std::abs(r.tau_prime) < 1e-12 && std::abs(m.tau_prime) < 1e-9;
  r.abs_only = !(tiny || (m.tau_prime > 0.0) == (r.tau_prime > 0.0));
  return r;
}

// ---- moving FN points ----

struct MovedPoint {
  PantsDecomposition decomposition;
  FNPoint point;
  MoveDescriptor move;
  MoveResult result;
  /// Adjacent curves whose twist was measured on the oracle.
  std::vector<CurveId> measured;
};

namespace detail {

template <typename T>
BasicTriple<T> triple_product_check(const BasicTriple<T>& t) {
  const BasicMat2<T> m = t[0] * t[1] * t[2];
  const T e = std::min(m.max_abs_diff(BasicMat2<T>::identity()), m.max_abs_diff(-BasicMat2<T>::identity()));
  if (e > T(1e-9) * t[0].max_abs() * t[1].max_abs() * t[2].max_abs())
    fail(ErrorCode::NotRealizable, "moved pants generators do not close up");
  return t;
}

// Twists of the adjacent curves after the move, read on the rep of (P, X)
// in extended precision.
inline void fill_adjacent(const PantsDecomposition& P, const FNPoint& X, const PantsDecomposition& Q,
                          const MoveDescriptor& M, MovedPoint& out) {
  using T = WideReal;
  using Matrix = BasicMat2<T>;
  const auto rep = build_rep_as<T>(P, X, M.curve);
  const auto& ps = P.pants();
  std::set<std::size_t> inside;
  for (const auto& s : M.sites) inside.insert(s.pants);

  // new placed triples of the subsurface pants, and per-curve conjugators
  std::map<std::size_t, BasicTriple<T>> fresh;
  std::map<SlotRef, Matrix> moved_by;  // old site -> conjugator applied to its generator
  if (M.kind == MoveKind::Torus) {
    const SlotRef s = M.sites[0];
    const int k = s.slot;
    const auto& site = rep.glue.at(M.curve);
    const Matrix& letter = rep.generator(site.letter);
    const Matrix A = rep.cuff(s.pants, k);
    const Matrix D = site.side[0] == s ? letter : letter.inverse();
    BasicTriple<T> t;
    t[k] = A * D.inverse() * A.inverse();
    t[(k + 1) % 3] = D;
    t[(k + 2) % 3] = D.inverse() * A * D * A.inverse();
    fresh[s.pants] = triple_product_check(t);
    moved_by[{s.pants, (k + 2) % 3}] = Matrix::identity();
  } else {
    const SlotRef s = M.sites[0], r = M.sites[1];
    const int k = s.slot, j = r.slot;
    const Matrix K = across(rep, M.curve, s);
    const Matrix gx = rep.cuff(s.pants, (k + 1) % 3), gy = rep.cuff(s.pants, (k + 2) % 3);
    const Matrix hz = conj(K, rep.cuff(r.pants, (j + 1) % 3)), hw = conj(K, rep.cuff(r.pants, (j + 2) % 3));
    BasicTriple<T> t1, t2;
    t1[k] = (gx * hz).inverse();
    t1[(k + 1) % 3] = gx;
    t1[(k + 2) % 3] = hz;
    t2[j] = gx * hz;
    t2[(j + 1) % 3] = hz.inverse() * gy * hz;
    t2[(j + 2) % 3] = hw;
    fresh[s.pants] = triple_product_check(t1);
    fresh[r.pants] = triple_product_check(t2);
    moved_by[{s.pants, (k + 1) % 3}] = Matrix::identity();
    moved_by[{s.pants, (k + 2) % 3}] = hz.inverse();
    moved_by[{r.pants, (j + 1) % 3}] = K;
    moved_by[{r.pants, (j + 2) % 3}] = K;
  }

  const auto& qs = Q.pants();
  for (const auto& [old_site, C] : moved_by) {
    const CurveId& e = ps[old_site.pants].cuffs[old_site.slot];
    if (P.kind(e) != CurveKind::Interior) continue;
    const auto& rec = P.record(e);
    const SlotRef far = rec.slots[0] == old_site ? rec.slots[1] : rec.slots[0];
    if (inside.count(far.pants)) continue;  // both sides inside: stays flagged
    // slot of e in the new pants
    std::optional<SlotRef> now;
    for (const auto& s : M.sites)
      for (int i = 0; i < 3; ++i)
        if (qs[s.pants].cuffs[i] == e) now = SlotRef{s.pants, i};
    if (!now) continue;
    // measured in the frame where e keeps its old generator
    const auto outside = placed_triple(rep, far.pants, across(rep, e, old_site));
    const Matrix back = C.inverse();
    const auto& t = fresh.at(now->pants);
    const BasicTriple<T> inner{conj(back, t[0]), conj(back, t[1]), conj(back, t[2])};
    const double tw = static_cast<double>(seam_twist(inner, now->slot, foot_slot(qs[now->pants], now->slot), outside,
                                                     foot_slot(ps[far.pants], far.slot)));
    // seam offset taken in (-l/2, l/2] so that moving back undoes it
    const CurveParams old = X.at(e);
    out.point.set_base(e, {old.length, old.twist + std::remainder(tw - old.twist, old.length)});
    out.point.clear_flag(e);
    out.measured.push_back(e);
  }
}

}  // namespace detail

/// Coordinates of X relative to the decomposition after moving `c`. The
/// dual curve gets the closed-form transform; twists of interior holes of
/// the subsurface are measured on the oracle when `measure_adjacent`,
/// otherwise they keep their old values and are flagged.
inline MovedPoint move_fn_point(const FNPoint& X, const PantsDecomposition& P, const CurveId& c,
                                bool measure_adjacent = true) {
  auto [Q, M] = elementary_move(P, c);
  MovedPoint out;
  const CurveParams pc = X.at(c);
  if (M.kind == MoveKind::Torus) {
    out.result = torus_move({X.length(M.neighborhood[0]), pc.length, pc.twist});
  } else {
    SphereMoveInput in;
    for (int i = 0; i < 4; ++i) in.holes[i] = X.length(M.neighborhood[i]);
    in.l = pc.length;
    in.tau = pc.twist;
    out.result = sphere_move(in);
  }
  FNPoint Y;
  for (const auto& [curve, rec] : Q.curves()) {
    if (curve == M.dual) Y.set_base(curve, {out.result.l_prime, out.result.tau_prime});
    else Y.set_base(curve, X.at(curve));
  }
  std::set<CurveId> seen;
  for (const auto& h : M.neighborhood)
    if (P.kind(h) == CurveKind::Interior && seen.insert(h).second) Y.flag_oracle_required(h);
  out.point = std::move(Y);
  out.decomposition = std::move(Q);
  out.move = M;
  if (measure_adjacent && !out.point.oracle_required().empty()) detail::fill_adjacent(P, X, out.decomposition, M, out);
  return out;
}

}  // namespace fnmetric
