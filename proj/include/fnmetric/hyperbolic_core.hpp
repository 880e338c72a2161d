#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "error.hpp"

namespace fnmetric {

inline constexpr double kParabolicTol = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// 2x2 real matrix, row major.
template <typename T>
struct BasicMat2 {
  T a{1}, b{0}, c{0}, d{1};

  static constexpr BasicMat2 identity() { return {T(1), T(0), T(0), T(1)}; }
  static BasicMat2 diag(T x, T y) { return {x, T(0), T(0), y}; }

  T det() const { return a * d - b * c; }
  T trace() const { return a + d; }

  BasicMat2 inverse() const {
    const T k = det();
    return {d / k, -b / k, -c / k, a / k};
  }

  // Rescales to unit determinant; a negative determinant flips the first row.
  BasicMat2 normalized() const {
    using std::abs;
    using std::sqrt;
    BasicMat2 m = *this;
    const T k = det();
    if (k < T(0)) {
      m.a = -m.a;
      m.b = -m.b;
    }
    const T s = sqrt(abs(k));
    return {m.a / s, m.b / s, m.c / s, m.d / s};
  }

  friend BasicMat2 operator*(const BasicMat2& x, const BasicMat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend BasicMat2 operator*(T s, const BasicMat2& x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
  }
  BasicMat2 operator-() const { return {-a, -b, -c, -d}; }

  T max_abs_diff(const BasicMat2& o) const {
    using std::abs;
    return std::max(std::max(T(abs(a - o.a)), T(abs(b - o.b))), std::max(T(abs(c - o.c)), T(abs(d - o.d))));
  }

  T max_abs() const {
    using std::abs;
    return std::max(std::max(T(abs(a)), T(abs(b))), std::max(T(abs(c)), T(abs(d))));
  }
};

using Mat2 = BasicMat2<double>;

template <typename T>
BasicMat2<T> power(const BasicMat2<T>& m, int k) {
  BasicMat2<T> base = k < 0 ? m.inverse() : m;
  BasicMat2<T> out = BasicMat2<T>::identity();
  for (int n = std::abs(k); n > 0; n >>= 1) {
    if (n & 1) out = out * base;
    base = base * base;
  }
  return out;
}

template <typename T>
BasicMat2<T> conj(const BasicMat2<T>& by, const BasicMat2<T>& m) {
  return by * m * by.inverse();
}

/// Intersection angle in (0, pi).
struct Angle {
  double value;

  explicit Angle(double v) : value(v) {
    if (!(v > 0.0 && v < M_PI)) fail(ErrorCode::BadConfiguration, "angle outside (0, pi)");
  }
  double cos() const { return std::cos(value); }
};

// arccosh(1 + y) without cancellation for small y.
template <typename T>
T log1p_of(T x) {
  if constexpr (std::is_floating_point_v<T>) {
    return std::log1p(x);
  } else {
    using std::log;
    const T u = 1 + x;
    return u == 1 ? x : T(log(u) * x / (u - 1));
  }
}

template <typename T>
T acosh1p(T y) {
  using std::sqrt;
  return log1p_of(T(y + sqrt(y * (2 + y))));
}

inline double length_to_trace(double l) { return 2.0 * std::cosh(0.5 * l); }

template <typename T>
T trace_to_length(T trace) {
  using std::abs;
  const T t = abs(trace);
  if (abs(t - 2) <= kParabolicTol) return T(0);
  if (t < 2) fail(ErrorCode::EllipticElement, "trace " + std::to_string(static_cast<double>(trace)) + " is elliptic");
  return 2 * acosh1p(T(t / 2 - 1));
}

template <typename T>
T length_of(const BasicMat2<T>& m) {
  return trace_to_length(m.trace());
}

inline double collar_lower_bound(double l) {
  if (!(l > 0.0)) fail(ErrorCode::InvalidLength, "collar bound needs l > 0");
  return std::abs(std::log(l));
}

/// Distances between cuff pairs of the pants (l1, l2, l3); entry k is the
/// distance between the two cuffs other than k. Cusps give +inf.
inline std::array<double, 3> pants_half_lengths(double l1, double l2, double l3) {
  const std::array<double, 3> l{l1, l2, l3};
  for (double x : l)
    if (!(x >= 0.0)) fail(ErrorCode::InvalidLength, "cuff lengths must be >= 0");
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const double p = l[(k + 1) % 3] / 2, q = l[(k + 2) % 3] / 2, r = l[k] / 2;
    if (p == 0.0 || q == 0.0) {
      out[k] = kInf;
      continue;
    }
    const double ch = (std::cosh(p) * std::cosh(q) + std::cosh(r)) / (std::sinh(p) * std::sinh(q));
    out[k] = acosh1p(ch - 1.0);
  }
  return out;
}

// ---- Moebius action on the boundary of the upper half plane ----

template <typename T>
T apply(const BasicMat2<T>& m, T z) {
  using std::isinf;
  const T inf = std::numeric_limits<T>::infinity();
  if (isinf(z)) return m.c != 0 ? T(m.a / m.c) : inf;
  const T den = m.c * z + m.d;
  return den != 0 ? T((m.a * z + m.b) / den) : inf;
}

/// Fixed points of a non-elliptic element as (repelling, attracting); a
/// parabolic element repeats its single fixed point.
template <typename T>
std::array<T, 2> fixed_points(const BasicMat2<T>& m) {
  using std::abs;
  using std::sqrt;
  const T scale = std::max({T(abs(m.a)), T(abs(m.d)), T(1)});
  if (abs(m.c) < T(1e-15) * scale) {
    const T inf = std::numeric_limits<T>::infinity();
    const T other = abs(m.d - m.a) > T(1e-300) ? T(m.b / (m.d - m.a)) : inf;
    // z -> (a z + b)/d expands away from the finite point when |a/d| > 1.
    if (abs(m.a) > abs(m.d)) return {other, inf};
    return {inf, other};
  }
  const T disc = std::max(T((m.d - m.a) * (m.d - m.a) + 4 * m.b * m.c), T(0));
  // roots of c z^2 + (d - a) z - b = 0
  const T p = m.d - m.a;
  const T root = sqrt(disc);
  const T q = -(p + (p < 0 ? -root : root)) / 2;
  const T z1 = q / m.c;
  const T z2 = q != 0 ? T(-m.b / q) : z1;
  // derivative of the action at z is 1/(c z + d)^2
  const T g1 = abs(m.c * z1 + m.d);
  const T g2 = abs(m.c * z2 + m.d);
  return g1 < g2 ? std::array<T, 2>{z1, z2} : std::array<T, 2>{z2, z1};
}

/// Unit-determinant map sending p to 0 and q to infinity.
template <typename T>
BasicMat2<T> to_axis(T p, T q) {
  using std::isinf;
  BasicMat2<T> m;
  if (isinf(q)) m = {T(1), -p, T(0), T(1)};
  else if (isinf(p)) m = {T(0), T(-1), T(1), -q};
  else m = {T(1), -p, T(1), -q};
  return m.normalized();
}

/// Pants group with cuff lengths (l0, l1, l2), cusps allowed; the three
/// generators multiply to the identity in order.
template <typename T>
std::array<BasicMat2<T>, 3> pants_group(T l0, T l1, T l2) {
  using std::cosh;
  using std::exp;
  const T x = -2 * cosh(l0 / 2);
  const T y = -2 * cosh(l1 / 2);
  const T s = -exp(l2 / 2);
  const BasicMat2<T> A{x, T(-1), T(1), T(0)};
  const BasicMat2<T> B{T(0), s, T(-1 / s), y};
  const BasicMat2<T> C = (A * B).inverse();
  return {A, B, C};
}

template <typename T>
BasicMat2<T> translation(T t) {
  using std::exp;
  return BasicMat2<T>::diag(exp(t / 2), exp(-t / 2));
}

template <typename T>
constexpr BasicMat2<T> quarter_turn() {
  return {T(0), T(-1), T(1), T(0)};
}

inline constexpr Mat2 kQuarterTurn = quarter_turn<double>();

/// Frame sending the axis of g to the imaginary axis with the rest of the
/// pants on the right, scaled so the perpendicular toward `toward` lands at i.
template <typename T>
BasicMat2<T> cuff_frame(const BasicMat2<T>& g, const std::vector<BasicMat2<T>>& others, const BasicMat2<T>& toward) {
  using std::abs;
  using std::isinf;
  using std::sqrt;
  const auto r = fixed_points(g);
  for (int order = 0; order < 2; ++order) {
    const BasicMat2<T> m = order == 0 ? to_axis(r[0], r[1]) : to_axis(r[1], r[0]);
    bool right = true;
    for (const auto& o : others) {
      for (const T& w : fixed_points(o)) {
        const T v = apply(m, w);
        if (!isinf(v) && !(v > 0)) right = false;
      }
    }
    if (!right) continue;
    const auto f = fixed_points(toward);
    const T h = sqrt(abs(apply(m, f[0]) * apply(m, f[1])));
    const T sh = sqrt(h);
    return BasicMat2<T>::diag(1 / sh, sh) * m;
  }
  fail(ErrorCode::NotRealizable, "cuff frame: pants not on one side of the cuff axis");
}

/// Height (log scale) of the perpendicular foot toward `target` in `frame`.
template <typename T>
T foot_position(const BasicMat2<T>& frame, const BasicMat2<T>& target) {
  using std::abs;
  using std::log;
  const auto f = fixed_points(target);
  return log(abs(apply(frame, f[0]) * apply(frame, f[1]))) / 2;
}

/// Unit tangent angle data for two oriented axes; returns cos of the angle
/// from axis g to axis h at their crossing, or NaN if they do not cross.
inline double crossing_cos(const Mat2& g, const Mat2& h) {
  const auto rg = fixed_points(g);
  const Mat2 m = to_axis(rg[0], rg[1]);
  const auto rh = fixed_points(h);
  const double p = apply(m, rh[0]), q = apply(m, rh[1]);
  if (std::isinf(p) || std::isinf(q) || p * q >= 0.0) return std::nan("");
  return (p + q) / (q - p);
}

}  // namespace fnmetric
