#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "hyperbolic_core.hpp"
#include "pants_complex.hpp"

namespace fnmetric {

// ---- words ----

struct Letter {
  std::string gen;
  int power = 1;
  bool operator==(const Letter&) const = default;
};

using Word = std::vector<Letter>;

/// Whitespace separated letters, each `name` or `name^k`.
inline Word parse_word(const std::string& text) {
  Word w;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    Letter l;
    const auto hat = tok.find('^');
    l.gen = tok.substr(0, hat);
    if (hat != std::string::npos) {
      try {
        std::size_t used = 0;
        l.power = std::stoi(tok.substr(hat + 1), &used);
        if (used != tok.size() - hat - 1) throw std::invalid_argument("trailing");
      } catch (...) {
        fail(ErrorCode::BadInput, "bad exponent in letter " + tok);
      }
    }
    if (l.gen.empty()) fail(ErrorCode::BadInput, "empty generator name in word");
    if (l.power != 0) w.push_back(l);
  }
  return w;
}

inline std::string format_word(const Word& w) {
  std::string out;
  for (const auto& l : w) {
    if (!out.empty()) out += ' ';
    out += l.gen;
    if (l.power != 1) out += "^" + std::to_string(l.power);
  }
  return out;
}

inline Word inverse(const Word& w) {
  Word out;
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back({it->gen, -it->power});
  return out;
}

inline Word operator+(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// ---- representations ----

enum class RelationKind { Trivial, Parabolic, Hyperbolic };

struct Relation {
  std::string name;
  Word word;
  RelationKind kind = RelationKind::Trivial;
  double length = 0.0;
};

/// Gluing of one interior curve: side[1]'s pants, conjugated by `letter`
/// (empty on spanning-tree edges), sits across the curve from side[0].
struct GlueSite {
  std::array<SlotRef, 2> side{};
  std::string letter;
};

template <typename T>
struct BasicHolonomyRep {
  using Matrix = BasicMat2<T>;

  std::map<std::string, Matrix> generators;
  std::vector<Relation> relations;
  std::map<std::string, Word> words;
  double tolerance = 1e-9;

  // Layout of reps assembled from FN coordinates.
  std::vector<Pants> pants;
  std::map<CurveId, GlueSite> glue;

  const Matrix& generator(const std::string& name) const {
    auto it = generators.find(name);
    if (it == generators.end()) fail(ErrorCode::BadInput, "unknown generator " + name);
    return it->second;
  }

  Matrix eval(const Word& w) const {
    Matrix m = Matrix::identity();
    for (const auto& l : w) m = m * power(generator(l.gen), l.power);
    return m;
  }
  Matrix eval(const std::string& w) const { return eval(parse_word(w)); }

  T length(const Word& w) const { return length_of(eval(w)); }

  const Word& word(const std::string& name) const {
    auto it = words.find(name);
    if (it == words.end()) fail(ErrorCode::BadInput, "no word named " + name);
    return it->second;
  }

  /// Placed cuff generator of a pants slot.
  const Matrix& cuff(std::size_t p, int k) const { return generator(cuff_name(p, k)); }

  static std::string cuff_name(std::size_t p, int k) {
    return "P" + std::to_string(p) + "." + std::to_string(k);
  }

  /// Violated invariants, empty when the rep is consistent.
  std::vector<std::string> check() const {
    std::vector<std::string> out;
    for (const auto& [n, m] : generators) {
      const double det = static_cast<double>(m.det());
      if (std::abs(det - 1.0) > tolerance) out.push_back("generator " + n + " has det " + std::to_string(det));
    }
    for (const auto& r : relations) {
      const Matrix m = eval(r.word);
      switch (r.kind) {
        case RelationKind::Trivial: {
          const double e = static_cast<double>(
              std::min(m.max_abs_diff(Matrix::identity()), m.max_abs_diff(-Matrix::identity())));
          if (e > tolerance * 1e3) out.push_back("relation " + r.name + " off identity by " + std::to_string(e));
          break;
        }
        case RelationKind::Parabolic:
        case RelationKind::Hyperbolic: {
          const double want = length_to_trace(r.length);
          const double got = std::abs(static_cast<double>(m.trace()));
          if (std::abs(got - want) > tolerance * want)
            out.push_back("relation " + r.name + " has |trace| " + std::to_string(got));
          break;
        }
      }
    }
    return out;
  }
};

using HolonomyRep = BasicHolonomyRep<double>;

template <typename T>
BasicHolonomyRep<T> conjugated(const BasicHolonomyRep<T>& rep, const BasicMat2<T>& by) {
  BasicHolonomyRep<T> out = rep;
  for (auto& [n, m] : out.generators) m = conj(by, m);
  return out;
}

// ---- pants geometry ----

/// Slot the twist origin of slot k points to: the partner slot for a
/// curve glued to itself, else the next slot.
inline int foot_slot(const Pants& p, int k) {
  for (int j = 0; j < 3; ++j)
    if (j != k && p.cuffs[j] == p.cuffs[k]) return j;
  return (k + 1) % 3;
}

template <typename T>
using BasicTriple = std::array<BasicMat2<T>, 3>;
using Triple = BasicTriple<double>;

template <typename T>
BasicMat2<T> slot_frame(const BasicTriple<T>& t, int k, int foot) {
  return cuff_frame(t[k], {t[(k + 1) % 3], t[(k + 2) % 3]}, t[foot]);
}

/// Twist of the seam between slot k of t1 and the adjacent pants t2,
/// measured as the offset of t2's foot along the cuff axis.
template <typename T>
T seam_twist(const BasicTriple<T>& t1, int k, int foot1, const BasicTriple<T>& t2, int foot2) {
  return foot_position(slot_frame(t1, k, foot1), t2[foot2]);
}

namespace detail {

template <typename T>
BasicMat2<T> glue_matrix(const BasicTriple<T>& t1, int k1, int f1, const BasicTriple<T>& t2, int k2, int f2, T tau) {
  return slot_frame(t1, k1, f1).inverse() * translation(tau) * quarter_turn<T>() * slot_frame(t2, k2, f2);
}

inline double length_param(const FNPoint& X, const CurveId& c, const PantsDecomposition& P) {
  const double l = X.length(c);
  if (P.kind(c) == CurveKind::Interior && !(l > 0.0))
    fail(ErrorCode::InvalidLength, "interior curve " + c.name + " needs positive length");
  if (!(l >= 0.0)) fail(ErrorCode::InvalidLength, "negative length on " + c.name);
  return l;
}

}  // namespace detail

/// build_rep in the scalar type T.
template <typename T>
BasicHolonomyRep<T> build_rep_as(const PantsDecomposition& P, const FNPoint& X,
                                 const std::optional<CurveId>& root = std::nullopt) {
  using Matrix = BasicMat2<T>;
  if (!P.is_finite()) fail(ErrorCode::FiniteOnly, "build_rep needs a finite decomposition");
  const auto& ps = P.pants();
  const std::size_t n = ps.size();
  if (n == 0) fail(ErrorCode::BadInput, "empty decomposition");

  std::vector<BasicTriple<T>> std_triples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = ps[i].cuffs;
    std_triples[i] = pants_group(T(detail::length_param(X, c[0], P)), T(detail::length_param(X, c[1], P)),
                                 T(detail::length_param(X, c[2], P)));
  }

  BasicHolonomyRep<T> rep;
  rep.pants = ps;
  std::vector<std::optional<Matrix>> place(n);
  std::size_t start = 0;
  int start_slot = 0;
  if (root) {
    const auto& rec = P.record(*root);
    start = rec.slots.front().pants;
    start_slot = rec.slots.front().slot;
  }
  // start in the frame of the first glued cuff, which keeps entries balanced
  place[start] = slot_frame(std_triples[start], start_slot, foot_slot(ps[start], start_slot));
  std::deque<std::size_t> queue{start};
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    for (int i = 0; i < 3; ++i) {
      const int k = p == start ? (start_slot + i) % 3 : i;
      const CurveId& c = ps[p].cuffs[k];
      if (P.kind(c) != CurveKind::Interior || rep.glue.count(c)) continue;
      const auto& rec = P.record(c);
      if (rec.slots.size() != 2) continue;
      const SlotRef here{p, k};
      const SlotRef there = rec.slots[0] == here ? rec.slots[1] : rec.slots[0];
      const Matrix g = detail::glue_matrix(std_triples[p], k, foot_slot(ps[p], k), std_triples[there.pants],
                                           there.slot, foot_slot(ps[there.pants], there.slot), T(X.twist(c)));
      GlueSite site;
      site.side = {here, there};
      if (!place[there.pants]) {
        place[there.pants] = *place[p] * g;
        queue.push_back(there.pants);
      } else {
        site.letter = "t:" + c.name;
        rep.generators[site.letter] = *place[p] * g * place[there.pants]->inverse();
      }
      rep.glue[c] = site;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!place[i]) fail(ErrorCode::BadInput, "decomposition is disconnected");
    for (int k = 0; k < 3; ++k)
      rep.generators[BasicHolonomyRep<T>::cuff_name(i, k)] = conj(*place[i], std_triples[i][k]);
    rep.relations.push_back({"pants " + std::to_string(i),
                             parse_word(HolonomyRep::cuff_name(i, 0) + " " + HolonomyRep::cuff_name(i, 1) + " " +
                                        HolonomyRep::cuff_name(i, 2)),
                             RelationKind::Trivial, 0.0});
  }
  for (const auto& [c, site] : rep.glue) {
    Word far{{HolonomyRep::cuff_name(site.side[1].pants, site.side[1].slot), 1}};
    if (!site.letter.empty()) far = Word{{site.letter, 1}} + far + Word{{site.letter, -1}};
    rep.relations.push_back(
        {"glue " + c.name, far + Word{{HolonomyRep::cuff_name(site.side[0].pants, site.side[0].slot), 1}},
         RelationKind::Trivial, 0.0});
  }
  for (const auto& [c, rec] : P.curves()) {
    if (rec.slots.empty()) continue;
    const SlotRef s = rec.kind == CurveKind::Interior && rep.glue.count(c) ? rep.glue.at(c).side[0] : rec.slots[0];
    Word w{{HolonomyRep::cuff_name(s.pants, s.slot), 1}};
    rep.words[c.name] = w;
    const double l = X.length(c);
    rep.relations.push_back({"length " + c.name, w, l == 0.0 ? RelationKind::Parabolic : RelationKind::Hyperbolic, l});
  }
  return rep;
}

/// One pants group per pants, glued along interior curves with the twist
/// of X; `root` (if given) is glued first so it is a spanning-tree edge.
inline HolonomyRep build_rep(const PantsDecomposition& P, const FNPoint& X,
                             const std::optional<CurveId>& root = std::nullopt) {
  return build_rep_as<double>(P, X, root);
}

/// Conjugator taking the far side of `c` into adjacency with `from`.
template <typename T>
BasicMat2<T> across(const BasicHolonomyRep<T>& rep, const CurveId& c, const SlotRef& from) {
  auto it = rep.glue.find(c);
  if (it == rep.glue.end()) fail(ErrorCode::BadInput, "curve " + c.name + " is not glued in this rep");
  const GlueSite& g = it->second;
  if (g.letter.empty()) return BasicMat2<T>::identity();
  const auto& t = rep.generator(g.letter);
  return g.side[0] == from ? t : t.inverse();
}

template <typename T>
BasicTriple<T> placed_triple(const BasicHolonomyRep<T>& rep, std::size_t p,
                             const BasicMat2<T>& by = BasicMat2<T>::identity()) {
  return {conj(by, rep.cuff(p, 0)), conj(by, rep.cuff(p, 1)), conj(by, rep.cuff(p, 2))};
}

/// Twist of an interior curve read back from the rep.
template <typename T>
T measured_twist(const BasicHolonomyRep<T>& rep, const CurveId& c) {
  auto it = rep.glue.find(c);
  if (it == rep.glue.end()) fail(ErrorCode::BadInput, "curve " + c.name + " is not glued in this rep");
  const auto [a, b] = it->second.side;
  const auto t1 = placed_triple(rep, a.pants);
  const auto t2 = placed_triple(rep, b.pants, across(rep, c, a));
  return seam_twist(t1, a.slot, foot_slot(rep.pants[a.pants], a.slot), t2, foot_slot(rep.pants[b.pants], b.slot));
}

// ---- canonical models ----

struct TorusModel {
  Mat2 alpha, dual, hole;
};

/// One-holed torus (a, a, d): alpha = cuff in slot 0, dual = gluing letter.
inline TorusModel torus_model(double l0, double l, double tau) {
  const Triple g = pants_group(l, l, l0);
  const Mat2 t = detail::glue_matrix(g, 0, 1, g, 1, 0, tau);
  return {g[0], t, g[2]};
}

struct SphereModel {
  Mat2 a, g1, g4, h2, h3;
};

/// Four-holed sphere (a, C1, C4) u (a, C2, C3) glued along a.
inline SphereModel sphere_model(double l1, double l2, double l3, double l4, double l, double tau) {
  const Triple g = pants_group(l, l1, l4);
  const Triple h = pants_group(l, l2, l3);
  const Mat2 phi = detail::glue_matrix(g, 0, 1, h, 0, 1, tau);
  return {g[0], g[1], g[2], conj(phi, h[1]), conj(phi, h[2])};
}

struct TorusMoveInput {
  double l0 = 0.0;
  double l = 1.0;
  double tau = 0.0;
};

struct SphereMoveInput {
  std::array<double, 4> holes{0.0, 0.0, 0.0, 0.0};
  double l = 1.0;
  double tau = 0.0;
};

inline void check_input(const TorusMoveInput& in) {
  if (!(in.l > 0.0) || !std::isfinite(in.l)) fail(ErrorCode::InvalidLength, "l must be > 0");
  if (!(in.l0 >= 0.0) || !std::isfinite(in.l0)) fail(ErrorCode::InvalidLength, "l0 must be >= 0");
  if (!std::isfinite(in.tau)) fail(ErrorCode::BadInput, "tau must be finite");
}

inline void check_input(const SphereMoveInput& in) {
  if (!(in.l > 0.0) || !std::isfinite(in.l)) fail(ErrorCode::InvalidLength, "l must be > 0");
  for (double h : in.holes)
    if (!(h >= 0.0) || !std::isfinite(h)) fail(ErrorCode::InvalidLength, "hole lengths must be >= 0");
  if (!std::isfinite(in.tau)) fail(ErrorCode::BadInput, "tau must be finite");
}

/// Rep of the one-holed torus; words alpha, dual, boundary, sign.
inline HolonomyRep build_torus_rep(const TorusMoveInput& in) {
  check_input(in);
  FNPoint X({{"a", {in.l, in.tau}}, {"d", {in.l0, 0.0}}});
  HolonomyRep rep = build_rep(one_holed_torus("a", "d"), X, CurveId("a"));
  rep.words["alpha"] = parse_word("P0.0");
  rep.words["dual"] = parse_word("t:a");
  rep.words["boundary"] = parse_word("P0.0 t:a P0.0^-1 t:a^-1");
  rep.words["sign"] = parse_word("P0.0 t:a");
  rep.relations.push_back({"boundary", rep.words["boundary"],
                           in.l0 == 0.0 ? RelationKind::Parabolic : RelationKind::Hyperbolic, in.l0});
  return rep;
}

/// Rep of the four-holed sphere; words alpha, dual, sign, C1..C4.
inline HolonomyRep build_sphere_rep(const SphereMoveInput& in) {
  check_input(in);
  FNPoint X({{"a", {in.l, in.tau}},
             {"C1", {in.holes[0], 0.0}},
             {"C2", {in.holes[1], 0.0}},
             {"C3", {in.holes[2], 0.0}},
             {"C4", {in.holes[3], 0.0}}});
  HolonomyRep rep = build_rep(four_holed_sphere("a"), X, CurveId("a"));
  rep.words["alpha"] = parse_word("P0.0");
  rep.words["dual"] = parse_word("P0.1 P1.1");
  rep.words["sign"] = parse_word("P0.1 P1.1 P0.1 P0.2");
  return rep;
}

// ---- dual measurement ----

struct DualMeasurement {
  double l_prime = 0.0;
  double tau_prime = 0.0;
  double residual = 0.0;       // |alpha length mismatch| at the returned twist
  double sign_residual = 0.0;  // |sign word mismatch| at the returned twist
};

/// alpha, dual and sign-word elements of the move's subsurface, plus the
/// hole lengths in the order used by the rebuilt model.
struct MoveElements {
  Mat2 alpha, dual, sign;
  std::array<double, 4> holes{};
};

inline MoveElements move_elements(const HolonomyRep& rep, const MoveDescriptor& M) {
  MoveElements e;
  if (rep.pants.empty()) fail(ErrorCode::BadInput, "rep has no pants layout");
  if (M.kind == MoveKind::Torus) {
    const SlotRef s = M.sites[0];
    const auto& site = rep.glue.at(M.curve);
    const Mat2& t = rep.generator(site.letter);
    e.alpha = rep.cuff(s.pants, s.slot);
    e.dual = site.side[0] == s ? t : t.inverse();
    e.sign = e.alpha * e.dual;
    e.holes[0] = length_of(rep.cuff(s.pants, (s.slot + 2) % 3));
    return e;
  }
  const SlotRef s = M.sites[0], r = M.sites[1];
  const Mat2 k = across(rep, M.curve, s);
  const Mat2 gx = rep.cuff(s.pants, (s.slot + 1) % 3);
  const Mat2 gy = rep.cuff(s.pants, (s.slot + 2) % 3);
  const Mat2 hz = conj(k, rep.cuff(r.pants, (r.slot + 1) % 3));
  const Mat2 hw = conj(k, rep.cuff(r.pants, (r.slot + 2) % 3));
  e.alpha = rep.cuff(s.pants, s.slot);
  e.dual = gx * hz;
  e.sign = gx * hz * gx * gy;
  e.holes = {length_of(gx), length_of(hz), length_of(hw), length_of(gy)};
  return e;
}

namespace detail {

// Lengths of (old curve, sign word) in the model built on the dual curve.
inline std::pair<double, double> dual_model_lengths(const MoveDescriptor& M, const std::array<double, 4>& h,
                                                    double lp, double u) {
  if (M.kind == MoveKind::Torus) {
    const TorusModel t = torus_model(h[0], lp, u);
    return {length_of(t.dual), length_of(t.dual * t.alpha.inverse())};
  }
  const SphereModel s = sphere_model(h[0], h[3], h[2], h[1], lp, u);
  return {length_of(s.g1 * s.h2), length_of(s.g1 * s.g4 * s.h2 * s.g1)};
}

template <typename F>
double bisect(F&& f, double lo, double hi, int iters) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Length and signed twist of the dual curve, recovered by rebuilding the
/// subsurface on the dual curve and matching lengths.
inline DualMeasurement measure_dual(const HolonomyRep& rep, const MoveDescriptor& M) {
  const MoveElements e = move_elements(rep, M);
  const double l = length_of(e.alpha);
  const double w = length_of(e.sign);
  DualMeasurement out;
  out.l_prime = length_of(e.dual);
  const double lp = out.l_prime;
  auto fa = [&](double u) { return detail::dual_model_lengths(M, e.holes, lp, u).first - l; };
  auto fw = [&](double u) { return detail::dual_model_lengths(M, e.holes, lp, u).second - w; };

  double u = 0.0;
  const double hi = 4.0 * (lp + 1.0);
  if (fa(0.0) < 0.0) {
    if (fa(hi) < 0.0) {
      fail(ErrorCode::TwistRecoveryFailed, "no bracket: residual at upper end " + std::to_string(fa(hi)));
    }
    u = detail::bisect(fa, 0.0, hi, 200);
  }
  // sign from the sign word
  if (std::abs(fw(-u)) < std::abs(fw(u))) u = -u;
  // refine on the steeper of the two length functions
  const double h = 1e-5;
  const double sa = std::abs(fa(u + h) - fa(u - h));
  const double sw = std::abs(fw(u + h) - fw(u - h));
  const double delta = 1e-6 * std::max(1.0, std::abs(u));
  auto refine = [&](auto&& f) -> bool {
    const double lo = u - delta, up = u + delta;
    if ((f(lo) < 0.0) == (f(up) < 0.0)) return false;
    u = detail::bisect(f, lo, up, 200);
    return true;
  };
  if (sw >= sa) {
    if (!refine(fw)) refine(fa);
  } else {
    if (!refine(fa)) refine(fw);
  }
  out.tau_prime = u;
  out.residual = std::abs(fa(u));
  out.sign_residual = std::abs(fw(u));
  return out;
}

inline DualMeasurement measure_dual(const TorusMoveInput& in) {
  return measure_dual(build_torus_rep(in), describe_move(one_holed_torus("a", "d"), "a"));
}

inline DualMeasurement measure_dual(const SphereMoveInput& in) {
  return measure_dual(build_sphere_rep(in), describe_move(four_holed_sphere("a"), "a"));
}

// ---- shear coordinates on the one-holed torus ----

struct ShearTriple {
  double s_a = 0.0, s_b = 0.0, s_c = 0.0;
};

inline double shear_boundary_length(const ShearTriple& s) { return std::abs(s.s_a + s.s_b + s.s_c); }

namespace detail {

// Map sending z1 -> 0, z2 -> inf, z3 -> 1 (entries may be infinite).
inline Mat2 cross_ratio_map(double z1, double z2, double z3) {
  if (std::isinf(z1)) return {0.0, z3 - z2, 1.0, -z2};
  if (std::isinf(z2)) return {1.0, -z1, 0.0, z3 - z1};
  if (std::isinf(z3)) return {1.0, -z1, 1.0, -z2};
  return {z3 - z2, -z1 * (z3 - z2), z3 - z1, -z2 * (z3 - z1)};
}

inline Mat2 three_point_map(const std::array<double, 3>& src, const std::array<double, 3>& dst) {
  const Mat2 m = cross_ratio_map(dst[0], dst[1], dst[2]).inverse() * cross_ratio_map(src[0], src[1], src[2]);
  if (!(m.det() > 0.0)) fail(ErrorCode::NotRealizable, "side pairing reverses orientation");
  return m.normalized();
}

}  // namespace detail

/// Side pairings of the ideal quadrilateral (inf, -1, 0, e^c) cut along
/// the diagonal c; A pairs (0, e^c) with (-1, inf), B pairs (e^c, inf) with
/// (-1, 0). Boundary word A B A^-1 B^-1.
inline HolonomyRep shear_to_rep(const ShearTriple& s) {
  const double a = 0.5 * s.s_a, b = 0.5 * s.s_b, c = 0.5 * s.s_c;
  if (!std::isfinite(a + b + c)) fail(ErrorCode::BadInput, "shears must be finite");
  const Mat2 A = detail::three_point_map({0.0, std::exp(c), kInf}, {-1.0, kInf, -1.0 - std::exp(-a)});
  const Mat2 B = detail::three_point_map({std::exp(c), kInf, 0.0}, {0.0, -1.0, -1.0 / (1.0 + std::exp(b))});
  for (const Mat2* m : {&A, &B})
    if (std::abs(m->trace()) <= 2.0 + kParabolicTol) fail(ErrorCode::NotRealizable, "generator is not hyperbolic");
  HolonomyRep rep;
  rep.generators = {{"A", A}, {"B", B}};
  rep.words["alpha"] = parse_word("A");
  rep.words["dual"] = parse_word("B");
  rep.words["boundary"] = parse_word("A B A^-1 B^-1");
  const double l0 = shear_boundary_length(s);
  rep.relations.push_back({"boundary", rep.words["boundary"],
                           l0 == 0.0 ? RelationKind::Parabolic : RelationKind::Hyperbolic, l0});
  return rep;
}

}  // namespace fnmetric
