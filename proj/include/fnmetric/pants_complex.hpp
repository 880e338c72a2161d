#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace fnmetric {

struct CurveId {
  std::string name;

  CurveId() = default;
  CurveId(std::string n) : name(std::move(n)) {}
  CurveId(const char* n) : name(n) {}

  auto operator<=>(const CurveId&) const = default;
  bool operator==(const CurveId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const CurveId& c) { return os << c.name; }

/// Name of the curve that replaces `c` under an elementary move.
inline CurveId dual_name(const CurveId& c) {
  if (!c.name.empty() && c.name.back() == '\'') return CurveId(c.name.substr(0, c.name.size() - 1));
  return CurveId(c.name + "'");
}

enum class CurveKind { Interior, Boundary, Cusp };

inline const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::Interior: return "interior";
    case CurveKind::Boundary: return "boundary";
    case CurveKind::Cusp: return "cusp";
  }
  return "?";
}

struct SlotRef {
  std::size_t pants;
  int slot;
  auto operator<=>(const SlotRef&) const = default;
};

struct Pants {
  std::array<CurveId, 3> cuffs;
  bool operator==(const Pants&) const = default;
};

struct CurveRecord {
  CurveKind kind = CurveKind::Interior;
  std::vector<SlotRef> slots;
};

// ---- lazy ladder of four-holed spheres ----

/// Family of designated curves: role "a" (block cores) or "e" (chain
/// curves), indices start + stride * n for all integers n.
struct LadderFamily {
  std::string role = "a";
  long start = 0;
  long stride = 1;
  bool operator==(const LadderFamily&) const = default;
};

/// Bi-infinite chain of blocks; block k is the four-holed sphere
/// (a[k], e[k], b1[k]) u (a[k], e[k+1], b2[k]).
struct LadderSpec {
  std::vector<LadderFamily> designated{LadderFamily{}};
  bool operator==(const LadderSpec&) const = default;
};

struct LadderCurve {
  std::string role;
  long index;
};

inline std::optional<LadderCurve> parse_ladder_curve(const CurveId& c) {
  const auto& s = c.name;
  const auto open = s.find('[');
  if (open == std::string::npos || s.empty() || s.back() != ']') return std::nullopt;
  const std::string role = s.substr(0, open);
  if (role != "a" && role != "e" && role != "b1" && role != "b2" && role != "a'" && role != "e'")
    return std::nullopt;
  try {
    std::size_t used = 0;
    const std::string num = s.substr(open + 1, s.size() - open - 2);
    const long k = std::stol(num, &used);
    if (used != num.size()) return std::nullopt;
    return LadderCurve{role, k};
  } catch (...) {
    return std::nullopt;
  }
}

inline CurveId ladder_curve(const std::string& role, long k) {
  return CurveId(role + "[" + std::to_string(k) + "]");
}

class LadderGenerator {
 public:
  explicit LadderGenerator(LadderSpec spec) : spec_(std::move(spec)) {
    for (const auto& f : spec_.designated) {
      if (f.stride <= 0) fail(ErrorCode::BadInput, "ladder stride must be positive");
      if (f.role != "a" && f.role != "e") fail(ErrorCode::BadInput, "ladder role must be a or e");
    }
    check_overlap();
  }

  const LadderSpec& spec() const { return spec_; }

  const std::array<Pants, 2>& block(long k) const {
    {
      std::shared_lock lock(mu_);
      auto it = cache_.find(k);
      if (it != cache_.end()) return it->second;
    }
    std::unique_lock lock(mu_);
    auto [it, inserted] = cache_.try_emplace(k, make_block(k));
    return it->second;
  }

  std::size_t materialized() const {
    std::shared_lock lock(mu_);
    return cache_.size();
  }

  bool designated(const CurveId& c) const {
    auto lc = parse_ladder_curve(c);
    if (!lc) return false;
    for (const auto& f : spec_.designated)
      if (f.role == lc->role && mod(lc->index - f.start, f.stride) == 0) return true;
    return false;
  }

 private:
  static long mod(long a, long m) { return ((a % m) + m) % m; }

  static std::array<Pants, 2> make_block(long k) {
    return {Pants{{ladder_curve("a", k), ladder_curve("e", k), ladder_curve("b1", k)}},
            Pants{{ladder_curve("a", k), ladder_curve("e", k + 1), ladder_curve("b2", k)}}};
  }

  // Neighbourhood of a designated curve, as pants labels (block, side).
  static std::vector<std::pair<long, int>> neighborhood(const std::string& role, long k) {
    if (role == "a") return {{k, 0}, {k, 1}};
    return {{k - 1, 1}, {k, 0}};
  }

  void check_overlap() const {
    long period = 1;
    for (const auto& f : spec_.designated) period = std::lcm(period, f.stride);
    std::map<std::pair<long, int>, std::string> owner;
    for (const auto& f : spec_.designated) {
      for (long k = -2 * period; k <= 2 * period; ++k) {
        if (mod(k - f.start, f.stride) != 0) continue;
        const std::string name = f.role + "[" + std::to_string(k) + "]";
        for (const auto& p : neighborhood(f.role, k)) {
          auto [it, fresh] = owner.try_emplace(p, name);
          if (!fresh && it->second != name)
            fail(ErrorCode::OverlappingNeighborhoods,
                 "neighbourhoods of " + it->second + " and " + name + " share a pants");
        }
      }
    }
  }

  LadderSpec spec_;
  mutable std::shared_mutex mu_;
  mutable std::map<long, std::array<Pants, 2>> cache_;
};

// ---- decompositions ----

class PantsDecomposition {
 public:
  PantsDecomposition() = default;

  /// Finite decomposition; curves missing from `kinds` are interior when
  /// referenced twice and boundary otherwise.
  PantsDecomposition(std::vector<Pants> pants, std::map<CurveId, CurveKind> kinds = {})
      : pants_(std::move(pants)), kinds_(std::move(kinds)) {
    rebuild_table();
  }

  static PantsDecomposition ladder(LadderSpec spec) {
    PantsDecomposition p;
    p.ladder_ = std::make_shared<const LadderGenerator>(std::move(spec));
    return p;
  }

  bool is_finite() const { return ladder_ == nullptr; }
  const LadderGenerator* generator() const { return ladder_.get(); }

  const std::vector<Pants>& pants() const {
    require_finite();
    return pants_;
  }
  const std::map<CurveId, CurveRecord>& curves() const {
    require_finite();
    return table_;
  }
  /// Kinds as given on construction (before inference).
  const std::map<CurveId, CurveKind>& declared_kinds() const { return kinds_; }

  bool contains(const CurveId& c) const {
    if (is_finite()) return table_.count(c) > 0;
    auto lc = parse_ladder_curve(c);
    return lc && lc->role.back() != '\'';
  }

  CurveKind kind(const CurveId& c) const {
    if (is_finite()) {
      auto it = table_.find(c);
      if (it == table_.end()) fail(ErrorCode::BadInput, "unknown curve " + c.name);
      return it->second.kind;
    }
    auto lc = parse_ladder_curve(c);
    if (!lc || lc->role.back() == '\'') fail(ErrorCode::BadInput, "unknown curve " + c.name);
    return (lc->role == "a" || lc->role == "e") ? CurveKind::Interior : CurveKind::Boundary;
  }

  const CurveRecord& record(const CurveId& c) const {
    require_finite();
    auto it = table_.find(c);
    if (it == table_.end()) fail(ErrorCode::BadInput, "unknown curve " + c.name);
    return it->second;
  }

  /// Blocks first..last of a ladder as a finite decomposition; the chain
  /// curves at both ends become boundary curves.
  PantsDecomposition window(long first, long last) const {
    if (is_finite()) fail(ErrorCode::BadInput, "window of a finite decomposition");
    if (last < first) fail(ErrorCode::BadInput, "empty window");
    std::vector<Pants> ps;
    for (long k = first; k <= last; ++k) {
      const auto& b = ladder_->block(k);
      ps.push_back(b[0]);
      ps.push_back(b[1]);
    }
    std::map<CurveId, CurveKind> kinds;
    for (long k = first; k <= last; ++k) {
      kinds[ladder_curve("b1", k)] = CurveKind::Boundary;
      kinds[ladder_curve("b2", k)] = CurveKind::Boundary;
    }
    kinds[ladder_curve("e", first)] = CurveKind::Boundary;
    kinds[ladder_curve("e", last + 1)] = CurveKind::Boundary;
    return PantsDecomposition(std::move(ps), std::move(kinds));
  }

  /// Order-independent text form: each pants rotated to its least cyclic
  /// rotation, pants sorted, then curve kinds.
  std::string canonical_form() const {
    require_finite();
    std::vector<std::string> rows;
    for (const auto& p : pants_) {
      std::string best;
      for (int r = 0; r < 3; ++r) {
        std::string s = p.cuffs[r].name + "," + p.cuffs[(r + 1) % 3].name + "," +
                        p.cuffs[(r + 2) % 3].name;
        if (best.empty() || s < best) best = s;
      }
      rows.push_back("(" + best + ")");
    }
    std::sort(rows.begin(), rows.end());
    std::string out;
    for (const auto& r : rows) out += r;
    for (const auto& [c, rec] : table_) out += " " + c.name + ":" + to_string(rec.kind);
    return out;
  }

 private:
  void require_finite() const {
    if (!is_finite()) fail(ErrorCode::FiniteOnly, "operation needs a finite decomposition");
  }

  void rebuild_table() {
    table_.clear();
    for (std::size_t i = 0; i < pants_.size(); ++i)
      for (int k = 0; k < 3; ++k) table_[pants_[i].cuffs[k]].slots.push_back({i, k});
    for (auto& [c, rec] : table_) {
      auto it = kinds_.find(c);
      if (it != kinds_.end()) rec.kind = it->second;
      else rec.kind = rec.slots.size() == 2 ? CurveKind::Interior : CurveKind::Boundary;
    }
    for (const auto& [c, k] : kinds_)
      if (!table_.count(c)) table_[c] = CurveRecord{k, {}};
  }

  std::vector<Pants> pants_;
  std::map<CurveId, CurveKind> kinds_;
  std::map<CurveId, CurveRecord> table_;
  std::shared_ptr<const LadderGenerator> ladder_;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> issues;
  std::vector<CurveId> offending;
  int genus = 0;
  int holes = 0;
};

inline ValidationReport validate(const PantsDecomposition& P) {
  ValidationReport r;
  if (!P.is_finite()) {
    // Lazy decompositions are valid by construction; check a sample window.
    auto w = validate(P.window(0, 2));
    w.genus = 0;
    w.holes = -1;
    return w;
  }
  auto bad = [&](const CurveId& c, std::string msg) {
    r.valid = false;
    r.issues.push_back(c.name + ": " + std::move(msg));
    r.offending.push_back(c);
  };
  if (P.pants().empty()) {
    r.valid = false;
    r.issues.push_back("no pants");
    return r;
  }
  int holes = 0;
  for (const auto& [c, rec] : P.curves()) {
    const std::size_t n = rec.slots.size();
    if (rec.kind == CurveKind::Interior) {
      if (n != 2) bad(c, "interior curve referenced by " + std::to_string(n) + " slots");
    } else {
      if (n != 1) bad(c, std::string(to_string(rec.kind)) + " curve referenced by " + std::to_string(n) + " slots");
      ++holes;
    }
  }
  // connectivity over interior curves
  const std::size_t np = P.pants().size();
  std::vector<std::size_t> parent(np);
  for (std::size_t i = 0; i < np; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  for (const auto& [c, rec] : P.curves())
    if (rec.slots.size() == 2) parent[root(rec.slots[0].pants)] = root(rec.slots[1].pants);
  for (std::size_t i = 1; i < np; ++i)
    if (root(i) != root(0)) {
      r.valid = false;
      r.issues.push_back("pants " + std::to_string(i) + " is disconnected from pants 0");
    }
  const long twice_genus = 2 + static_cast<long>(np) - holes;
  if (twice_genus < 0 || twice_genus % 2 != 0) {
    r.valid = false;
    r.issues.push_back("Euler characteristic does not match an orientable surface");
  }
  r.genus = static_cast<int>(twice_genus / 2);
  r.holes = holes;
  return r;
}

// ---- FN points ----

struct CurveParams {
  double length = 1.0;
  double twist = 0.0;
  bool operator==(const CurveParams&) const = default;
};

/// Parameters for curves not listed explicitly (shared between points).
struct BaseRule {
  std::string name;
  std::function<std::optional<CurveParams>(const CurveId&)> eval;
};

class FNPoint {
 public:
  FNPoint() = default;
  explicit FNPoint(std::map<CurveId, CurveParams> base) : base_(std::move(base)) {}

  const std::map<CurveId, CurveParams>& base() const { return base_; }
  const std::map<CurveId, CurveParams>& overrides() const { return overrides_; }
  const std::optional<CurveParams>& fallback() const { return fallback_; }
  const std::shared_ptr<const BaseRule>& rule() const { return rule_; }
  const std::set<CurveId>& oracle_required() const { return oracle_required_; }

  void set_base(const CurveId& c, CurveParams p) { base_[c] = p; }
  void set_fallback(std::optional<CurveParams> p) { fallback_ = p; }
  void set_rule(std::shared_ptr<const BaseRule> r) { rule_ = std::move(r); }
  void set(const CurveId& c, CurveParams p) { overrides_[c] = p; }
  void flag_oracle_required(const CurveId& c) { oracle_required_.insert(c); }
  void clear_flag(const CurveId& c) { oracle_required_.erase(c); }

  std::optional<CurveParams> find(const CurveId& c) const {
    if (auto it = overrides_.find(c); it != overrides_.end()) return it->second;
    return find_base(c);
  }

  std::optional<CurveParams> find_base(const CurveId& c) const {
    if (auto it = base_.find(c); it != base_.end()) return it->second;
    if (rule_) {
      if (auto p = rule_->eval(c)) return p;
    }
    return fallback_;
  }

  CurveParams at(const CurveId& c) const {
    auto p = find(c);
    if (!p) fail(ErrorCode::BadInput, "no parameters for curve " + c.name);
    return *p;
  }
  double length(const CurveId& c) const { return at(c).length; }
  double twist(const CurveId& c) const { return at(c).twist; }

  /// Curves carrying explicit data (base map plus overrides).
  std::set<CurveId> explicit_support() const {
    std::set<CurveId> s;
    for (const auto& [c, p] : base_) s.insert(c);
    for (const auto& [c, p] : overrides_) s.insert(c);
    return s;
  }

  /// Same implicit base: equal fallbacks and the same rule.
  bool shares_implicit_base(const FNPoint& o) const {
    if (fallback_ != o.fallback_) return false;
    if (!rule_ || !o.rule_) return !rule_ && !o.rule_;
    return rule_ == o.rule_ || rule_->name == o.rule_->name;
  }

 private:
  std::map<CurveId, CurveParams> base_;
  std::optional<CurveParams> fallback_;
  std::shared_ptr<const BaseRule> rule_;
  std::map<CurveId, CurveParams> overrides_;
  std::set<CurveId> oracle_required_;
};

/// Checks the point against the decomposition; returns issue strings.
inline std::vector<std::string> point_issues(const FNPoint& X, const PantsDecomposition& P) {
  std::vector<std::string> out;
  auto check = [&](const CurveId& c, const CurveParams& p) {
    if (!P.contains(c)) {
      out.push_back(c.name + ": not a curve of the decomposition");
      return;
    }
    const CurveKind k = P.kind(c);
    if (!std::isfinite(p.length) || !std::isfinite(p.twist)) out.push_back(c.name + ": non-finite parameter");
    if (k == CurveKind::Interior && !(p.length > 0.0)) out.push_back(c.name + ": interior length must be > 0");
    if (k == CurveKind::Boundary && !(p.length >= 0.0)) out.push_back(c.name + ": boundary length must be >= 0");
    if (k == CurveKind::Cusp && p.length != 0.0) out.push_back(c.name + ": cusp must have length 0");
  };
  for (const auto& [c, p] : X.base()) check(c, p);
  for (const auto& [c, p] : X.overrides()) check(c, p);
  if (P.is_finite()) {
    for (const auto& [c, rec] : P.curves()) {
      auto p = X.find(c);
      if (!p) out.push_back(c.name + ": missing parameters");
      else check(c, *p);
    }
  }
  return out;
}

namespace detail {

inline double curve_term(const CurveId& c, CurveKind k, const CurveParams& x, const CurveParams& y) {
  double lterm = 0.0;
  if (x.length == 0.0 || y.length == 0.0) {
    if (x.length != y.length)
      fail(ErrorCode::IncomparablePoints, "cusp paired with positive length at " + c.name);
  } else {
    lterm = std::log(std::max(x.length, y.length) / std::min(x.length, y.length));
  }
  if (k != CurveKind::Interior) return lterm;
  return std::max(lterm, std::abs(x.twist - y.twist));
}

inline void require_defined(const FNPoint& X, const PantsDecomposition& P) {
  for (const auto& c : X.explicit_support())
    if (!P.contains(c)) fail(ErrorCode::DecompositionMismatch, "curve " + c.name + " not in decomposition");
  if (P.is_finite())
    for (const auto& [c, rec] : P.curves())
      if (!X.find(c)) fail(ErrorCode::DecompositionMismatch, "point has no parameters for " + c.name);
}

}  // namespace detail

/// Sup over curves of max(|log length ratio|, |twist difference|).
inline double fn_distance(const FNPoint& X, const FNPoint& Y, const PantsDecomposition& P) {
  detail::require_defined(X, P);
  detail::require_defined(Y, P);
  double d = 0.0;
  if (P.is_finite()) {
    for (const auto& [c, rec] : P.curves()) d = std::max(d, detail::curve_term(c, rec.kind, X.at(c), Y.at(c)));
    return d;
  }
  if (!X.shares_implicit_base(Y))
    fail(ErrorCode::IncomparablePoints, "infinite-type points must share their base rule");
  std::set<CurveId> support = X.explicit_support();
  for (const auto& c : Y.explicit_support()) support.insert(c);
  for (const auto& c : support) {
    auto x = X.find(c), y = Y.find(c);
    if (!x || !y) fail(ErrorCode::IncomparablePoints, "curve " + c.name + " defined on one side only");
    d = std::max(d, detail::curve_term(c, P.kind(c), *x, *y));
  }
  return d;
}

inline FNPoint twist_flow(const FNPoint& X, const PantsDecomposition& P, const CurveId& c, double t) {
  if (!P.contains(c)) fail(ErrorCode::BadInput, "unknown curve " + c.name);
  if (P.kind(c) != CurveKind::Interior) fail(ErrorCode::NoTwistParameter, c.name + " carries no twist");
  FNPoint Y = X;
  CurveParams p = X.at(c);
  p.twist += t;
  Y.set(c, p);
  return Y;
}

// ---- elementary moves ----

enum class MoveKind { Torus, Sphere };

struct MoveDescriptor {
  CurveId curve;
  CurveId dual;
  MoveKind kind = MoveKind::Sphere;
  /// Holes of the subsurface: [delta] for the torus, [C1, C2, C3, C4] for the sphere.
  std::vector<CurveId> neighborhood;
  /// Pants of the subsurface and the slot of the moved curve in each.
  std::vector<SlotRef> sites;
};

inline MoveDescriptor describe_move(const PantsDecomposition& P, const CurveId& c) {
  if (!P.contains(c) || P.kind(c) != CurveKind::Interior)
    fail(ErrorCode::NotMovable, c.name + " is not an interior curve");
  const auto& rec = P.record(c);
  if (rec.slots.size() != 2) fail(ErrorCode::NotMovable, c.name + " is not glued on two cuffs");
  MoveDescriptor m;
  m.curve = c;
  m.dual = dual_name(c);
  const auto& ps = P.pants();
  SlotRef s0 = rec.slots[0], s1 = rec.slots[1];
  if (s0.pants == s1.pants) {
    m.kind = MoveKind::Torus;
    // order so that the second slot follows the first cyclically
    if ((s0.slot + 1) % 3 != s1.slot) std::swap(s0, s1);
    m.sites = {s0, s1};
    m.neighborhood = {ps[s0.pants].cuffs[(s0.slot + 2) % 3]};
    return m;
  }
  m.kind = MoveKind::Sphere;
  m.sites = {s0, s1};
  const auto& p = ps[s0.pants].cuffs;
  const auto& q = ps[s1.pants].cuffs;
  const CurveId x = p[(s0.slot + 1) % 3], y = p[(s0.slot + 2) % 3];
  const CurveId z = q[(s1.slot + 1) % 3], w = q[(s1.slot + 2) % 3];
  m.neighborhood = {x, z, w, y};
  return m;
}

/// Replaces `c` by its dual curve inside the one-holed torus or four-holed
/// sphere it fills.
inline std::pair<PantsDecomposition, MoveDescriptor> elementary_move(const PantsDecomposition& P,
                                                                     const CurveId& c) {
  if (!P.is_finite()) fail(ErrorCode::FiniteOnly, "take a window of the ladder before moving");
  MoveDescriptor m = describe_move(P, c);
  if (P.contains(m.dual)) fail(ErrorCode::NotMovable, "dual name " + m.dual.name + " already in use");
  std::vector<Pants> ps = P.pants();
  if (m.kind == MoveKind::Torus) {
    auto& p = ps[m.sites[0].pants].cuffs;
    p[m.sites[0].slot] = m.dual;
    p[m.sites[1].slot] = m.dual;
  } else {
    const auto& C = m.neighborhood;  // x, z, w, y
    const int k = m.sites[0].slot, j = m.sites[1].slot;
    auto& p = ps[m.sites[0].pants].cuffs;
    auto& q = ps[m.sites[1].pants].cuffs;
    p[k] = m.dual;
    p[(k + 1) % 3] = C[0];
    p[(k + 2) % 3] = C[1];
    q[j] = m.dual;
    q[(j + 1) % 3] = C[3];
    q[(j + 2) % 3] = C[2];
  }
  std::map<CurveId, CurveKind> kinds = P.declared_kinds();
  if (auto it = kinds.find(c); it != kinds.end()) {
    kinds.erase(it);
    kinds[m.dual] = CurveKind::Interior;
  }
  return {PantsDecomposition(std::move(ps), std::move(kinds)), m};
}

inline bool isomorphic(const PantsDecomposition& P, const PantsDecomposition& Q) {
  return P.canonical_form() == Q.canonical_form();
}

// ---- stock surfaces ----

inline PantsDecomposition one_holed_torus(const CurveId& alpha = "a", const CurveId& hole = "d") {
  return PantsDecomposition({Pants{{alpha, alpha, hole}}});
}

inline PantsDecomposition four_holed_sphere(const CurveId& alpha = "a") {
  return PantsDecomposition({Pants{{alpha, "C1", "C4"}}, Pants{{alpha, "C2", "C3"}}});
}

/// (a, C1, C4) u (a, C2, C3) u (C1, D1, D2): five holes, interior curves a and C1.
inline PantsDecomposition five_holed_sphere() {
  return PantsDecomposition({Pants{{"a", "C1", "C4"}}, Pants{{"a", "C2", "C3"}}, Pants{{"C1", "D1", "D2"}}});
}

}  // namespace fnmetric
