#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "error.hpp"
#include "format.hpp"
#include "holonomy.hpp"
#include "hyperbolic_core.hpp"
#include "move_transforms.hpp"
#include "pants_complex.hpp"

namespace fnmetric {

// ---- workers ----

/// Hardware concurrency, capped by FNMETRIC_THREADS when set.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FNMETRIC_THREADS"); env && *env) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*end != '\0' || cap < 1) fail(ErrorCode::BadInput, std::string("FNMETRIC_THREADS must be a positive integer, got ") + env);
    n = std::min<unsigned>(n, static_cast<unsigned>(std::min<long>(cap, 1 << 16)));
  }
  return n;
}

/// f(0..n-1) on the worker pool; results in index order. The lowest-index
/// exception is rethrown.
template <typename F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using T = decltype(f(std::size_t{}));
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t k = std::min<std::size_t>(worker_count(), n);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < k; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---- reports ----

struct ReportRow {
  std::vector<double> values;
  std::vector<bool> flags;  // empty when skipped
  std::string note;
  bool skipped() const { return flags.empty(); }
  bool pass() const { return std::all_of(flags.begin(), flags.end(), [](bool b) { return b; }); }
};

struct ExperimentReport {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::string> flag_columns;
  std::vector<ReportRow> rows;
  std::map<std::string, double> fitted_slopes;
  std::map<std::string, double> constants;
  std::map<std::string, bool> checks;

  std::size_t column(const std::string& c) const {
    auto it = std::find(columns.begin(), columns.end(), c);
    if (it == columns.end()) fail(ErrorCode::BadInput, "no column " + c);
    return static_cast<std::size_t>(it - columns.begin());
  }
  double value(std::size_t row, const std::string& c) const { return rows.at(row).values.at(column(c)); }
  bool flag(std::size_t row, const std::string& f) const {
    auto it = std::find(flag_columns.begin(), flag_columns.end(), f);
    if (it == flag_columns.end()) fail(ErrorCode::BadInput, "no flag " + f);
    const auto& r = rows.at(row);
    return !r.skipped() && r.flags.at(static_cast<std::size_t>(it - flag_columns.begin()));
  }

  std::size_t skipped_rows() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.skipped(); }));
  }
  std::size_t failed_rows() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.skipped() && !r.pass(); }));
  }
  std::size_t passed_rows() const { return rows.size() - skipped_rows() - failed_rows(); }
  bool pass() const {
    return failed_rows() == 0 && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
  }

  /// Columns, then flag columns as 0/1, then the note.
  void write_csv(std::ostream& os) const {
    bool first = true;
    auto sep = [&] {
      if (!first) os << ',';
      first = false;
    };
    for (const auto& c : columns) sep(), os << c;
    for (const auto& f : flag_columns) sep(), os << f;
    sep(), os << "note\n";
    for (const auto& r : rows) {
      first = true;
      for (double v : r.values) sep(), os << format_double(v);
      for (std::size_t i = 0; i < flag_columns.size(); ++i) sep(), os << (r.skipped() ? "" : (r.flags[i] ? "1" : "0"));
      sep(), os << r.note << '\n';
    }
  }
};

namespace detail {

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxx > 0 ? sxy / sxx : std::nan("");
}

inline bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline void check_descending(const std::vector<double>& grid, double upper) {
  if (grid.empty()) fail(ErrorCode::BadGrid, "empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !(grid[i] < upper))
      fail(ErrorCode::BadGrid, "grid value " + format_double(grid[i]) + " outside (0, " + format_double(upper) + ")");
    if (i > 0 && !(grid[i] < grid[i - 1])) fail(ErrorCode::BadGrid, "grid must be strictly descending");
  }
}

// Index of the row whose key equals x^2 to relative 1e-12, if any.
inline std::optional<std::size_t> square_partner(const std::vector<double>& keys, double x) {
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (std::abs(keys[i] - x * x) <= 1e-12 * x * x) return i;
  return std::nullopt;
}

}  // namespace detail

// ---- bound sweeps ----

inline std::vector<double> decade_grid(int from, int to) {
  std::vector<double> g;
  for (int e = from; e <= to; ++e) g.push_back(std::pow(10.0, -e));
  return g;
}

struct SweepConfig {
  double L = 2.0;
  double t = 1.0;
  std::vector<double> l_grid = decade_grid(1, 6);
  double eps0 = 1e-2;
  std::uint64_t seed = 0;
  double l0 = 0.0;
  std::array<double, 4> holes{0.0, 0.0, 0.0, 0.0};
};

inline void validate(const SweepConfig& cfg) {
  detail::check_descending(cfg.l_grid, 1.0);
  if (!(cfg.L > 0.0) || !std::isfinite(cfg.L)) fail(ErrorCode::BadConfiguration, "L must be positive");
  if (!(std::abs(cfg.t) <= cfg.L)) fail(ErrorCode::BadConfiguration, "|t| must not exceed L");
  if (!(cfg.eps0 > 0.0)) fail(ErrorCode::BadConfiguration, "eps0 must be positive");
  if (!(cfg.l0 >= 0.0 && cfg.l0 <= cfg.L)) fail(ErrorCode::BadConfiguration, "l0 must lie in [0, L]");
  for (double h : cfg.holes)
    if (!(h >= 0.0 && h <= cfg.L)) fail(ErrorCode::BadConfiguration, "hole lengths must lie in [0, L]");
}

namespace detail {

struct MovePair {
  MoveResult base, twisted;
};

inline ExperimentReport bound_sweep(const SweepConfig& cfg, bool sphere) {
  validate(cfg);
  ExperimentReport rep;
  rep.name = sphere ? "prop42" : "prop32";
  rep.columns = {"l", "l_prime", "l_prime_t", "tau_prime_t", "log_ratio", "middle_bound", "right_bound",
                 "tau_over_l", "collar_gap", "tail"};
  if (sphere) rep.columns.insert(rep.columns.end(), {"growth_ratio", "K"});
  rep.flag_columns = {"chain_left", "chain_right", "collar"};
  if (sphere) rep.flag_columns.push_back("growth_below_cosh_t");

  const auto moves = parallel_map(cfg.l_grid.size(), [&](std::size_t i) {
    const double l = cfg.l_grid[i];
    if (sphere) return MovePair{sphere_move({cfg.holes, l, 0.0}), sphere_move({cfg.holes, l, cfg.t})};
    return MovePair{torus_move({cfg.l0, l, 0.0}), torus_move({cfg.l0, l, cfg.t})};
  });

  double K = 1.0;
  if (sphere)
    for (double l : cfg.l_grid) K = std::max(K, sphere_growth_ratio(cfg.holes, l, cfg.t));
  if (sphere) rep.constants["K"] = K;
  else rep.constants["two_cosh_half_t"] = 2.0 * std::cosh(0.5 * cfg.t);

  std::vector<double> lx, ly;
  double M = 0.0, collar_eps = std::nan("");
  for (std::size_t i = 0; i < cfg.l_grid.size(); ++i) {
    const double l = cfg.l_grid[i];
    const auto& [r0, rt] = moves[i];
    const double lp = r0.l_prime, lpt = rt.l_prime;
    const double log_l = std::abs(std::log(l));
    const double k = sphere ? K : 2.0 * std::cosh(0.5 * cfg.t);
    ReportRow row;
    row.values = {l,
                  lp,
                  lpt,
                  rt.tau_prime,
                  std::log(lpt / lp),
                  k * (1.0 + std::exp(-lp)) / lp,
                  2.0 * k / log_l,
                  std::abs(rt.tau_prime) / l,
                  lp - log_l,
                  l <= cfg.eps0 ? 1.0 : 0.0};
    const double growth = sphere ? sphere_growth_ratio(cfg.holes, l, cfg.t) : 0.0;
    if (sphere) row.values.insert(row.values.end(), {growth, K});
    if (!all_finite(row.values)) {
      row.note = "skipped: non-finite value in double precision";
      rep.rows.push_back(std::move(row));
      continue;
    }
    const bool tail = l <= cfg.eps0;
    row.flags = {!tail || row.values[4] <= row.values[5], !tail || row.values[5] <= row.values[6],
                 !tail || lp >= log_l};
    if (sphere) row.flags.push_back(growth <= std::cosh(cfg.t));
    if (tail) {
      M = std::max(M, row.values[7]);
      if (rt.tau_prime != 0.0) {
        lx.push_back(std::log(l));
        ly.push_back(std::log(std::abs(rt.tau_prime)));
      }
    }
    if (lp >= log_l && std::isnan(collar_eps)) collar_eps = l;
    rep.rows.push_back(std::move(row));
  }
  rep.constants["M"] = M;
  rep.constants["collar_eps"] = collar_eps;
  if (lx.size() >= 2) {
    const double slope = detail::fit_slope(lx, ly);
    rep.fitted_slopes["tau_prime_t_vs_l"] = slope;
    rep.checks["slope_in_0.9_1.1"] = slope >= 0.9 && slope <= 1.1;
  }
  return rep;
}

}  // namespace detail

/// One-holed torus sweep of the length ratio and dual twist bounds.
inline ExperimentReport run_prop32(const SweepConfig& cfg) { return detail::bound_sweep(cfg, false); }

/// Four-holed sphere sweep; K is the sup of the growth ratio over the grid.
inline ExperimentReport run_prop42(const SweepConfig& cfg) { return detail::bound_sweep(cfg, true); }

// ---- shrinking sequences ----

inline std::vector<double> dyadic_grid(int from, int to) {
  std::vector<double> g;
  for (int n = from; n <= to; ++n) g.push_back(std::ldexp(1.0, -n));
  return g;
}

struct Seq52Config {
  MoveKind kind = MoveKind::Torus;
  double t = 1.0;
  std::vector<double> eps = dyadic_grid(1, 20);
  double l0 = 0.0;
  std::array<double, 4> holes{0.0, 0.0, 0.0, 0.0};
};

namespace detail {

struct PairDistances {
  double d1, d2, log_ratio, tau_prime_t;
};

inline PairDistances move_pair_distances(const PantsDecomposition& P, const FNPoint& X, const CurveId& c, double t) {
  const FNPoint Xt = twist_flow(X, P, c, t);
  const MovedPoint Y = move_fn_point(X, P, c);
  const MovedPoint Yt = move_fn_point(Xt, P, c);
  const CurveId d = Y.move.dual;
  return {fn_distance(X, Xt, P), fn_distance(Y.point, Yt.point, Y.decomposition),
          std::log(Yt.point.length(d) / Y.point.length(d)), Yt.point.twist(d) - Y.point.twist(d)};
}

}  // namespace detail

/// d_FN before and after the move along a sequence of shrinking alpha
/// lengths with perpendicular alpha and alpha'.
inline ExperimentReport run_seq52(const Seq52Config& cfg) {
  detail::check_descending(cfg.eps, 1.0);
  if (!std::isfinite(cfg.t)) fail(ErrorCode::BadConfiguration, "t must be finite");
  const bool sphere = cfg.kind == MoveKind::Sphere;
  const PantsDecomposition P = sphere ? four_holed_sphere("a") : one_holed_torus("a", "d");
  ExperimentReport rep;
  rep.name = "seq52";
  rep.columns = {"eps", "d_fn1", "d_fn2", "log_ratio", "tau_prime_t", "bound", "decay_ratio"};
  rep.flag_columns = {"d_fn1_exact", "decreasing", "below_bound", "decay"};

  const auto dist = parallel_map(cfg.eps.size(), [&](std::size_t i) {
    FNPoint X;
    X.set_base("a", {cfg.eps[i], 0.0});
    if (sphere) {
      for (int h = 0; h < 4; ++h) X.set_base("C" + std::to_string(h + 1), {cfg.holes[h], 0.0});
    } else {
      X.set_base("d", {cfg.l0, 0.0});
    }
    return detail::move_pair_distances(P, X, "a", cfg.t);
  });

  for (std::size_t i = 0; i < cfg.eps.size(); ++i) {
    const double e = cfg.eps[i];
    const auto& d = dist[i];
    const double k = sphere ? 2.0 * sphere_growth_ratio(cfg.holes, e, cfg.t) : 4.0 * std::cosh(0.5 * cfg.t);
    double ratio = std::nan("");
    const auto partner = detail::square_partner(cfg.eps, e);
    if (e <= 1e-3 && partner) ratio = dist[*partner].d2 / d.d2;
    ReportRow row;
    row.values = {e, d.d1, d.d2, d.log_ratio, d.tau_prime_t, k / std::abs(std::log(e)), ratio};
    row.flags = {d.d1 == std::abs(cfg.t), i == 0 || d.d2 < dist[i - 1].d2, d.d2 <= row.values[5],
                 std::isnan(ratio) || (ratio >= 0.45 && ratio <= 0.55)};
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// ---- intersection angles ----

/// Sign relating the cross-ratio cosine to the twist orientation of the
/// holonomy builder.
inline constexpr double kWolpertSign = 1.0;

struct AxisCrossing {
  Word lift;        // c is conjugated by this word
  double position;  // along the beta axis, modulo l(beta)
  double cos;
};

namespace detail {

// Endpoints of W c W^-1 in the frame of beta, mapped point by point so long
// conjugators keep their accuracy.
template <typename T>
std::optional<std::array<T, 2>> lift_in_frame(const BasicMat2<T>& beta_frame, const BasicMat2<T>& W,
                                              const std::array<T, 2>& fc) {
  using std::isfinite;
  const BasicMat2<T> m = beta_frame * W;
  const T u = apply(m, fc[0]), v = apply(m, fc[1]);
  if (!isfinite(u) || !isfinite(v) || !(u * v < 0)) return std::nullopt;
  return std::array<T, 2>{u, v};
}

// Position along beta and the angle cosine at the crossing.
template <typename T>
std::pair<double, double> crossing_data(const std::array<T, 2>& uv) {
  using std::abs;
  using std::log;
  const auto [u, v] = uv;
  return {static_cast<double>(log(-u * v) / 2), kWolpertSign * static_cast<double>((u + v) / abs(v - u))};
}

template <typename T>
std::vector<Word> short_words(const BasicHolonomyRep<T>& rep, int depth) {
  std::vector<Letter> letters;
  for (const auto& [name, m] : rep.generators) letters.push_back({name, 1}), letters.push_back({name, -1});
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (int d = 0; d < depth; ++d) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& l : letters) {
        if (!out[i].empty() && out[i].back().gen == l.gen && out[i].back().power == -l.power) continue;
        Word w = out[i];
        w.push_back(l);
        out.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return out;
}

}  // namespace detail

/// Crossings of the beta axis with lifts of c, one per point of beta
/// modulo its translation length.
template <typename T>
std::vector<AxisCrossing> axis_crossings(const BasicHolonomyRep<T>& rep, const Word& beta, const Word& c,
                                         int depth = 3) {
  const BasicMat2<T> b = rep.eval(beta);
  const BasicMat2<T> g = rep.eval(c);
  const double lb = static_cast<double>(length_of(b));
  if (!(lb > 0.0)) fail(ErrorCode::BadConfiguration, "beta must be hyperbolic");
  const auto fb = fixed_points(b);
  const BasicMat2<T> frame = to_axis(fb[0], fb[1]);
  const auto fc = fixed_points(g);
  std::vector<AxisCrossing> out;
  for (const Word& w : detail::short_words(rep, depth)) {
    const BasicMat2<T> W = rep.eval(w);
    // long conjugators lose the axis; their crossings repeat shorter ones
    if (W.max_abs() > T(1e3)) continue;
    const auto uv = detail::lift_in_frame(frame, W, fc);
    if (!uv) continue;
    const auto [pos, cs] = detail::crossing_data(*uv);
    const double r = pos - lb * std::floor(pos / lb);
    const double tol = 1e-6 * std::max(1.0, lb);
    const bool seen = std::any_of(out.begin(), out.end(), [&](const AxisCrossing& x) {
      const double d = std::abs(x.position - r);
      return d < tol || lb - d < tol;
    });
    if (seen) continue;
    if (std::abs(cs) > 1.0 - 1e-9) fail(ErrorCode::BadConfiguration, "near-tangent crossing");
    out.push_back({w, r, cs});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.position < y.position; });
  return out;
}

/// Cosines at the crossings of beta with the listed lifts of c.
template <typename T>
std::vector<double> lift_cosines(const BasicHolonomyRep<T>& rep, const Word& beta, const Word& c,
                                 const std::vector<Word>& lifts) {
  const BasicMat2<T> b = rep.eval(beta);
  const auto fb = fixed_points(b);
  const BasicMat2<T> frame = to_axis(fb[0], fb[1]);
  const auto fc = fixed_points(rep.eval(c));
  std::vector<double> out;
  for (const auto& w : lifts) {
    const auto uv = detail::lift_in_frame(frame, rep.eval(w), fc);
    if (!uv) fail(ErrorCode::BadConfiguration, "tracked crossing vanished");
    out.push_back(detail::crossing_data(*uv).second);
  }
  return out;
}

/// Words of beta refer to build_rep(P, X, c).
inline std::vector<AxisCrossing> wolpert_crossings(const PantsDecomposition& P, const FNPoint& X, const Word& beta,
                                                   const CurveId& c) {
  if (!P.is_finite()) fail(ErrorCode::FiniteOnly, "wolpert_derivative needs a finite decomposition");
  if (P.kind(c) != CurveKind::Interior) fail(ErrorCode::BadConfiguration, c.name + " is not interior");
  const auto rep = build_rep_as<WideReal>(P, X, c);
  auto x = axis_crossings(rep, beta, rep.word(c.name));
  if (x.size() != 2)
    fail(ErrorCode::BadConfiguration, "beta crosses " + c.name + " " + std::to_string(x.size()) + " times, need 2");
  return x;
}

/// d l(beta) / ds under the twist along c: sum of crossing cosines.
inline double wolpert_derivative(const PantsDecomposition& P, const FNPoint& X, const Word& beta, const CurveId& c) {
  const auto x = wolpert_crossings(P, X, beta, c);
  return x[0].cos + x[1].cos;
}

/// Length of beta after twisting c by s.
inline double twisted_length(const PantsDecomposition& P, const FNPoint& X, const Word& beta, const CurveId& c,
                             double s) {
  return static_cast<double>(build_rep_as<WideReal>(P, twist_flow(X, P, c, s), c).length(beta));
}

/// Dual of c inside its four-holed sphere, pre-twisted n times along c;
/// a word in build_rep(P, X, c).
inline Word dual_word(const PantsDecomposition& P, const CurveId& c, int n) {
  const MoveDescriptor M = describe_move(P, c);
  if (M.kind != MoveKind::Sphere) fail(ErrorCode::BadConfiguration, c.name + " does not bound a four-holed sphere");
  const SlotRef s = M.sites[0], r = M.sites[1];
  const std::string C = HolonomyRep::cuff_name(s.pants, s.slot);
  Word w = parse_word(HolonomyRep::cuff_name(s.pants, (s.slot + 1) % 3));
  if (n != 0) w.push_back({C, n});
  w.push_back({HolonomyRep::cuff_name(r.pants, (r.slot + 1) % 3), 1});
  if (n != 0) w.push_back({C, -n});
  return w;
}

// ---- Wolpert battery ----

struct WolpertConfig {
  std::size_t samples = 100;
  std::uint64_t seed = 7;
  double step = 1e-4;
  std::vector<double> s_grid{-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
};

/// Analytic derivative vs central difference on random S_{0,5} points,
/// plus monotonicity of each crossing cosine along the twist.
inline ExperimentReport run_wolpert(const WolpertConfig& cfg) {
  if (!(cfg.step > 0.0)) fail(ErrorCode::BadConfiguration, "step must be positive");
  ExperimentReport rep;
  rep.name = "wolpert";
  rep.columns = {"sample", "analytic", "finite_difference", "deviation", "cos1", "cos2"};
  rep.flag_columns = {"deviation_ok", "cos_increasing"};
  const PantsDecomposition P = five_holed_sphere();
  const CurveId c("C1");
  const Word beta = dual_word(P, c, 0);

  std::vector<FNPoint> points;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> len(0.5, 2.0), tw(-1.0, 1.0);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    FNPoint X;
    for (const auto& [curve, rec] : P.curves())
      X.set_base(curve, {len(rng), rec.kind == CurveKind::Interior ? tw(rng) : 0.0});
    points.push_back(std::move(X));
  }

  const auto rows = parallel_map(points.size(), [&](std::size_t i) {
    const FNPoint& X = points[i];
    const auto x = wolpert_crossings(P, X, beta, c);
    const double analytic = x[0].cos + x[1].cos;
    const double fd = (twisted_length(P, X, beta, c, cfg.step) - twisted_length(P, X, beta, c, -cfg.step)) /
                      (2.0 * cfg.step);
    bool increasing = true;
    std::vector<double> prev;
    for (double s : cfg.s_grid) {
      const auto r = build_rep_as<WideReal>(P, twist_flow(X, P, c, s), c);
      const auto cs = lift_cosines(r, beta, r.word(c.name), {x[0].lift, x[1].lift});
      if (!prev.empty() && !(cs[0] > prev[0] && cs[1] > prev[1])) increasing = false;
      prev = cs;
    }
    ReportRow row;
    row.values = {static_cast<double>(i), analytic, fd, std::abs(analytic - fd), x[0].cos, x[1].cos};
    row.flags = {row.values[3] <= 1e-6, increasing};
    return row;
  });
  double worst = 0.0;
  for (auto& r : rows) {
    worst = std::max(worst, r.values[3]);
    rep.rows.push_back(r);
  }
  rep.constants["max_deviation"] = worst;
  return rep;
}

// ---- adjacent twists ----

struct Lemma61Config {
  std::vector<double> l_grid = decade_grid(1, 4);
  double t = 1.0;
  int max_pretwist = 64;
  std::vector<double> s_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  PantsDecomposition P = five_holed_sphere();
  FNPoint X = default_lemma61_point();
  CurveId alpha{"a"};
  CurveId curve{"C1"};

  static FNPoint default_lemma61_point() {
    FNPoint X;
    X.set_fallback(CurveParams{1.0, 0.0});
    X.set_base("C1", {1.0, 0.3});
    return X;
  }
};

struct AngleCertificate {
  int pretwist = 0;
  Word beta;
  std::vector<AxisCrossing> crossings;
};

/// Smallest |N| <= max_n whose pre-twisted dual of c meets c at angles with
/// cos >= 1/2 at both crossings.
inline AngleCertificate certify_angles(const PantsDecomposition& P, const FNPoint& X, const CurveId& c, int max_n) {
  const auto rep = build_rep_as<WideReal>(P, X, c);
  const Word cw = rep.word(c.name);
  for (int k = 0; k <= 2 * max_n; ++k) {
    const int n = k % 2 == 0 ? k / 2 : -(k + 1) / 2;
    const Word beta = dual_word(P, c, n);
    const auto x = axis_crossings(rep, beta, cw);
    if (x.size() != 2) continue;
    if (x[0].cos >= 0.5 && x[1].cos >= 0.5) return {n, beta, x};
  }
  fail(ErrorCode::AngleConditionFailed,
       "no pre-twist with |N| <= " + std::to_string(max_n) + " gives cos >= 1/2 at both crossings");
}

/// Twist change of the adjacent curve vs twist change of alpha' along a
/// shrinking grid; angle certificate and length growth along the twist.
inline ExperimentReport run_lemma61(const Lemma61Config& cfg) {
  detail::check_descending(cfg.l_grid, 1.0);
  if (cfg.max_pretwist < 0) fail(ErrorCode::BadConfiguration, "max_pretwist must be >= 0");
  ExperimentReport rep;
  rep.name = "lemma61";
  rep.columns = {"l", "pretwist", "cos1", "cos2", "delta_tau_curve", "delta_tau_dual", "min_growth_margin",
                 "delta_tau_curve_at_square"};
  rep.flag_columns = {"angle", "growth", "adjacent_bound", "decay"};

  struct Out {
    std::vector<double> values;
    std::vector<bool> flags;
  };
  const auto rows = parallel_map(cfg.l_grid.size(), [&](std::size_t i) {
    FNPoint X = cfg.X;
    X.set_base(cfg.alpha, {cfg.l_grid[i], 0.0});
    const FNPoint Xt = twist_flow(X, cfg.P, cfg.alpha, cfg.t);
    const MovedPoint Y = move_fn_point(X, cfg.P, cfg.alpha);
    const MovedPoint Yt = move_fn_point(Xt, cfg.P, cfg.alpha);
    for (const MovedPoint* m : {&Y, &Yt})
      if (m->point.oracle_required().count(cfg.curve))
        fail(ErrorCode::BadConfiguration, cfg.curve.name + " twist could not be measured after the move");
    const double dc = std::abs(Yt.point.twist(cfg.curve) - Y.point.twist(cfg.curve));
    const double da = std::abs(Yt.point.twist(Y.move.dual) - Y.point.twist(Y.move.dual));
    const PantsDecomposition& Q = Y.decomposition;
    const AngleCertificate cert = certify_angles(Q, Y.point, cfg.curve, cfg.max_pretwist);
    const double l0 = twisted_length(Q, Y.point, cert.beta, cfg.curve, 0.0);
    double margin = kInf;
    for (double s : cfg.s_grid) margin = std::min(margin, twisted_length(Q, Y.point, cert.beta, cfg.curve, s) - l0 - s);
    return std::vector<double>{cfg.l_grid[i], static_cast<double>(cert.pretwist), cert.crossings[0].cos,
                               cert.crossings[1].cos, dc, da, margin};
  });

  for (std::size_t i = 0; i < rows.size(); ++i) {
    ReportRow row;
    row.values = rows[i];
    const double l = row.values[0];
    const auto partner = detail::square_partner(cfg.l_grid, l);
    const double sq = l <= 1e-2 && partner ? rows[*partner][4] : std::nan("");
    row.values.push_back(sq);
    row.flags = {row.values[2] >= 0.5 && row.values[3] >= 0.5, row.values[6] >= 0.0,
                 row.values[4] <= 2.0 * row.values[5], std::isnan(sq) || sq <= row.values[4]};
    rep.rows.push_back(std::move(row));
  }
  if (rows.size() >= 2 && rows.front()[4] > 0.0) {
    const double ratio = rows.back()[4] / rows.front()[4];
    rep.constants["decay_ratio"] = ratio;
    // three decades or more: the last row must be below a tenth of the first
    if (rows.back()[0] <= 1e-3 * rows.front()[0]) rep.checks["decay_below_tenth"] = ratio < 0.1;
  }
  return rep;
}

// ---- non-Lipschitz and non-continuity runs ----

struct Thm62Config {
  PantsDecomposition P = five_holed_sphere();
  FNPoint X = Lemma61Config::default_lemma61_point();
  CurveId alpha{"a"};
  double t = 1.0;
  std::vector<double> eps = dyadic_grid(1, 20);
};

namespace detail {

inline double max_adjacent_change(const MovedPoint& Y, const MovedPoint& Yt) {
  double m = 0.0;
  for (const auto& c : Y.measured) m = std::max(m, std::abs(Yt.point.twist(c) - Y.point.twist(c)));
  return m;
}

}  // namespace detail

/// One move in a finite surface: d_P stays |t| while d_P' shrinks.
inline ExperimentReport run_thm62(const Thm62Config& cfg) {
  detail::check_descending(cfg.eps, 1.0);
  if (!cfg.P.is_finite()) fail(ErrorCode::FiniteOnly, "thm62 runs on a finite decomposition");
  describe_move(cfg.P, cfg.alpha);
  ExperimentReport rep;
  rep.name = "thm62";
  rep.columns = {"eps", "d_P", "d_P_prime", "log_ratio", "delta_tau_dual", "max_adjacent"};
  rep.flag_columns = {"d_P_exact", "decreasing", "measured"};

  const auto rows = parallel_map(cfg.eps.size(), [&](std::size_t i) {
    FNPoint X = cfg.X;
    X.set_base(cfg.alpha, {cfg.eps[i], 0.0});
    const FNPoint Xt = twist_flow(X, cfg.P, cfg.alpha, cfg.t);
    const MovedPoint Y = move_fn_point(X, cfg.P, cfg.alpha);
    const MovedPoint Yt = move_fn_point(Xt, cfg.P, cfg.alpha);
    const CurveId d = Y.move.dual;
    const bool measured = Y.point.oracle_required().empty() && Yt.point.oracle_required().empty();
    return std::pair{std::vector<double>{cfg.eps[i], fn_distance(X, Xt, cfg.P),
                                         fn_distance(Y.point, Yt.point, Y.decomposition),
                                         std::log(Yt.point.length(d) / Y.point.length(d)),
                                         Yt.point.twist(d) - Y.point.twist(d), detail::max_adjacent_change(Y, Yt)},
                     measured};
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ReportRow row;
    row.values = rows[i].first;
    row.flags = {row.values[1] == std::abs(cfg.t), i == 0 || row.values[2] < rows[i - 1].first[2], rows[i].second};
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

struct Thm64Config {
  double t = 1.0;
  long first = 1;
  long last = 20;
  /// l(a[i]) = ratio^i for i >= 1; every other curve has length 1, twist 0.
  double ratio = 0.5;
};

/// Base point of the ladder run.
inline FNPoint ladder_base_point(double ratio) {
  auto rule = std::make_shared<BaseRule>();
  rule->name = "ladder a[i] = " + format_double(ratio) + "^i";
  rule->eval = [ratio](const CurveId& c) -> std::optional<CurveParams> {
    auto lc = parse_ladder_curve(c);
    if (!lc || lc->role != "a" || lc->index < 1) return std::nullopt;
    return CurveParams{std::pow(ratio, static_cast<double>(lc->index)), 0.0};
  };
  FNPoint X;
  X.set_fallback(CurveParams{1.0, 0.0});
  X.set_rule(rule);
  return X;
}

namespace detail {

inline FNPoint restrict_to(const FNPoint& X, const PantsDecomposition& W) {
  FNPoint out;
  for (const auto& [c, rec] : W.curves()) out.set_base(c, X.at(c));
  return out;
}

// Moves the listed curves in order, returning the final point.
inline MovedPoint move_all(FNPoint X, PantsDecomposition P, const std::vector<CurveId>& curves) {
  MovedPoint m;
  for (const auto& c : curves) {
    m = move_fn_point(X, P, c);
    for (const auto& f : X.oracle_required())
      if (std::find(m.measured.begin(), m.measured.end(), f) == m.measured.end()) m.point.flag_oracle_required(f);
    X = m.point;
    P = m.decomposition;
  }
  return m;
}

}  // namespace detail

/// Twist of one designated curve of the ladder at a time: d_P stays |t|
/// while d_P' (all designated curves moved) tends to 0.
inline ExperimentReport run_thm64(const Thm64Config& cfg) {
  if (!(cfg.first >= 1 && cfg.last > cfg.first)) fail(ErrorCode::BadConfiguration, "need 1 <= first < last");
  if (!(cfg.ratio > 0.0 && cfg.ratio < 1.0) ||
      !(std::pow(cfg.ratio, static_cast<double>(cfg.last - cfg.first)) < 1e-3))
    fail(ErrorCode::BadBasePoint, "designated lengths must decrease to below 1e-3 of the first sampled value");
  const PantsDecomposition P = PantsDecomposition::ladder(LadderSpec{});
  const FNPoint X0 = ladder_base_point(cfg.ratio);
  ExperimentReport rep;
  rep.name = "thm64";
  rep.columns = {"i", "eps", "d_P", "d_P_prime", "log_ratio", "delta_tau_dual", "max_adjacent"};
  rep.flag_columns = {"d_P_exact", "decreasing", "measured"};

  const std::size_t n = static_cast<std::size_t>(cfg.last - cfg.first + 1);
  const auto rows = parallel_map(n, [&](std::size_t k) {
    const long i = cfg.first + static_cast<long>(k);
    const CurveId ai = ladder_curve("a", i);
    const FNPoint Xi = twist_flow(X0, P, ai, cfg.t);
    const PantsDecomposition W = P.window(i - 1, i + 1);
    const std::vector<CurveId> order{ai, ladder_curve("a", i - 1), ladder_curve("a", i + 1)};
    const MovedPoint Y = detail::move_all(detail::restrict_to(X0, W), W, order);
    const MovedPoint Yt = detail::move_all(detail::restrict_to(Xi, W), W, order);
    const CurveId d = dual_name(ai);
    double adjacent = 0.0;
    for (const auto& [c, rec] : Y.decomposition.curves())
      if (c != d && rec.kind == CurveKind::Interior)
        adjacent = std::max(adjacent, std::abs(Yt.point.twist(c) - Y.point.twist(c)));
    const bool measured = Y.point.oracle_required().empty() && Yt.point.oracle_required().empty();
    return std::pair{std::vector<double>{static_cast<double>(i), X0.length(ai), fn_distance(X0, Xi, P),
                                         fn_distance(Y.point, Yt.point, Y.decomposition),
                                         std::log(Yt.point.length(d) / Y.point.length(d)),
                                         Yt.point.twist(d) - Y.point.twist(d), adjacent},
                     measured};
  });
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ReportRow row;
    row.values = rows[k].first;
    row.flags = {row.values[2] == std::abs(cfg.t), k == 0 || row.values[3] < rows[k - 1].first[3], rows[k].second};
    rep.rows.push_back(std::move(row));
  }
  if (cfg.last >= 20) rep.checks["d_P_prime_below_half_by_20"] = rep.value(rep.rows.size() - 1, "d_P_prime") < 0.5;
  return rep;
}

}  // namespace fnmetric
