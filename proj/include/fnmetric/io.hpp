#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "format.hpp"
#include "holonomy.hpp"
#include "move_transforms.hpp"
#include "pants_complex.hpp"

namespace fnmetric {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// ---- JSON text ----

namespace detail {

inline void dump_string(std::ostream& os, const std::string& s) { os << Json(s).dump(); }

inline void dump_value(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        os << (first ? "" : ",") << pad;
        first = false;
        dump_string(os, it.key());
        os << sep;
        dump_value(os, it.value(), indent, depth + 1);
      }
      os << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[';
      bool first = true;
      for (const auto& v : j) {
        os << (first ? "" : ",") << pad;
        first = false;
        dump_value(os, v, indent, depth + 1);
      }
      os << close << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      os << (std::isfinite(x) ? format_double(x) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// JSON text with keys sorted and every float at 17 significant digits;
/// non-finite floats become null.
inline std::string dump_json(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::dump_value(os, j, indent, 0);
  return os.str();
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::BadInput, std::string("malformed JSON: ") + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::BadInput, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

// ---- surfaces ----

inline CurveKind curve_kind_from(const std::string& s) {
  if (s == "interior") return CurveKind::Interior;
  if (s == "boundary") return CurveKind::Boundary;
  if (s == "cusp") return CurveKind::Cusp;
  fail(ErrorCode::BadInput, "unknown curve kind '" + s + "'");
}

inline std::string curve_kind_name(CurveKind k) {
  switch (k) {
    case CurveKind::Interior: return "interior";
    case CurveKind::Boundary: return "boundary";
    case CurveKind::Cusp: return "cusp";
  }
  return "interior";
}

inline Json to_json(const PantsDecomposition& P) {
  Json j;
  if (!P.is_finite()) {
    Json fams = Json::array();
    for (const auto& f : P.generator()->spec().designated)
      fams.push_back({{"role", f.role}, {"start", f.start}, {"stride", f.stride}});
    j["pants"] = Json::array();
    j["curves"] = Json::object();
    j["generator"] = {{"type", "ladder"}, {"designated", fams}};
    return j;
  }
  Json ps = Json::array();
  for (const auto& p : P.pants()) ps.push_back({p.cuffs[0].name, p.cuffs[1].name, p.cuffs[2].name});
  Json cs = Json::object();
  for (const auto& [c, rec] : P.curves()) cs[c.name] = curve_kind_name(rec.kind);
  j["pants"] = ps;
  j["curves"] = cs;
  return j;
}

inline PantsDecomposition surface_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("pants")) fail(ErrorCode::BadInput, "surface needs a \"pants\" list");
  try {
    if (j.contains("generator") && !j["generator"].is_null()) {
      const Json& g = j["generator"];
      if (g.value("type", "") != "ladder") fail(ErrorCode::BadInput, "only the ladder generator is supported");
      LadderSpec spec;
      if (g.contains("designated")) {
        spec.designated.clear();
        for (const auto& f : g["designated"])
          spec.designated.push_back({f.at("role").get<std::string>(), f.value("start", 0L), f.value("stride", 1L)});
      }
      return PantsDecomposition::ladder(std::move(spec));
    }
    std::vector<Pants> ps;
    for (const auto& p : j.at("pants")) {
      if (!p.is_array() || p.size() != 3) fail(ErrorCode::BadInput, "each pants needs exactly 3 cuffs");
      ps.push_back(Pants{{CurveId(p[0].get<std::string>()), CurveId(p[1].get<std::string>()),
                          CurveId(p[2].get<std::string>())}});
    }
    std::map<CurveId, CurveKind> kinds;
    if (j.contains("curves"))
      for (const auto& [name, k] : j["curves"].items()) kinds[CurveId(name)] = curve_kind_from(k.get<std::string>());
    PantsDecomposition P(std::move(ps), std::move(kinds));
    const ValidationReport r = validate(P);
    if (!r.valid) fail(ErrorCode::BadInput, "invalid surface: " + r.issues.front());
    return P;
  } catch (const Json::exception& e) {
    fail(ErrorCode::BadInput, std::string("bad surface JSON: ") + e.what());
  }
}

// ---- FN points ----

inline constexpr const char* kFallbackKey = "*";

inline Json to_json(const CurveParams& p) { return {{"length", p.length}, {"twist", p.twist}}; }

inline Json to_json(const FNPoint& X) {
  if (X.rule()) fail(ErrorCode::BadInput, "points with a generated base cannot be written");
  Json base = Json::object(), over = Json::object();
  for (const auto& [c, p] : X.base()) base[c.name] = to_json(p);
  if (X.fallback()) base[kFallbackKey] = to_json(*X.fallback());
  for (const auto& [c, p] : X.overrides()) over[c.name] = to_json(p);
  return {{"base", base}, {"overrides", over}};
}

inline CurveParams params_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_object() || !j.contains("length")) fail(ErrorCode::BadInput, "curve parameters need a length");
  return {j.at("length").get<double>(), j.value("twist", 0.0)};
}

inline FNPoint point_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("base")) fail(ErrorCode::BadInput, "point needs a \"base\" map");
  try {
    FNPoint X;
    for (const auto& [name, v] : j.at("base").items()) {
      if (name == kFallbackKey) X.set_fallback(params_from_json(v));
      else X.set_base(CurveId(name), params_from_json(v));
    }
    if (j.contains("overrides"))
      for (const auto& [name, v] : j["overrides"].items()) X.set(CurveId(name), params_from_json(v));
    return X;
  } catch (const Json::exception& e) {
    fail(ErrorCode::BadInput, std::string("bad point JSON: ") + e.what());
  }
}

// ---- reps ----

/// Debug dump with generator entries as hex floats.
inline Json to_json(const HolonomyRep& rep) {
  Json gens = Json::object();
  for (const auto& [n, m] : rep.generators)
    gens[n] = {format_hex(m.a), format_hex(m.b), format_hex(m.c), format_hex(m.d)};
  Json words = Json::object();
  for (const auto& [n, w] : rep.words) words[n] = format_word(w);
  Json rels = Json::array();
  for (const auto& r : rep.relations) {
    const char* k = r.kind == RelationKind::Trivial ? "trivial" : r.kind == RelationKind::Parabolic ? "parabolic" : "hyperbolic";
    rels.push_back({{"name", r.name}, {"word", format_word(r.word)}, {"kind", k}, {"length", format_hex(r.length)}});
  }
  return {{"generators", gens}, {"words", words}, {"relations", rels}, {"tolerance", rep.tolerance}};
}

inline double parse_hex(const std::string& s) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') fail(ErrorCode::BadInput, "bad float '" + s + "'");
  return x;
}

inline HolonomyRep rep_from_json(const Json& j) {
  try {
    HolonomyRep rep;
    for (const auto& [n, e] : j.at("generators").items()) {
      if (!e.is_array() || e.size() != 4) fail(ErrorCode::BadInput, "generator " + n + " needs 4 entries");
      rep.generators[n] = {parse_hex(e[0]), parse_hex(e[1]), parse_hex(e[2]), parse_hex(e[3])};
    }
    if (j.contains("words"))
      for (const auto& [n, w] : j["words"].items()) rep.words[n] = parse_word(w.get<std::string>());
    if (j.contains("relations"))
      for (const auto& r : j["relations"]) {
        const std::string k = r.at("kind").get<std::string>();
        const RelationKind kind = k == "trivial" ? RelationKind::Trivial
                                  : k == "parabolic" ? RelationKind::Parabolic
                                                     : RelationKind::Hyperbolic;
        rep.relations.push_back({r.at("name").get<std::string>(), parse_word(r.at("word").get<std::string>()), kind,
                                 parse_hex(r.at("length").get<std::string>())});
      }
    rep.tolerance = j.value("tolerance", rep.tolerance);
    return rep;
  } catch (const Json::exception& e) {
    fail(ErrorCode::BadInput, std::string("bad rep JSON: ") + e.what());
  }
}

inline Json to_json(const MoveResult& r) {
  return {{"l_prime", r.l_prime}, {"tau_prime", r.tau_prime}, {"abs_only", r.abs_only},
          {"domain_narrowed", r.domain_narrowed}};
}

// ---- manifests ----

/// 64-bit FNV-1a, hex.
inline std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command;
  Json config = Json::object();
  std::map<std::string, std::string> inputs;  // name -> digest
  std::string version = kVersion;
  std::uint64_t seed = 0;
  std::string timestamp;

  Json to_json() const {
    Json in = Json::object();
    for (const auto& [k, v] : inputs) in[k] = v;
    return {{"command", command}, {"config", config}, {"inputs", in}, {"version", version},
            {"seed", seed}, {"timestamp", timestamp}};
  }
};

// ---- plots ----

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Log-log line plot; non-positive or non-finite points are dropped.
inline std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<PlotSeries>& series) {
  const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (ok(s.x[i]) && ok(s.y[i])) {
        x0 = std::min(x0, std::log10(s.x[i]));
        x1 = std::max(x1, std::log10(s.x[i]));
        y0 = std::min(y0, std::log10(s.y[i]));
        y1 = std::max(y1, std::log10(s.y[i]));
      }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double v) { return ml + (std::log10(v) - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (std::log10(v) - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  char buf[128];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int k = static_cast<int>(std::ceil(x0)); k <= static_cast<int>(std::floor(x1)); ++k) {
    const double x = px(std::pow(10.0, k));
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"11\">1e%d</text>\n",
                  x, H - mb + 16, k);
    os << buf;
  }
  for (int k = static_cast<int>(std::ceil(y0)); k <= static_cast<int>(std::floor(y1)); ++k) {
    const double y = py(std::pow(10.0, k));
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-size=\"11\">1e%d</text>\n",
                  ml - 6, y + 4, k);
    os << buf;
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     << H / 2 << ")\">" << ylabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* col = colors[s % 5];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i)
      if (ok(series[s].x[i]) && ok(series[s].y[i])) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(series[s].x[i]), py(series[s].y[i]));
        os << buf;
      }
    os << "\"/>\n";
    os << "<text x=\"" << W - mr - 4 << "\" y=\"" << mt + 16 * (s + 1) << "\" text-anchor=\"end\" font-size=\"12\" fill=\""
       << col << "\">" << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace fnmetric
