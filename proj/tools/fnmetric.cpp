#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fnmetric/asymptotics.hpp"
#include "fnmetric/checks.hpp"
#include "fnmetric/io.hpp"

using namespace fnmetric;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitInput = 2;
constexpr int kExitScience = 3;

int report_error(const std::string& code, const std::string& message) {
  std::cerr << dump_json(Json{{"error", code}, {"message", message}}, 0) << "\n";
  return kExitInput;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::BadInput, "not a number: '" + s + "'");
  }
}

int parse_int(const std::string& s) {
  const double x = parse_number(s);
  if (x != std::floor(x)) fail(ErrorCode::BadInput, "not an integer: '" + s + "'");
  return static_cast<int>(x);
}

// "2^-1..2^-20", "1e-1..1e-6" or a comma list.
std::vector<double> parse_grid(const std::string& spec) {
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const std::string a = spec.substr(0, dots), b = spec.substr(dots + 2);
    if (a.rfind("2^-", 0) == 0 && b.rfind("2^-", 0) == 0) return dyadic_grid(parse_int(a.substr(3)), parse_int(b.substr(3)));
    if (a.rfind("1e-", 0) == 0 && b.rfind("1e-", 0) == 0) return decade_grid(parse_int(a.substr(3)), parse_int(b.substr(3)));
    fail(ErrorCode::BadInput, "grid range must be 2^-a..2^-b or 1e-a..1e-b");
  }
  std::vector<double> out;
  for (const auto& x : split(spec, ',')) out.push_back(parse_number(x));
  if (out.empty()) fail(ErrorCode::BadInput, "empty grid");
  return out;
}

std::vector<double> grid_from(const Json& j) {
  if (j.is_string()) return parse_grid(j.get<std::string>());
  if (!j.is_array()) fail(ErrorCode::BadInput, "grid must be a string or a list");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(x.get<double>());
  return out;
}

std::array<double, 4> parse_holes(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 4) fail(ErrorCode::BadInput, "holes need 4 comma-separated lengths, got '" + s + "'");
  std::array<double, 4> h{};
  for (int i = 0; i < 4; ++i) h[i] = parse_number(parts[i]);
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::BadInput, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::BadInput, "cannot write " + path);
  out << text;
}

Json json_of(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json report_summary(const ExperimentReport& r) {
  Json j{{"experiment", r.name},          {"rows", r.rows.size()},     {"passed", r.passed_rows()},
         {"failed", r.failed_rows()},     {"skipped", r.skipped_rows()}, {"pass", r.pass()},
         {"constants", r.constants},      {"fitted_slopes", r.fitted_slopes}, {"checks", r.checks}};
  return j;
}

// ---- transform ----

struct TransformArgs {
  bool torus = false, sphere = false;
  double l0 = 0.0, l = 1.0, tau = 0.0;
  std::string holes = "0,0,0,0";
  std::string surface, point, curve;
  bool certify = false;
};

int cmd_transform(const TransformArgs& a) {
  if (!a.surface.empty() || !a.point.empty()) {
    if (a.surface.empty() || a.point.empty() || a.curve.empty())
      fail(ErrorCode::BadInput, "--surface, --point and --curve go together");
    const PantsDecomposition P = surface_from_json(read_json_file(a.surface));
    const FNPoint X = point_from_json(read_json_file(a.point));
    const auto issues = point_issues(X, P);
    if (!issues.empty()) fail(ErrorCode::BadInput, "point: " + issues.front());
    const MovedPoint m = move_fn_point(X, P, CurveId(a.curve));
    Json measured = Json::array();
    for (const auto& c : m.measured) measured.push_back(c.name);
    Json flagged = Json::array();
    for (const auto& c : m.point.oracle_required()) flagged.push_back(c.name);
    std::cout << dump_json(Json{{"result", to_json(m.result)},
                                {"dual", m.move.dual.name},
                                {"surface", to_json(m.decomposition)},
                                {"point", to_json(m.point)},
                                {"measured", measured},
                                {"oracle_required", flagged}})
              << "\n";
    return kExitPass;
  }
  if (a.torus == a.sphere) fail(ErrorCode::BadInput, "choose exactly one of --torus, --sphere");
  Json out;
  if (a.torus) {
    const TorusMoveInput in{a.l0, a.l, a.tau};
    MoveResult r = torus_move(in);
    if (a.certify) r = certify_sign(in, r);
    out = to_json(r);
  } else {
    const SphereMoveInput in{parse_holes(a.holes), a.l, a.tau};
    MoveResult r = sphere_move(in);
    if (a.certify) r = certify_sign(in, r);
    out = to_json(r);
  }
  std::cout << dump_json(out) << "\n";
  return kExitPass;
}

// ---- rep ----

struct RepArgs {
  std::string surface, point, root;
  bool torus = false, sphere = false;
  double l0 = 0.0, l = 1.0, tau = 0.0;
  std::string holes = "0,0,0,0";
};

int cmd_rep(const RepArgs& a) {
  HolonomyRep rep;
  if (!a.surface.empty()) {
    if (a.point.empty()) fail(ErrorCode::BadInput, "--surface needs --point");
    const PantsDecomposition P = surface_from_json(read_json_file(a.surface));
    const FNPoint X = point_from_json(read_json_file(a.point));
    const auto issues = point_issues(X, P);
    if (!issues.empty()) fail(ErrorCode::BadInput, "point: " + issues.front());
    rep = a.root.empty() ? build_rep(P, X) : build_rep(P, X, CurveId(a.root));
  } else if (a.torus != a.sphere) {
    rep = a.torus ? build_torus_rep({a.l0, a.l, a.tau}) : build_sphere_rep({parse_holes(a.holes), a.l, a.tau});
  } else {
    fail(ErrorCode::BadInput, "give --surface/--point, --torus or --sphere");
  }
  Json j = to_json(rep);
  Json bad = Json::array();
  for (const auto& v : rep.check()) bad.push_back(v);
  j["violations"] = bad;
  std::cout << dump_json(j) << "\n";
  return kExitPass;
}

// ---- experiment ----

struct ExperimentArgs {
  std::string name;
  std::string config;
  std::string out = ".";
  bool svg = false;
  std::uint64_t seed = 0;
  // overrides; empty means "from config or default"
  std::string t, L, l0, eps0, holes, l_grid, eps, kind, max_pretwist, first, last, ratio, surface, point, alpha, curve;
};

// Flag value, else config entry, else the default.
struct Settings {
  const ExperimentArgs& a;
  Json cfg;
  Json echo = Json::object();

  void num(const std::string& key, const std::string& v, double& dst) {
    if (!v.empty()) dst = parse_number(v);
    else if (cfg.contains(key)) dst = cfg[key].get<double>();
    echo[key] = dst;
  }
  void integer(const std::string& key, const std::string& v, long& dst) {
    if (!v.empty()) dst = parse_int(v);
    else if (cfg.contains(key)) dst = cfg[key].get<long>();
    echo[key] = dst;
  }
  void grid(const std::string& key, const std::string& v, std::vector<double>& dst) {
    if (!v.empty()) dst = parse_grid(v);
    else if (cfg.contains(key)) dst = grid_from(cfg[key]);
    echo[key] = json_of(dst);
  }
  void holes(const std::string& v, std::array<double, 4>& dst) {
    if (!v.empty()) dst = parse_holes(v);
    else if (cfg.contains("holes")) {
      const auto& h = cfg["holes"];
      if (!h.is_array() || h.size() != 4) fail(ErrorCode::BadInput, "holes need 4 lengths");
      for (int i = 0; i < 4; ++i) dst[i] = h[i].get<double>();
    }
    echo["holes"] = json_of({dst.begin(), dst.end()});
  }
  std::string text(const std::string& key, const std::string& v, const std::string& fallback) {
    std::string s = fallback;
    if (!v.empty()) s = v;
    else if (cfg.contains(key)) s = cfg[key].get<std::string>();
    echo[key] = s;
    return s;
  }
};

void check_known(const Json& cfg, const std::vector<std::string>& keys) {
  for (const auto& [k, v] : cfg.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(ErrorCode::BadInput, "unknown config key '" + k + "'");
}

struct SvgSpec {
  std::string x, y, xlabel, ylabel;
  bool log_x_abs = false;  // plot |log x| instead of x
};

int cmd_experiment(const ExperimentArgs& a, const std::string& command_line) {
  static const std::vector<std::string> names{"prop32", "prop42", "seq52", "lemma61", "thm62", "thm64"};
  if (std::find(names.begin(), names.end(), a.name) == names.end())
    fail(ErrorCode::BadInput, "unknown experiment '" + a.name + "'");
  RunManifest manifest;
  manifest.command = command_line;
  manifest.seed = a.seed;
  Settings s{a, Json::object()};
  if (!a.config.empty()) {
    const std::string text = read_file(a.config);
    manifest.inputs["config"] = fnv1a(text);
    s.cfg = parse_json(text);
    if (!s.cfg.is_object()) fail(ErrorCode::BadInput, "config must be a JSON object");
  }
  auto load_surface = [&](PantsDecomposition& P, FNPoint& X) {
    const std::string sp = s.text("surface", a.surface, "");
    const std::string pp = s.text("point", a.point, "");
    if (sp.empty() != pp.empty()) fail(ErrorCode::BadInput, "surface and point go together");
    if (sp.empty()) return;
    const std::string st = read_file(sp), pt = read_file(pp);
    manifest.inputs["surface"] = fnv1a(st);
    manifest.inputs["point"] = fnv1a(pt);
    P = surface_from_json(parse_json(st));
    X = point_from_json(parse_json(pt));
    const auto issues = point_issues(X, P);
    if (!issues.empty()) fail(ErrorCode::BadInput, "point: " + issues.front());
  };

  ExperimentReport rep;
  SvgSpec svg;
  if (a.name == "prop32" || a.name == "prop42") {
    check_known(s.cfg, {"t", "L", "l0", "eps0", "holes", "l_grid"});
    SweepConfig c;
    s.num("t", a.t, c.t);
    s.num("L", a.L, c.L);
    s.num("eps0", a.eps0, c.eps0);
    s.grid("l_grid", a.l_grid, c.l_grid);
    if (a.name == "prop32") s.num("l0", a.l0, c.l0);
    else s.holes(a.holes, c.holes);
    c.seed = a.seed;
    validate(c);
    rep = a.name == "prop32" ? run_prop32(c) : run_prop42(c);
    svg = {"l", "tau_prime_t", "l", "|tau'_t|"};
  } else if (a.name == "seq52") {
    check_known(s.cfg, {"t", "kind", "eps", "l0", "holes"});
    Seq52Config c;
    const std::string kind = s.text("kind", a.kind, "torus");
    if (kind != "torus" && kind != "sphere") fail(ErrorCode::BadInput, "kind must be torus or sphere");
    c.kind = kind == "torus" ? MoveKind::Torus : MoveKind::Sphere;
    s.num("t", a.t, c.t);
    s.grid("eps", a.eps, c.eps);
    if (c.kind == MoveKind::Torus) s.num("l0", a.l0, c.l0);
    else s.holes(a.holes, c.holes);
    rep = run_seq52(c);
    svg = {"eps", "d_fn2", "|log eps|", "d_FN2", true};
  } else if (a.name == "lemma61") {
    check_known(s.cfg, {"t", "l_grid", "max_pretwist", "surface", "point", "alpha", "curve"});
    Lemma61Config c;
    s.num("t", a.t, c.t);
    s.grid("l_grid", a.l_grid, c.l_grid);
    long n = c.max_pretwist;
    s.integer("max_pretwist", a.max_pretwist, n);
    c.max_pretwist = static_cast<int>(n);
    load_surface(c.P, c.X);
    c.alpha = CurveId(s.text("alpha", a.alpha, c.alpha.name));
    c.curve = CurveId(s.text("curve", a.curve, c.curve.name));
    rep = run_lemma61(c);
    svg = {"l", "delta_tau_curve", "l(alpha)", "|delta tau'(C1)|"};
  } else if (a.name == "thm62") {
    check_known(s.cfg, {"t", "eps", "surface", "point", "alpha"});
    Thm62Config c;
    s.num("t", a.t, c.t);
    s.grid("eps", a.eps, c.eps);
    load_surface(c.P, c.X);
    c.alpha = CurveId(s.text("alpha", a.alpha, c.alpha.name));
    rep = run_thm62(c);
    svg = {"eps", "d_P_prime", "|log eps|", "d_FN,P'", true};
  } else {
    check_known(s.cfg, {"t", "first", "last", "ratio"});
    Thm64Config c;
    s.num("t", a.t, c.t);
    s.integer("first", a.first, c.first);
    s.integer("last", a.last, c.last);
    s.num("ratio", a.ratio, c.ratio);
    rep = run_thm64(c);
    svg = {"eps", "d_P_prime", "|log eps|", "d_FN,P'", true};
  }
  manifest.config = s.echo;
  manifest.timestamp = utc_timestamp();

  const std::string base = a.out + "/" + rep.name;
  std::ostringstream csv;
  rep.write_csv(csv);
  write_file(base + ".csv", csv.str());
  write_file(base + ".manifest.json", dump_json(manifest.to_json()) + "\n");
  Json summary = report_summary(rep);
  summary["csv"] = base + ".csv";
  summary["manifest"] = base + ".manifest.json";
  if (a.svg) {
    PlotSeries ps{svg.ylabel, {}, {}};
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const double x = rep.value(i, svg.x), y = rep.value(i, svg.y);
      ps.x.push_back(svg.log_x_abs ? std::abs(std::log(x)) : x);
      ps.y.push_back(std::abs(y));
    }
    write_file(base + ".svg", loglog_svg(rep.name, svg.xlabel, svg.ylabel, {ps}));
    summary["svg"] = base + ".svg";
  }
  std::cout << dump_json(summary) << "\n";
  return rep.pass() ? kExitPass : kExitScience;
}

// ---- check ----

struct CheckArgs {
  std::size_t samples = 1000;
  std::uint64_t seed = 7;
  bool fault = false;
};

int cmd_check(const CheckArgs& a) {
  Json out{{"samples", a.samples}, {"seed", a.seed}};
  if (a.samples == 0) {
    std::cerr << "warning: --samples 0 runs no checks; passing vacuously\n";
    out["pass"] = true;
    out["vacuous"] = true;
    std::cout << dump_json(out) << "\n";
    return kExitPass;
  }
  EquivalenceConfig ec;
  ec.samples = a.samples;
  ec.seed = a.seed;
  if (a.fault) ec.fault = Fault::TorusTwistDropsHole;
  const EquivalenceReport eq = run_equivalence(ec);
  const RoundTripReport rt = run_round_trip(a.samples, a.seed);
  const AxiomReport ax = run_metric_axioms(a.samples, a.seed);
  out["oracle"] = {{"max_rel_error_torus", eq.max_torus}, {"max_rel_error_sphere", eq.max_sphere},
                   {"tolerance", eq.tolerance},          {"worst_input", eq.worst_input},
                   {"pass", eq.pass()}};
  out["round_trip"] = {{"max_rel_error_length", rt.max_length}, {"max_rel_error_twist", rt.max_twist},
                       {"tolerance", 1e-9}, {"worst_input", rt.worst_input}, {"pass", rt.pass()}};
  out["metric_axioms"] = {{"triples", ax.triples}, {"symmetry_failures", ax.symmetry_failures},
                          {"triangle_failures", ax.triangle_failures}, {"identity_failures", ax.identity_failures},
                          {"first_failure", ax.first_failure}, {"pass", ax.pass()}};
  const bool pass = eq.pass() && rt.pass() && ax.pass();
  out["pass"] = pass;
  std::cout << dump_json(out) << "\n";
  if (!pass) {
    std::string worst = !eq.pass() ? eq.worst_input : !rt.pass() ? rt.worst_input : ax.first_failure;
    std::cerr << dump_json(Json{{"failure", "tolerance breach"}, {"worst_input", worst}}, 0) << "\n";
    return kExitScience;
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fenchel-Nielsen metric toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  TransformArgs ta;
  auto* tr = app.add_subcommand("transform", "elementary move on a torus, sphere or FN point");
  tr->add_flag("--torus", ta.torus, "one-holed torus");
  tr->add_flag("--sphere", ta.sphere, "four-holed sphere");
  tr->add_option("--l0", ta.l0, "torus hole length");
  tr->add_option("--holes", ta.holes, "sphere hole lengths x,z,w,y");
  tr->add_option("--l", ta.l, "length of the moved curve");
  tr->add_option("--tau", ta.tau, "twist of the moved curve");
  tr->add_flag("--certify", ta.certify, "cross-check the twist sign on the oracle");
  tr->add_option("--surface", ta.surface, "surface JSON");
  tr->add_option("--point", ta.point, "FN point JSON");
  tr->add_option("--curve", ta.curve, "curve to move");

  ExperimentArgs ea;
  auto* ex = app.add_subcommand("experiment", "run a sweep and write CSV + manifest");
  ex->add_option("name", ea.name, "prop32 | prop42 | seq52 | lemma61 | thm62 | thm64")->required();
  ex->add_option("--config", ea.config, "JSON config");
  ex->add_option("--out", ea.out, "output directory");
  ex->add_flag("--svg", ea.svg, "also write a log-log SVG plot");
  ex->add_option("--seed", ea.seed, "seed recorded in the manifest");
  ex->add_option("--t", ea.t, "twist amount");
  ex->add_option("--L", ea.L, "length bound");
  ex->add_option("--l0", ea.l0, "torus hole length");
  ex->add_option("--eps0", ea.eps0, "tail threshold");
  ex->add_option("--holes", ea.holes, "sphere hole lengths");
  ex->add_option("--l-grid", ea.l_grid, "length grid, e.g. 1e-1..1e-6");
  ex->add_option("--eps", ea.eps, "epsilon grid, e.g. 2^-1..2^-20");
  ex->add_option("--kind", ea.kind, "torus | sphere");
  ex->add_option("--max-pretwist", ea.max_pretwist, "pre-twist search bound");
  ex->add_option("--first", ea.first, "first ladder index");
  ex->add_option("--last", ea.last, "last ladder index");
  ex->add_option("--ratio", ea.ratio, "ladder length ratio");
  ex->add_option("--surface", ea.surface, "surface JSON");
  ex->add_option("--point", ea.point, "FN point JSON");
  ex->add_option("--alpha", ea.alpha, "curve to move");
  ex->add_option("--curve", ea.curve, "adjacent curve");

  CheckArgs ca;
  auto* ck = app.add_subcommand("check", "oracle equivalence, round trip and metric axioms");
  ck->add_option("--samples", ca.samples, "samples per battery");
  ck->add_option("--seed", ca.seed, "seed");
  ck->add_flag("--inject-fault", ca.fault)->group("");

  RepArgs ra;
  auto* rp = app.add_subcommand("rep", "dump a holonomy rep as JSON with hex floats");
  rp->add_option("--surface", ra.surface, "surface JSON");
  rp->add_option("--point", ra.point, "FN point JSON");
  rp->add_option("--root", ra.root, "curve whose cuff frame is the start");
  rp->add_flag("--torus", ra.torus, "one-holed torus model");
  rp->add_flag("--sphere", ra.sphere, "four-holed sphere model");
  rp->add_option("--l0", ra.l0, "torus hole length");
  rp->add_option("--holes", ra.holes, "sphere hole lengths");
  rp->add_option("--l", ra.l, "length");
  rp->add_option("--tau", ra.tau, "twist");

  std::string surface, xp, yp;
  auto* ds = app.add_subcommand("distance", "FN distance between two points");
  ds->add_option("--surface", surface, "surface JSON")->required();
  ds->add_option("--x", xp, "first point JSON")->required();
  ds->add_option("--y", yp, "second point JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("BadInput", e.what());
  }

  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(i ? argv[i] : "fnmetric");

  try {
    if (*tr) return cmd_transform(ta);
    if (*ex) return cmd_experiment(ea, command_line);
    if (*ck) return cmd_check(ca);
    if (*rp) return cmd_rep(ra);
    if (*ds) {
      const PantsDecomposition P = surface_from_json(read_json_file(surface));
      const FNPoint X = point_from_json(read_json_file(xp)), Y = point_from_json(read_json_file(yp));
      std::cout << dump_json(Json{{"distance", fn_distance(X, Y, P)}}) << "\n";
      return kExitPass;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AngleConditionFailed || e.code() == ErrorCode::TwistRecoveryFailed) {
      std::cerr << dump_json(Json{{"error", to_string(e.code())}, {"message", e.what()}}, 0) << "\n";
      return kExitScience;
    }
    return report_error(to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return report_error("BadInput", e.what());
  }
  return kExitInput;
}
