#include <gtest/gtest.h>

#include "fnmetric/io.hpp"

using namespace fnmetric;

TEST(Json, FloatsUseSeventeenDigits) {
  const std::string s = dump_json(Json{{"x", 0.1}}, 0);
  EXPECT_EQ(s, "{\"x\":0.10000000000000001}");
}

TEST(Json, KeysSortedAndNonFiniteIsNull) {
  const std::string s = dump_json(Json{{"b", 1}, {"a", std::nan("")}}, 0);
  EXPECT_EQ(s, "{\"a\":null,\"b\":1}");
}

TEST(Json, MalformedIsBadInput) {
  try {
    parse_json("{\"pants\": [");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadInput);
  }
}

TEST(Surface, RoundTripIsByteStable) {
  const auto P = five_holed_sphere();
  const std::string a = dump_json(to_json(P));
  const auto Q = surface_from_json(parse_json(a));
  EXPECT_TRUE(isomorphic(P, Q));
  EXPECT_EQ(dump_json(to_json(Q)), a);
}

TEST(Surface, LadderRoundTrip) {
  const auto L = PantsDecomposition::ladder(LadderSpec{{LadderFamily{"a", 1, 2}}});
  const auto M = surface_from_json(parse_json(dump_json(to_json(L))));
  ASSERT_FALSE(M.is_finite());
  EXPECT_EQ(M.generator()->spec(), L.generator()->spec());
}

TEST(Surface, InvalidSurfaceRejected) {
  const Json j = {{"pants", {{"a", "b", "c"}, {"d", "e", "f"}}}};
  EXPECT_THROW(surface_from_json(j), Error);
  EXPECT_THROW(surface_from_json(Json{{"pants", {{"a", "b"}}}}), Error);
  EXPECT_THROW(surface_from_json(Json{{"pants", {{"a", "a", "d"}}}, {"curves", {{"d", "weird"}}}}), Error);
}

TEST(Point, RoundTripWithFallbackAndOverrides) {
  FNPoint X;
  X.set_fallback(CurveParams{1.0, 0.0});
  X.set_base("C1", {1.0, 0.3});
  X.set("a", {0.1, 1.0 / 3.0});
  const FNPoint Y = point_from_json(parse_json(dump_json(to_json(X))));
  EXPECT_EQ(Y.base(), X.base());
  EXPECT_EQ(Y.overrides(), X.overrides());
  EXPECT_EQ(Y.fallback(), X.fallback());
}

TEST(Point, BareNumberIsLength) {
  const FNPoint X = point_from_json(Json{{"base", {{"a", 2.5}}}});
  EXPECT_EQ(X.at("a"), (CurveParams{2.5, 0.0}));
  EXPECT_THROW(point_from_json(Json{{"base", {{"a", {{"twist", 1.0}}}}}}), Error);
}

TEST(Rep, HexRoundTripIsExact) {
  const HolonomyRep rep = build_torus_rep({0.8, 1.1, 0.3});
  const HolonomyRep back = rep_from_json(parse_json(dump_json(to_json(rep))));
  ASSERT_EQ(back.generators.size(), rep.generators.size());
  for (const auto& [n, m] : rep.generators) {
    const Mat2& b = back.generators.at(n);
    EXPECT_EQ(b.a, m.a);
    EXPECT_EQ(b.b, m.b);
    EXPECT_EQ(b.c, m.c);
    EXPECT_EQ(b.d, m.d);
  }
  EXPECT_EQ(back.words, rep.words);
  EXPECT_TRUE(back.check().empty());
}

TEST(Rep, BadHexRejected) { EXPECT_THROW(parse_hex("0x1.8p+1z"), Error); }

TEST(Manifest, Fnv1aVectors) {
  EXPECT_EQ(fnv1a(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a("a"), "af63dc4c8601ec8c");
}

TEST(Manifest, CarriesVersionAndSeed) {
  RunManifest m;
  m.command = "experiment prop32";
  m.seed = 42;
  m.inputs["config"] = fnv1a("{}");
  const Json j = m.to_json();
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["inputs"]["config"], fnv1a("{}"));
}

TEST(Plot, SvgDropsNonPositivePoints) {
  const std::string svg = loglog_svg("t", "x", "y", {{"s", {1e-3, 1e-2, 0.0}, {1e-3, 1e-2, 1.0}}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  const auto at = svg.find("points=\"");
  const auto end = svg.find('"', at + 8);
  const std::string pts = svg.substr(at + 8, end - at - 8);
  EXPECT_EQ(std::count(pts.begin(), pts.end(), ','), 2);
}
