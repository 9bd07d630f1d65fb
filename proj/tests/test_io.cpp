// Spec documents, vector files and report serialization.

#include <gtest/gtest.h>

#include <filesystem>

#include "alspach/io.hpp"

using namespace alspach;
using WF = WeightFamily;

namespace {

std::string parse_error(const std::string& text) {
  try {
    parse_spec_text(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST(SpecParse, MinimalDocument) {
  SpecDocument d = parse_spec_text(R"({"p": "9/2", "pairs": []})");
  EXPECT_EQ(d.spec.p(), Rational(9, 2));
  EXPECT_EQ(d.spec.pairs().size(), 1u);
  EXPECT_FALSE(d.expected_class);
}

TEST(SpecParse, AllWeightKinds) {
  SpecDocument d = parse_spec_text(R"({
    "p": 4,
    "pairs": [
      {"partition": {"kind": "blocks", "blocks": [{"size": "inf", "count": 1}, {"size": 2, "count": "inf"}]},
       "weights": {"kind": "explicit", "params": {"values": ["1/2", 0.25], "tail": {"kind": "power", "params": {"alpha": 2}}},
                   "groups": [{"group": 1, "kind": "geometric", "params": {"c": 1, "r": "1/3"}}]}},
      {"partition": {"kind": "indiscrete"},
       "weights": {"kind": "interleave", "params": {"odd": {"kind": "constant", "params": {"c": 1}},
                                                    "even": {"kind": "constant", "params": {"c": "1/2"}}}}}
    ]})");
  ASSERT_EQ(d.spec.pairs().size(), 3u);
  const auto& pr = d.spec.pair(1);
  EXPECT_EQ(pr.weights().overrides.size(), 1u);
  EXPECT_EQ(pr.weights().base.tmpl.kind(), WeightKind::Explicit);
  EXPECT_EQ(*weight_at(pr.weights().base.tmpl, 2).exact, Rational(1, 4));
  // the tail is indexed from 1 after the listed values
  EXPECT_EQ(*weight_at(pr.weights().base.tmpl, 3).exact, Rational(1));
  EXPECT_EQ(*weight_at(pr.weights().base.tmpl, 5).exact, Rational(1, 9));
  EXPECT_EQ(*d.spec.pair(2).weight_at(2).exact, Rational(1, 2));
}

TEST(SpecParse, FrameByIndexOrInline) {
  const char* by_index = R"({"p": 4, "pairs": [
      {"partition": {"kind": "blocks", "blocks": [{"size": 2, "count": "inf"}]}, "weights": {"kind": "constant", "params": {"c": 1}}},
      {"partition": {"kind": "indiscrete"},
       "weights": {"kind": "constant", "params": {"c": 1}, "per_block": {"kind": "geometric", "params": {"r": "1/2"}}, "frame": 0}}]})";
  const char* inline_frame = R"({"p": 4, "pairs": [
      {"partition": {"kind": "blocks", "blocks": [{"size": 2, "count": "inf"}]}, "weights": {"kind": "constant", "params": {"c": 1}}},
      {"partition": {"kind": "indiscrete"},
       "weights": {"kind": "constant", "params": {"c": 1}, "per_block": {"kind": "geometric", "params": {"r": "1/2"}},
                   "frame": {"kind": "blocks", "blocks": [{"size": 2, "count": "inf"}]}}}]})";
  SpecDocument a = parse_spec_text(by_index), b = parse_spec_text(inline_frame);
  EXPECT_EQ(a.spec, b.spec);
  EXPECT_EQ(*a.spec.pair(2).weight_at(3).exact, Rational(1, 4));
}

TEST(SpecParse, ErrorsNameTheOffendingField) {
  EXPECT_NE(parse_error(R"({"p": 4, "pairs": [], "extra": 1})").find("extra: unknown field"), std::string::npos);
  EXPECT_NE(parse_error(R"({"pairs": []})").find(".p: missing field"), std::string::npos);
  EXPECT_NE(parse_error(R"({"p": 2, "pairs": []})").find("p: p must exceed 2"), std::string::npos);
  EXPECT_NE(parse_error(R"({"p": 4, "pairs": [{"partition": {"kind": "cells"}, "weights": {"kind": "constant", "params": {"c": 1}}}]})")
                .find("pairs[0].partition.kind: unknown partition kind"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"p": 4, "pairs": [{"partition": {"kind": "indiscrete"}, "weights": {"kind": "constant", "params": {"c": 3}}}]})")
                .find("pairs[0].weights"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"p": 4, "pairs": [{"partition": {"kind": "blocks", "blocks": [{"size": 0, "count": 1}]}, "weights": {"kind": "constant", "params": {"c": 1}}}]})")
                .find("pairs[0].partition.blocks[0].size"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"p": 4, "pairs": [{"partition": {"kind": "indiscrete"}, "weights": {"kind": "constant", "params": {"c": 1}, "frame": 5}}]})")
                .find("frame: no such pair"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"p": 4, "pairs": [{"partition": {"kind": "indiscrete"}, "weights": {"kind": "constant", "params": {"c": 1}, "groups": [{"group": 1, "bogus": 1, "kind": "constant", "params": {"c": 1}}]}}]})")
                .find("groups[0].bogus: unknown field"),
            std::string::npos);
  EXPECT_NE(parse_error("{not json").find("malformed JSON"), std::string::npos);
  EXPECT_NE(parse_error(R"({"p": 4, "pairs": [], "expected_class": "ELL_7"})").find("expected_class"), std::string::npos);
}

TEST(SpecRoundTrip, EveryFixture) {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(ALSPACH_FIXTURE_DIR)) {
    if (e.path().extension() != ".json") continue;
    ++n;
    SpecDocument d = load_spec(e.path().string());
    json once = spec_json(d.spec);
    SpecDocument back = parse_spec(once);
    EXPECT_EQ(back.spec, d.spec.normalized()) << e.path();
    EXPECT_EQ(spec_json(back.spec).dump(), once.dump()) << e.path();
  }
  EXPECT_GE(n, 14);
}

TEST(VectorFile, ParsesRationalsDecimalsAndComments) {
  VectorFile v = parse_vector_text("# header\n1 1 1/2\n\n3 2 -0.25  # trailing\n", 0);
  ASSERT_TRUE(v.exact);
  EXPECT_EQ(v.values.size(), 2u);
  EXPECT_EQ(v.exact->size(), 2u);
  VectorFile sci = parse_vector_text("1 1 1e-3\n", 0);
  ASSERT_TRUE(sci.exact);
  EXPECT_EQ(sci.exact->entries().begin()->second, Rational(1, 1000));
  VectorFile hex = parse_vector_text("1 1 0x1p-3\n", 0);  // a double, but not a rational literal
  EXPECT_FALSE(hex.exact);
  EXPECT_EQ(hex.values.entries().begin()->second, 0.125);
}

TEST(VectorFile, LineNumberedErrors) {
  auto msg = [](const std::string& text) {
    try {
      parse_vector_text(text, 0);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(msg("1 1 1\n2 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(msg("1 1 1\n\n1 x 2\n").find("line 3"), std::string::npos);
  EXPECT_NE(msg("1 1 1\n1 1 2\n").find("duplicate"), std::string::npos);
  EXPECT_NE(msg("1 1 nan\n").find("bad value"), std::string::npos);
  EXPECT_NE(msg("1 1 1 1\n").find("line 1"), std::string::npos);
}

TEST(Reports, VerificationReportRoundTrip) {
  VerificationReport r;
  r.check = "holder";
  r.spec_digest = 0xdeadbeefcafef00dULL;
  r.dims = {8, 16};
  r.samples = 10;
  r.seed = 42;
  r.tolerance = 1e-12;
  r.constants = {{"C_8", 0.1 + 0.2}, {"C_16", 1.0 / 3.0}};
  r.worst_slack = 1e-17;
  r.evaluations = 123;
  r.witness = {0.1, -2.5e-300, 7};
  r.witness_lhs = 0.3;
  r.witness_rhs = 0.7;
  r.wall_ms = 5.5;
  json j = report_json(r, true);
  VerificationReport back = report_from_json(json::parse(j.dump()));
  EXPECT_EQ(report_json(back, true).dump(), j.dump());
  EXPECT_EQ(back.constants, r.constants);
  EXPECT_EQ(back.witness, r.witness);
  EXPECT_FALSE(report_json(r, false).contains("wall_ms"));

  VerificationReport empty;
  VerificationReport e2 = report_from_json(json::parse(report_json(empty, false).dump()));
  EXPECT_TRUE(std::isinf(e2.worst_slack));
}

TEST(Reports, RatioScanRoundTrip) {
  RatioScan s{{{32, 0.5, 0.75}, {64, 0.5, 0.76}}, 0.0133};
  json j = ratio_scan_json(s);
  RatioScan back = ratio_scan_from_json(json::parse(j.dump()));
  EXPECT_EQ(ratio_scan_json(back).dump(), j.dump());
}

TEST(Reports, ClassificationJsonCarriesEvidence) {
  SpecDocument d = load_spec(std::string(ALSPACH_FIXTURE_DIR) + "/nested-bounded-block-sums.json");
  json j = classification_json(classify(d.spec));
  EXPECT_EQ(j["class"], "ELL_P");
  EXPECT_EQ(j["evidence"]["route"], "nested");
  EXPECT_TRUE(j["evidence"]["quantities"].contains("sup_C_M"));
  EXPECT_EQ(json::parse(j.dump()), j);
}
