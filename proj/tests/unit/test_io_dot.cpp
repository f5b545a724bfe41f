#include <gtest/gtest.h>

#include <regex>

#include "corpus.hpp"

namespace netident {
namespace {

using nlohmann::json;
using testing::load_fixture;

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Dot, Fig1aShapesAndDoubledKnownEdge) {
  const auto dot = export_dot(load_fixture("fig1a"));
  EXPECT_EQ(count(dot, "shape=circle"), 4);
  EXPECT_EQ(count(dot, "shape=box"), 1);
  EXPECT_NE(dot.find("w2 -> w4 [color=\"black:invis:black\"]"), std::string::npos);
  EXPECT_EQ(count(dot, "invis"), 1);
  EXPECT_EQ(count(dot, " -> "), 6);
}

TEST(Dot, EmptyModelIsHeaderOnly) { EXPECT_EQ(export_dot(load_fixture("empty")), "digraph network {\n}\n"); }

TEST(Dot, QueryHighlightsTargetsAndCut) {
  const auto m = load_fixture("fig1b");
  const Query q{3, {0}};
  const auto v = check_disconnecting_conditions(m, q);
  const auto dot = export_dot(m, q, &v);
  EXPECT_NE(dot.find("w2 [shape=circle, style=filled, fillcolor=red]"), std::string::npos);
  EXPECT_NE(dot.find("w1 -> w4 [penwidth=3]"), std::string::npos);
  EXPECT_NE(dot.find("color=blue"), std::string::npos);
}

TEST(Json, VerdictFields) {
  const auto m = load_fixture("fig1a");
  const auto v = check_disconnecting_conditions(m, {3, {0}});
  const auto j = to_json(v, derive_graph(m));
  EXPECT_EQ(j.at("identifiable"), false);
  EXPECT_EQ(j.at("method"), "cut");
  EXPECT_EQ(j.at("output"), "w4");
  EXPECT_EQ(j.at("certificate").at("b_targets"), 1);
  EXPECT_EQ(j.at("certificate").at("b_all_inputs"), 1);
  EXPECT_EQ(j.at("certificate").at("b_other_inputs"), 1);
  EXPECT_TRUE(j.contains("disconnecting_set"));
}

TEST(Json, PlanSchema) {
  const auto m = load_fixture("fig3");
  const auto plan = allocate(m, {6, {2}}, compute_Xj(m, 6), {0, 4});
  const auto j = to_json(plan, derive_graph(m));
  EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
  EXPECT_EQ(j.at("verified"), true);
  ASSERT_EQ(j.at("new_signals").size(), 2u);
  EXPECT_EQ(j.at("new_signals")[0].at("vertex"), "w1");
  EXPECT_EQ(j.at("new_signals")[0].at("r_index"), 1);
  EXPECT_EQ(j.at("disconnecting_set"), json({"w4", "w7"}));
}

TEST(Json, Assumption5Report) {
  const auto j = to_json(check_assumption5(load_fixture("fig2b_degenerate")));
  EXPECT_EQ(j.at("passed"), false);
  EXPECT_GE(j.at("violation_count").get<int>(), 1);
}

TEST(ModelDigest, StableAndSensitive) {
  const auto a = load_fixture("fig1a");
  EXPECT_EQ(model_digest(a), model_digest(parse_model(serialize_model(a))));
  EXPECT_NE(model_digest(a), model_digest(load_fixture("fig1b")));
  EXPECT_TRUE(std::regex_match(model_digest(a), std::regex("[0-9a-f]{16}")));
}

TEST(TextFiles, MissingFileThrows) { EXPECT_THROW(read_text_file("/nonexistent/model.json"), std::runtime_error); }

}  // namespace
}  // namespace netident
