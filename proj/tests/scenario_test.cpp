#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "nullgeo/errors.hpp"
#include "nullgeo/runner.hpp"
#include "nullgeo/scenario.hpp"

using namespace nullgeo;
using nlohmann::json;

namespace {

json builtin_json(const std::string& name) { return json::parse(builtin_text(name)); }

std::string schema_path_of(const json& j) {
  try {
    parse_scenario(j.dump());
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<no error>";
}

int count_lines_starting(const std::string& text, const std::string& prefix) {
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line))
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

TEST(ScenarioTest, BuiltinsParse) {
  for (const auto& name : builtin_names()) {
    ScenarioDocument doc = load_scenario("builtin:" + name);
    EXPECT_EQ(doc.source, "builtin:" + name);
    EXPECT_EQ(doc.sc.n(), doc.sc.m() + doc.sc.r() + doc.sc.q()) << name;
  }
  ScenarioDocument ex = load_scenario("builtin:example-3.1");
  EXPECT_EQ(ex.sc.count, 20);
  EXPECT_EQ(ex.sc.seed, 42u);
  EXPECT_TRUE(ex.sc.qgcr.declared);
  ASSERT_EQ(ex.claims.size(), 1u);
  EXPECT_TRUE(ex.claims[0].printed.has_value());
  EXPECT_EQ(ex.notes.size(), 3u);
}

TEST(ScenarioTest, MissingFieldReportsPointer) {
  json j = builtin_json("example-3.1");
  j["submanifold"]["frames"].erase("ltr");
  EXPECT_EQ(schema_path_of(j), "/submanifold/frames/ltr");

  json k = builtin_json("s3-great-sphere");
  k["bogus"] = 1;
  EXPECT_EQ(schema_path_of(k), "/bogus");

  json v = builtin_json("s3-great-sphere");
  v["schema_version"] = 2;
  EXPECT_EQ(schema_path_of(v), "/schema_version");
}

TEST(ScenarioTest, BadExpressionIsParseError) {
  json j = builtin_json("example-3.1");
  j["ambient"]["metric"] = {{"diagonal", {-1, -1, 1, 1, 1, "x1 +* y2", -1, 1, 1, 1, 1}}};
  try {
    parse_scenario(j.dump());
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("/ambient/metric"), std::string::npos) << e.what();
    EXPECT_EQ(e.position(), 5u);
  }
  json u = builtin_json("s3-great-sphere");
  u["submanifold"]["param_map"]["u"] = "a + q";
  EXPECT_EQ(schema_path_of(u), "/submanifold/param_map/u");
}

TEST(ScenarioTest, UnknownBuiltinAndMissingFile) {
  try {
    load_scenario("builtin:nope");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "/");
  }
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), SchemaError);
}

TEST(ScenarioTest, LoadsFromFile) {
  auto path = std::filesystem::temp_directory_path() / "nullgeo_scenario_test.json";
  {
    std::ofstream out(path);
    out << builtin_text("s3-small-sphere");
  }
  ScenarioDocument doc = load_scenario(path.string());
  EXPECT_EQ(doc.sc.id, "s3-small-sphere");
  std::filesystem::remove(path);
}

TEST(ScenarioTest, ParamOverride) {
  ScenarioDocument doc = load_scenario("builtin:s3-small-sphere");
  set_param(doc, "u0", 1.2);
  EXPECT_DOUBLE_EQ(doc.sc.bindings.at("u0"), 1.2);
  EXPECT_THROW(set_param(doc, "nope", 1.0), SchemaError);
  RunOptions opt;
  opt.only = {"umbilical"};
  CheckReport r = run_checks(doc, opt);
  ASSERT_FALSE(r.derived.h_fit.empty());
  EXPECT_NEAR(r.derived.h_fit[0].screen_transversal[0], -std::cos(1.2) / std::sin(1.2), 1e-9);
}

TEST(ScenarioTest, ToleranceResolutionOrder) {
  ScenarioDocument doc = load_scenario("builtin:s3-great-sphere");
  RunOptions opt;
  EXPECT_DOUBLE_EQ(resolve_tolerance(doc, opt, "gauss"), default_tolerances().at("gauss"));
  doc.tolerances["gauss"] = 1e-3;
  EXPECT_DOUBLE_EQ(resolve_tolerance(doc, opt, "gauss"), 1e-3);
  opt.tolerances["gauss"] = 1e-4;
  EXPECT_DOUBLE_EQ(resolve_tolerance(doc, opt, "gauss"), 1e-4);
  opt.tol_scale = 10.0;
  EXPECT_DOUBLE_EQ(resolve_tolerance(doc, opt, "gauss"), 1e-3);
  EXPECT_THROW(resolve_tolerance(doc, opt, "nope"), Error);
}

TEST(RunnerTest, JsonIsDeterministic) {
  ScenarioDocument doc = load_scenario("builtin:s3-great-sphere");
  std::string a = emit_report(run_checks(doc), "json");
  std::string b = emit_report(run_checks(doc), "json");
  EXPECT_EQ(a, b);
  RunOptions other;
  other.seed = 8;
  EXPECT_NE(a, emit_report(run_checks(doc, other), "json"));
}

TEST(RunnerTest, OnlySelectsFamily) {
  ScenarioDocument doc = load_scenario("builtin:example-3.1");
  RunOptions opt;
  opt.only = {"gw"};
  opt.samples = 2;
  CheckReport r = run_checks(doc, opt);
  ASSERT_FALSE(r.records.empty());
  for (const auto& rec : r.records) EXPECT_EQ(rec.check_id.rfind("gw.", 0), 0u) << rec.check_id;
  opt.only = {"nope"};
  EXPECT_THROW(run_checks(doc, opt), Error);
}

TEST(RunnerTest, ReportRoundTrip) {
  ScenarioDocument doc = load_scenario("builtin:example-3.1");
  RunOptions opt;
  opt.samples = 2;
  CheckReport r = run_checks(doc, opt);
  std::string text = report_to_json(r);
  CheckReport back = report_from_json(text);
  EXPECT_EQ(back, r);
  EXPECT_EQ(report_to_json(back), text);
  json j = json::parse(text);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_TRUE(j["derived"].contains("discrepancy_flags"));
}

TEST(RunnerTest, EmptyReport) {
  CheckReport r;
  EXPECT_EQ(r.summary(), Summary{});
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
  EXPECT_NE(report_to_text(r).find("0 total"), std::string::npos);
  EXPECT_EQ(count_lines_starting(report_to_text(r), "FAIL "), 0);
  EXPECT_THROW(emit_report(r, "yaml"), Error);
}

TEST(RunnerTest, TextListsEachFailure) {
  ScenarioDocument doc = load_scenario("builtin:example-3.1");
  RunOptions opt;
  opt.samples = 3;
  CheckReport r = run_checks(doc, opt);
  EXPECT_GT(r.summary().failed, 0);
  EXPECT_EQ(count_lines_starting(report_to_text(r), "FAIL "), r.summary().failed);
}

TEST(RunnerTest, PhiMutationFailsAxioms) {
  ScenarioDocument doc = load_scenario("builtin:example-3.1");
  apply_mutation(doc, "phi:0,5:0.1");
  RunOptions opt;
  opt.samples = 2;
  opt.only = {"acms"};
  CheckReport r = run_checks(doc, opt);
  int acms_fail = 0;
  for (const auto& rec : r.records)
    if (rec.verdict == Verdict::Fail) ++acms_fail;
  EXPECT_GT(acms_fail, 0);
  EXPECT_THROW(apply_mutation(doc, "phi:0,99:0.1"), SchemaError);
  EXPECT_THROW(apply_mutation(doc, "twist:0,0:1"), SchemaError);
}

TEST(RunnerTest, BuiltinVerdictsAndFlags) {
  ScenarioDocument doc = load_scenario("builtin:example-3.1");
  RunOptions opt;
  opt.samples = 3;
  CheckReport r = run_checks(doc, opt);
  EXPECT_EQ(r.verdicts.at("qgcr"), true);
  EXPECT_EQ(r.verdicts.at("ascreen"), true);
  EXPECT_EQ(r.verdicts.at("irrotational"), true);
  EXPECT_EQ(r.verdicts.at("geodesic"), false);
  ASSERT_TRUE(r.derived.cbar.has_value());
  EXPECT_EQ(*r.derived.cbar, 0.0);
  bool claim_flag = false;
  for (const auto& f : r.derived.discrepancy_flags) claim_flag = claim_flag || f.id == "claim.nabla_x1_x1";
  EXPECT_TRUE(claim_flag);
}
