#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rankcond/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "rankcond");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = rankcond::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Result& r) { return nlohmann::json::parse(r.out); }

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, PolyControllability) {
  const auto r = run({"analyze", "--corpus", "poly_ctrl_n3", "--kind", "controllability", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["rank"], 3);
  EXPECT_EQ(j["verdict"], "controllable");
  EXPECT_EQ(j["kind"], "controllability");
  EXPECT_EQ(j["algorithm"], 4);
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["samples"], 5);
}

TEST(Cli, JsonSchema) {
  const auto j = json_of(run({"analyze", "--corpus", "lunar_takeoff_var_mass", "--format", "json"}));
  for (const char* key : {"system", "kind", "steps", "converged_at", "rank", "n", "verdict", "annihilators", "seed",
                          "samples", "codimension"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["verdict"], "not-observable");
  EXPECT_EQ(j["codimension"], 1);
  ASSERT_EQ(j["steps"].size(), 5u);
  const auto& first = j["steps"][0]["added"][0];
  EXPECT_EQ(first["operator"], "seed");
  EXPECT_TRUE(first["source_generator"].is_null());
  EXPECT_EQ(first["index"], 0);
  const auto& later = j["steps"][1]["added"][0];
  EXPECT_EQ(later["operator"], "tilde_f0");
  EXPECT_TRUE(later["source_generator"].is_number());
  bool saw_scale = false;
  for (const auto& a : j["annihilators"])
    if (a["name"] == "scale") {
      saw_scale = true;
      EXPECT_FALSE(a["verified"].get<bool>());
    }
  EXPECT_TRUE(saw_scale);
}

TEST(Cli, MissingFileIsInputError) {
  const auto r = run({"analyze", "--system", "missing.sys"});
  EXPECT_EQ(r.code, rankcond::cli::kExitInputError);
  EXPECT_NE(r.err.find("missing.sys"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, ParseErrorIsInputError) {
  const auto p = temp_file("rankcond_cli_bad.sys", "state x1\noutput h1 = x2\n");
  const auto r = run({"analyze", "--system", p.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("rankcond_cli_bad.sys:2:13: unknown symbol 'x2'"), std::string::npos) << r.err;
  std::filesystem::remove(p);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"analyze"}).code, 1);
  EXPECT_EQ(run({"analyze", "--corpus", "nope"}).code, 1);
  EXPECT_EQ(run({"analyze", "--corpus", "poly_obs_n2", "--system", "x.sys"}).code, 1);
  EXPECT_EQ(run({"analyze", "--corpus", "poly_obs_n2", "--kind", "sideways"}).code, 1);
  EXPECT_EQ(run({"analyze", "--corpus", "poly_obs_n2", "--samples", "0"}).code, 1);
  EXPECT_EQ(run({"analyze", "--corpus", "poly_obs_n2", "--param", "novalue"}).code, 1);
  EXPECT_EQ(run({"analyze", "--corpus", "poly_ctrl_n2", "--kind", "observability"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SamplingFailureExitCode) {
  // Every point is excluded by the avoid predicate.
  const auto p = temp_file("rankcond_cli_avoid.sys", "state x1\noutput h1 = x1\navoid 0\n");
  const auto r = run({"analyze", "--system", p.string()});
  EXPECT_EQ(r.code, rankcond::cli::kExitSamplingError) << r.err;
  std::filesystem::remove(p);
}

TEST(Cli, BothKindsMerge) {
  const auto j = json_of(run({"analyze", "--corpus", "ltv_linear_demo", "--format", "json"}));
  ASSERT_EQ(j["reports"].size(), 2u);
  EXPECT_EQ(j["reports"][0]["kind"], "observability");
  EXPECT_EQ(j["reports"][1]["kind"], "controllability");
}

TEST(Cli, ByteIdenticalJson) {
  const std::vector<std::string> args{"analyze", "--corpus", "lunar_takeoff_const_mass", "--format", "json"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Cli, SeedFromEnvironmentAndFlag) {
  ::setenv("RANKCOND_SEED", "7", 1);
  const auto env = json_of(run({"analyze", "--corpus", "poly_obs_n2", "--kind", "observability", "--format", "json"}));
  const auto flag = json_of(
      run({"analyze", "--corpus", "poly_obs_n2", "--kind", "observability", "--seed", "9", "--format", "json"}));
  ::unsetenv("RANKCOND_SEED");
  EXPECT_EQ(env["seed"], 7);
  EXPECT_EQ(flag["seed"], 9);
  const auto plain = json_of(run({"analyze", "--corpus", "poly_obs_n2", "--kind", "observability", "--format", "json"}));
  EXPECT_EQ(plain["seed"], 42);
}

TEST(Cli, ParamOverride) {
  const auto base = json_of(run({"analyze", "--corpus", "lunar_takeoff_const_mass", "--format", "json"}));
  const auto over =
      json_of(run({"analyze", "--corpus", "lunar_takeoff_const_mass", "--param", "A0=7/2", "--format", "json"}));
  EXPECT_EQ(base["rank"], over["rank"]);
  EXPECT_EQ(run({"analyze", "--corpus", "lunar_takeoff_const_mass", "--param", "Q=1"}).code, 1);
}

TEST(Cli, AnnihilatorFile) {
  const auto p = temp_file("rankcond_cli_ann.sys",
                           "annihilator observability x2_only = [0, 1]\nannihilator observability x1_only = [1, 0]\n");
  const auto sys = temp_file("rankcond_cli_sys.sys", "state x1 x2\noutput h1 = x1\n");
  const auto j = json_of(run({"analyze", "--system", sys.string(), "--annihilator", p.string(), "--format", "json"}));
  ASSERT_EQ(j["annihilators"].size(), 2u);
  EXPECT_TRUE(j["annihilators"][0]["verified"].get<bool>());
  EXPECT_FALSE(j["annihilators"][1]["verified"].get<bool>());
  std::filesystem::remove(p);
  std::filesystem::remove(sys);
  const auto bad = temp_file("rankcond_cli_ann_bad.sys", "\nannihilator observability w = [1]\n");
  const auto r = run({"analyze", "--corpus", "poly_obs_n2", "--annihilator", bad.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("rankcond_cli_ann_bad.sys:2:"), std::string::npos) << r.err;
  std::filesystem::remove(bad);
}

TEST(Cli, TextReport) {
  const auto r = run({"analyze", "--corpus", "lunar_takeoff_const_mass"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("trace: dim 3 -> 5 -> 7 -> 9"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("codimension 2"), std::string::npos);
  EXPECT_NE(r.out.find("annihilator scale: verified"), std::string::npos);
}

TEST(Cli, ExplainTree) {
  const auto r = run({"explain", "--corpus", "poly_obs_n3"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("tilde_f0 ∘ tilde_f0 ∘ d h1"), std::string::npos) << r.out;
  const auto j = json_of(run({"explain", "--corpus", "poly_obs_n3", "--kind", "observability", "--format", "json"}));
  EXPECT_EQ(j["generators"].size(), 3u);
  EXPECT_EQ(j["generators"][2]["source_generator"], 1);
}

TEST(Cli, CheckCommand) {
  const auto r = run({"check", "--corpus", "ltv_linear_demo", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = json_of(r);
  ASSERT_FALSE(j["findings"].empty());
  for (const auto& f : j["findings"]) EXPECT_TRUE(f["passed"].get<bool>()) << f["name"];
}

TEST(Cli, CorpusList) {
  const auto r = run({"corpus", "list"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("lunar_full"), std::string::npos);
  const auto j = json_of(run({"corpus", "list", "--format", "json"}));
  EXPECT_GE(j.size(), 14u);
}

TEST(Cli, ModularArithmeticSameTrace) {
  const auto a = json_of(run({"analyze", "--corpus", "lunar_takeoff_var_mass", "--format", "json"}));
  const auto b =
      json_of(run({"analyze", "--corpus", "lunar_takeoff_var_mass", "--arithmetic", "modular", "--format", "json"}));
  EXPECT_EQ(a["steps"], b["steps"]);
  EXPECT_EQ(b["arithmetic"], "modular");
}
