#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oligo/cli.hpp"

using namespace oligo;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string spec_path(const std::string& name) { return std::string(OLIGO_SPEC_DIR) + "/" + name + ".json"; }

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("oligo-cli-" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, Catalog) {
  CliRun r = run({"catalog"});
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["entries"].size(), catalog().size());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"wei"}).code, 2);
  EXPECT_EQ(run({"wei", "--spec", spec_path("dlo"), "--bogus"}).code, 2);
  EXPECT_EQ(run({"wei", "--spec", "/nonexistent.json"}).code, 2);
  auto d = scratch_dir("bad");
  std::ofstream(d / "bad.json") << "{\"kind\": \"dlo\", \"colour\": 3}";
  std::ofstream(d / "broken.json") << "{\"kind\": ";
  EXPECT_EQ(run({"invariant", "--no-cache", "--spec", (d / "bad.json").string()}).code, 2);
  EXPECT_EQ(run({"invariant", "--no-cache", "--spec", (d / "broken.json").string()}).code, 2);
}

TEST(Cli, WeiVerdictsAndExitCodes) {
  CliRun fail = run({"wei", "--spec", spec_path("equivalence2"), "--window-level", "1"});
  EXPECT_EQ(fail.code, 1);
  auto j = nlohmann::json::parse(fail.out);
  EXPECT_EQ(j["verdict"], "FAIL");
  EXPECT_EQ(j["witness"]["A"]["labels"][0], "c0.0");
  EXPECT_EQ(j["witness"]["B"]["labels"][0], "c0.1");
  EXPECT_EQ(run({"wei", "--spec", spec_path("equivalence2")}).code, 1);
  CliRun ok = run({"wei", "--spec", spec_path("pure_set")});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(nlohmann::json::parse(ok.out)["verdict"], "CONSISTENT");
}

TEST(Cli, BudgetExhaustion) {
  EXPECT_EQ(run({"wei", "--spec", spec_path("colored3"), "--budget", "100"}).code, 3);
  EXPECT_EQ(run({"invariant", "--no-cache", "--spec", spec_path("random_graph"), "--budget", "50"}).code, 3);
}

TEST(Cli, CompareAndOuter) {
  CliRun d = run({"compare", "--a", spec_path("dlo"), "--b", spec_path("pure_set")});
  EXPECT_EQ(d.code, 1);
  EXPECT_EQ(nlohmann::json::parse(d.out)["verdict"], "DISTINGUISHED");
  CliRun s = run({"compare", "-a", spec_path("dlo"), "-b", spec_path("dlo")});
  EXPECT_EQ(s.code, 0);
  auto sj = nlohmann::json::parse(s.out);
  EXPECT_EQ(sj["verdict"], "ISO");
  EXPECT_TRUE(sj["verified"].get<bool>());
  CliRun o = run({"outer", "--spec", spec_path("colored3"), "--age-size", "5"});
  EXPECT_EQ(o.code, 0);
  auto oj = nlohmann::json::parse(o.out);
  EXPECT_EQ(oj["group"]["order"], "6");
  EXPECT_EQ(oj["accepted"].size(), 6u);
  CliRun dl = run({"outer", "--spec", spec_path("dlo")});
  EXPECT_EQ(nlohmann::json::parse(dl.out)["accepted"][1]["sigma"], "(< >)");
  CliRun v = run({"outer", "--spec", spec_path("vector2"), "--dim", "3"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(nlohmann::json::parse(v.out)["glv_kernel"]["kernel_order"], "1");
}

TEST(Cli, LatticeAndGenstab) {
  auto d = scratch_dir("dot");
  CliRun l = run({"lattice", "--spec", spec_path("pure_set"), "--window-level", "1", "--dot", (d / "l.dot").string()});
  EXPECT_EQ(l.code, 0);
  EXPECT_EQ(nlohmann::json::parse(l.out)["nodes"].size(), 7u);
  EXPECT_TRUE(std::filesystem::exists(d / "l.dot"));
  CliRun g = run({"genstab", "--spec", spec_path("pure_set"), "--window-level", "2"});
  EXPECT_EQ(g.code, 0);
  auto gj = nlohmann::json::parse(g.out);
  EXPECT_EQ(gj["window_group_order"], "24");
  EXPECT_FALSE(gj["rows"].empty());
}

TEST(Cli, IdenticalInvocationsAndCacheHits) {
  auto d = scratch_dir("cache");
  std::vector<std::string> args{"invariant", "--spec", spec_path("henson3"), "--cache", d.string()};
  CliRun first = run(args), second = run(args);
  EXPECT_EQ(first.code, 0);
  EXPECT_EQ(first.out, second.out);
  EXPECT_NE(first.err.find("cache store"), std::string::npos);
  EXPECT_NE(second.err.find("cache hit"), std::string::npos);
  CliRun fresh = run({"invariant", "--spec", spec_path("henson3"), "--no-cache"});
  EXPECT_EQ(fresh.out, first.out);
}
