#include "bondforge/linkage_io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "bondforge_cli_" + name; }

Run run(const std::string& args) {
  std::string out = temp_path("stdout"), err = temp_path("stderr");
  std::string cmd = std::string(BONDFORGE_CLI) + " " + args + " >" + out + " 2>" + err;
  int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string sample(const std::string& name) { return std::string(BONDFORGE_SAMPLES) + "/" + name; }

bondforge::Json parse(const std::string& s) { return bondforge::Json::parse(s); }

}  // namespace

TEST(Cli, BondsOfBennett) {
  auto r = run("bonds " + sample("bennett.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = parse(r.out);
  EXPECT_EQ(j["command"], "bonds");
  EXPECT_EQ(j["bonds"]["bonds"].size(), 4u);
  EXPECT_EQ(j["consistent"], true);
}

TEST(Cli, ReportsAreByteIdentical) {
  auto a = run("bonds " + sample("bennett.json") + " --seed 3");
  auto b = run("bonds " + sample("bennett.json") + " --seed 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto c = run("check " + sample("goldberg.json"));
  auto d = run("check " + sample("goldberg.json"));
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.out, d.out);
}

TEST(Cli, FloatBackendAgreesOnBondCount) {
  auto r = run("bonds " + sample("bennett.json") + " --backend float --tol 1e-9");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = parse(r.out);
  EXPECT_EQ(j["backend"], "float");
  EXPECT_EQ(j["bonds"]["bonds"].size(), 4u);
}

TEST(Cli, JsonOutputToFile) {
  std::string path = temp_path("report.json");
  std::remove(path.c_str());
  auto r = run("bonds " + sample("bennett.json") + " --json " + path);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(parse(slurp(path))["command"], "bonds");
}

TEST(Cli, DiagramDot) {
  auto r = run("diagram " + sample("goldberg.json") + " --dot -");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("graph bond_diagram {", 0), 0u);
  std::string path = temp_path("goldberg.dot");
  auto f = run("diagram " + sample("goldberg.json") + " --dot " + path);
  ASSERT_EQ(f.code, 0);
  EXPECT_EQ(slurp(path), r.out);
  EXPECT_EQ(parse(f.out)["diagram"]["lines"].size(), 3u);
}

TEST(Cli, SolveGenericSixR) {
  auto r = run("solve " + sample("random_6r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = parse(r.out);
  EXPECT_EQ(j["solve"]["solutions"].size(), 16u);
}

TEST(Cli, FamilyOutputMatchesSamples) {
  auto r = run("family bennett 1 2 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(sample("bennett.json")));
  EXPECT_EQ(run("family goldberg 1 2 3 4").out, slurp(sample("goldberg.json")));
  EXPECT_EQ(run("family dup-axes --seed 5").out, slurp(sample("dup_axes.json")));
}

TEST(Cli, ImmobileInputIsAnAnalysisError) {
  auto r = run("bonds " + sample("random_6r.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(parse(r.err)["error"]["kind"], "analysis");
}

TEST(Cli, BadInputExitsWithTwo) {
  std::string path = temp_path("bad.json");
  std::ofstream(path) << R"({"joints": [{"dh": {"w": "x"}}, {"dh": {"w": 1}}]})";
  auto r = run("bonds " + path);
  EXPECT_EQ(r.code, 2);
  auto e = parse(r.err)["error"];
  EXPECT_EQ(e["kind"], "input");
  EXPECT_EQ(e["field"], "joints[0].dh.w");
  EXPECT_EQ(run("bonds " + temp_path("missing.json")).code, 2);
  EXPECT_EQ(run("bonds").code, 2);
  EXPECT_EQ(run("bonds " + sample("bennett.json") + " --backend symbolic").code, 2);
  EXPECT_EQ(run("family bennett 1 2").code, 2);
  EXPECT_EQ(run("family hexapod").code, 2);
}
