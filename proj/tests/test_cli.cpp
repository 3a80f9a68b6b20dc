#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "support.hpp"

using oracle::data;
using oracle::run_cli;

namespace {

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string last_line(const std::string& text) {
  std::string t = text;
  while (!t.empty() && t.back() == '\n') t.pop_back();
  auto pos = t.rfind('\n');
  return pos == std::string::npos ? t : t.substr(pos + 1);
}

std::string tmp_path(const std::string& name) { return testing::TempDir() + "treeflow_" + name; }

}  // namespace

TEST(Cli, AnalyzeFooter) {
  auto r = run_cli("analyze --graph " + data("rose2_unit.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "DELTA=1.0986123 C=1\n")) << r.out;
  auto half = run_cli("analyze --graph " + data("rose2_1_3half.json"));
  EXPECT_EQ(half.code, 0);
  EXPECT_TRUE(contains(half.out, "C=1/2")) << half.out;
  auto golden = run_cli("analyze --graph " + data("rose2_golden.json"));
  EXPECT_EQ(golden.code, 0);
  EXPECT_TRUE(contains(golden.out, "C=NA")) << golden.out;
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(run_cli("analyze --graph /nonexistent.json").code, 2);
  EXPECT_EQ(run_cli("analyze --graph " + data("bad_json.json")).code, 2);
  EXPECT_EQ(run_cli("analyze --graph " + data("bad_valence.json")).code, 3);
  EXPECT_EQ(run_cli("analyze").code, 2);
  EXPECT_EQ(run_cli("nosuchcommand").code, 2);
  EXPECT_EQ(run_cli("measure --graph " + data("rose2_unit.json") + " --depth 99").code, 2);
  EXPECT_EQ(run_cli("selftest --suite nosuch").code, 2);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Cli, MeasureCsv) {
  auto r = run_cli("measure --graph " + data("rose2_unit.json") + " --depth 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("cylinder,depth,mass_gibbs,mass_patterson,residual\n", 0), 0u) << r.out;
  EXPECT_EQ(last_line(r.out).rfind("# config_hash=", 0), 0u);
  // 4 depth-1 and 12 depth-2 cylinders
  int rows = 0;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#' && line.rfind("cylinder,", 0) != 0) ++rows;
  EXPECT_EQ(rows, 16);
}

TEST(Cli, CrossRatio) {
  auto r = run_cli("crossratio \"(A)\" \"b:(A)\" \"(a)\" \"b:(a)\"");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "-2")) << r.out;
  auto zero = run_cli("crossratio \"(A)\" \"(B)\" \"(a)\" \"(b)\"");
  EXPECT_EQ(zero.code, 0);
  EXPECT_TRUE(contains(zero.out, "0")) << zero.out;
  // a degenerate quadruple is bad input
  EXPECT_EQ(run_cli("crossratio \"(a)\" \"(b)\" \"(a)\" \"(B)\"").code, 2);
  EXPECT_EQ(run_cli("crossratio \"(a)\" \"(b)\"").code, 2);
  auto suite = run_cli("crossratio --suite");
  EXPECT_EQ(suite.code, 0);
  EXPECT_TRUE(contains(suite.out, "SELFTEST PASS")) << suite.out;
}

TEST(Cli, MixExactAndDeterministic) {
  std::string a = tmp_path("mix_a.csv");
  std::string b = tmp_path("mix_b.csv");
  std::string args = "mix --graph " + data("rose2_unit.json") + " --T-max 10 --T-step 1 --samples 500 --seed 3";
  auto ra = run_cli(args + " --out " + a);
  auto rb = run_cli(args + " --out " + b);
  ASSERT_EQ(ra.code, 0);
  EXPECT_TRUE(contains(ra.out, "VERDICT=NOT_MIXING c=1")) << ra.out;
  std::string csv = slurp(a);
  EXPECT_EQ(csv.rfind("T,corr,stderr\n", 0), 0u);
  EXPECT_EQ(last_line(csv).rfind("# config_hash=", 0), 0u);
  EXPECT_EQ(csv, slurp(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(Cli, MixGolden) {
  auto r = run_cli("mix --graph " + data("rose2_golden.json") + " --samples 2000");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(last_line(r.out), "VERDICT=MIXING_LIKELY c=NA");
}

TEST(Cli, QuotientDemo) {
  auto r = run_cli("quotient-demo --random 10");
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(contains(r.out, "FAIL")) << r.out;
}

TEST(Cli, Selftest) {
  auto a = run_cli("selftest --seed 4 --suite graph_core");
  auto b = run_cli("selftest --seed 4 --suite graph_core");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(contains(a.out, "SELFTEST PASS"));
  auto bad = run_cli("selftest --suite patterson --corrupt");
  EXPECT_EQ(bad.code, 1);
  EXPECT_TRUE(contains(bad.out, "first counterexample:")) << bad.out;
}
