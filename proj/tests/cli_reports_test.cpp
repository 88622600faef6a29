#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "nildual/error.hpp"
#include "nildual/report.hpp"
#include "oracles.hpp"

using namespace nildual;
using nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(NILDUAL_DATA_DIR) + "/" + name + ".json"; }

RunConfig config(const std::string& sub, const std::string& alg = "") {
  RunConfig c;
  c.subcommand = sub;
  if (!alg.empty()) c.algebra_path = data(alg);
  return c;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nildual_test_" + name);
}

}  // namespace

TEST(Run, Z4VerifyArityTwo) {
  auto c = config("z4-verify");
  c.arity = 2;
  const auto r = run(c);
  EXPECT_EQ(r.status, ExitStatus::Ok);
  const auto j = json::parse(r.report);
  EXPECT_EQ(j["verdict"], "zero counterexamples");
  EXPECT_EQ(j["results"]["clone_check"]["closure_count"], 128);
  EXPECT_TRUE(j["results"]["clone_check"]["equal"].get<bool>());
  EXPECT_EQ(j["version"], tool_version());
}

TEST(Run, CommutatorsOnS3) {
  const auto r = run(config("commutators", "s3"));
  EXPECT_EQ(r.status, ExitStatus::Ok);
  const auto j = json::parse(r.report);
  EXPECT_EQ(j["results"]["nilpotence"]["status"], "not nilpotent");
  EXPECT_FALSE(j["results"]["nilpotence"]["abelian"].get<bool>());
  // Defaults to the size of the congruence lattice.
  EXPECT_EQ(j["caps"]["series_cap"], 3);
  EXPECT_EQ(j["caps"]["supernilpotence_cap"], 4);
}

TEST(Run, CommutatorsOnTruncation) {
  const auto j = json::parse(run(config("commutators", "z4_trunc2")).report);
  EXPECT_EQ(j["results"]["nilpotence"]["nilpotency_class"], 2);
  EXPECT_EQ(j["results"]["nilpotence"]["supernilpotence_degree"], 2);
  EXPECT_FALSE(j["results"]["nilpotence"]["abelian"].get<bool>());
}

TEST(Run, MissingAlgebraIsInputError) {
  auto c = config("clone");
  c.algebra_path = "/nonexistent/algebra.json";
  const auto r = run(c);
  EXPECT_EQ(r.status, ExitStatus::InputError);
  EXPECT_TRUE(json::parse(r.report).contains("error"));
  EXPECT_EQ(run(config("no-such-subcommand")).status, ExitStatus::InputError);
}

TEST(Run, CloneBudgetOverflowIsInconclusive) {
  auto c = config("clone", "s3");
  c.kind = "polynomial";
  c.clone_budget = 500;
  const auto r = run(c);
  EXPECT_EQ(r.status, ExitStatus::Inconclusive);
  EXPECT_EQ(json::parse(r.report)["caps"]["clone_budget"], 500);
}

TEST(Run, CloneEmbedsSlice) {
  auto c = config("clone", "z4_trunc2");
  c.arity = 2;
  const auto j = json::parse(run(c).report);
  EXPECT_EQ(j["results"]["slice"]["count"], 128);
  EXPECT_EQ(j["results"]["slice"]["tables"].size(), 128u);
  EXPECT_EQ(j["results"]["counts"][0]["count"], 16);
}

TEST(Run, EnvironmentBudget) {
  ::setenv("NILDUAL_CLONE_BUDGET", "1234", 1);
  EXPECT_EQ(default_clone_budget(), 1234u);
  const auto j = json::parse(run(config("clone", "semilattice2")).report);
  EXPECT_EQ(j["caps"]["clone_budget"], 1234);
  ::setenv("NILDUAL_CLONE_BUDGET", "lots", 1);
  EXPECT_THROW(default_clone_budget(), InputError);
  EXPECT_EQ(run(config("clone", "semilattice2")).status, ExitStatus::InputError);
  ::unsetenv("NILDUAL_CLONE_BUDGET");
}

TEST(Run, DualizeScanVerdicts) {
  auto c = config("dualize-scan", "z4");
  c.arity = 2;
  EXPECT_EQ(run(c).status, ExitStatus::Ok);
  c.power = 0;
  c.arity = 1;
  const auto r = run(c);
  EXPECT_EQ(r.status, ExitStatus::Failed);
  EXPECT_FALSE(json::parse(r.report)["results"]["counterexample"].is_null());
}

TEST(Run, DualizeScanWithRelationFile) {
  const auto path = temp_file("even.json");
  {
    std::ofstream out(path);
    out << R"({"universe": 4, "arity": 1, "tuples": [[0], [2]]})";
  }
  auto c = config("dualize-scan", "z4");
  c.power = 0;
  c.arity = 1;
  c.relation_paths = {path.string()};
  const auto j = json::parse(run(c).report);
  EXPECT_EQ(j["inputs"]["relations"][0], path.string());
  EXPECT_FALSE(j["verdict"].get<std::string>().empty());

  std::ofstream(path) << R"({"universe": 4, "arity": 1, "tuples": [[1]]})";
  EXPECT_EQ(run(c).status, ExitStatus::InputError);
  std::filesystem::remove(path);
}

TEST(Run, WitnessReportAndOutputFile) {
  auto c = config("witness", "z4_trunc2");
  c.depth = 1;
  c.output_path = temp_file("witness.json").string();
  const auto r = run(c);
  EXPECT_EQ(r.status, ExitStatus::Ok);
  std::ifstream in(c.output_path);
  const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(written, r.report);
  const auto j = json::parse(r.report);
  EXPECT_EQ(j["results"]["setup"]["case"], 2);
  EXPECT_EQ(j["results"]["setup"]["k"], 2);
  EXPECT_EQ(j["results"]["verification"]["violations"], 0);
  EXPECT_EQ(j["caps"]["window_lo"], -15);
  std::filesystem::remove(c.output_path);
}

TEST(Run, WitnessSuperalgebraChangesT) {
  auto c = config("witness", "z4_trunc2");
  c.depth = 0;
  c.superalgebra_path = data("z4_trunc2");
  EXPECT_EQ(json::parse(run(c).report)["results"]["setup"]["t"], 9);
  c.superalgebra_path = data("z4");
  EXPECT_EQ(run(c).status, ExitStatus::InputError);
}

TEST(Run, WitnessOnAbelianGroupIsRejected) {
  EXPECT_EQ(run(config("witness", "z4")).status, ExitStatus::InputError);
}

TEST(Run, ReportsAreDeterministic) {
  auto c = config("commutators", "z4_trunc2");
  EXPECT_EQ(run(c).report, run(c).report);
}
