// End-to-end runs of the traptail binary.

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "traptail/tail_table.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI with `args`, capturing stdout; stderr is discarded.
Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" TRAPTAIL_CLI_PATH "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("traptail_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ExactIsDeterministicAndMonotone) {
  const auto a = run("exact --grid log:1:1e4:8");
  const auto b = run("exact --grid log:1:1e4:8 --workers 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  std::istringstream is(a.out);
  const auto t = traptail::read_csv(is);
  EXPECT_EQ(t.provenance, traptail::Provenance::Exact);
  EXPECT_EQ(t.t_grid.back(), 1e4);
  EXPECT_LE(*t.truncation_bound, 1e-12);
}

TEST_F(Cli, DomainErrorsExitTwo) {
  EXPECT_EQ(run("exact --alpha 1.2").code, 2);
  EXPECT_EQ(run("exact --beta 1").code, 2);
  EXPECT_EQ(run("exact --grid log:0:10:4").code, 2);
  EXPECT_EQ(run("simulate --samples 0").code, 2);
  EXPECT_EQ(run("simulate --samples 2.5").code, 2);
  EXPECT_EQ(run("nosuchcommand").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, CoefficientsJson) {
  const auto r = run("coefficients --alpha 0.25 --beta 2 --modes 4");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["rho"].get<double>(), 2.0);
  EXPECT_EQ(j["modes"].size(), 4u);
  const auto none = nlohmann::json::parse(run("coefficients --modes 0").out);
  EXPECT_TRUE(none["modes"].empty());
}

TEST_F(Cli, MellinAndPoles) {
  const auto r = run("mellin --z-re 0.5 --quadrature");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["in_strip"].get<bool>());
  EXPECT_NEAR(j["quadrature"].get<double>() / j["value_re"].get<double>(), 1.0, 1e-9);
  // z = rho is the first pole
  EXPECT_EQ(run("mellin --z-re 1").code, 2);
  EXPECT_EQ(run("mellin --z-re 1.5 --quadrature").code, 2);
}

TEST_F(Cli, AsymptoticTable) {
  const auto r = run("asympt --grid log:10:1e6:4");
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  const auto t = traptail::read_csv(is);
  EXPECT_EQ(t.provenance, traptail::Provenance::Asymptotic);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_GT(t.bound_at(i), 0.0);
}

TEST_F(Cli, VerifyPassesAndWritesSchema) {
  const auto r = run("verify --samples 200000 --grid log:1:1e5:16");
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["checks"].size(), 6u);
}

TEST_F(Cli, CorruptedPhaseFailsVerification) {
  const auto r = run("verify --alpha 0.125 --beta 8 --samples 100000 --corrupt-phase");
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::json::parse(r.out);
  bool any_fail = false;
  for (const auto& c : j["checks"]) any_fail = any_fail || !c["pass"].get<bool>();
  EXPECT_TRUE(any_fail);
}

TEST_F(Cli, SimulateFilesAndLogLevel) {
  const std::string args = "simulate --samples 2e4 --seed 5 --grid log:1:1e3:4 --stats-out " + path("s.json") +
                           " --samples-out " + path("x.csv");
  const auto a = run(args + " --out " + path("a.csv"));
  const auto b = run(args + " --out " + path("b.csv") + " --workers 4", "TRAP_TAIL_LOG=debug");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  const auto stats = nlohmann::json::parse(slurp(path("s.json")));
  EXPECT_EQ(stats["n_samples"], 20000);
  const auto samples = slurp(path("x.csv"));
  EXPECT_EQ(samples.rfind("k,reached,T,T_in,T_exc,T_out,N\n", 0), 0u);
  EXPECT_EQ(std::count(samples.begin(), samples.end(), '\n'), 20001);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  std::ofstream(path("run.ini")) << "alpha=0.25\nbeta=3\ngrid=log:1:100:2\n";
  const auto from_file = run("exact --config " + path("run.ini"));
  const auto explicit_flags = run("exact --alpha 0.25 --beta 3 --grid log:1:100:2");
  ASSERT_EQ(from_file.code, 0);
  EXPECT_EQ(from_file.out, explicit_flags.out);
  const auto overridden = run("exact --config " + path("run.ini") + " --beta 2");
  EXPECT_EQ(overridden.out, run("exact --alpha 0.25 --beta 2 --grid log:1:100:2").out);
}

TEST_F(Cli, Plot) {
  const auto r = run("plot --grid log:1:1e3:8 --modes 0");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("<svg", 0), 0u);
  ASSERT_EQ(run("exact --grid log:1:1e3:8 --out " + path("t.csv")).code, 0);
  EXPECT_EQ(run("plot --in " + path("t.csv") + " --out " + path("t.svg")).code, 0);
  EXPECT_NE(slurp(path("t.svg")).find("</svg>"), std::string::npos);
  std::ofstream(path("empty.csv")).close();
  EXPECT_EQ(run("plot --in " + path("empty.csv")).code, 2);
  EXPECT_EQ(run("plot --in " + path("missing.csv")).code, 2);
}
