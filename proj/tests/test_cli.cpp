#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pdilab/cli.hpp"

namespace {

using Json = nlohmann::ordered_json;

struct CliRun {
  int code = 0;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = pdilab::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// stdout and exit status of the installed binary, with an environment prefix
std::pair<int, std::string> run_exe(const std::string& env, const std::string& args) {
  const std::string cmd = env + " '" + std::string(PDI_LAB_EXE) + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pdi_lab_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, ExponentsReport) {
  const CliRun r = run({"exponents", "--dim", "3", "--p", "2", "--gamma", "4", "--q", "inf"});
  ASSERT_EQ(r.code, 0);
  const Json j = r.json();
  EXPECT_EQ(j["command"]["name"], "exponents");
  EXPECT_NEAR(j["results"]["exponents"]["alpha"].get<double>(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(j["results"]["exponents"]["s"].get<double>(), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(j["results"]["regime"]["growth"], "SUPERNATURAL");
  EXPECT_EQ(j["params"]["q"], "inf");
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["provenance"]["config_hash"].get<std::string>().size(), 16u);
}

TEST(Cli, ExponentsNullAlphaBelowNatural) {
  const Json j = run({"exponents", "--dim", "3", "--p", "2", "--gamma", "1.5"}).json();
  EXPECT_TRUE(j["results"]["exponents"]["alpha"].is_null());
}

TEST(Cli, VerifySharpnessAndBump) {
  const CliRun s = run({"verify-sharpness", "--dim", "3", "--p", "2", "--gamma", "4"});
  EXPECT_EQ(s.code, 0);
  EXPECT_TRUE(s.json()["pass"].get<bool>());
  const CliRun b = run({"verify-bump", "--dim", "3", "--p", "2", "--gamma", "1.8"});
  EXPECT_EQ(b.code, 0);
  EXPECT_TRUE(b.json()["pass"].get<bool>());
  const CliRun none = run({"verify-bump", "--dim", "3", "--p", "2", "--gamma", "1.4"});
  EXPECT_EQ(none.code, 1);
  EXPECT_EQ(none.json()["results"]["error"], "NO_ADMISSIBLE_SCALE");
}

TEST(Cli, SolveWritesCsv) {
  const auto csv = scratch("solve.csv");
  const CliRun r = run({"solve", "--dim", "3", "--p", "2", "--gamma", "2", "--source", "power:1,1", "--nodes", "64",
                     "--out", csv.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_LE(r.json()["results"]["meta"]["final_residual"].get<double>(), 1e-9);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "r,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 64);
}

TEST(Cli, SolveBoundaryMisuseIsAUsageError) {
  const CliRun r = run({"solve", "--left", "value:1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ILL_POSED_BC"), std::string::npos);
}

TEST(Cli, AuditCommands) {
  const CliRun c = run({"audit-caccioppoli", "--dim", "3", "--p", "2", "--gamma", "4"});
  EXPECT_EQ(c.code, 0);
  EXPECT_NEAR(c.json()["results"]["caccioppoli"]["fitted_growth"].get<double>(), 5.0 / 3.0, 0.05);
  const CliRun h = run({"audit-holder", "--dim", "3", "--p", "2", "--gamma", "4"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NEAR(h.json()["results"]["holder"]["fitted_alpha"].get<double>(), 2.0 / 3.0, 0.05);
  const CliRun s = run({"audit-holder", "--input", "solve", "--dim", "3", "--p", "2", "--gamma", "3", "--source",
                     "power:1,1", "--q", "4"});
  EXPECT_EQ(s.code, 0);
  EXPECT_TRUE(s.json()["results"]["holder"]["one_sided"].get<bool>());
}

TEST(Cli, MorreyValueAndDivergence) {
  const Json a = run({"morrey", "--dim", "3", "--source", "power:1,1", "--theta", "1.5"}).json();
  EXPECT_NEAR(a["results"]["morrey"]["value"].get<double>(), 2.0 * M_PI, 1e-6);
  const Json b = run({"morrey", "--dim", "3", "--source", "power:1,2", "--theta", "1.5"}).json();
  EXPECT_EQ(b["results"]["morrey"]["value"], "DIVERGENT");
}

TEST(Cli, LiouvilleExpectations) {
  const CliRun a = run({"liouville", "--dim", "3", "--p", "2", "--gamma", "1.4", "--expect", "LIOUVILLE"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.json()["results"]["liouville"]["verdict"], "LIOUVILLE");
  const CliRun b = run({"liouville", "--dim", "3", "--p", "2", "--gamma", "1.8", "--expect", "LIOUVILLE"});
  EXPECT_EQ(b.code, 1);
  EXPECT_FALSE(b.json()["pass"].get<bool>());
  const CliRun c = run({"liouville", "--dim", "3", "--p", "2", "--gamma", "2"});
  EXPECT_EQ(c.json()["results"]["liouville"]["witness"], "WITNESS_UNAVAILABLE");
}

TEST(Cli, ManifoldProfiles) {
  const CliRun e = run({"manifold", "--profile", "exp:1,1", "--p", "2", "--gamma", "1.2", "--mode", "numeric"});
  EXPECT_EQ(e.code, 0);
  EXPECT_EQ(e.json()["results"]["area_test"], "CONVERGENT");
  const auto table = scratch("area.csv");
  {
    std::ofstream out(table);
    out << "t,area\n";
    for (int k = 0; k <= 40; ++k) {
      const double t = std::pow(2.0, k / 4.0);
      out << t << "," << 4 * M_PI * t * t << "\n";
    }
  }
  const CliRun s = run({"manifold", "--profile", "file:" + table.string(), "--p", "2", "--gamma", "1.4"});
  EXPECT_EQ(s.json()["results"]["liouville"]["verdict"], "INCONCLUSIVE");
}

TEST(Cli, SigmaBoundSearch) {
  const Json j = run({"sigma-bound", "--dim", "3", "--p", "2", "--gamma", "1.4", "--R", "1", "--r", "10"}).json();
  EXPECT_NEAR(j["results"]["sigma_bound"]["reduced_integral"].get<double>(), 2.9245, 1e-4);
  const Json s = run({"sigma-bound", "--dim", "3", "--p", "2", "--gamma", "1.4", "--search"}).json();
  EXPECT_TRUE(s["results"]["contradiction_radius"].is_number());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"exponents", "--p", "0.5"}).code, 2);
  EXPECT_EQ(run({"exponents", "--bogus"}).code, 2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({"exponents", "--q", "abc"}).code, 2);
  EXPECT_EQ(run({"sweep", "--grid", "zeta=1,2"}).code, 2);
}

TEST(Cli, OutputIsDeterministic) {
  const CliRun a = run({"audit-holder", "--seed", "9", "--gamma", "4"});
  const CliRun b = run({"audit-holder", "--seed", "9", "--gamma", "4"});
  EXPECT_EQ(a.out, b.out);
  const CliRun c = run({"audit-holder", "--seed", "10", "--gamma", "4"});
  EXPECT_NE(a.json()["provenance"]["config_hash"], c.json()["provenance"]["config_hash"]);
}

TEST(Cli, SweepRowsSortedAndThreadIndependent) {
  const std::string args = "sweep --grid gamma=1.2:2.0:0.2 --grid dim=4,3 --task liouville";
  const auto [c1, one] = run_exe("PDI_LAB_THREADS=1", args);
  const auto [c4, four] = run_exe("PDI_LAB_THREADS=4", args);
  EXPECT_EQ(c1, 0);
  EXPECT_EQ(c4, 0);
  EXPECT_EQ(one, four);
  std::istringstream in(one);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("dim,gamma,status,verdict", 0), 0u);
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows.front().rfind("3,1.2,", 0), 0u);
  EXPECT_EQ(rows.back().rfind("4,2,", 0), 0u);
}

TEST(Cli, BinaryExitCodes) {
  EXPECT_EQ(run_exe("", "exponents").first, 0);
  EXPECT_EQ(run_exe("", "--help").first, 0);
  EXPECT_EQ(run_exe("", "exponents --dim 1").first, 2);
  EXPECT_EQ(run_exe("", "liouville --gamma 1.8 --expect LIOUVILLE").first, 1);
}
