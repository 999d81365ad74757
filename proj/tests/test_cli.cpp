#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "snspec/config.hpp"
#include "snspec/experiment.hpp"
#include "snspec/report.hpp"

using namespace snspec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("snspec_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.ini";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(Command cmd, const fs::path& config, const fs::path& out_dir, std::string* stdout_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_command(cmd, config, out_dir, out, err);
  if (stdout_text) *stdout_text = out.str() + err.str();
  return code;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(SNSPEC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const fs::path kConfigs{SNSPEC_CONFIG_DIR};

}  // namespace

TEST(Config, ParsesEverySection) {
  const auto dir = scratch("parse");
  const auto cfg = parse_config(write_config(dir, R"([experiment]
kind = solve
[domain]
kind = star
R1 = 0.5
rho_coefficients = 1.5, 0, 0, 0.2
m_out = 256
[solver]
N = 16
mode = steklov
tau_M = 1e-11
self_convergence = yes
[grid]
start = 0
stop = 1
count = 5
[output]
csv = x.csv
svg = false
[assert]
tolerance = 1e-6
)"));
  EXPECT_EQ(cfg.kind, "solve");
  EXPECT_EQ(cfg.domain.rho.size(), 4u);
  EXPECT_DOUBLE_EQ(*cfg.domain.R1, 0.5);
  EXPECT_FALSE(cfg.domain.R2.has_value());
  EXPECT_EQ(cfg.solver.N, 16);
  EXPECT_EQ(cfg.solver.mode, ProblemMode::steklov);
  EXPECT_DOUBLE_EQ(cfg.solver.tau_M, 1e-11);
  EXPECT_TRUE(cfg.solver.self_convergence);
  ASSERT_EQ(cfg.grid.values.size(), 5u);
  EXPECT_DOUBLE_EQ(cfg.grid.values[2], 0.5);
  EXPECT_EQ(cfg.output.csv, "x.csv");
  EXPECT_FALSE(cfg.output.svg);
  EXPECT_DOUBLE_EQ(cfg.asserts.tolerance, 1e-6);
}

TEST(Config, RejectsMalformedInput) {
  const auto dir = scratch("reject");
  const char* bad[] = {
      "[domain]\nradius = 2\n",
      "[mystery]\nx = 1\n",
      "[solver]\nN = 2.5\n",
      "[solver]\nN = abc\n",
      "[solver]\nmode = dirichlet\n",
      "[grid]\nvalues = 1, 2\ncount = 3\n",
      "[grid]\nstart = 0\n",
      "[grid]\nvalues = 1,,2\n",
      "[output]\nsvg = maybe\n",
      "[domain\nkind = star\n",
  };
  for (const char* text : bad) EXPECT_THROW(parse_config(write_config(dir, text)), ConfigError) << text;
}

TEST(Config, EnvironmentOverridesTolerances) {
  ExperimentConfig cfg;
  ::setenv("SNSPEC_TAU_M", "1e-10", 1);
  ::setenv("SNSPEC_TAU_0", "1e-7", 1);
  apply_environment(cfg);
  EXPECT_DOUBLE_EQ(cfg.solver.tau_M, 1e-10);
  EXPECT_DOUBLE_EQ(cfg.solver.tau_0, 1e-7);
  ::setenv("SNSPEC_TAU_M", "lots", 1);
  EXPECT_THROW(apply_environment(cfg), ConfigError);
  ::unsetenv("SNSPEC_TAU_M");
  ::unsetenv("SNSPEC_TAU_0");
}

TEST(Report, ValuesRoundTripThroughCsv) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, i % 40 - 20);
    EXPECT_EQ(std::stod(format_value(x)), x);
  }
  EXPECT_EQ(format_value(0.3), "0.29999999999999999");
}

TEST(Report, CsvLayout) {
  Table t;
  t.columns = {"a", "b"};
  t.add_row({1.0, 0.5});
  t.add_row({2.0, -3.0});
  EXPECT_EQ(to_csv(t), "a,b\n1,0.5\n2,-3\n");
  EXPECT_THROW(t.add_row({1.0}), std::logic_error);
  EXPECT_THROW(t.add_row({1.0, std::numeric_limits<double>::quiet_NaN()}), std::logic_error);
  EXPECT_EQ(t.column("b")[1], -3.0);
  EXPECT_THROW(t.column("c"), std::out_of_range);
}

TEST(Report, SvgEscapesText) {
  const auto svg = render_svg({"a < b & c", "x", "y", {{"s", {0.0, 1.0}, {1.0, 2.0}}}});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
}

TEST(RunCommand, ConfigErrorsExitTwoWithoutOutput) {
  const auto dir = scratch("exit2");
  const auto out = dir / "out";
  const char* bad[] = {
      "[experiment]\nkind = lemmas\n[domain]\nn = 2\nR1 = 1\n",                         // R2 missing
      "[experiment]\nkind = lemmas\n[domain]\nR1 = 1\nR2 = 2\n[grid]\nvalues = 1.5\n",  // d >= R2 - R1
      "[experiment]\nkind = lemmas\n[domain]\nR1 = 1\nR2 = 2\n[grid]\nnodes = 16\n",
      "[experiment]\nkind = solve\n[domain]\nR1 = 1\nR2 = 2\n",  // lemmas command, solve config
      "[domain]\nkind = concentric\nR1 = 1\nR2 = 2\n[solver]\nN = 0\n",
  };
  for (const char* text : bad) {
    EXPECT_EQ(run(Command::lemmas, write_config(dir, text), out), kExitConfig) << text;
    EXPECT_FALSE(fs::exists(out / "lemmas.csv")) << text;
  }
  EXPECT_EQ(run(Command::sweep, kConfigs / "lemmas.ini", out), kExitConfig);
  EXPECT_EQ(run(Command::solve, write_config(dir, "[domain]\nkind = star\nrho_coefficients = 1\n"), out), kExitConfig);
  EXPECT_EQ(run(Command::sandwich, write_config(dir, "[domain]\nkind = star\nR1 = 1.2\nrho_coefficients = 1\n"), out),
            kExitConfig);
  EXPECT_FALSE(fs::exists(out / "solve.csv"));
}

TEST(RunCommand, SolverDiagnosticFailureExitsThree) {
  const auto dir = scratch("exit3");
  const auto cfg = write_config(dir, "[domain]\nkind = star\nR1 = 0.3\nrho_coefficients = 1, 0, 0, 0.3\n"
                                     "[solver]\nN = 48\nm_out = 32\nm_in = 32\n");
  EXPECT_EQ(run(Command::solve, cfg, dir / "out"), kExitDiagnostic);
}

TEST(RunCommand, LemmasAreByteIdenticalAcrossRuns) {
  const auto dir = scratch("bytes");
  std::string log;
  ASSERT_EQ(run(Command::lemmas, kConfigs / "lemmas.ini", dir / "a", &log), kExitOk) << log;
  ASSERT_EQ(run(Command::lemmas, kConfigs / "lemmas.ini", dir / "b"), kExitOk);
  const auto a = slurp(dir / "a" / "lemmas.csv");
  EXPECT_EQ(a, slurp(dir / "b" / "lemmas.csv"));
  EXPECT_EQ(a.substr(0, a.find('\n')), "d,A1,A2,A3,V1,V2,V3,theta");
  EXPECT_EQ(a.find('\r'), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "a" / "lemmas.svg"));
  EXPECT_NE(log.find("summary: 5/5 checks passed"), std::string::npos) << log;
}

TEST(RunCommand, ExactTable) {
  const auto dir = scratch("exact");
  ASSERT_EQ(run(Command::exact, kConfigs / "exact.ini", dir), kExitOk);
  const auto csv = slurp(dir / "exact.csv");
  EXPECT_NE(csv.find("\n1,0.29999999999999999,2\n"), std::string::npos) << csv;
}

TEST(RunCommand, SolveConcentricPassesClosedFormCheck) {
  const auto dir = scratch("solve");
  std::string log;
  EXPECT_EQ(run(Command::solve, kConfigs / "solve_concentric.ini", dir, &log), kExitOk) << log;
  EXPECT_NE(log.find("PASS mu_1 matches the concentric closed form"), std::string::npos) << log;
  EXPECT_NE(log.find("self_convergence="), std::string::npos) << log;
}

TEST(RunCommand, FailedChecksExitOneUnlessDisabled) {
  const auto dir = scratch("exit1");
  // sandwich with a negative tolerance: the bounds hold but not by a margin of 10
  const std::string base = "[domain]\nkind = concentric\nR1 = 1\nR2 = 2\n[assert]\ntolerance = -10\n";
  EXPECT_EQ(run(Command::sandwich, write_config(dir, base), dir / "out"), kExitAssertion);
  EXPECT_EQ(run(Command::sandwich, write_config(dir, base + "enabled = false\n"), dir / "out"), kExitOk);
}

TEST(Binary, EccentricitySweepWritesTenRows) {
  const auto dir = scratch("binary");
  ASSERT_EQ(run_binary("sweep --config " + (kConfigs / "eccentricity.ini").string() + " --out " + dir.string()), 0);
  const auto csv = slurp(dir / "eccentricity.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "d,mu1,multiplicity,theta_bound,mu1_concentric,residual_gamma1");
}

TEST(Binary, ArgumentErrorsExitTwo) {
  EXPECT_EQ(run_binary(""), 2);
  EXPECT_EQ(run_binary("solve"), 2);
  EXPECT_EQ(run_binary("solve --config /nonexistent/file.ini"), 2);
  EXPECT_EQ(run_binary("frobnicate --config " + (kConfigs / "exact.ini").string()), 2);
  EXPECT_EQ(run_binary("--help"), 0);
}
