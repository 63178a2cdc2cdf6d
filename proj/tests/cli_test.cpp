#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "csdyn/cli.hpp"

using namespace csdyn;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "csdyn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    rows.push_back(f);
  }
  return rows;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n') + 1); }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "csdyn_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

} // namespace

class CsvHeader : public ::testing::TestWithParam<std::string> {};

TEST_P(CsvHeader, MatchesGoldenFile) {
  const std::string cmd = GetParam();
  std::vector<std::string> args{cmd, "--t-max", "20", "--steps", "20"};
  if (cmd == "sweep") args.insert(args.end(), {"--axis", "delta", "--values", "0.005,0.01"});
  const Invocation r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string golden = read_file(std::filesystem::path(CSDYN_TEST_DATA) / (cmd + ".header"));
  EXPECT_EQ(first_line(r.out), golden);
}

INSTANTIATE_TEST_SUITE_P(Commands, CsvHeader,
                         ::testing::Values("evolve", "rates", "kraus", "choi", "rhp", "sweep"));

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"evolve", "--delta", "abc"}).code, 2);
  EXPECT_EQ(run({"evolve", "--n", "0"}).code, 2);
  EXPECT_EQ(run({"evolve", "--steps", "0"}).code, 2);
  EXPECT_EQ(run({"evolve", "--state", "bogus"}).code, 2);
  EXPECT_EQ(run({"evolve", "--unknown-flag", "1"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"sweep", "--axis", "delta,temp", "--values", "1"}).code, 2);
  EXPECT_EQ(run({"sweep", "--values", "0.01"}).code, 2);
  EXPECT_EQ(run({"kraus", "--format", "svg"}).code, 2);
  EXPECT_EQ(run({"evolve", "--format", "both"}).code, 2);
  EXPECT_EQ(run({"evolve", "--config", "/nonexistent/csdyn.cfg"}).code, 2);
}

TEST(Cli, EvolveDecoupledExcitedStaysExcited) {
  const Invocation r = run({"evolve", "--delta", "0", "--t-max", "50", "--steps", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 52u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][1]), 1.0, 1e-14);
}

TEST(Cli, EvolveExcitedPopulationIsOneMinusAlpha1) {
  const Invocation r = run({"evolve", "--t-max", "100", "--steps", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_EQ(std::stod(rows[1][1]), 1.0);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_NEAR(std::stod(rows[i][1]), 1.0 - std::stod(rows[i][4]), 1e-15);
}

TEST(Cli, ChoiAtTimeZeroIsRankOne) {
  const Invocation r = run({"choi", "--t-max", "10", "--steps", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_NEAR(std::stod(rows[1][1]), 1.0, 1e-14);
  for (int k = 2; k <= 4; ++k) EXPECT_NEAR(std::stod(rows[1][k]), 0.0, 1e-14);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][5]), 1.0, 1e-12);
}

TEST(Cli, KrausCompleteness) {
  const Invocation r = run({"kraus", "--t-max", "200", "--steps", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_GT(rows.size(), 41u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(std::stod(rows[i][11]), 1e-10);
}

TEST(Cli, RatesVanishWhenDecoupled) {
  const Invocation r = run({"rates", "--delta", "0", "--t-max", "30", "--steps", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (int k = 2; k <= 4; ++k) EXPECT_NEAR(std::stod(rows[i][k]), 0.0, 1e-12);
}

TEST(Cli, Deterministic) {
  const std::vector<std::string> args{"sweep", "--axis", "delta", "--values", "0.003,0.01", "--t-max", "50",
                                      "--steps", "200"};
  auto one = args, four = args;
  one.insert(one.end(), {"--jobs", "1"});
  four.insert(four.end(), {"--jobs", "4"});
  const Invocation a = run(one), b = run(one), c = run(four);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  const auto cfg = scratch("prec.cfg");
  {
    std::ofstream f(cfg);
    f << "# test config\ndelta = 0.02\nn=40\n\ntemp=3\n";
  }
  const Invocation r = run({"--config", cfg.string(), "--n", "60", "--show-config"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("delta=0.02\n"), std::string::npos);
  EXPECT_NE(r.out.find("n=60\n"), std::string::npos);
  EXPECT_NE(r.out.find("temp=3\n"), std::string::npos);
  EXPECT_NE(r.out.find("omega0=1\n"), std::string::npos);

  {
    std::ofstream f(cfg);
    f << "delta 0.02\n";
  }
  EXPECT_EQ(run({"--config", cfg.string(), "--show-config"}).code, 2);
  {
    std::ofstream f(cfg);
    f << "colour=blue\n";
  }
  EXPECT_EQ(run({"--config", cfg.string(), "--show-config"}).code, 2);
}

TEST(Cli, BothFormatWritesSiblingFiles) {
  const auto csv = scratch("both.csv");
  auto svg = csv;
  svg.replace_extension(".svg");
  std::filesystem::remove(csv);
  std::filesystem::remove(svg);
  const Invocation r = run({"rhp", "--t-max", "20", "--steps", "20", "--format", "both", "--out", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(read_file(csv)), "t,n,min_eig,singular\n");
  EXPECT_NE(read_file(svg).find("</svg>"), std::string::npos);
}

TEST(Cli, CustomState) {
  EXPECT_EQ(run({"evolve", "--state", "custom:0.5,0.5,0", "--t-max", "1", "--steps", "2"}).code, 0);
  EXPECT_EQ(run({"evolve", "--state", "custom:0.5,0.9,0", "--t-max", "1", "--steps", "2"}).code, 2);
  EXPECT_EQ(run({"evolve", "--state", "custom:0.5", "--t-max", "1", "--steps", "2"}).code, 2);
}
