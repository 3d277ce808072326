#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ghzsim/commands.hpp"

using namespace ghzsim;

namespace {

using Table = std::vector<std::vector<std::string>>;

Table parse_csv(const std::string& text) {
  Table rows;
  std::stringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double num(const std::string& s) { return std::stod(s); }

SweepConfig sweep_config(ProtocolChoice p, std::uint64_t trials) {
  SweepConfig c;
  c.protocol = p;
  c.trials = trials;
  c.seed = 11;
  return c;
}

std::string run_sweep(const SweepConfig& c) {
  std::ostringstream out;
  cmd_sweep(c, out);
  return out.str();
}

}  // namespace

TEST(Csv, RealsUseSeventeenDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(1.0), "1");
  std::ostringstream out;
  CsvWriter w(out, {"a", "b", "c"});
  w.row(0.5, std::uint64_t{3}, "x,y");
  EXPECT_EQ(out.str(), "a,b,c\n0.5,3,\"x,y\"\n");
  EXPECT_THROW(w.row(1.0), std::logic_error);
}

TEST(Coeffs, SingleHarmonic) {
  std::ostringstream csv, summary;
  cmd_coeffs({1, 1e-6}, csv, summary);
  const Table t = parse_csv(csv.str());
  ASSERT_EQ(t.size(), 2U);
  EXPECT_EQ(t[0], (std::vector<std::string>{"index", "e", "p", "cumulative_p"}));
  EXPECT_EQ(t[1][0], "1");
  EXPECT_NEAR(num(t[1][2]), 3.0 * pi * pi / 32.0, 1e-15);
  EXPECT_NEAR(num(t[1][1]), 32.0 / (3.0 * pi * pi), 1e-15);
  EXPECT_NE(summary.str().find("tail_epsilon = "), std::string::npos);
  EXPECT_NE(summary.str().find("c_three_halves = "), std::string::npos);
}

TEST(Coeffs, EpsilonTarget) {
  std::ostringstream csv, summary;
  const CoefficientTable table = cmd_coeffs({std::nullopt, 1e-6}, csv, summary);
  const Table t = parse_csv(csv.str());
  ASSERT_EQ(t.size(), static_cast<std::size_t>((table.m_max() + 1) / 2 + 1));
  EXPECT_GE(num(t.back()[3]), 0.999999);
  EXPECT_EQ(t.back()[0], std::to_string(table.m_max()));
  for (std::size_t i = 2; i < t.size(); ++i) {
    EXPECT_LE(num(t[i][1]), 0.0);
    EXPECT_GE(num(t[i][2]), 0.0);
    EXPECT_GE(num(t[i][3]), num(t[i - 1][3]));
  }
}

TEST(Coeffs, InvalidMMax) {
  std::ostringstream csv, summary;
  EXPECT_THROW(cmd_coeffs({-3, 1e-6}, csv, summary), ConfigError);
  EXPECT_THROW(cmd_coeffs({0, 1e-6}, csv, summary), ConfigError);
  EXPECT_THROW(cmd_coeffs({4, 1e-6}, csv, summary), ConfigError);
  EXPECT_THROW(cmd_coeffs({std::nullopt, -1.0}, csv, summary), ConfigError);
}

TEST(Sweep, SingleTrialSmoke) {
  const Table t = parse_csv(run_sweep(sweep_config(ProtocolChoice::p2, 1)));
  ASSERT_EQ(t.size(), 26U);
  EXPECT_EQ(t[0], (std::vector<std::string>{"phi", "estimate", "stderr", "n", "oracle_e1", "oracle_cos", "protocol",
                                            "seed"}));
  for (std::size_t i = 1; i < t.size(); ++i) {
    EXPECT_TRUE(std::isfinite(num(t[i][2])));
    EXPECT_EQ(t[i][3], "1");
    EXPECT_EQ(t[i][6], "p2");
    EXPECT_EQ(t[i][7], "11");
  }
  EXPECT_EQ(t[1][0], "0");
  EXPECT_EQ(t[25][0], "2");
}

TEST(Sweep, LfLineEndingsAndDeterminism) {
  SweepConfig c = sweep_config(ProtocolChoice::p1, 20000);
  c.grid = 7;
  c.lanes = 1;
  const std::string a = run_sweep(c);
  c.lanes = 3;
  const std::string b = run_sweep(c);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find('\r'), std::string::npos);
  EXPECT_EQ(a.back(), '\n');
}

TEST(Sweep, Protocol1MatchesE1) {
  const Table t = parse_csv(run_sweep(sweep_config(ProtocolChoice::p1, 1000000)));
  ASSERT_EQ(t.size(), 26U);
  for (std::size_t i = 1; i < t.size(); ++i)
    EXPECT_LE(std::abs(num(t[i][1]) - num(t[i][4])), 4.0 * num(t[i][2]) + 1e-12) << t[i][0];
}

TEST(Sweep, Protocol2MatchesCosine) {
  const double eps = e1_table(1e-6).tail_epsilon();
  const Table t = parse_csv(run_sweep(sweep_config(ProtocolChoice::p2, 1000000)));
  ASSERT_EQ(t.size(), 26U);
  for (std::size_t i = 1; i < t.size(); ++i)
    EXPECT_LE(std::abs(num(t[i][1]) - num(t[i][5])), 4.0 * num(t[i][2]) + 2.0 * eps) << t[i][0];
}

TEST(Sweep, ExplicitSettingsAndSums) {
  SweepConfig c = sweep_config(ProtocolChoice::p1, 1000);
  c.phi = {"0.25:0.5:0.25", "-0.5", "1"};
  const Table t = parse_csv(run_sweep(c));
  ASSERT_EQ(t.size(), 4U);
  EXPECT_EQ(t[1][0], "1");
  EXPECT_EQ(t[1][1], "-1");  // sum pi: perfect anticorrelation
  EXPECT_EQ(t[2][0], "-0.5");
  EXPECT_EQ(t[3][1], "-1");
  EXPECT_NEAR(num(t[2][4]), 0.0, 1e-15);
}

TEST(Sweep, NPartyProtocol) {
  SweepConfig c = sweep_config(ProtocolChoice::nparty, 2000);
  c.n_parties = 5;
  c.phi = {"0", "0:0.5:0.5:0.5:0.5"};
  const Table t = parse_csv(run_sweep(c));
  ASSERT_EQ(t.size(), 3U);
  EXPECT_EQ(t[1][1], "1");
  EXPECT_EQ(t[2][1], "1");
  EXPECT_EQ(t[1][6], "nparty");
}

TEST(Sweep, InvalidConfigurations) {
  SweepConfig c = sweep_config(ProtocolChoice::p1, 10);
  c.phi = {"0.25:0.5"};
  EXPECT_THROW(run_sweep(c), ConfigError);
  c.phi = {"abc"};
  EXPECT_THROW(run_sweep(c), ConfigError);
  c.phi = {"0.25:0.5:"};
  EXPECT_THROW(run_sweep(c), ConfigError);
  c.phi = {};
  c.n_parties = 4;
  EXPECT_THROW(run_sweep(c), ConfigError);
  c.n_parties = 3;
  c.trials = 0;
  EXPECT_THROW(run_sweep(c), ConfigError);
  EXPECT_THROW(parse_protocol("p3"), std::invalid_argument);
  EXPECT_THROW(parse_detection_seed("v2"), ConfigError);
  EXPECT_THROW(parse_level("medium"), std::invalid_argument);
}

TEST(Detect, Columns) {
  SweepConfig c = sweep_config(ProtocolChoice::detect, 100000);
  c.phi = {"0.25", "1"};
  std::ostringstream out;
  cmd_detect(c, out);
  const Table t = parse_csv(out.str());
  ASSERT_EQ(t.size(), 3U);
  EXPECT_EQ(t[0], (std::vector<std::string>{"phi", "detect_rate_a", "detect_rate_b", "detect_rate_c", "triple_rate",
                                            "conditional_corr", "stderr", "n"}));
  for (std::size_t i = 1; i < 3; ++i) {
    for (std::size_t j = 1; j <= 3; ++j) EXPECT_NEAR(num(t[i][j]), 0.5, 0.0063);
    EXPECT_NEAR(num(t[i][4]), 0.125, 0.0047);
  }
  EXPECT_EQ(t[2][5], "-1");
}

TEST(Boxes, Columns) {
  RunConfig c;
  c.trials = 20000;
  c.phi = {"0", "0.3", "1"};
  c.seed = 3;
  std::ostringstream out;
  cmd_boxes(c, out);
  const Table t = parse_csv(out.str());
  ASSERT_EQ(t.size(), 4U);
  EXPECT_EQ(t[0], (std::vector<std::string>{"phi", "estimate", "stderr", "n", "oracle_cos", "pr_boxes_per_run",
                                            "parity_mismatches", "seed"}));
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_EQ(t[i][5], "8");
    EXPECT_EQ(t[i][6], "0");
    EXPECT_EQ(t[i][3], "20000");
  }
  EXPECT_EQ(t[1][1], "1");
  EXPECT_EQ(t[3][1], "-1");
}

TEST(Verify, FastReportIsDeterministic) {
  AcceptanceConfig c;
  c.level = VerifyLevel::fast;
  c.seed = 7;
  std::ostringstream a, b;
  const bool ok_a = cmd_verify(c, a);
  c.lanes = 1;
  const bool ok_b = cmd_verify(c, b);
  EXPECT_TRUE(ok_a) << a.str();
  EXPECT_EQ(ok_a, ok_b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("10/10 criteria passed"), std::string::npos) << a.str();
}
