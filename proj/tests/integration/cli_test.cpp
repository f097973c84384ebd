#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gospace_cli/cli.hpp"

namespace {

using nlohmann::json;
namespace cli = gospace::cli;

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "gospace");
  std::ostringstream out;
  std::ostringstream err;
  Invocation r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path tmp(const std::string& name) { return std::filesystem::path(GOSPACE_TEST_TMP) / name; }

void expect_header(const json& j, const std::string& command) {
  EXPECT_EQ(j.at("schema"), "gospace.report/1");
  EXPECT_EQ(j.at("command"), command);
  EXPECT_TRUE(j.contains("tool_version"));
  EXPECT_TRUE(j.at("tolerance").contains("feas_tol"));
}

TEST(Cli, ListSpaces) {
  const Invocation r = run({"list-spaces"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json j = r.report();
  expect_header(j, "list-spaces");
  EXPECT_GE(j.at("spaces").size(), 10u);
  EXPECT_EQ(j.at("table_rows").size(), 11u);
}

TEST(Cli, Decompose) {
  const Invocation r = run({"decompose", "--space", "table1/row8?n=1", "--seed", "3"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json j = r.report();
  expect_header(j, "decompose");
  EXPECT_EQ(j.at("seed"), 3);
  EXPECT_EQ(j.at("dim_m"), 7);
}

TEST(Cli, CheckGoPositiveRow) {
  const Invocation r = run({"check-go", "--space", "table1/row9?n=2", "--alpha", "1,2,3", "--samples", "100"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json j = r.report();
  EXPECT_EQ(j.at("row"), "9");
  EXPECT_EQ(j.at("go_expected"), true);
  EXPECT_EQ(j.at("report").at("verdict"), "GO-consistent");
}

TEST(Cli, CheckGoNegativeRow) {
  const Invocation r = run({"check-go", "--space", "table1/row6?n=3", "--alpha", "1,1,2", "--samples", "100"});
  EXPECT_EQ(r.code, cli::kNegative) << r.err;
  EXPECT_EQ(r.report().at("go_expected"), false);
}

TEST(Cli, CheckGoWithGroupingAndCertify) {
  const Invocation r = run({"check-go", "--space", "lo/su2?k=2", "--alpha", "2", "--samples", "100", "--certify"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json j = r.report();
  EXPECT_EQ(j.at("linear_graph").at("accepted"), true);
  EXPECT_FALSE(j.at("linear_graph").contains("L"));
  EXPECT_TRUE(j.contains("brackets"));
  const Invocation with_bases =
      run({"check-go", "--space", "lo/su2?k=2", "--alpha", "2", "--samples", "100", "--certify", "--bases"});
  EXPECT_TRUE(with_bases.report().at("linear_graph").contains("L"));
}

TEST(Cli, ValidationFailures) {
  EXPECT_EQ(run({"check-go", "--space", "table1/row8", "--alpha", "1,2", "--samples", "0"}).code, cli::kValidation);
  EXPECT_EQ(run({"check-go", "--space", "nowhere/row8", "--alpha", "1,2"}).code, cli::kValidation);
  EXPECT_EQ(run({"check-go", "--space", "table1/row8", "--alpha", "1,-2"}).code, cli::kValidation);
  EXPECT_EQ(run({"check-go", "--space", "table1/row8", "--alpha", "1,2,3"}).code, cli::kValidation);
  EXPECT_EQ(run({"decompose", "--space", "table1/row6?n=99"}).code, cli::kValidation);
  EXPECT_EQ(run({"decompose", "--space", "table1/row8", "--tol", "feas_tol=2"}).code, cli::kValidation);
  EXPECT_EQ(run({"decompose", "--space", "table1/row8", "--tol", "bogus=1"}).code, cli::kValidation);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kValidation);
  EXPECT_EQ(run({}).code, cli::kValidation);
}

TEST(Cli, NatRed) {
  const Invocation ok = run({"nat-red", "--space", "lo/su2?k=2", "--gamma=1,-2", "--samples", "100"});
  ASSERT_EQ(ok.code, cli::kOk) << ok.err;
  EXPECT_EQ(ok.report().at("certified"), true);
  const Invocation bad = run({"nat-red", "--space", "lo/su2?k=2", "--gamma=1,-0.5", "--samples", "0"});
  EXPECT_EQ(bad.code, cli::kNegative);
  EXPECT_EQ(bad.report().at("metric").at("accepted"), false);
  EXPECT_EQ(run({"nat-red", "--space", "lo/su2?k=2"}).code, cli::kValidation);
  const Invocation a = run({"nat-red", "--space", "lo/su2?k=3", "--beta", "1,2,0", "--drop", "2", "--samples", "0"});
  EXPECT_EQ(a.code, cli::kOk) << a.err;
}

TEST(Cli, OutFileAndTiming) {
  const auto path = tmp("cli_out.json");
  std::filesystem::remove(path);
  const Invocation r = run({"decompose", "--space", "table1/row10", "--out", path.string(), "--timing"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const json j = json::parse(in);
  EXPECT_GE(j.at("wall_clock_seconds").get<double>(), 0.0);
  EXPECT_FALSE(run({"decompose", "--space", "table1/row10"}).report().contains("wall_clock_seconds"));
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto path = tmp("cli_config.json");
  {
    std::ofstream cfg(path);
    cfg << R"({"space": "table1/row8?n=1", "alpha": [1, 1], "samples": 100, "seed": 5})";
  }
  const Invocation from_file = run({"check-go", "--config", path.string()});
  ASSERT_EQ(from_file.code, cli::kOk) << from_file.err;
  EXPECT_EQ(from_file.report().at("seed"), 5);
  EXPECT_EQ(from_file.report().at("alphas"), json::array({1.0, 1.0}));
  const Invocation overridden = run({"check-go", "--config", path.string(), "--alpha", "1,3", "--seed", "8"});
  ASSERT_EQ(overridden.code, cli::kOk) << overridden.err;
  EXPECT_EQ(overridden.report().at("seed"), 8);
  EXPECT_EQ(overridden.report().at("alphas"), json::array({1.0, 3.0}));
  EXPECT_EQ(run({"check-go", "--config", tmp("missing.json").string()}).code, cli::kValidation);

  const auto tol_path = tmp("cli_tol.json");
  {
    std::ofstream cfg(tol_path);
    cfg << R"({"space": "table1/row10", "tol": {"feas_tol": 1e-9}})";
  }
  const Invocation tight = run({"decompose", "--config", tol_path.string()});
  ASSERT_EQ(tight.code, cli::kOk) << tight.err;
  EXPECT_DOUBLE_EQ(tight.report().at("tolerance").at("feas_tol").get<double>(), 1e-9);
}

TEST(Cli, ToleranceOverrideIsReported) {
  const Invocation r = run({"decompose", "--space", "table1/row10", "--tol", "feas_tol=1e-9"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_DOUBLE_EQ(r.report().at("tolerance").at("feas_tol").get<double>(), 1e-9);
}

TEST(Cli, SameSeedSameReport) {
  const std::vector<std::string> args = {"check-go", "--space", "table1/row6?n=3", "--alpha", "1,2,1.5",
                                         "--samples", "100", "--seed", "11"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Cli, SmallCampaign) {
  const Invocation r = run({"campaign", "--row", "8?n=1", "--row", "10", "--samples", "100", "--quick", "--seed", "2",
                     "--seed", "3"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json j = r.report();
  EXPECT_EQ(j.at("passed"), true);
  EXPECT_EQ(j.at("campaigns").size(), 2u);
  EXPECT_EQ(run({"campaign", "--row", "4"}).code, cli::kValidation);
}

}  // namespace
