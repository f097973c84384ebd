#include <gtest/gtest.h>

#include <algorithm>

#include "gospace/catalog.hpp"
#include "gospace/error.hpp"

namespace gospace {
namespace {

const RowParams kNone;

TEST(Rows, IdsAndArity) {
  std::vector<std::string> ids;
  for (const auto& r : table1_rows()) ids.push_back(r.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"1", "2", "3", "5", "6_1", "6_2", "7", "8", "9", "10", "11"}));
  EXPECT_EQ(table1_row("6_1").arity, 3u);
  EXPECT_EQ(table1_row("9").arity, 3u);
  EXPECT_EQ(table1_row("1").arity, 2u);
  EXPECT_THROW(table1_row("4"), ValidationError);
  EXPECT_EQ(row_space_id(table1_row("6_2"), {{"n", 4}}), "table1/row6?n=4");
  EXPECT_EQ(row_space_id(table1_row("10"), kNone), "table1/row10");
}

TEST(Condition, TwoParameterRows) {
  const Table1Row& row = table1_row("8");
  const RowParams p = {{"n", 1}};
  EXPECT_TRUE(condition(row, p, {1.0, 2.0}));
  EXPECT_FALSE(condition(row, p, {2.0, 2.0}));
  EXPECT_TRUE(go_expected(row, p, {2.0, 2.0}));
  EXPECT_THROW(condition(row, p, {1.0, 2.0, 3.0}), ValidationError);
  EXPECT_THROW(condition(row, p, {1.0, -2.0}), ValidationError);
}

TEST(Condition, RowSixOdd) {
  const Table1Row& row = table1_row("6_1");
  const RowParams p = {{"n", 3}};
  // 3 / a3 = 2 / 2 + 1 / 1 gives a3 = 1.5.
  EXPECT_TRUE(condition(row, p, {1.0, 2.0, 1.5}));
  EXPECT_FALSE(condition(row, p, {1.0, 2.0, 2.0}));
  EXPECT_FALSE(condition(row, p, {1.0, 1.0, 2.0}));
  EXPECT_FALSE(condition(row, p, {1.0, 1.0, 1.0}));
  EXPECT_TRUE(go_expected(row, p, {1.0, 1.0, 1.0}));
  EXPECT_FALSE(go_expected(row, p, {1.0, 1.0, 2.0}));
}

TEST(Condition, RowNine) {
  const Table1Row& row = table1_row("9");
  const RowParams p = {{"n", 2}};
  EXPECT_TRUE(condition(row, p, {1.0, 1.0, 2.0}));
  EXPECT_TRUE(condition(row, p, {1.0, 2.0, 3.0}));
  EXPECT_FALSE(condition(row, p, {2.0, 2.0, 2.0}));
}

TEST(ConditionProperty, ScaleInvariant) {
  Rng rng(21);
  for (const auto& row : table1_rows()) {
    const RowParams& p = row.params.front();
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> a;
      for (std::size_t i = 0; i < row.arity; ++i) a.push_back(rng.uniform(0.2, 4.0));
      if (row.id == "6_1") {
        const double n = p.at("n");
        a[2] = n / ((n - 1) / a[1] + 1.0 / a[0]);
      }
      const double c = rng.uniform(0.1, 10.0);
      std::vector<double> b = a;
      for (auto& x : b) x *= c;
      EXPECT_EQ(condition(row, p, a), condition(row, p, b)) << row.id;
    }
  }
}

TEST(ReducedCoefficientsProperty, IdentityHolds) {
  Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = ReducedCoefficients::from_alphas(rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0));
    EXPECT_LE(c.identity_residual(), 1e-12);
  }
  const auto c = ReducedCoefficients::from_alphas(2.0, 1.0, 4.0);
  EXPECT_DOUBLE_EQ(c.rho, 0.5);
  EXPECT_DOUBLE_EQ(c.sigma, -3.0);
  EXPECT_DOUBLE_EQ(c.tau, -1.0);
}

TEST(ReducedCoefficientsProperty, ClosedFormMatchesCondition) {
  Rng rng(23);
  const Table1Row& row = table1_row("6_1");
  for (int n : {3, 5}) {
    const RowParams p = {{"n", n}};
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> a = {rng.uniform(0.2, 4.0), rng.uniform(0.2, 4.0), rng.uniform(0.2, 4.0)};
      if (trial % 2 == 0) a[2] = n / ((n - 1) / a[1] + 1.0 / a[0]);
      const auto c = ReducedCoefficients::from_alphas(a[0], a[1], a[2]);
      EXPECT_EQ(row6_closed_form(n, c), go_expected(row, p, a));
    }
  }
  // Even n: only a2 = a3.
  EXPECT_TRUE(row6_closed_form(4, ReducedCoefficients::from_alphas(1.0, 2.0, 2.0)));
  EXPECT_FALSE(row6_closed_form(4, ReducedCoefficients::from_alphas(1.0, 2.0, 1.5)));
}

TEST(Blueprint, DimensionsPerRow) {
  struct Case {
    const char* id;
    RowParams params;
    std::vector<std::size_t> eigenspaces;
  };
  const std::vector<Case> cases = {{"8", {{"n", 1}}, {4, 3}},
                                   {"6_1", {{"n", 3}}, {6, 6, 1}},
                                   {"6_2", {{"n", 4}}, {8, 13}},
                                   {"9", {{"n", 2}}, {8, 5, 1}},
                                   {"10", kNone, {7, 7}},
                                   {"5", {{"n", 2}, {"p", 1}}, {4, 1}}};
  for (const auto& c : cases) {
    SCOPED_TRACE(c.id);
    const RowInstance inst = instantiate(table1_row(c.id), c.params, 1);
    std::vector<std::size_t> dims;
    for (const auto& e : inst.blueprint.eigenspaces()) dims.push_back(static_cast<std::size_t>(e.cols()));
    EXPECT_EQ(dims, c.eigenspaces);
    EXPECT_EQ(dims, inst.expected_eigenspace_dims);
    const Representation rep = Representation::isotropy(*inst.space);
    for (const auto& part : inst.blueprint.parts) EXPECT_LE(rep.invariance_residual(part), 1e-8);
  }
}

TEST(Instances, PositiveAlphasSatisfyTheCondition) {
  const RowInstance inst = instantiate(table1_row("6_1"), {{"n", 3}}, 1);
  const auto all = positive_alphas(inst, 5);
  ASSERT_GE(all.size(), 5u);
  for (const auto& a : all) EXPECT_TRUE(condition(*inst.row, inst.params, a));
  for (const auto& c : negative_cases(inst, 5)) {
    if (c.eigenspaces.size() == 3 && c.label.rfind("non-invariant", 0) != 0) {
      EXPECT_FALSE(go_expected(*inst.row, inst.params, c.alphas)) << c.label;
    }
  }
}

TEST(CrossCheck, RowSixProbes) {
  const RowInstance inst = instantiate(table1_row("6_1"), {{"n", 3}}, 1);
  const CrossCheck on = reduced_condition_crosscheck(inst, {1.0, 2.0, 1.5}, 1, 100);
  EXPECT_TRUE(on.closed_form);
  EXPECT_EQ(on.go.verdict, Verdict::go_consistent);
  EXPECT_TRUE(on.agree);
  const CrossCheck off = reduced_condition_crosscheck(inst, {1.0, 1.0, 2.0}, 1, 100);
  EXPECT_FALSE(off.closed_form);
  EXPECT_EQ(off.go.verdict, Verdict::not_go);
  EXPECT_TRUE(off.agree);
  const CrossCheck two = reduced_condition_crosscheck(inst, {1.0, 2.0}, 1, 100);
  EXPECT_EQ(two.alphas.size(), 3u);
  EXPECT_TRUE(two.agree);
  EXPECT_THROW(reduced_condition_crosscheck(instantiate(table1_row("8"), {{"n", 1}}, 1), {1.0, 2.0}, 1),
               ValidationError);
}

class VerifyRow : public ::testing::TestWithParam<std::pair<const char*, RowParams>> {};

TEST_P(VerifyRow, Passes) {
  CampaignOptions options;
  options.samples = 100;
  const auto& [id, params] = GetParam();
  const RowReport r = verify_row(table1_row(id), params, 3, options);
  for (const auto& f : r.failures) ADD_FAILURE() << f;
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.submodule_dims, r.expected_submodule_dims);
  EXPECT_EQ(r.eigenspace_dims, r.expected_eigenspace_dims);
  bool has_positive = false;
  bool has_negative = false;
  for (const auto& inst : r.instances) {
    has_positive |= inst.kind == "positive";
    has_negative |= inst.kind == "negative";
    if (inst.kind == "negative") EXPECT_EQ(inst.go.verdict, Verdict::not_go) << inst.label;
  }
  EXPECT_TRUE(has_positive);
  EXPECT_TRUE(has_negative);
}

INSTANTIATE_TEST_SUITE_P(Rows, VerifyRow,
                         ::testing::Values(std::make_pair("8", RowParams{{"n", 1}}),
                                           std::make_pair("10", RowParams{}),
                                           std::make_pair("6_2", RowParams{{"n", 4}}),
                                           std::make_pair("5", RowParams{{"n", 2}, {"p", 1}})));

TEST(Campaign, DeterministicJson) {
  CampaignOptions options;
  options.samples = 100;
  options.linear_graph = false;
  const std::vector<std::pair<std::string, RowParams>> rows = {{"8", {{"n", 1}}}, {"10", {}}};
  const auto a = run_campaign(rows, 9, options);
  const auto b = run_campaign(rows, 9, options);
  EXPECT_TRUE(a.passed);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(TinyModules, StationaryDimensionsMatch) {
  const auto& entries = table2_entries();
  EXPECT_EQ(entries.size(), 14u);
  for (const auto& e : entries) {
    SCOPED_TRACE(e.id);
    const Table2Result r = verify_table2(e, 1);
    EXPECT_TRUE(r.passed);
    ASSERT_EQ(r.submodule_dims.size(), 1u);
    EXPECT_EQ(r.submodule_dims[0], e.module_dim);
    EXPECT_EQ(r.type, e.type);
    EXPECT_EQ(r.centralizer_dim, e.stationary_dim);
  }
}

}  // namespace
}  // namespace gospace
