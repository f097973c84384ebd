#include <gtest/gtest.h>

#include "gospace/error.hpp"
#include "gospace/natred.hpp"

namespace gospace {
namespace {

const HomogeneousSpace& su2_pair() {
  static const HomogeneousSpace space = build_space("lo/su2?k=2");
  return space;
}

const HomogeneousSpace& su2_triple() {
  static const HomogeneousSpace space = build_space("lo/su2?k=3");
  return space;
}

TEST(Ideals, DiagonalSu2) {
  const IdealDecomposition d = decompose_ideals(su2_pair());
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.n0, 0u);
  EXPECT_EQ(d.n1, 0u);
  for (const auto& i : d.ideals) {
    EXPECT_EQ(i.dim(), 3u);
    EXPECT_EQ(i.kind, ProjectionKind::bijective);
    EXPECT_LE(i.normalization_residual, 1e-10);
  }
  EXPECT_LE(d.bracket_residual, 1e-10);
}

TEST(Ideals, TrivialProjectionComesFirst) {
  const IdealDecomposition d = decompose_ideals(build_space("prod/su2+su3"));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.ideals[0].kind, ProjectionKind::trivial);
  EXPECT_EQ(d.ideals[0].dim(), 8u);
  EXPECT_EQ(d.ideals[1].kind, ProjectionKind::bijective);
  EXPECT_EQ(d.n0, 1u);
  EXPECT_EQ(d.n1, 1u);
}

TEST(Ideals, InjectiveProjection) {
  const IdealDecomposition d = decompose_ideals(build_space("prod/su2+su3diag"));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.ideals[0].kind, ProjectionKind::injective);
  EXPECT_EQ(d.ideals[1].kind, ProjectionKind::bijective);
  EXPECT_EQ(d.n0, 0u);
  EXPECT_EQ(d.n1, 1u);
}

TEST(Ideals, SimpleAlgebraIsOneInjectiveIdeal) {
  const IdealDecomposition d = decompose_ideals(build_space("table1/row6?n=3"));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.ideals[0].kind, ProjectionKind::injective);
  EXPECT_EQ(d.n0, 0u);
  EXPECT_EQ(d.n1, 1u);
}

// On su(2)+su(2) over the diagonal the complement metric is a multiple of the
// normal one. Writing m = {(Y, -Y)} and splitting along h by hand gives
// A = 2 g1 g2 / (g1 + g2).
double pair_oracle(double g1, double g2) { return 2.0 * g1 * g2 / (g1 + g2); }

TEST(CaseB, PositiveGammas) {
  const IdealDecomposition d = decompose_ideals(su2_pair());
  const NatRedMetric m = natred_case_b(d, {1.0, 1.0});
  EXPECT_TRUE(m.accepted);
  const MetricSpec induced = to_metric_spec(m);
  ASSERT_EQ(induced.size(), 1u);
  EXPECT_NEAR(induced.eigenspace(0).alpha, pair_oracle(1.0, 1.0), 1e-10);
}

TEST(CaseB, OneNegativeGammaAccepted) {
  const IdealDecomposition d = decompose_ideals(su2_pair());
  for (const auto& [g1, g2] : std::vector<std::pair<double, double>>{{1.0, -2.0}, {-3.0, 1.0}}) {
    const NatRedMetric m = natred_case_b(d, {g1, g2});
    EXPECT_TRUE(m.analytic_admissible);
    EXPECT_TRUE(m.positive_definite);
    ASSERT_TRUE(m.accepted);
    const MetricSpec induced = to_metric_spec(m);
    ASSERT_EQ(induced.size(), 1u);
    EXPECT_NEAR(induced.eigenspace(0).alpha, pair_oracle(g1, g2), 1e-9);
  }
  EXPECT_NEAR(pair_oracle(1.0, -2.0), 4.0, 1e-15);
  EXPECT_NEAR(pair_oracle(-3.0, 1.0), 3.0, 1e-15);
}

TEST(CaseB, NegativeSumRejected) {
  const IdealDecomposition d = decompose_ideals(su2_pair());
  const NatRedMetric m = natred_case_b(d, {1.0, -0.5});
  EXPECT_FALSE(m.analytic_admissible);
  EXPECT_FALSE(m.positive_definite);
  EXPECT_FALSE(m.accepted);
  EXPECT_FALSE(m.diagnostic.empty());
  EXPECT_THROW(to_metric_spec(m), ValidationError);
}

TEST(CaseB, BadCoefficientsThrow) {
  const IdealDecomposition d = decompose_ideals(su2_pair());
  EXPECT_THROW(natred_case_b(d, {1.0}), ValidationError);
  EXPECT_THROW(natred_case_b(d, {1.0, 0.0}), ValidationError);
}

TEST(CaseA, DroppingOneFactor) {
  const IdealDecomposition d = decompose_ideals(su2_pair());
  const NatRedMetric m = natred_case_a(d, 0, {0.0, 2.0});
  ASSERT_TRUE(m.accepted);
  EXPECT_EQ(m.coefficients[0], 0.0);
  const MetricSpec induced = to_metric_spec(m);
  ASSERT_EQ(induced.size(), 1u);
  // Limit of the pair formula as the dropped coefficient grows: A = 2 beta.
  EXPECT_NEAR(induced.eigenspace(0).alpha, 4.0, 1e-9);
}

TEST(CaseA, Errors) {
  const IdealDecomposition d = decompose_ideals(su2_pair());
  EXPECT_THROW(natred_case_a(d, 5, {1.0, 1.0}), ValidationError);
  EXPECT_THROW(natred_case_a(d, 0, {1.0, -1.0}), ValidationError);
  EXPECT_THROW(natred_case_a(d, 0, {1.0}), ValidationError);
  const IdealDecomposition single = decompose_ideals(build_space("prod/su2+su3"));
  EXPECT_THROW(natred_case_a(single, 1, {1.0, 1.0}), ValidationError);
}

TEST(Kostant, AcceptedMetricsSatisfyIt) {
  const IdealDecomposition d = decompose_ideals(su2_triple());
  const NatRedMetric b = natred_case_b(d, {1.0, 2.0, -4.0});
  ASSERT_TRUE(b.accepted);
  const KostantReport kb = check_kostant(b);
  EXPECT_TRUE(kb.passed);
  EXPECT_LE(kb.orthogonality_residual, 1e-10);
  EXPECT_LE(kb.restriction_residual, 1e-10);
  const NatRedMetric a = natred_case_a(d, 2, {1.0, 3.0, 0.0});
  EXPECT_TRUE(check_kostant(a).passed);
}

TEST(Kostant, WrongFormFails) {
  const IdealDecomposition d = decompose_ideals(su2_pair());
  const NatRedMetric m = natred_case_b(d, {1.0, -2.0});
  const auto dg = static_cast<Eigen::Index>(su2_pair().dim_g());
  EXPECT_FALSE(check_kostant(m, Matrix::Identity(dg, dg)).passed);
}

TEST(NatredIdentity, NormalMetricSatisfiesIt) {
  const HomogeneousSpace& space = su2_triple();
  const auto dm = static_cast<Eigen::Index>(space.dim_m());
  EXPECT_LE(natred_identity_residual(space.g(), space.m_basis(), space.h_basis(), Matrix::Identity(dm, dm)),
            1e-12);
  const NatRedMetric m = natred_case_b(decompose_ideals(space), {1.0, 2.0, 3.0});
  EXPECT_LE(check_natred_identity(m), 1e-10);
}

TEST(NatredIdentity, GoMetricWithoutItFails) {
  const HomogeneousSpace space = build_space("table1/row8?n=1");
  const IsotypicDecomposition d = decompose(space, 1);
  std::vector<std::size_t> big;
  std::vector<std::size_t> small;
  for (std::size_t i = 0; i < d.submodules.size(); ++i) (d.submodules[i].dim() > 1 ? big : small).push_back(i);
  const MetricSpec a = MetricSpec::from_grouping(space, d, {big, small}, {1.0, 2.0});
  EXPECT_GT(natred_identity_residual(space.g(), space.m_basis(), space.h_basis(), a.matrix()), 1e-4);
}

TEST(NatRed, DistinctGammasOnTripleGiveTwoEigenvalues) {
  const NatRedMetric m = natred_case_b(decompose_ideals(su2_triple()), {1.0, 2.0, 3.0});
  ASSERT_TRUE(m.accepted);
  const MetricSpec induced = to_metric_spec(m);
  EXPECT_EQ(induced.size(), 2u);
  EXPECT_TRUE(induced.equivariant());
  const auto cert = linear_graph_fit(su2_triple(), induced, 3);
  EXPECT_TRUE(cert.accepted);
  EXPECT_LE(cert.system_residual, 1e-10);
}

TEST(NatRedProperty, SignConditionIsSharp) {
  const IdealDecomposition d = decompose_ideals(su2_triple());
  Rng rng(17);
  int accepted = 0;
  int rejected = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> gammas(3);
    for (auto& g : gammas) {
      g = rng.uniform(0.2, 3.0) * (rng.uniform(0.0, 1.0) < 0.35 ? -1.0 : 1.0);
    }
    const NatRedMetric m = natred_case_b(d, gammas);
    EXPECT_EQ(m.analytic_admissible, m.positive_definite)
        << gammas[0] << " " << gammas[1] << " " << gammas[2] << " min eig " << m.gram_min_eigenvalue;
    (m.accepted ? accepted : rejected)++;
    if (m.accepted) EXPECT_LE(check_natred_identity(m), 1e-8);
  }
  EXPECT_GT(accepted, 10);
  EXPECT_GT(rejected, 10);
}

TEST(NatRed, JsonReportsConstruction) {
  const NatRedMetric m = natred_case_b(decompose_ideals(su2_pair()), {1.0, -2.0});
  const auto j = to_json(m);
  EXPECT_EQ(j.at("accepted"), true);
  EXPECT_EQ(to_json(*m.ideals).at("N"), 2);
}

}  // namespace
}  // namespace gospace
