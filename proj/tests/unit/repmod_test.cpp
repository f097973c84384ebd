#include <gtest/gtest.h>

#include <algorithm>

#include "gospace/builders.hpp"
#include "gospace/error.hpp"
#include "gospace/repmod.hpp"

namespace gospace {
namespace {

std::vector<std::size_t> sorted_desc(std::vector<std::size_t> v) {
  std::sort(v.rbegin(), v.rend());
  return v;
}

TEST(Decompose, StandardModulesAreIrreducible) {
  struct Case {
    LieAlgebra g;
    Eigen::Index dim;
    ModuleType type;
  };
  std::vector<Case> cases = {{build_so(5), 5, ModuleType::real},
                             {build_su(3), 6, ModuleType::complex},
                             {build_sp(2), 8, ModuleType::quaternionic}};
  for (const auto& c : cases) {
    SCOPED_TRACE(c.g.name());
    const Representation rep = Representation::standard(c.g);
    EXPECT_EQ(rep.dim(), c.dim);
    const IsotypicDecomposition d = decompose(rep, 1);
    ASSERT_EQ(d.submodules.size(), 1u);
    EXPECT_EQ(d.submodules[0].type, c.type);
    EXPECT_EQ(classify_type(rep, Matrix::Identity(c.dim, c.dim)), c.type);
  }
}

TEST(Decompose, Sp2OverSp1) {
  const HomogeneousSpace space = build_space("table1/row8?n=1");
  const IsotypicDecomposition d = decompose(space, 3);
  EXPECT_EQ(sorted_desc(d.dims()), (std::vector<std::size_t>{4, 1, 1, 1}));
  ASSERT_EQ(d.classes.size(), 2u);
  std::vector<std::size_t> class_sizes;
  for (const auto& c : d.classes) class_sizes.push_back(static_cast<std::size_t>(c.isotypic_basis.cols()));
  EXPECT_EQ(sorted_desc(class_sizes), (std::vector<std::size_t>{4, 3}));
  for (const auto& s : d.submodules) {
    if (s.dim() == 1) {
      EXPECT_EQ(s.type, ModuleType::trivial);
      EXPECT_EQ(s.size_class, SizeClass::trivial);
    } else {
      EXPECT_EQ(s.type, ModuleType::quaternionic);
    }
  }
}

TEST(Decompose, ProductWithDiagonalGivesAdjoint) {
  const HomogeneousSpace space = build_space("lo/su2?k=2");
  const IsotypicDecomposition d = decompose(space, 2);
  ASSERT_EQ(d.submodules.size(), 1u);
  EXPECT_EQ(d.submodules[0].dim(), 3u);
  EXPECT_EQ(d.submodules[0].size_class, SizeClass::adjoint);
}

TEST(Decompose, SpinSevenInSoNine) {
  const HomogeneousSpace space = build_space("table1/row1");
  const IsotypicDecomposition d = decompose(space, 5);
  EXPECT_EQ(sorted_desc(d.dims()), (std::vector<std::size_t>{8, 7}));
  EXPECT_EQ(d.classes.size(), 2u);
}

TEST(ClassifyType, AgreesWithCommutantDimension) {
  const HomogeneousSpace space = build_space("table1/row9?n=2");
  const Representation rep = Representation::isotropy(space);
  const IsotypicDecomposition d = decompose(rep, 4);
  for (const auto& s : d.submodules) {
    // Oracle: the commutant of an irreducible module is R, C or H.
    const std::size_t k = commutant(rep.restrict(s.basis)).basis.size();
    const ModuleType t = classify_type(rep, s.basis);
    if (t == ModuleType::complex) {
      EXPECT_EQ(k, 2u);
    } else if (t == ModuleType::quaternionic) {
      EXPECT_EQ(k, 4u);
    } else {
      EXPECT_EQ(k, 1u);
    }
  }
}

TEST(GenericCentralizer, StandardModules) {
  // Stabilizers of a nonzero vector: so(n-1) in R^n, su(n-1) in C^n, sp(n-1) in H^n.
  const Representation so5 = Representation::standard(build_so(5));
  EXPECT_EQ(generic_centralizer_dim(so5, Matrix::Identity(5, 5), 1), 6u);
  const Representation su4 = Representation::standard(build_su(4));
  EXPECT_EQ(generic_centralizer_dim(su4, Matrix::Identity(8, 8), 1), 8u);
  const Representation sp3 = Representation::standard(build_sp(3));
  EXPECT_EQ(generic_centralizer_dim(sp3, Matrix::Identity(12, 12), 1), 10u);
  EXPECT_EQ(classify_size(so5, Matrix::Identity(5, 5), 1), SizeClass::tiny);
}

TEST(EquivariantIsomorphism, TrivialLinesAreIsomorphic) {
  const HomogeneousSpace space = build_space("table1/row8?n=1");
  const Representation rep = Representation::isotropy(space);
  const IsotypicDecomposition d = decompose(rep, 3);
  std::vector<const IrreducibleSubmodule*> trivial;
  const IrreducibleSubmodule* big = nullptr;
  for (const auto& s : d.submodules) (s.dim() == 1 ? trivial.push_back(&s) : void(big = &s));
  ASSERT_EQ(trivial.size(), 3u);
  ASSERT_NE(big, nullptr);
  const auto phi = equivariant_isomorphism(rep, trivial[0]->basis, trivial[1]->basis);
  ASSERT_TRUE(phi.has_value());
  EXPECT_NEAR(std::abs((*phi)(0, 0)), 1.0, 1e-10);
  EXPECT_FALSE(equivariant_isomorphism(rep, big->basis, trivial[0]->basis).has_value());
}

TEST(EquivariantIsomorphism, IntertwinesTheAction) {
  const HomogeneousSpace space = build_space("lo/su2?k=3");
  const Representation rep = Representation::isotropy(space);
  const IsotypicDecomposition d = decompose(rep, 6);
  ASSERT_EQ(d.submodules.size(), 2u);
  const Matrix& a = d.submodules[0].basis;
  const Matrix& b = d.submodules[1].basis;
  const auto phi = equivariant_isomorphism(rep, a, b);
  ASSERT_TRUE(phi.has_value());
  for (const auto& op : rep.ops()) {
    const Matrix ra = a.transpose() * op * a;
    const Matrix rb = b.transpose() * op * b;
    EXPECT_NEAR((rb * *phi - *phi * ra).norm(), 0.0, 1e-9);
  }
}

class DecompositionInvariants : public ::testing::TestWithParam<const char*> {};

TEST_P(DecompositionInvariants, Hold) {
  const HomogeneousSpace space = build_space(GetParam());
  const Representation rep = Representation::isotropy(space);
  const IsotypicDecomposition d = decompose(rep, 11);
  std::size_t total = 0;
  for (const auto& s : d.submodules) total += s.dim();
  EXPECT_EQ(total, space.dim_m());
  Matrix all(rep.dim(), 0);
  for (const auto& s : d.submodules) {
    EXPECT_LE(rep.invariance_residual(s.basis), 1e-8);
    Matrix next(all.rows(), all.cols() + s.basis.cols());
    next << all, s.basis;
    all = next;
  }
  EXPECT_NEAR((all.transpose() * all - Matrix::Identity(all.cols(), all.cols())).norm(), 0.0, 1e-8);
  for (const auto& c : d.classes) {
    EXPECT_LE(rep.invariance_residual(c.isotypic_basis), 1e-8);
    std::size_t members = 0;
    for (std::size_t m : c.members) members += d.submodules[m].dim();
    EXPECT_EQ(static_cast<std::size_t>(c.isotypic_basis.cols()), members);
  }
  // The splitting depends on the seed but the dimensions do not.
  EXPECT_EQ(sorted_desc(decompose(rep, 12345).dims()), sorted_desc(d.dims()));
}

INSTANTIATE_TEST_SUITE_P(Spaces, DecompositionInvariants,
                         ::testing::Values("table1/row1", "table1/row5?n=2&p=1", "table1/row6?n=3",
                                           "table1/row8?n=2", "table1/row9?n=2", "table1/row10",
                                           "lo/su2?k=3"));

TEST(Decompose, SameSeedIsReproducible) {
  const HomogeneousSpace space = build_space("table1/row6?n=3");
  const auto a = decompose(space, 9);
  const auto b = decompose(space, 9);
  ASSERT_EQ(a.submodules.size(), b.submodules.size());
  for (std::size_t i = 0; i < a.submodules.size(); ++i) {
    EXPECT_EQ(a.submodules[i].basis, b.submodules[i].basis);
  }
}

TEST(Representation, RestrictRejectsNonInvariantSubspace) {
  const Representation rep = Representation::standard(build_so(4));
  Matrix line = Matrix::Zero(4, 1);
  line(0, 0) = 1.0;
  EXPECT_GT(rep.invariance_residual(line), 0.1);
}

}  // namespace
}  // namespace gospace
