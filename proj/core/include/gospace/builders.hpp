#pragma once

// Concrete matrix Lie algebras, octonion-derived algebras and the embedding
// chains H ⊂ ... ⊂ G used by the catalog.
//
// Complex and quaternionic algebras are realified: a complex n x n matrix
// A + iB becomes [[A, -B], [B, A]], so complex structure on R^{2n} is
// J = [[0, -I], [I, 0]].

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gospace/liealg.hpp"

namespace gospace {

using ComplexMatrix = Eigen::MatrixXcd;

/// Multiplication table of the octonions in the basis {1, e1, ..., e7}.
class OctonionTable {
 public:
  /// The table with e_i e_j = e_k for the cyclic triples
  /// (1,2,4) (2,3,5) (3,4,6) (4,5,7) (5,6,1) (6,7,2) (7,1,3).
  static const OctonionTable& standard();

  double operator()(int i, int j, int k) const { return c_[(i * 8 + j) * 8 + k]; }
  Vector multiply(const Vector& x, const Vector& y) const;
  /// Matrix of y -> e_i y on R^8.
  Matrix left_multiplication(int i) const;

  /// Largest violation of x(xy) = (xx)y and (yx)x = y(xx) over basis pairs.
  double alternativity_residual() const;
  /// Largest | |xy| - |x||y| | over random pairs.
  double norm_residual(std::uint64_t seed, int samples) const;

 private:
  OctonionTable();
  std::array<double, 512> c_{};
};

using LieAlgebraPtr = std::shared_ptr<const LieAlgebra>;

/// Realification of a complex matrix.
Matrix realify(const ComplexMatrix& x);
/// Copies x into the top-left corner of an n x n zero matrix (offset shifts it down the diagonal).
Matrix pad(const Matrix& x, Eigen::Index n, Eigen::Index offset = 0);
ComplexMatrix pad(const ComplexMatrix& x, Eigen::Index n, Eigen::Index offset = 0);

/// Real bases (over R) of complex matrix algebras, before realification.
std::vector<ComplexMatrix> complex_u_basis(int n);
std::vector<ComplexMatrix> complex_su_basis(int n);
/// 2n x 2n skew-Hermitian X with X^T J + J X = 0.
std::vector<ComplexMatrix> complex_sp_basis(int n);

std::vector<Matrix> so_basis(int n);
std::vector<Matrix> realify_all(const std::vector<ComplexMatrix>& xs);

/// Bounds: so 2..12, su 2..7, sp 1..3, u 1..7. Semisimple results are
/// Killing-normalized, u(n) and so(2) are Frobenius-normalized.
LieAlgebra build_so(int n);
LieAlgebra build_su(int n);
LieAlgebra build_sp(int n);
LieAlgebra build_u(int n);

/// g2 as the derivation algebra of the imaginary octonions, inside so(7).
Subalgebra build_g2();
Subalgebra build_g2(const LieAlgebraPtr& so7);
/// spin(7) = span{Γ_i Γ_j} with Γ_i left multiplication by e_i, inside so(8).
Subalgebra build_spin7_in_so8();
Subalgebra build_spin7_in_so8(const LieAlgebraPtr& so8);
/// spin(9) acting on R^16 through symmetric Clifford generators.
LieAlgebra build_spin9();

/// Subalgebra of `parent` cut out of span(`within`) (parent coordinates) by the
/// linear condition f(X) = 0 on matrices.
Subalgebra constrained_subalgebra(const LieAlgebraPtr& parent, const Matrix& within,
                                  const std::function<Matrix(const Matrix&)>& f, std::string name,
                                  const TolerancePolicy& tol = {});

/// Block-diagonal direct sum, Killing-normalized.
LieAlgebra direct_sum(const std::string& name, const std::vector<const LieAlgebra*>& parts);

/// g_0 ⊂ g_1 ⊂ ... ⊂ g_k = top. Lower levels are subalgebras of the top algebra.
class EmbeddingChain {
 public:
  EmbeddingChain() = default;
  EmbeddingChain(std::string id, LieAlgebraPtr top, std::vector<Subalgebra> levels,
                 const TolerancePolicy& tol = {});

  const std::string& id() const { return id_; }
  const LieAlgebra& top() const { return *top_; }
  const LieAlgebraPtr& top_ptr() const { return top_; }
  /// Number of algebras in the chain including the top.
  std::size_t length() const { return levels_.size() + 1; }
  std::string level_name(std::size_t i) const;
  /// Orthonormal top coordinates of level i (identity for the top).
  Matrix level_basis(std::size_t i) const;
  const Subalgebra& level(std::size_t i) const { return levels_.at(i); }
  const Subalgebra& bottom() const { return levels_.front(); }
  /// Level i coordinates -> level i+1 coordinates.
  const Matrix& inclusion(std::size_t i) const { return step_.at(i); }
  /// Composite inclusion i -> j (i < j) built from the steps.
  Matrix composite(std::size_t i, std::size_t j) const;

  double homomorphism_residual() const { return hom_residual_; }
  /// Largest difference between composite maps and direct inclusions into the top.
  double composition_residual() const { return comp_residual_; }

 private:
  std::string id_;
  LieAlgebraPtr top_;
  std::vector<Subalgebra> levels_;
  std::vector<Matrix> step_;
  double hom_residual_ = 0.0;
  double comp_residual_ = 0.0;
};

/// G/H with g Killing-normalized, so the coordinate dot product on g is minus
/// the Killing form and m is the ordinary orthogonal complement of h.
class HomogeneousSpace {
 public:
  HomogeneousSpace() = default;
  HomogeneousSpace(std::string id, LieAlgebraPtr g, Subalgebra h, const TolerancePolicy& tol = {});
  HomogeneousSpace(std::string id, EmbeddingChain chain, const TolerancePolicy& tol = {});

  const std::string& id() const { return id_; }
  const LieAlgebra& g() const { return *g_; }
  const LieAlgebraPtr& g_ptr() const { return g_; }
  const Subalgebra& h() const { return h_; }
  std::size_t dim_g() const { return g_->dim(); }
  std::size_t dim_h() const { return h_.dim(); }
  std::size_t dim_m() const { return static_cast<std::size_t>(m_.cols()); }

  /// g coordinates of h's own (Killing-orthonormal) basis, as columns.
  const Matrix& h_basis() const { return h_.inclusion(); }
  /// Orthonormal g coordinates of m, as columns.
  const Matrix& m_basis() const { return m_; }
  /// ad(h_k) restricted to m in m coordinates, one per h basis element.
  const std::vector<Matrix>& h_action() const { return rho_; }

  Vector m_to_g(const Vector& x) const { return m_ * x; }
  Vector g_to_m(const Vector& x) const { return m_.transpose() * x; }
  /// m coordinates of the orthogonal part of a subspace of g.
  Matrix subspace_in_m(const Matrix& g_basis) const;

  bool has_chain() const { return chain_ != nullptr; }
  const EmbeddingChain& chain() const { return *chain_; }

  double reductivity_residual() const { return reductivity_; }

 private:
  void init(const TolerancePolicy& tol);

  std::string id_;
  LieAlgebraPtr g_;
  Subalgebra h_;
  Matrix m_;
  std::vector<Matrix> rho_;
  std::shared_ptr<const EmbeddingChain> chain_;
  double reductivity_ = 0.0;
};

/// Parsed form of "family/name?key=value&key=value".
struct SpaceId {
  std::string family;
  std::string name;
  std::map<std::string, int> params;

  static SpaceId parse(const std::string& text);
  std::string str() const;
};

struct SpaceDescriptor {
  std::string pattern;      // e.g. "table1/row6?n=3|4|5"
  std::string description;  // H ⊂ ... ⊂ G
};

std::vector<SpaceDescriptor> list_spaces();

/// Canonical id with defaults filled in; throws ValidationError for unknown ids
/// or parameters outside the supported range.
std::string canonical_space_id(const std::string& text);

EmbeddingChain build_chain(const std::string& id, const TolerancePolicy& tol = {});
HomogeneousSpace build_space(const std::string& id, const TolerancePolicy& tol = {});

}  // namespace gospace
