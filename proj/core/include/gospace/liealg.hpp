#pragma once

// Matrix Lie algebras given by a basis: brackets, structure constants, the
// Killing form, subalgebras, orthogonal complements and centralizers.
//
// Elements are handled in basis coordinates. Algebras built with
// Normalization::killing have a basis orthonormal for minus the Killing form,
// so in that case the coordinate dot product *is* the invariant inner product.

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gospace/numerics.hpp"

namespace gospace {

enum class Normalization {
  none,       // keep the basis as given
  frobenius,  // orthonormal for tr(X^T Y)
  killing,    // orthonormal for minus the Killing form (requires it to be definite)
};

/// Dense 3-index array c(i, j, k) with [e_i, e_j] = sum_k c(i, j, k) e_k.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(std::size_t dim) : dim_(dim), data_(dim * dim * dim, 0.0) {}

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dim_ + j) * dim_ + k];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dim_ + j) * dim_ + k];
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

class LieAlgebra {
 public:
  LieAlgebra() = default;

  /// Builds the algebra spanned by `basis` (n x n real matrices). Throws
  /// ValidationError on dependent or ill-shaped input and ClosureError when
  /// the span is not closed under the commutator.
  static LieAlgebra from_matrices(std::string name, std::vector<Matrix> basis,
                                  Normalization normalization = Normalization::killing,
                                  const TolerancePolicy& tol = {});

  const std::string& name() const { return name_; }
  std::size_t dim() const { return basis_.size(); }
  Eigen::Index ambient_dim() const { return basis_.empty() ? 0 : basis_.front().rows(); }
  const std::vector<Matrix>& basis() const { return basis_; }

  /// Matrix of ad(e_i) in basis coordinates: ad(i)(k, j) = c(i, j, k).
  const Matrix& ad(std::size_t i) const { return ad_[i]; }
  Matrix ad_of(const Vector& x) const;
  Vector bracket(const Vector& x, const Vector& y) const;

  Matrix to_matrix(const Vector& x) const;
  /// Coordinates of a matrix in the basis; `residual` receives the relative
  /// distance of `x` from the span.
  Vector coordinates(const Matrix& x, double* residual = nullptr) const;

  double structure_constant(std::size_t i, std::size_t j, std::size_t k) const {
    return ad_[i](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
  }

  /// K(i, j) = -trace(ad e_i o ad e_j).
  const Matrix& killing_gram() const { return killing_; }
  bool killing_positive_definite(const TolerancePolicy& tol = {}) const;

  /// Largest coordinate norm of the Jacobi sum over basis triples.
  double jacobi_residual() const;
  /// Largest norm of ad(e_i)^T K + K ad(e_i); zero iff the Killing form is ad-invariant.
  double killing_invariance_residual() const;

 private:
  void compute_tables(const TolerancePolicy& tol);

  std::string name_;
  std::vector<Matrix> basis_;
  Matrix flat_pinv_;  // dim x n^2 pseudo-inverse of the flattened basis
  Matrix flat_;       // n^2 x dim
  std::vector<Matrix> ad_;
  Matrix killing_;
};

/// Expansion coefficients of all basis commutators.
StructureConstants structure_constants(const LieAlgebra& algebra);

/// Minus the Killing form, computed from the structure constants.
Matrix killing_gram(const LieAlgebra& algebra);

/// A subalgebra h of a parent algebra g, carried with its own LieAlgebra data.
class Subalgebra {
 public:
  Subalgebra() = default;

  /// Subalgebra spanned by the columns of `span` (parent coordinates).
  static Subalgebra from_parent_span(std::shared_ptr<const LieAlgebra> parent, const Matrix& span,
                                     std::string name, const TolerancePolicy& tol = {});
  /// Subalgebra spanned by matrices that must lie in the parent.
  static Subalgebra from_matrices(std::shared_ptr<const LieAlgebra> parent,
                                  std::vector<Matrix> matrices, std::string name,
                                  const TolerancePolicy& tol = {});

  const LieAlgebra& parent() const { return *parent_; }
  const std::shared_ptr<const LieAlgebra>& parent_ptr() const { return parent_; }
  const LieAlgebra& algebra() const { return algebra_; }
  const std::string& name() const { return algebra_.name(); }
  std::size_t dim() const { return algebra_.dim(); }

  /// Parent coordinates of the subalgebra's own basis (columns).
  const Matrix& inclusion() const { return inclusion_; }
  /// Orthonormal (parent coordinate) basis of the image.
  const Matrix& image_basis() const { return image_; }

  /// max |iota([e_i, e_j]) - [iota e_i, iota e_j]| over basis pairs.
  double homomorphism_residual() const;

 private:
  std::shared_ptr<const LieAlgebra> parent_;
  LieAlgebra algebra_;
  Matrix inclusion_;
  Matrix image_;
};

/// Orthogonal complement m of h in g for minus the Killing form of g. The basis
/// is orthonormal for that form and [h, m] is contained in m.
struct OrthogonalComplementModule {
  Matrix basis;  // parent coordinates, dim g x dim m
  double orthogonality_residual = 0.0;
  double reductivity_residual = 0.0;
};

OrthogonalComplementModule orthogonal_complement(const LieAlgebra& g, const Subalgebra& h,
                                                 const TolerancePolicy& tol = {});

/// Kernel of Z -> [Z, X] restricted to h; columns are h coordinates.
Matrix centralizer_in(const Subalgebra& h, const Vector& x_parent, const TolerancePolicy& tol = {});

struct Centralizer {
  Matrix basis;  // parent coordinates, orthonormal
  bool closed_under_bracket = false;
};

/// z_g(h): the simultaneous kernel of ad over a basis of h.
Centralizer centralizer_of_subalgebra(const LieAlgebra& g, const Subalgebra& h,
                                      const TolerancePolicy& tol = {});

/// Span of `outer` minus span of `inner` (orthogonal difference, orthonormal result).
Matrix subspace_difference(const Matrix& outer, const Matrix& inner,
                           const TolerancePolicy& tol = {});

nlohmann::json to_json(const LieAlgebra& algebra);
LieAlgebra lie_algebra_from_json(const nlohmann::json& doc, const TolerancePolicy& tol = {});
nlohmann::json to_json(const Subalgebra& sub);
Subalgebra subalgebra_from_json(const nlohmann::json& doc, std::shared_ptr<const LieAlgebra> parent,
                                const TolerancePolicy& tol = {});

}  // namespace gospace
