#include "gospace/liealg.hpp"

#include <algorithm>
#include <cmath>

#include "gospace/error.hpp"
#include "gospace/json_io.hpp"

namespace gospace {

namespace {

Matrix flatten(const std::vector<Matrix>& basis) {
  const Eigen::Index n = basis.front().rows();
  Matrix flat(n * n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    flat.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(basis[i].data(), n * n);
  }
  return flat;
}

std::vector<Matrix> transform_basis(const std::vector<Matrix>& basis, const Matrix& t) {
  std::vector<Matrix> out(basis.size(), Matrix::Zero(basis.front().rows(), basis.front().cols()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double c = t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (c != 0.0) out[j] += c * basis[i];
    }
  }
  return out;
}

// T with T^T G T = I for a positive definite Gram matrix G, upper triangular so
// that the new basis is a Gram-Schmidt of the old one in order.
Matrix orthonormalizer(const Matrix& gram) {
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw ValidationError("Gram matrix is not positive definite");
  const Matrix l = llt.matrixL();
  return l.transpose().triangularView<Eigen::Upper>().solve(
      Matrix::Identity(gram.rows(), gram.cols()));
}

bool positive_definite(const Matrix& k, const TolerancePolicy& tol) {
  if (k.rows() == 0) return false;
  const auto eig = symmetric_eigendecomposition(k, tol);
  const double scale = std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
  return eig.values.minCoeff() > tol.feas_tol * scale;
}

}  // namespace

LieAlgebra LieAlgebra::from_matrices(std::string name, std::vector<Matrix> basis,
                                     Normalization normalization, const TolerancePolicy& tol) {
  if (basis.empty()) throw ValidationError("LieAlgebra '" + name + "': empty basis");
  const Eigen::Index n = basis.front().rows();
  for (const auto& b : basis) {
    if (b.rows() != n || b.cols() != n) {
      throw ValidationError("LieAlgebra '" + name + "': basis matrices must be square of equal size");
    }
    if (!b.allFinite()) throw ValidationError("LieAlgebra '" + name + "': non-finite entry");
  }
  {
    const Vector sigma = singular_values(flatten(basis));
    const double smax = sigma(0);
    const double smin = sigma(sigma.size() - 1);
    if (static_cast<std::size_t>(sigma.size()) < basis.size() || !(smin > tol.rel_rank_tol * smax)) {
      throw ValidationError("LieAlgebra '" + name + "': basis matrices are linearly dependent");
    }
  }

  if (normalization == Normalization::frobenius) {
    const Matrix flat = flatten(basis);
    basis = transform_basis(basis, orthonormalizer(flat.transpose() * flat));
  }

  LieAlgebra out;
  out.name_ = std::move(name);
  out.basis_ = std::move(basis);
  out.compute_tables(tol);

  if (normalization == Normalization::killing) {
    if (!positive_definite(out.killing_, tol)) {
      throw ValidationError("LieAlgebra '" + out.name_ +
                            "': minus Killing form is not definite, cannot normalize");
    }
    out.basis_ = transform_basis(out.basis_, orthonormalizer(out.killing_));
    out.compute_tables(tol);
  }
  return out;
}

void LieAlgebra::compute_tables(const TolerancePolicy& tol) {
  const std::size_t d = basis_.size();
  const auto di = static_cast<Eigen::Index>(d);
  flat_ = flatten(basis_);
  flat_pinv_ = flat_.completeOrthogonalDecomposition().pseudoInverse();

  ad_.assign(d, Matrix::Zero(di, di));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const Matrix c = basis_[i] * basis_[j] - basis_[j] * basis_[i];
      double residual = 0.0;
      const Vector coeff = coordinates(c, &residual);
      if (residual > tol.feas_tol) throw ClosureError(i, j, residual);
      ad_[i].col(static_cast<Eigen::Index>(j)) = coeff;
      ad_[j].col(static_cast<Eigen::Index>(i)) = -coeff;
    }
  }

  killing_ = Matrix::Zero(di, di);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const double v = -ad_[i].cwiseProduct(ad_[j].transpose()).sum();
      killing_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      killing_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
}

Matrix LieAlgebra::ad_of(const Vector& x) const {
  const auto d = static_cast<Eigen::Index>(dim());
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (x(i) != 0.0) out += x(i) * ad_[static_cast<std::size_t>(i)];
  }
  return out;
}

Vector LieAlgebra::bracket(const Vector& x, const Vector& y) const { return ad_of(x) * y; }

Matrix LieAlgebra::to_matrix(const Vector& x) const {
  const Eigen::Index n = ambient_dim();
  Vector flat = flat_ * x;
  return Eigen::Map<const Matrix>(flat.data(), n, n);
}

Vector LieAlgebra::coordinates(const Matrix& x, double* residual) const {
  const Eigen::Index n = ambient_dim();
  if (x.rows() != n || x.cols() != n) throw DimensionError("coordinates: wrong matrix size");
  const Eigen::Map<const Vector> flat(x.data(), n * n);
  Vector c = flat_pinv_ * flat;
  if (residual != nullptr) {
    *residual = (flat_ * c - flat).norm() / std::max(flat.norm(), 1.0);
  }
  return c;
}

bool LieAlgebra::killing_positive_definite(const TolerancePolicy& tol) const {
  return positive_definite(killing_, tol);
}

double LieAlgebra::jacobi_residual() const {
  const std::size_t d = dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      for (std::size_t k = j + 1; k < d; ++k) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        const auto kk = static_cast<Eigen::Index>(k);
        const Vector s = ad_[i] * ad_[j].col(kk) + ad_[j] * ad_[k].col(ii) + ad_[k] * ad_[i].col(jj);
        worst = std::max(worst, s.norm());
      }
    }
  }
  return worst;
}

double LieAlgebra::killing_invariance_residual() const {
  double worst = 0.0;
  for (const auto& a : ad_) {
    worst = std::max(worst, (a.transpose() * killing_ + killing_ * a).norm());
  }
  return worst;
}

StructureConstants structure_constants(const LieAlgebra& algebra) {
  const std::size_t d = algebra.dim();
  StructureConstants c(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) c(i, j, k) = algebra.structure_constant(i, j, k);
    }
  }
  return c;
}

Matrix killing_gram(const LieAlgebra& algebra) {
  const std::size_t d = algebra.dim();
  const auto c = structure_constants(algebra);
  Matrix k = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  // trace(ad e_i ad e_j) = sum_{l,m} c(i, m, l) c(j, l, m)
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double t = 0.0;
      for (std::size_t l = 0; l < d; ++l) {
        for (std::size_t m = 0; m < d; ++m) t += c(i, m, l) * c(j, l, m);
      }
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -t;
    }
  }
  return k;
}

Subalgebra Subalgebra::from_parent_span(std::shared_ptr<const LieAlgebra> parent, const Matrix& span,
                                        std::string name, const TolerancePolicy& tol) {
  if (span.rows() != static_cast<Eigen::Index>(parent->dim())) {
    throw DimensionError("Subalgebra: span has wrong number of rows");
  }
  const Matrix q = range_basis(span, tol);
  std::vector<Matrix> mats;
  for (Eigen::Index c = 0; c < q.cols(); ++c) mats.push_back(parent->to_matrix(q.col(c)));
  return from_matrices(std::move(parent), std::move(mats), std::move(name), tol);
}

Subalgebra Subalgebra::from_matrices(std::shared_ptr<const LieAlgebra> parent,
                                     std::vector<Matrix> matrices, std::string name,
                                     const TolerancePolicy& tol) {
  Subalgebra out;
  LieAlgebra raw = LieAlgebra::from_matrices(name, matrices, Normalization::none, tol);
  const Normalization norm =
      raw.killing_positive_definite(tol) ? Normalization::killing : Normalization::frobenius;
  out.algebra_ = LieAlgebra::from_matrices(std::move(name), std::move(matrices), norm, tol);
  out.parent_ = std::move(parent);
  const auto d = static_cast<Eigen::Index>(out.algebra_.dim());
  out.inclusion_ = Matrix::Zero(static_cast<Eigen::Index>(out.parent_->dim()), d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double residual = 0.0;
    out.inclusion_.col(i) =
        out.parent_->coordinates(out.algebra_.basis()[static_cast<std::size_t>(i)], &residual);
    if (residual > tol.feas_tol) {
      throw ValidationError("Subalgebra '" + out.algebra_.name() + "' is not contained in '" +
                            out.parent_->name() + "'");
    }
  }
  out.image_ = range_basis(out.inclusion_, tol);
  if (out.image_.cols() != d) throw ConstructionError("Subalgebra: inclusion lost rank");
  return out;
}

double Subalgebra::homomorphism_residual() const {
  double worst = 0.0;
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const Vector lhs = inclusion_ * algebra_.ad(i).col(static_cast<Eigen::Index>(j));
      const Vector rhs = parent_->bracket(inclusion_.col(static_cast<Eigen::Index>(i)),
                                          inclusion_.col(static_cast<Eigen::Index>(j)));
      worst = std::max(worst, (lhs - rhs).norm());
    }
  }
  return worst;
}

OrthogonalComplementModule orthogonal_complement(const LieAlgebra& g, const Subalgebra& h,
                                                 const TolerancePolicy& tol) {
  if (!g.killing_positive_definite(tol)) {
    throw ConstructionError("orthogonal_complement: minus Killing form of '" + g.name() +
                            "' is degenerate");
  }
  const Matrix& k = g.killing_gram();
  const Matrix& hb = h.image_basis();
  // m = {x : hb^T K x = 0}, then orthonormalized for K.
  Matrix m = kernel_basis((k * hb).transpose(), tol);
  if (m.cols() > 0) {
    const Matrix gram = m.transpose() * k * m;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    m = m * es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
  }
  OrthogonalComplementModule out;
  out.basis = m;
  if (static_cast<std::size_t>(m.cols()) + h.dim() != g.dim()) {
    throw ConstructionError("orthogonal_complement: dimensions do not add up");
  }
  out.orthogonality_residual = (hb.transpose() * k * m).cwiseAbs().maxCoeff();
  // Reductivity: the K-projection of [h, m] onto h must vanish.
  double worst = 0.0;
  if (m.cols() > 0) {
    const Matrix hk = hb.transpose() * k;
    for (Eigen::Index i = 0; i < hb.cols(); ++i) {
      const Matrix brackets = g.ad_of(hb.col(i)) * m;
      worst = std::max(worst, (hk * brackets).cwiseAbs().maxCoeff());
    }
  } else {
    out.orthogonality_residual = 0.0;
  }
  out.reductivity_residual = worst;
  if (worst > tol.feas_tol) throw ConstructionError("orthogonal_complement: [h, m] leaves m");
  return out;
}

Matrix centralizer_in(const Subalgebra& h, const Vector& x_parent, const TolerancePolicy& tol) {
  const auto& g = h.parent();
  if (x_parent.size() != static_cast<Eigen::Index>(g.dim())) {
    throw DimensionError("centralizer_in: element has wrong dimension");
  }
  // Column i is [iota e_i, X] = -ad(X) iota e_i.
  const Matrix map = -g.ad_of(x_parent) * h.inclusion();
  return kernel_basis(map, tol);
}

Centralizer centralizer_of_subalgebra(const LieAlgebra& g, const Subalgebra& h,
                                      const TolerancePolicy& tol) {
  const auto d = static_cast<Eigen::Index>(g.dim());
  const Matrix& hb = h.image_basis();
  Matrix stacked(d * hb.cols(), d);
  for (Eigen::Index i = 0; i < hb.cols(); ++i) stacked.middleRows(i * d, d) = g.ad_of(hb.col(i));
  Centralizer out;
  out.basis = kernel_basis(stacked, tol);
  out.closed_under_bracket = true;
  if (out.basis.cols() > 0) {
    const Matrix proj = Matrix::Identity(d, d) - projector(out.basis);
    for (Eigen::Index i = 0; i < out.basis.cols() && out.closed_under_bracket; ++i) {
      for (Eigen::Index j = i + 1; j < out.basis.cols(); ++j) {
        const Vector b = g.bracket(out.basis.col(i), out.basis.col(j));
        if ((proj * b).norm() > tol.feas_tol * std::max(1.0, b.norm())) {
          out.closed_under_bracket = false;
          break;
        }
      }
    }
  }
  return out;
}

Matrix subspace_difference(const Matrix& outer, const Matrix& inner, const TolerancePolicy& tol) {
  const Matrix qo = range_basis(outer, tol);
  if (inner.cols() == 0) return qo;
  const Matrix qi = range_basis(inner, tol);
  // Coefficients c with qo c orthogonal to inner. The overlap matrix has
  // singular values in [0, 1], so the cutoff is absolute.
  const Matrix c = kernel_basis(Matrix(qi.transpose() * qo), 1.0,
                                TolerancePolicy{std::sqrt(tol.rel_rank_tol), tol.feas_tol * 10,
                                                tol.margin_factor});
  return qo * c;
}

nlohmann::json to_json(const LieAlgebra& algebra) {
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& b : algebra.basis()) basis.push_back(matrix_to_json(b));
  nlohmann::json triples = nlohmann::json::array();
  const std::size_t d = algebra.dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        const double c = algebra.structure_constant(i, j, k);
        if (std::abs(c) > 1e-13) triples.push_back({i, j, k, c});
      }
    }
  }
  return {{"name", algebra.name()},
          {"dim", d},
          {"ambient_dim", algebra.ambient_dim()},
          {"basis", std::move(basis)},
          {"structure_constants", std::move(triples)},
          {"killing_gram", matrix_to_json(algebra.killing_gram())}};
}

LieAlgebra lie_algebra_from_json(const nlohmann::json& doc, const TolerancePolicy& tol) {
  std::vector<Matrix> basis;
  for (const auto& b : doc.at("basis")) basis.push_back(matrix_from_json(b));
  LieAlgebra out = LieAlgebra::from_matrices(doc.at("name").get<std::string>(), std::move(basis),
                                             Normalization::none, tol);
  for (const auto& t : doc.at("structure_constants")) {
    const auto i = t[0].get<std::size_t>();
    const auto j = t[1].get<std::size_t>();
    const auto k = t[2].get<std::size_t>();
    if (std::abs(out.structure_constant(i, j, k) - t[3].get<double>()) > tol.feas_tol) {
      throw ValidationError("LieAlgebra JSON: stored structure constants disagree with the basis");
    }
  }
  return out;
}

nlohmann::json to_json(const Subalgebra& sub) {
  return {{"name", sub.name()},
          {"parent", sub.parent().name()},
          {"inclusion", matrix_to_json(sub.inclusion())},
          {"algebra", to_json(sub.algebra())}};
}

Subalgebra subalgebra_from_json(const nlohmann::json& doc, std::shared_ptr<const LieAlgebra> parent,
                                const TolerancePolicy& tol) {
  if (doc.at("parent").get<std::string>() != parent->name()) {
    throw ValidationError("Subalgebra JSON: parent name mismatch");
  }
  std::vector<Matrix> mats;
  for (const auto& b : doc.at("algebra").at("basis")) mats.push_back(matrix_from_json(b));
  return Subalgebra::from_matrices(std::move(parent), std::move(mats),
                                   doc.at("name").get<std::string>(), tol);
}

}  // namespace gospace
