#include "gospace/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gospace/error.hpp"

namespace gospace {

void TolerancePolicy::validate() const {
  if (!(rel_rank_tol > 0.0 && rel_rank_tol < feas_tol && feas_tol < 1.0)) {
    throw ValidationError("tolerance policy requires 0 < rel_rank_tol < feas_tol < 1");
  }
  if (!(margin_factor >= 10.0)) {
    throw ValidationError("tolerance policy requires margin_factor >= 10");
  }
}

namespace {

// Thin SVD pieces of M. For tall inputs a Householder QR is taken first and
// the SVD runs on the square triangular factor.
struct Svd {
  Vector sigma;  // decreasing
  Matrix u;      // rows(M) x k, only filled when requested
  Matrix v;      // cols(M) x cols(M) (full)
};

struct Factors {
  Matrix u;
  Vector sigma;
  Matrix v;
};

// BDCSVD in Eigen 3.4 occasionally returns a wrong factorization for
// rank-deficient inputs, so the result is checked and Jacobi used instead.
Factors checked_svd(const Matrix& m, bool full) {
  const unsigned int flags = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                                  : (Eigen::ComputeThinU | Eigen::ComputeFullV);
  Factors f;
  {
    Eigen::BDCSVD<Matrix> svd(m, flags);
    f = {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  const Eigen::Index k = f.sigma.size();
  const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
  const double err = (m * f.v.leftCols(k) - f.u.leftCols(k) * f.sigma.asDiagonal()).norm();
  const double orth = (f.v.transpose() * f.v - Matrix::Identity(f.v.cols(), f.v.cols())).norm();
  if (err <= 1e-12 * scale * std::sqrt(static_cast<double>(m.cols())) + 1e-300 && orth <= 1e-10) return f;
  Eigen::JacobiSVD<Matrix> svd(m, flags);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Svd compute_svd(const Matrix& m, bool want_u) {
  Svd out;
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (rows == 0 || cols == 0) {
    out.sigma = Vector::Zero(0);
    out.u = Matrix::Zero(rows, 0);
    out.v = Matrix::Identity(cols, cols);
    return out;
  }
  if (rows > 2 * cols) {
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    Factors f = checked_svd(r, true);
    out.sigma = std::move(f.sigma);
    out.v = std::move(f.v);
    if (want_u) {
      Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
      out.u = q * f.u;
    }
    return out;
  }
  Factors f = checked_svd(m, false);
  out.sigma = std::move(f.sigma);
  out.v = std::move(f.v);
  if (want_u) out.u = std::move(f.u);
  return out;
}

std::size_t numerical_rank(const Vector& sigma, double rel_tol) {
  if (sigma.size() == 0) return 0;
  const double smax = sigma(0);
  if (!(smax > 0.0)) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > rel_tol * smax) ++r;
  }
  return r;
}

}  // namespace

Vector singular_values(const Matrix& m) { return compute_svd(m, false).sigma; }

LeastSquaresResult solve_least_squares(const Matrix& m, const Vector& b,
                                       const TolerancePolicy& tol) {
  if (m.rows() != b.size()) {
    throw DimensionError("solve_least_squares: M has " + std::to_string(m.rows()) +
                         " rows but b has length " + std::to_string(b.size()));
  }
  LeastSquaresResult out;
  out.x = Vector::Zero(m.cols());
  const double bnorm = b.norm();
  if (m.cols() == 0 || m.rows() == 0) {
    out.relative_residual = bnorm / std::max(bnorm, 1.0);
    return out;
  }

  // Solve through a thin SVD; tall systems are compressed by QR first.
  Matrix u;
  Vector sigma;
  Matrix v;
  Vector rhs;
  if (m.rows() > 2 * m.cols()) {
    Eigen::HouseholderQR<Matrix> qr(m);
    const Eigen::Index n = m.cols();
    Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    rhs = (qr.householderQ().transpose() * b).head(n);
    Factors f = checked_svd(r, true);
    u = std::move(f.u);
    sigma = std::move(f.sigma);
    v = std::move(f.v);
  } else {
    Factors f = checked_svd(m, false);
    u = std::move(f.u);
    sigma = std::move(f.sigma);
    v = std::move(f.v);
    rhs = b;
  }
  const std::size_t rank = numerical_rank(sigma, tol.rel_rank_tol);
  for (std::size_t i = 0; i < rank; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out.x += v.col(k) * (u.col(k).dot(rhs) / sigma(k));
  }
  out.rank = rank;
  out.relative_residual = (m * out.x - b).norm() / std::max(bnorm, 1.0);
  return out;
}

Matrix kernel_basis(const Matrix& m, const TolerancePolicy& tol) {
  const Svd svd = compute_svd(m, false);
  const auto rank = static_cast<Eigen::Index>(numerical_rank(svd.sigma, tol.rel_rank_tol));
  return svd.v.rightCols(m.cols() - rank);
}

Matrix kernel_basis(const Matrix& m, double scale, const TolerancePolicy& tol) {
  const Svd svd = compute_svd(m, false);
  const double smax = svd.sigma.size() > 0 ? svd.sigma(0) : 0.0;
  const double cutoff = tol.rel_rank_tol * std::max(smax, scale);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i) {
    if (svd.sigma(i) > cutoff) ++rank;
  }
  return svd.v.rightCols(m.cols() - rank);
}

Matrix range_basis(const Matrix& m, const TolerancePolicy& tol) {
  if (m.cols() == 0) return Matrix::Zero(m.rows(), 0);
  const Svd svd = compute_svd(m, true);
  const auto rank = static_cast<Eigen::Index>(numerical_rank(svd.sigma, tol.rel_rank_tol));
  return svd.u.leftCols(rank);
}

Matrix complement_basis(const Matrix& b, const TolerancePolicy& tol) {
  if (b.cols() == 0) return Matrix::Identity(b.rows(), b.rows());
  return kernel_basis(b.transpose(), tol);
}

SymmetricEigen symmetric_eigendecomposition(const Matrix& s, const TolerancePolicy& tol) {
  if (s.rows() != s.cols()) throw DimensionError("symmetric_eigendecomposition: not square");
  const double scale = std::max(s.norm(), 1.0);
  if ((s - s.transpose()).norm() > tol.feas_tol * scale) {
    throw ValidationError("symmetric_eigendecomposition: input is not symmetric");
  }
  // Entries far below rounding level can drive the QR iteration into
  // subnormal arithmetic, where it stalls; they carry no information.
  Matrix sym = 0.5 * (s + s.transpose());
  const double floor = 1e-20 * scale;
  sym = sym.unaryExpr([floor](double v) { return std::abs(v) < floor ? 0.0 : v; });
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw ComputationError("eigen solver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

std::vector<std::pair<std::size_t, std::size_t>> cluster_sorted(const Vector& values, double gap) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto n = static_cast<std::size_t>(values.size());
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || values(static_cast<Eigen::Index>(i)) - values(static_cast<Eigen::Index>(i - 1)) > gap) {
      if (i > start) out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

IncrementalLeastSquares::IncrementalLeastSquares(std::size_t unknowns)
    : unknowns_(unknowns),
      r_(Matrix::Zero(0, static_cast<Eigen::Index>(unknowns) + 1)),
      pending_(Matrix::Zero(std::max<Eigen::Index>(4 * (static_cast<Eigen::Index>(unknowns) + 1), 256),
                            static_cast<Eigen::Index>(unknowns) + 1)) {}

void IncrementalLeastSquares::add_rows(const Matrix& block, const Vector& rhs) {
  const auto cols = static_cast<Eigen::Index>(unknowns_);
  if (block.cols() != cols || block.rows() != rhs.size()) {
    throw DimensionError("IncrementalLeastSquares::add_rows: shape mismatch");
  }
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    if (static_cast<Eigen::Index>(pending_rows_) == pending_.rows()) fold();
    const auto row = static_cast<Eigen::Index>(pending_rows_++);
    pending_.row(row).head(cols) = block.row(i);
    pending_(row, cols) = rhs(i);
  }
  rows_ += static_cast<std::size_t>(block.rows());
  rhs_norm_sq_ += rhs.squaredNorm();
}

void IncrementalLeastSquares::fold() {
  if (pending_rows_ == 0) return;
  const Eigen::Index width = pending_.cols();
  const auto p = static_cast<Eigen::Index>(pending_rows_);
  Matrix stacked(r_.rows() + p, width);
  stacked << r_, pending_.topRows(p);
  Eigen::HouseholderQR<Matrix> qr(stacked);
  const Eigen::Index keep = std::min(stacked.rows(), width);
  r_ = qr.matrixQR().topRows(keep).triangularView<Eigen::Upper>();
  pending_rows_ = 0;
}

LeastSquaresResult IncrementalLeastSquares::solve(const TolerancePolicy& tol) const {
  auto self = *this;
  self.fold();
  const auto n = static_cast<Eigen::Index>(unknowns_);
  const Matrix r11 = self.r_.leftCols(n);
  const Vector rhs = self.r_.col(n);
  LeastSquaresResult out;
  out.x = Vector::Zero(n);
  double residual = rhs.norm();
  if (r11.rows() > 0 && n > 0) {
    const Factors svd = checked_svd(r11, false);
    const std::size_t rank = numerical_rank(svd.sigma, tol.rel_rank_tol);
    for (std::size_t i = 0; i < rank; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      out.x += svd.v.col(k) * (svd.u.col(k).dot(rhs) / svd.sigma(k));
    }
    out.rank = rank;
    residual = (r11 * out.x - rhs).norm();
  }
  out.relative_residual = residual / std::max(std::sqrt(rhs_norm_sq_), 1.0);
  return out;
}

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

Vector Rng::gaussian(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gospace
