#pragma once

// Dense real linear algebra with one tolerance policy for every rank and
// feasibility decision made in the library.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace gospace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct TolerancePolicy {
  /// Singular values below rel_rank_tol * sigma_max count as zero.
  double rel_rank_tol = 1e-10;
  /// Relative residual at or below which a linear system is solvable.
  double feas_tol = 1e-8;
  /// A residual is a confident "unsolvable" once it exceeds feas_tol * margin_factor.
  double margin_factor = 1e4;

  /// Throws ValidationError unless 0 < rel_rank_tol < feas_tol < 1 and margin_factor >= 10.
  void validate() const;

  double infeasible_threshold() const { return feas_tol * margin_factor; }
};

struct LeastSquaresResult {
  Vector x;
  double relative_residual = 0.0;
  std::size_t rank = 0;
};

/// Minimum-norm least-squares solution of M x = b.
/// relative_residual = |Mx - b| / max(|b|, 1).
LeastSquaresResult solve_least_squares(const Matrix& m, const Vector& b,
                                       const TolerancePolicy& tol = {});

/// Orthonormal basis (as columns) of the numerical null space of M.
Matrix kernel_basis(const Matrix& m, const TolerancePolicy& tol = {});
/// Same, with singular values below rel_rank_tol * max(sigma_max, scale)
/// treated as zero. Use when M may vanish up to rounding and a natural
/// reference magnitude is known.
Matrix kernel_basis(const Matrix& m, double scale, const TolerancePolicy& tol = {});

/// Orthonormal basis (as columns) of the numerical column space of M.
Matrix range_basis(const Matrix& m, const TolerancePolicy& tol = {});

/// Orthonormal basis of the orthogonal complement of span(B) in R^{B.rows()}.
Matrix complement_basis(const Matrix& b, const TolerancePolicy& tol = {});

/// Singular values of M in decreasing order.
Vector singular_values(const Matrix& m);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, matching values
};

/// Throws ValidationError if S is not symmetric within feas_tol.
SymmetricEigen symmetric_eigendecomposition(const Matrix& s, const TolerancePolicy& tol = {});

/// Splits ascending eigenvalues into runs whose consecutive gaps are at most
/// `gap`. Returns [begin, end) index ranges.
std::vector<std::pair<std::size_t, std::size_t>> cluster_sorted(const Vector& values, double gap);

/// Least squares for tall systems that are too large to hold at once. Rows are
/// streamed in blocks and folded into the triangular factor of [M | b], so the
/// residual is read off the factor instead of being recomputed.
class IncrementalLeastSquares {
 public:
  explicit IncrementalLeastSquares(std::size_t unknowns);

  void add_rows(const Matrix& block, const Vector& rhs);
  std::size_t unknowns() const { return unknowns_; }
  std::size_t rows_seen() const { return rows_; }

  LeastSquaresResult solve(const TolerancePolicy& tol = {}) const;

 private:
  void fold();

  std::size_t unknowns_;
  std::size_t rows_ = 0;
  double rhs_norm_sq_ = 0.0;
  Matrix r_;        // (unknowns+1) x (unknowns+1) upper triangular, or fewer rows
  Matrix pending_;  // rows waiting to be folded
  std::size_t pending_rows_ = 0;
};

/// Seeded source of standard normal and uniform draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi);
  Vector gaussian(Eigen::Index n);
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Derives an independent seed for a named sub-task (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

/// Orthonormalizes the columns of B (drops dependent ones).
inline Matrix orthonormalize(const Matrix& b, const TolerancePolicy& tol = {}) {
  return range_basis(b, tol);
}

/// Orthogonal projector onto span of orthonormal columns Q.
inline Matrix projector(const Matrix& q) { return q * q.transpose(); }

}  // namespace gospace
