#pragma once

// Geodesic-orbit tests for an invariant metric <AX, Y> on m.
//
// For X in m the metric is GO along X when some Z in h solves
// [X + Z, AX] = 0, a linear system in Z. Sampling X decides the metric
// negatively with a concrete witness; a positive verdict is only "consistent".
// The metric is naturally reductive when Z can be chosen linear in X, which
// is an exact linear system in the map L: m -> h.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gospace/builders.hpp"
#include "gospace/numerics.hpp"
#include "gospace/repmod.hpp"

namespace gospace {

struct Eigenspace {
  Matrix basis;  // orthonormal columns in m coordinates
  double alpha = 1.0;
  /// Input groups merged into this eigenspace (several when their alphas coincide).
  std::vector<std::size_t> sources;
  /// Irreducible submodules when built from a decomposition, else empty.
  std::vector<std::size_t> submodules;

  std::size_t dim() const { return static_cast<std::size_t>(basis.cols()); }
};

/// A = sum alpha_i P_i with distinct alpha_i > 0 and m = ⊕ m_i orthogonal.
class MetricSpec {
 public:
  MetricSpec() = default;

  static MetricSpec normal(const HomogeneousSpace& space, double alpha = 1.0);
  /// Groups whose alphas agree to relative feas_tol are merged.
  static MetricSpec from_subspaces(const HomogeneousSpace& space, const std::vector<Matrix>& subspaces,
                                   const std::vector<double>& alphas, const TolerancePolicy& tol = {});
  static MetricSpec from_grouping(const HomogeneousSpace& space, const IsotypicDecomposition& decomposition,
                                  const std::vector<std::vector<std::size_t>>& groups,
                                  const std::vector<double>& alphas, const TolerancePolicy& tol = {});

  std::size_t dim_m() const { return static_cast<std::size_t>(a_.rows()); }
  std::size_t size() const { return spaces_.size(); }
  const Eigenspace& eigenspace(std::size_t i) const { return spaces_.at(i); }
  const std::vector<Eigenspace>& eigenspaces() const { return spaces_; }
  const Matrix& matrix() const { return a_; }
  double max_alpha() const;
  bool is_normal() const { return spaces_.size() == 1; }

  /// max_k |[A, rho_k]|; A defines an invariant metric only when this vanishes.
  double equivariance_residual() const { return equivariance_; }
  bool equivariant() const { return equivariant_; }

  MetricSpec scaled(double c) const;

 private:
  std::vector<Eigenspace> spaces_;
  Matrix a_;
  double equivariance_ = 0.0;
  bool equivariant_ = true;

  friend MetricSpec build_metric(const HomogeneousSpace&, std::vector<Eigenspace>, const TolerancePolicy&);
};

/// Scales the m_i component of X by alpha_i.
Vector apply_metric(const MetricSpec& a, const Vector& x);

enum class Feasibility { feasible, infeasible, inconclusive };
enum class Verdict { go_consistent, not_go, inconclusive };

std::string to_string(Feasibility f);
std::string to_string(Verdict v);

struct FeasibilityResult {
  Vector z;  // h coordinates (own basis) of the minimum-norm solution for the given X
  double residual = 0.0;
  Feasibility status = Feasibility::feasible;
};

/// Precomputed brackets for repeated GO tests on one space and metric.
///
/// Residuals are scale free: X is normalized to unit length and A to largest
/// eigenvalue one before solving, and the residual is relative to
/// max(|[AX, X]|, 1). The returned Z belongs to the unnormalized X.
class GOSolver {
 public:
  GOSolver(const HomogeneousSpace& space, const MetricSpec& metric, const TolerancePolicy& tol = {});

  FeasibilityResult solve(const Vector& x) const;
  const TolerancePolicy& tolerance() const { return tol_; }

 private:
  const HomogeneousSpace* space_;
  Matrix a_;  // normalized metric
  double scale_ = 1.0;
  std::vector<Matrix> ad_h_;  // ad(h_k) on g
  TolerancePolicy tol_;
};

FeasibilityResult go_feasible(const HomogeneousSpace& space, const MetricSpec& metric, const Vector& x,
                              const TolerancePolicy& tol = {});

struct Witness {
  Vector x;  // m coordinates
  Vector z;  // h coordinates
  double residual = 0.0;
  std::string origin;  // "gaussian", "pair i,j" or "basis k"
};

struct GOReport {
  std::string space;
  std::uint64_t seed = 0;
  TolerancePolicy tolerance;
  std::size_t requested_samples = 0;
  std::size_t total = 0;
  std::size_t feasible = 0;
  std::size_t infeasible = 0;
  std::size_t inconclusive = 0;
  double worst_feasible_residual = 0.0;
  double max_residual = 0.0;
  double median_residual = 0.0;
  Verdict verdict = Verdict::go_consistent;
  /// Sample with the largest residual; present for not-GO and inconclusive verdicts.
  std::optional<Witness> certificate;
  /// A few feasible (X, Z) pairs for audit.
  std::vector<Witness> audit;
};

/// Gaussian samples, random sums from every pair of eigenspaces and the m
/// basis vectors. Requires n_samples >= 100.
GOReport check_go(const HomogeneousSpace& space, const MetricSpec& metric, std::size_t n_samples,
                  std::uint64_t seed, const TolerancePolicy& tol = {});

struct BracketReport {
  /// max |component of [m_i, m_j] in m outside m_i ⊕ m_j| over i != j and basis pairs.
  double cross_residual = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  /// max |[m_i, m_j]| over pairs of distinct large eigenspaces.
  double large_residual = 0.0;
  /// max |[t_i, t_j]| over trivial parts of distinct eigenspaces.
  double trivial_residual = 0.0;
  std::vector<bool> large;
  std::vector<std::size_t> trivial_dims;
  bool passed = true;
};

BracketReport bracket_structure_check(const HomogeneousSpace& space, const MetricSpec& metric,
                                      std::uint64_t seed = 0, const TolerancePolicy& tol = {});

struct LinearGraphOptions {
  /// Restrict L to h-equivariant maps when A is equivariant. This loses no
  /// solutions: averaging any solution over H gives an equivariant one.
  bool equivariant_reduction = true;
  int heldout_samples = 50;
};

struct LinearGraphCertificate {
  bool accepted = false;
  Matrix l;  // dim h x dim m, h coordinates of L e_a
  double system_residual = 0.0;
  double heldout_residual = 0.0;
  std::size_t unknowns = 0;
  std::size_t equations = 0;
  bool reduced = false;
};

LinearGraphCertificate linear_graph_fit(const HomogeneousSpace& space, const MetricSpec& metric,
                                        std::uint64_t seed = 0, const TolerancePolicy& tol = {},
                                        const LinearGraphOptions& options = {});

nlohmann::json to_json(const MetricSpec& metric, bool include_bases = false);
nlohmann::json to_json(const GOReport& report);
nlohmann::json to_json(const BracketReport& report);
nlohmann::json to_json(const LinearGraphCertificate& cert);

}  // namespace gospace
