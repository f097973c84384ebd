#pragma once

// Naturally reductive metrics on G/H with H simple.
//
// g splits into simple ideals g_1, ..., g_N ordered so that h projects
// trivially onto the first N0, injectively but not onto the next N1 - N0, and
// bijectively onto the rest. Each ideal carries <.,.>_i, minus its Killing
// form rescaled so that it restricts to minus the Killing form of h on the
// projected copy of h (trivial ideals keep minus the Killing form).
//
// Two constructions are supported:
//   (a) p = the sum of all ideals but one bijective g_j, with sum beta_i <.,.>_i;
//   (b) p = the Q-orthogonal complement of h for Q = sum gamma_i <.,.>_i.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gospace/builders.hpp"
#include "gospace/gocheck.hpp"
#include "gospace/numerics.hpp"

namespace gospace {

enum class ProjectionKind { trivial, injective, bijective };
std::string to_string(ProjectionKind k);

struct Ideal {
  Matrix basis;  // orthonormal g coordinates
  ProjectionKind kind = ProjectionKind::trivial;
  /// <.,.>_i = scale * (dot product of g coordinates) on g_i.
  double scale = 1.0;
  /// Deviation of the Gram matrix of the projected h basis from a multiple of I.
  double normalization_residual = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(basis.cols()); }
  Matrix projector() const { return basis * basis.transpose(); }
};

struct IdealDecomposition {
  std::shared_ptr<const HomogeneousSpace> space;
  std::vector<Ideal> ideals;
  std::size_t n0 = 0;  // trivial projections
  std::size_t n1 = 0;  // trivial or injective-not-surjective projections
  /// max |[g_i, g_j]| over i != j.
  double bracket_residual = 0.0;

  std::size_t size() const { return ideals.size(); }
  /// sum coefficients[i] * scale_i * P_i in g coordinates.
  Matrix form(const std::vector<double>& coefficients) const;
};

/// Throws ValidationError when g is not semisimple or h is not simple.
IdealDecomposition decompose_ideals(const HomogeneousSpace& space, std::uint64_t seed = 0,
                                    const TolerancePolicy& tol = {});

enum class Construction { ideal_complement, q_complement };
std::string to_string(Construction c);

struct NatRedMetric {
  Construction construction = Construction::q_complement;
  std::shared_ptr<const IdealDecomposition> ideals;
  std::vector<double> coefficients;  // gamma (case b) or beta with 0 at j (case a)
  std::size_t j = 0;                 // dropped ideal, case (a) only
  Matrix q;                          // the invariant form on g (case a: zero on g_j)
  Matrix p;                          // orthonormal g coordinates of the complement
  Matrix gram;                       // the inner product on p in that basis
  bool analytic_admissible = false;
  double gram_min_eigenvalue = 0.0;
  bool positive_definite = false;
  bool accepted = false;
  std::string diagnostic;
};

/// Throws ValidationError when j is not a bijective index, fewer than two
/// bijective ideals exist, or some beta_i (i != j) is not positive.
/// `betas` has one entry per ideal; the entry at j is ignored.
NatRedMetric natred_case_a(const IdealDecomposition& ideals, std::size_t j, const std::vector<double>& betas,
                           const TolerancePolicy& tol = {});

/// Rejected (accepted = false, with a diagnostic) unless the sign condition
/// holds and Q is positive definite on p; throws on zero or non-finite gamma.
NatRedMetric natred_case_b(const IdealDecomposition& ideals, const std::vector<double>& gammas,
                           const TolerancePolicy& tol = {});

/// (i) all gamma_i > 0, or (ii) exactly one gamma_j < 0, g_j bijective and the
/// sum of gamma_i over the non-trivial ideals negative.
bool analytically_admissible(const IdealDecomposition& ideals, const std::vector<double>& gammas);

struct KostantReport {
  double orthogonality_residual = 0.0;  // |Q(p, h)| (case b)
  double restriction_residual = 0.0;    // |Q|_p - (.,.)|
  bool passed = false;
};

KostantReport check_kostant(const NatRedMetric& metric, const TolerancePolicy& tol = {});
/// The same check with Q replaced by an arbitrary form on g.
KostantReport check_kostant(const NatRedMetric& metric, const Matrix& q, const TolerancePolicy& tol = {});

/// max over basis triples of |([e_a, e_b]_p, e_c) + ([e_c, e_b]_p, e_a)| / max(1, |gram|),
/// where [.,.]_p is the component in p along h.
double natred_identity_residual(const LieAlgebra& g, const Matrix& p, const Matrix& h, const Matrix& gram);
double check_natred_identity(const NatRedMetric& metric);

/// The metric endomorphism on the orthogonal complement m of h that the
/// inner product on p induces through g/h. Eigenvalues are clustered with
/// relative gap 1e-7.
MetricSpec to_metric_spec(const NatRedMetric& metric, const TolerancePolicy& tol = {});
/// The same endomorphism as a matrix in m coordinates.
Matrix induced_metric_matrix(const NatRedMetric& metric);

nlohmann::json to_json(const IdealDecomposition& ideals);
nlohmann::json to_json(const NatRedMetric& metric, bool include_bases = false);
nlohmann::json to_json(const KostantReport& report);

}  // namespace gospace
