#pragma once

// Orthogonal representations of a compact Lie algebra h on R^d and their
// splitting into irreducible submodules.
//
// A Representation carries rho(e_k) for a basis e_k of h that is orthonormal
// for an ad-invariant inner product, so every rho(e_k) is skew-symmetric and
// the Casimir -sum rho_k^2 commutes with the action.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gospace/builders.hpp"
#include "gospace/numerics.hpp"

namespace gospace {

enum class ModuleType { trivial, real, complex, quaternionic };
enum class SizeClass { trivial, adjoint, tiny, large };

std::string to_string(ModuleType t);
std::string to_string(SizeClass s);

class Representation {
 public:
  Representation() = default;
  /// ops[k] = rho(e_k) on R^d; adjoint[k] = ad(e_k) on h in the same basis.
  Representation(std::string name, std::vector<Matrix> ops, std::vector<Matrix> adjoint);

  /// The isotropy representation of h on m.
  static Representation isotropy(const HomogeneousSpace& space);
  /// The defining action of a matrix algebra on R^n.
  static Representation standard(const LieAlgebra& h);
  /// ad(h) acting on an ad(h)-invariant subspace of g (orthonormal g coordinates).
  static Representation restricted_adjoint(const Subalgebra& h, const Matrix& subspace);

  const std::string& name() const { return name_; }
  Eigen::Index dim() const { return ops_.empty() ? 0 : ops_.front().rows(); }
  std::size_t h_dim() const { return ops_.size(); }
  const std::vector<Matrix>& ops() const { return ops_; }
  const std::vector<Matrix>& adjoint() const { return adjoint_; }

  /// The action on an invariant subspace given by orthonormal columns.
  Representation restrict(const Matrix& basis) const;
  /// max_k |(I - QQ^T) rho_k Q|; zero iff span(Q) is invariant.
  double invariance_residual(const Matrix& basis) const;
  Matrix casimir() const;

 private:
  std::string name_;
  std::vector<Matrix> ops_;
  std::vector<Matrix> adjoint_;
};

/// Operators on the module commuting with every rho_k.
struct CommutantAlgebra {
  std::vector<Matrix> basis;
  std::vector<Matrix> symmetric;  // orthonormal basis of the symmetric part
  std::vector<Matrix> skew;       // orthonormal basis of the skew part
};

CommutantAlgebra commutant(const Representation& rep, const TolerancePolicy& tol = {});

/// Linear maps T: R^{d_a} -> R^{d_b} with T rho_a(e_k) = rho_b(e_k) T. Each
/// column of the result is a flattened (column-major) T.
Matrix intertwiners(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                    const TolerancePolicy& tol = {});

struct IrreducibleSubmodule {
  Matrix basis;  // orthonormal columns in module coordinates
  ModuleType type = ModuleType::real;
  SizeClass size_class = SizeClass::tiny;
  std::size_t generic_centralizer_dim = 0;
  std::size_t isomorphism_class = 0;
  double casimir = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(basis.cols()); }
};

struct IsomorphismClass {
  std::vector<std::size_t> members;
  Matrix isotypic_basis;  // span of all members
  /// False when the multiplicity is at least two: the split into members is
  /// then one choice among many.
  bool canonical = true;
};

struct IsotypicDecomposition {
  std::size_t module_dim = 0;
  std::uint64_t seed = 0;
  std::vector<IrreducibleSubmodule> submodules;
  std::vector<IsomorphismClass> classes;

  std::vector<std::size_t> dims() const;
  /// Concatenated bases of the listed submodules.
  Matrix span(const std::vector<std::size_t>& members) const;
};

IsotypicDecomposition decompose(const Representation& rep, std::uint64_t seed,
                                const TolerancePolicy& tol = {});
IsotypicDecomposition decompose(const HomogeneousSpace& space, std::uint64_t seed,
                                const TolerancePolicy& tol = {});

/// Real / complex / quaternionic from the skew commutant (dimension 0 / 1 / 3).
/// Throws ComputationError when the submodule is not irreducible.
ModuleType classify_type(const Representation& rep, const Matrix& submodule,
                         const TolerancePolicy& tol = {});

/// Minimum over `samples` random X of dim { Z in h : rho(Z) X = 0 }.
std::size_t generic_centralizer_dim(const Representation& rep, const Matrix& submodule,
                                    std::uint64_t seed, int samples = 10,
                                    const TolerancePolicy& tol = {});

/// trivial, then adjoint (equivariantly isomorphic to h), then large
/// (generic centralizer zero), otherwise tiny.
SizeClass classify_size(const Representation& rep, const Matrix& submodule, std::uint64_t seed,
                        const TolerancePolicy& tol = {});

/// An invertible T with T rho_a = rho_b T between two submodules, scaled so
/// that T^T T = I when the modules are irreducible; nullopt when none exists.
std::optional<Matrix> equivariant_isomorphism(const Representation& rep, const Matrix& sub_a,
                                              const Matrix& sub_b, const TolerancePolicy& tol = {});

nlohmann::json to_json(const IsotypicDecomposition& decomposition, bool include_bases = true);

}  // namespace gospace
