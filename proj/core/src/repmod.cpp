#include "gospace/repmod.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gospace/error.hpp"
#include "gospace/json_io.hpp"

namespace gospace {

namespace {

constexpr std::uint64_t kGeneratorSeed = 0x6a09e667f3bcc909ULL;
constexpr int kSplitAttempts = 8;

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix intertwiner_system(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  const Eigen::Index da = a.front().rows();
  const Eigen::Index db = b.front().rows();
  const Matrix ia = Matrix::Identity(da, da);
  const Matrix ib = Matrix::Identity(db, db);
  Matrix system(static_cast<Eigen::Index>(a.size()) * da * db, da * db);
  for (std::size_t k = 0; k < a.size(); ++k) {
    system.middleRows(static_cast<Eigen::Index>(k) * da * db, da * db) =
        kron(a[k].transpose(), ib) - kron(ia, b[k]);
  }
  return system;
}

Matrix reshape(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

double op_scale(const std::vector<Matrix>& ops) {
  double s = 0.0;
  for (const auto& o : ops) s = std::max(s, o.norm());
  return std::max(s, 1e-300);
}

}  // namespace

std::string to_string(ModuleType t) {
  switch (t) {
    case ModuleType::trivial: return "trivial";
    case ModuleType::real: return "real";
    case ModuleType::complex: return "complex";
    case ModuleType::quaternionic: return "quaternionic";
  }
  return "unknown";
}

std::string to_string(SizeClass s) {
  switch (s) {
    case SizeClass::trivial: return "trivial";
    case SizeClass::adjoint: return "adjoint";
    case SizeClass::tiny: return "tiny";
    case SizeClass::large: return "large";
  }
  return "unknown";
}

Representation::Representation(std::string name, std::vector<Matrix> ops, std::vector<Matrix> adjoint)
    : name_(std::move(name)), ops_(std::move(ops)), adjoint_(std::move(adjoint)) {
  if (ops_.empty()) throw ValidationError("Representation '" + name_ + "' has no operators");
  const Eigen::Index d = ops_.front().rows();
  for (const auto& o : ops_) {
    if (o.rows() != d || o.cols() != d) throw DimensionError("Representation: operators must be d x d");
  }
  if (!adjoint_.empty() && adjoint_.size() != ops_.size()) {
    throw DimensionError("Representation: adjoint matrices must match the operators");
  }
}

Representation Representation::isotropy(const HomogeneousSpace& space) {
  std::vector<Matrix> adjoint;
  for (std::size_t k = 0; k < space.dim_h(); ++k) adjoint.push_back(space.h().algebra().ad(k));
  return {"isotropy " + space.id(), space.h_action(), std::move(adjoint)};
}

Representation Representation::standard(const LieAlgebra& h) {
  std::vector<Matrix> adjoint;
  for (std::size_t k = 0; k < h.dim(); ++k) adjoint.push_back(h.ad(k));
  return {"standard " + h.name(), h.basis(), std::move(adjoint)};
}

Representation Representation::restricted_adjoint(const Subalgebra& h, const Matrix& subspace) {
  const LieAlgebra& g = h.parent();
  std::vector<Matrix> ops;
  std::vector<Matrix> adjoint;
  for (std::size_t k = 0; k < h.dim(); ++k) {
    ops.push_back(subspace.transpose() * g.ad_of(h.inclusion().col(static_cast<Eigen::Index>(k))) *
                  subspace);
    adjoint.push_back(h.algebra().ad(k));
  }
  Representation rep("ad " + h.name() + " on subspace of " + g.name(), std::move(ops), std::move(adjoint));
  double leak = 0.0;
  for (std::size_t k = 0; k < h.dim(); ++k) {
    const Matrix full = g.ad_of(h.inclusion().col(static_cast<Eigen::Index>(k))) * subspace;
    leak = std::max(leak, (full - subspace * (subspace.transpose() * full)).norm());
  }
  if (leak > 1e-8) throw ValidationError("restricted_adjoint: subspace is not ad(h)-invariant");
  return rep;
}

Representation Representation::restrict(const Matrix& basis) const {
  std::vector<Matrix> ops;
  ops.reserve(ops_.size());
  for (const auto& o : ops_) ops.push_back(basis.transpose() * o * basis);
  return {name_, std::move(ops), adjoint_};
}

double Representation::invariance_residual(const Matrix& basis) const {
  double worst = 0.0;
  for (const auto& o : ops_) {
    const Matrix img = o * basis;
    worst = std::max(worst, (img - basis * (basis.transpose() * img)).norm());
  }
  return worst;
}

Matrix Representation::casimir() const {
  Matrix c = Matrix::Zero(dim(), dim());
  for (const auto& o : ops_) c -= o * o;
  return c;
}

Matrix intertwiners(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                    const TolerancePolicy& tol) {
  if (a.size() != b.size() || a.empty()) throw DimensionError("intertwiners: operator lists differ");
  const Eigen::Index da = a.front().rows();
  const Eigen::Index db = b.front().rows();
  // A few random elements of h generate it; solve for those first and fall
  // back to the full system only if the result fails to commute with all.
  Rng rng(derive_seed(kGeneratorSeed, static_cast<std::uint64_t>(da * 1000 + db)));
  std::vector<Matrix> ga;
  std::vector<Matrix> gb;
  const std::size_t generators = std::min<std::size_t>(3, a.size());
  for (std::size_t g = 0; g < generators && a.size() > 3; ++g) {
    Matrix xa = Matrix::Zero(da, da);
    Matrix xb = Matrix::Zero(db, db);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double c = rng.normal();
      xa += c * a[k];
      xb += c * b[k];
    }
    ga.push_back(std::move(xa));
    gb.push_back(std::move(xb));
  }
  const double scale = std::max(op_scale(a), op_scale(b));
  // Both actions vanish up to rounding: every map intertwines.
  if (scale <= 1e-12) return Matrix::Identity(da * db, da * db);
  auto verified = [&](const Matrix& kernel) {
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
      const Matrix t = reshape(kernel.col(c), db, da);
      for (std::size_t k = 0; k < a.size(); ++k) {
        if ((t * a[k] - b[k] * t).norm() > 1e3 * tol.feas_tol * scale) return false;
      }
    }
    return true;
  };
  if (!ga.empty()) {
    Matrix kernel = kernel_basis(intertwiner_system(ga, gb), tol);
    if (verified(kernel)) return kernel;
  }
  return kernel_basis(intertwiner_system(a, b), tol);
}

CommutantAlgebra commutant(const Representation& rep, const TolerancePolicy& tol) {
  const Eigen::Index d = rep.dim();
  const Matrix kernel = intertwiners(rep.ops(), rep.ops(), tol);
  CommutantAlgebra out;
  Matrix sym(d * d, kernel.cols());
  Matrix skew(d * d, kernel.cols());
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    const Matrix t = reshape(kernel.col(c), d, d);
    out.basis.push_back(t);
    const Matrix s = 0.5 * (t + t.transpose());
    const Matrix k = 0.5 * (t - t.transpose());
    sym.col(c) = Eigen::Map<const Vector>(s.data(), d * d);
    skew.col(c) = Eigen::Map<const Vector>(k.data(), d * d);
  }
  // Parts of norm below the noise floor carry no information.
  TolerancePolicy loose = tol;
  loose.rel_rank_tol = std::max(tol.rel_rank_tol, 1e-9);
  auto basis_of = [&](const Matrix& flat) {
    std::vector<Matrix> out_list;
    if (flat.cols() == 0 || flat.norm() < 1e-9) return out_list;
    Matrix q = range_basis(flat, loose);
    // Drop directions that are pure noise relative to a unit-norm operator.
    for (Eigen::Index c = 0; c < q.cols(); ++c) out_list.push_back(reshape(q.col(c), d, d));
    return out_list;
  };
  out.symmetric = basis_of(sym);
  out.skew = basis_of(skew);
  if (out.symmetric.size() + out.skew.size() != out.basis.size()) {
    throw ComputationError("commutant: symmetric and skew parts do not add up");
  }
  return out;
}

std::vector<std::size_t> IsotypicDecomposition::dims() const {
  std::vector<std::size_t> out;
  for (const auto& s : submodules) out.push_back(s.dim());
  return out;
}

Matrix IsotypicDecomposition::span(const std::vector<std::size_t>& members) const {
  Eigen::Index cols = 0;
  for (auto m : members) cols += submodules.at(m).basis.cols();
  Matrix out(static_cast<Eigen::Index>(module_dim), cols);
  Eigen::Index off = 0;
  for (auto m : members) {
    out.middleCols(off, submodules[m].basis.cols()) = submodules[m].basis;
    off += submodules[m].basis.cols();
  }
  return out;
}

ModuleType classify_type(const Representation& rep, const Matrix& submodule, const TolerancePolicy& tol) {
  const CommutantAlgebra c = commutant(rep.restrict(submodule), tol);
  if (c.symmetric.size() != 1) {
    throw ComputationError("classify_type: submodule is reducible (symmetric commutant of dimension " +
                           std::to_string(c.symmetric.size()) + ")");
  }
  switch (c.skew.size()) {
    case 0: return ModuleType::real;
    case 1: return ModuleType::complex;
    case 3: return ModuleType::quaternionic;
    default: break;
  }
  throw ComputationError("classify_type: skew commutant of dimension " + std::to_string(c.skew.size()) +
                         " violates irreducibility");
}

std::size_t generic_centralizer_dim(const Representation& rep, const Matrix& submodule,
                                    std::uint64_t seed, int samples, const TolerancePolicy& tol) {
  Rng rng(seed);
  const auto k = static_cast<Eigen::Index>(rep.h_dim());
  std::size_t best = rep.h_dim();
  double scale = 0.0;
  for (const auto& o : rep.ops()) scale = std::max(scale, o.norm());
  for (int s = 0; s < samples; ++s) {
    const Vector x = submodule * rng.gaussian(submodule.cols());
    Matrix images(rep.dim(), k);
    for (Eigen::Index j = 0; j < k; ++j) images.col(j) = rep.ops()[static_cast<std::size_t>(j)] * x;
    best = std::min(best, static_cast<std::size_t>(kernel_basis(images, scale * x.norm(), tol).cols()));
  }
  return best;
}

namespace {

bool is_adjoint(const Representation& sub_rep, const TolerancePolicy& tol) {
  if (sub_rep.adjoint().empty() || static_cast<std::size_t>(sub_rep.dim()) != sub_rep.h_dim()) {
    return false;
  }
  return intertwiners(sub_rep.ops(), sub_rep.adjoint(), tol).cols() > 0;
}

bool is_trivial(const Representation& sub_rep) {
  double worst = 0.0;
  for (const auto& o : sub_rep.ops()) worst = std::max(worst, o.norm());
  return worst <= 1e-9;
}

}  // namespace

SizeClass classify_size(const Representation& rep, const Matrix& submodule, std::uint64_t seed,
                        const TolerancePolicy& tol) {
  const Representation sub = rep.restrict(submodule);
  if (is_trivial(sub)) return SizeClass::trivial;
  if (is_adjoint(sub, tol)) return SizeClass::adjoint;
  return generic_centralizer_dim(rep, submodule, seed, 10, tol) == 0 ? SizeClass::large : SizeClass::tiny;
}

std::optional<Matrix> equivariant_isomorphism(const Representation& rep, const Matrix& sub_a,
                                              const Matrix& sub_b, const TolerancePolicy& tol) {
  if (sub_a.cols() != sub_b.cols()) return std::nullopt;
  const Representation ra = rep.restrict(sub_a);
  const Representation rb = rep.restrict(sub_b);
  const Matrix kernel = intertwiners(ra.ops(), rb.ops(), tol);
  const Eigen::Index d = sub_a.cols();
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    Matrix t = reshape(kernel.col(c), d, d);
    const Vector sigma = singular_values(t);
    if (sigma(sigma.size() - 1) > 1e-6 * sigma(0)) {
      // For irreducible modules T^T T commutes with the action and is a multiple of I.
      t *= std::sqrt(static_cast<double>(d)) / t.norm();
      return t;
    }
  }
  return std::nullopt;
}

IsotypicDecomposition decompose(const Representation& rep, std::uint64_t seed, const TolerancePolicy& tol) {
  IsotypicDecomposition out;
  out.seed = seed;
  const Eigen::Index d = rep.dim();
  out.module_dim = static_cast<std::size_t>(d);
  if (d == 0) return out;

  Matrix stacked(static_cast<Eigen::Index>(rep.h_dim()) * d, d);
  for (std::size_t k = 0; k < rep.h_dim(); ++k) {
    stacked.middleRows(static_cast<Eigen::Index>(k) * d, d) = rep.ops()[k];
  }
  // An action that vanishes up to rounding is trivial; a purely relative
  // rank cutoff would read the noise as full rank.
  const Matrix trivial = op_scale(rep.ops()) <= 1e-12 ? Matrix(Matrix::Identity(d, d))
                                                      : kernel_basis(stacked, op_scale(rep.ops()), tol);
  const Matrix nontrivial = complement_basis(trivial, tol);

  std::vector<Matrix> pieces;
  Rng rng(derive_seed(seed, 1));

  std::function<void(const Matrix&, int)> split = [&](const Matrix& v, int depth) {
    const Representation sub = rep.restrict(v);
    const CommutantAlgebra com = commutant(sub, tol);
    if (com.symmetric.size() == 1) {
      pieces.push_back(v);
      return;
    }
    if (com.symmetric.empty() || depth > static_cast<int>(d)) {
      throw ComputationError("decompose: commutant of a block has no symmetric part");
    }
    for (int attempt = 0; attempt < kSplitAttempts; ++attempt) {
      Matrix s = Matrix::Zero(v.cols(), v.cols());
      for (const auto& b : com.symmetric) s += rng.normal() * b;
      const SymmetricEigen eig = symmetric_eigendecomposition(0.5 * (s + s.transpose()), tol);
      const double spread = eig.values.cwiseAbs().maxCoeff();
      const auto clusters = cluster_sorted(eig.values, 1e-6 * std::max(spread, 1e-300));
      if (clusters.size() < 2) continue;
      for (const auto& [b, e] : clusters) {
        split(v * eig.vectors.middleCols(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(e - b)),
              depth + 1);
      }
      return;
    }
    throw ComputationError("decompose: block of dimension " + std::to_string(v.cols()) +
                           " did not split after " + std::to_string(kSplitAttempts) +
                           " attempts (symmetric commutant of dimension " +
                           std::to_string(com.symmetric.size()) + ")");
  };

  if (nontrivial.cols() > 0) {
    const Representation rw = rep.restrict(nontrivial);
    const Matrix c = rw.casimir();
    bool commutes = true;
    for (const auto& o : rw.ops()) {
      if ((c * o - o * c).norm() > 1e-8 * std::max(1.0, c.norm() * o.norm())) commutes = false;
    }
    if (commutes) {
      const SymmetricEigen eig = symmetric_eigendecomposition(c, tol);
      const double scale = eig.values.cwiseAbs().maxCoeff();
      for (const auto& [b, e] : cluster_sorted(eig.values, 1e-6 * std::max(scale, 1e-300))) {
        split(nontrivial *
                  eig.vectors.middleCols(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(e - b)),
              0);
      }
    } else {
      split(nontrivial, 0);
    }
  }

  const Matrix cas = rep.casimir();
  std::vector<IrreducibleSubmodule> nontriv;
  for (auto& p : pieces) {
    IrreducibleSubmodule s;
    s.casimir = (p.transpose() * cas * p).trace() / static_cast<double>(p.cols());
    s.basis = std::move(p);
    nontriv.push_back(std::move(s));
  }
  std::stable_sort(nontriv.begin(), nontriv.end(), [](const auto& a, const auto& b) {
    if (a.dim() != b.dim()) return a.dim() > b.dim();
    return a.casimir < b.casimir - 1e-9 * std::max(1.0, std::abs(b.casimir));
  });
  for (auto& s : nontriv) out.submodules.push_back(std::move(s));
  for (Eigen::Index c = 0; c < trivial.cols(); ++c) {
    IrreducibleSubmodule s;
    s.basis = trivial.col(c);
    s.type = ModuleType::trivial;
    s.size_class = SizeClass::trivial;
    s.generic_centralizer_dim = rep.h_dim();
    out.submodules.push_back(std::move(s));
  }

  // Isomorphism classes by union-find over intertwiner existence.
  const std::size_t n = out.submodules.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::vector<Representation> restricted;
  for (const auto& s : out.submodules) restricted.push_back(rep.restrict(s.basis));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = out.submodules[i];
      const auto& b = out.submodules[j];
      if (find(i) == find(j) || a.dim() != b.dim()) continue;
      const bool ta = a.type == ModuleType::trivial;
      const bool tb = b.type == ModuleType::trivial;
      if (ta != tb) continue;
      if (std::abs(a.casimir - b.casimir) > 1e-6 * std::max(1.0, std::abs(a.casimir))) continue;
      if (ta || intertwiners(restricted[i].ops(), restricted[j].ops(), tol).cols() > 0) {
        parent[find(j)] = find(i);
      }
    }
  }
  std::vector<std::size_t> class_of_root(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (class_of_root[r] == n) {
      class_of_root[r] = out.classes.size();
      out.classes.emplace_back();
    }
    out.submodules[i].isomorphism_class = class_of_root[r];
    out.classes[class_of_root[r]].members.push_back(i);
  }
  for (auto& c : out.classes) {
    c.isotypic_basis = range_basis(out.span(c.members), tol);
    c.canonical = c.members.size() < 2;
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto& s = out.submodules[i];
    if (s.type == ModuleType::trivial) continue;
    // Members of a class share type and size; compute once per class.
    const auto& cls = out.classes[s.isomorphism_class];
    if (cls.members.front() != i) {
      const auto& first = out.submodules[cls.members.front()];
      s.type = first.type;
      s.size_class = first.size_class;
      s.generic_centralizer_dim = first.generic_centralizer_dim;
      continue;
    }
    s.type = classify_type(rep, s.basis, tol);
    s.generic_centralizer_dim = generic_centralizer_dim(rep, s.basis, derive_seed(seed, 100 + i), 10, tol);
    if (is_adjoint(restricted[i], tol)) {
      s.size_class = SizeClass::adjoint;
    } else {
      s.size_class = s.generic_centralizer_dim == 0 ? SizeClass::large : SizeClass::tiny;
    }
  }
  return out;
}

IsotypicDecomposition decompose(const HomogeneousSpace& space, std::uint64_t seed,
                                const TolerancePolicy& tol) {
  return decompose(Representation::isotropy(space), seed, tol);
}

nlohmann::json to_json(const IsotypicDecomposition& dec, bool include_bases) {
  nlohmann::json subs = nlohmann::json::array();
  for (std::size_t i = 0; i < dec.submodules.size(); ++i) {
    const auto& s = dec.submodules[i];
    nlohmann::json j = {{"index", i},
                        {"dim", s.dim()},
                        {"type", to_string(s.type)},
                        {"size_class", to_string(s.size_class)},
                        {"generic_centralizer_dim", s.generic_centralizer_dim},
                        {"isomorphism_class", s.isomorphism_class},
                        {"casimir", s.casimir}};
    if (include_bases) j["basis"] = matrix_to_json(s.basis);
    subs.push_back(std::move(j));
  }
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < dec.classes.size(); ++c) {
    const auto& cls = dec.classes[c];
    classes.push_back({{"id", c},
                       {"members", cls.members},
                       {"multiplicity", cls.members.size()},
                       {"isotypic_dim", cls.isotypic_basis.cols()},
                       {"canonical", cls.canonical}});
  }
  return {{"module_dim", dec.module_dim}, {"seed", dec.seed}, {"submodules", std::move(subs)},
          {"classes", std::move(classes)}};
}

}  // namespace gospace
