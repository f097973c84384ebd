#include "gospace/builders.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "gospace/error.hpp"

namespace gospace {

namespace {

using cd = std::complex<double>;

constexpr int kTriples[7][3] = {{1, 2, 4}, {2, 3, 5}, {3, 4, 6}, {4, 5, 7},
                                {5, 6, 1}, {6, 7, 2}, {7, 1, 3}};

LieAlgebra auto_normalized(const std::string& name, const std::vector<Matrix>& mats) {
  const LieAlgebra raw = LieAlgebra::from_matrices(name, mats, Normalization::none);
  return LieAlgebra::from_matrices(
      name, mats, raw.killing_positive_definite() ? Normalization::killing : Normalization::frobenius);
}

void require_range(const char* what, int n, int lo, int hi) {
  if (n < lo || n > hi) {
    throw ValidationError(std::string(what) + "(" + std::to_string(n) + ") outside supported range " +
                          std::to_string(lo) + ".." + std::to_string(hi));
  }
}

Matrix identity_span(const LieAlgebra& g) {
  const auto d = static_cast<Eigen::Index>(g.dim());
  return Matrix::Identity(d, d);
}

std::vector<Matrix> pad_all(const std::vector<Matrix>& xs, Eigen::Index n, Eigen::Index offset = 0) {
  std::vector<Matrix> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(pad(x, n, offset));
  return out;
}

std::vector<Matrix> g2_derivations() {
  const auto& oct = OctonionTable::standard();
  // Unknown D acts on e1..e7; column (r, c) of the system is the defect of
  // the unit operator E_rc, evaluated on every ordered basis pair.
  Matrix system = Matrix::Zero(49 * 8, 49);
  for (int r = 1; r <= 7; ++r) {
    for (int c = 1; c <= 7; ++c) {
      Matrix d = Matrix::Zero(8, 8);
      d(r, c) = 1.0;
      const int unknown = (r - 1) * 7 + (c - 1);
      for (int i = 1; i <= 7; ++i) {
        for (int j = 1; j <= 7; ++j) {
          const Vector ei = Vector::Unit(8, i);
          const Vector ej = Vector::Unit(8, j);
          const Vector defect =
              d * oct.multiply(ei, ej) - oct.multiply(d * ei, ej) - oct.multiply(ei, d * ej);
          system.block(((i - 1) * 7 + (j - 1)) * 8, unknown, 8, 1) = defect;
        }
      }
    }
  }
  const Matrix kernel = kernel_basis(system);
  if (kernel.cols() != 14) {
    throw ConstructionError("g2: derivation system has kernel of dimension " +
                            std::to_string(kernel.cols()) + ", expected 14");
  }
  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
    Matrix d(7, 7);
    for (int r = 0; r < 7; ++r) {
      for (int c = 0; c < 7; ++c) d(r, c) = kernel(r * 7 + c, k);
    }
    out.push_back(d);
  }
  return out;
}

std::vector<Matrix> spin7_products() {
  const auto& oct = OctonionTable::standard();
  std::vector<Matrix> gamma;
  for (int i = 1; i <= 7; ++i) gamma.push_back(oct.left_multiplication(i));
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      const Matrix ac = gamma[i] * gamma[j] + gamma[j] * gamma[i];
      const Matrix expected = i == j ? Matrix(-2.0 * Matrix::Identity(8, 8)) : Matrix::Zero(8, 8);
      if ((ac - expected).cwiseAbs().maxCoeff() != 0.0) {
        throw ConstructionError("spin(7): gamma matrices " + std::to_string(i + 1) + ", " +
                                std::to_string(j + 1) + " fail the Clifford relation");
      }
    }
  }
  std::vector<Matrix> out;
  for (int i = 0; i < 7; ++i) {
    for (int j = i + 1; j < 7; ++j) out.push_back(gamma[i] * gamma[j]);
  }
  return out;
}

Matrix block_diag(const std::vector<Matrix>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  Matrix out = Matrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Octonions

OctonionTable::OctonionTable() {
  auto set = [this](int i, int j, int k, double v) { c_[(i * 8 + j) * 8 + k] = v; };
  set(0, 0, 0, 1.0);
  for (int i = 1; i < 8; ++i) {
    set(0, i, i, 1.0);
    set(i, 0, i, 1.0);
    set(i, i, 0, -1.0);
  }
  for (const auto& t : kTriples) {
    for (int r = 0; r < 3; ++r) {
      const int a = t[r];
      const int b = t[(r + 1) % 3];
      const int c = t[(r + 2) % 3];
      set(a, b, c, 1.0);
      set(b, a, c, -1.0);
    }
  }
}

const OctonionTable& OctonionTable::standard() {
  static const OctonionTable table;
  return table;
}

Vector OctonionTable::multiply(const Vector& x, const Vector& y) const {
  if (x.size() != 8 || y.size() != 8) throw DimensionError("octonion product needs 8-vectors");
  Vector z = Vector::Zero(8);
  for (int i = 0; i < 8; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < 8; ++j) {
      if (y(j) == 0.0) continue;
      for (int k = 0; k < 8; ++k) z(k) += (*this)(i, j, k) * x(i) * y(j);
    }
  }
  return z;
}

Matrix OctonionTable::left_multiplication(int i) const {
  Matrix l(8, 8);
  for (int j = 0; j < 8; ++j) {
    for (int k = 0; k < 8; ++k) l(k, j) = (*this)(i, j, k);
  }
  return l;
}

double OctonionTable::alternativity_residual() const {
  double worst = 0.0;
  for (int a = 0; a < 8; ++a) {
    for (int c = 0; c < 8; ++c) {
      const Vector x = Vector::Unit(8, a) + Vector::Unit(8, c);
      const Vector xx = multiply(x, x);
      for (int b = 0; b < 8; ++b) {
        const Vector y = Vector::Unit(8, b);
        worst = std::max(worst, (multiply(x, multiply(x, y)) - multiply(xx, y)).norm());
        worst = std::max(worst, (multiply(multiply(y, x), x) - multiply(y, xx)).norm());
      }
    }
  }
  return worst;
}

double OctonionTable::norm_residual(std::uint64_t seed, int samples) const {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector x = rng.gaussian(8);
    const Vector y = rng.gaussian(8);
    worst = std::max(worst, std::abs(multiply(x, y).norm() - x.norm() * y.norm()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Matrix helpers and classical algebras

Matrix realify(const ComplexMatrix& x) {
  const Eigen::Index n = x.rows();
  Matrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = x.real();
  out.topRightCorner(n, n) = -x.imag();
  out.bottomLeftCorner(n, n) = x.imag();
  out.bottomRightCorner(n, n) = x.real();
  return out;
}

Matrix pad(const Matrix& x, Eigen::Index n, Eigen::Index offset) {
  if (x.rows() + offset > n) throw DimensionError("pad: block does not fit");
  Matrix out = Matrix::Zero(n, n);
  out.block(offset, offset, x.rows(), x.cols()) = x;
  return out;
}

ComplexMatrix pad(const ComplexMatrix& x, Eigen::Index n, Eigen::Index offset) {
  if (x.rows() + offset > n) throw DimensionError("pad: block does not fit");
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  out.block(offset, offset, x.rows(), x.cols()) = x;
  return out;
}

std::vector<ComplexMatrix> complex_u_basis(int n) {
  std::vector<ComplexMatrix> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      ComplexMatrix a = ComplexMatrix::Zero(n, n);
      a(i, j) = 1.0;
      a(j, i) = -1.0;
      out.push_back(a);
      ComplexMatrix b = ComplexMatrix::Zero(n, n);
      b(i, j) = cd(0.0, 1.0);
      b(j, i) = cd(0.0, 1.0);
      out.push_back(b);
    }
  }
  for (int i = 0; i < n; ++i) {
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    d(i, i) = cd(0.0, 1.0);
    out.push_back(d);
  }
  return out;
}

std::vector<ComplexMatrix> complex_su_basis(int n) {
  std::vector<ComplexMatrix> out;
  for (const auto& x : complex_u_basis(n)) {
    if (x.diagonal().cwiseAbs().sum() == 0.0) out.push_back(x);
  }
  for (int i = 0; i + 1 < n; ++i) {
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    d(i, i) = cd(0.0, 1.0);
    d(i + 1, i + 1) = cd(0.0, -1.0);
    out.push_back(d);
  }
  return out;
}

std::vector<ComplexMatrix> complex_sp_basis(int n) {
  const int m = 2 * n;
  ComplexMatrix j = ComplexMatrix::Zero(m, m);
  j.topRightCorner(n, n) = -ComplexMatrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = ComplexMatrix::Identity(n, n);
  const auto u = complex_u_basis(m);
  Matrix system(2 * m * m, static_cast<Eigen::Index>(u.size()));
  for (std::size_t k = 0; k < u.size(); ++k) {
    const ComplexMatrix f = u[k].transpose() * j + j * u[k];
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) {
        system(r * m + c, static_cast<Eigen::Index>(k)) = f(r, c).real();
        system(m * m + r * m + c, static_cast<Eigen::Index>(k)) = f(r, c).imag();
      }
    }
  }
  const Matrix kernel = kernel_basis(system);
  if (kernel.cols() != n * (2 * n + 1)) {
    throw ConstructionError("sp(" + std::to_string(n) + "): constraint kernel has wrong dimension");
  }
  std::vector<ComplexMatrix> out;
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    ComplexMatrix x = ComplexMatrix::Zero(m, m);
    for (std::size_t k = 0; k < u.size(); ++k) x += kernel(static_cast<Eigen::Index>(k), c) * u[k];
    out.push_back(x);
  }
  return out;
}

std::vector<Matrix> so_basis(int n) {
  std::vector<Matrix> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = -1.0;
      out.push_back(e);
    }
  }
  return out;
}

std::vector<Matrix> realify_all(const std::vector<ComplexMatrix>& xs) {
  std::vector<Matrix> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(realify(x));
  return out;
}

LieAlgebra build_so(int n) {
  require_range("so", n, 2, 12);
  return auto_normalized("so(" + std::to_string(n) + ")", so_basis(n));
}

LieAlgebra build_su(int n) {
  require_range("su", n, 2, 7);
  return auto_normalized("su(" + std::to_string(n) + ")", realify_all(complex_su_basis(n)));
}

LieAlgebra build_sp(int n) {
  require_range("sp", n, 1, 3);
  return auto_normalized("sp(" + std::to_string(n) + ")", realify_all(complex_sp_basis(n)));
}

LieAlgebra build_u(int n) {
  require_range("u", n, 1, 7);
  return LieAlgebra::from_matrices("u(" + std::to_string(n) + ")", realify_all(complex_u_basis(n)),
                                   Normalization::frobenius);
}

Subalgebra build_g2(const LieAlgebraPtr& so7) {
  if (so7->ambient_dim() != 7) throw ValidationError("build_g2: parent must act on R^7");
  return Subalgebra::from_matrices(so7, g2_derivations(), "g2");
}

Subalgebra build_g2() { return build_g2(std::make_shared<const LieAlgebra>(build_so(7))); }

Subalgebra build_spin7_in_so8(const LieAlgebraPtr& so8) {
  if (so8->ambient_dim() != 8) throw ValidationError("build_spin7_in_so8: parent must act on R^8");
  Subalgebra out = Subalgebra::from_matrices(so8, spin7_products(), "spin(7)");
  if (out.dim() != 21) throw ConstructionError("spin(7): span of gamma products is not 21-dimensional");
  return out;
}

Subalgebra build_spin7_in_so8() {
  return build_spin7_in_so8(std::make_shared<const LieAlgebra>(build_so(8)));
}

LieAlgebra build_spin9() {
  const auto& oct = OctonionTable::standard();
  std::vector<Matrix> s;
  for (int a = 1; a <= 7; ++a) {
    const Matrix g = oct.left_multiplication(a);
    Matrix m = Matrix::Zero(16, 16);
    m.topRightCorner(8, 8) = g;
    m.bottomLeftCorner(8, 8) = -g;
    s.push_back(m);
  }
  Matrix s8 = Matrix::Zero(16, 16);
  s8.topRightCorner(8, 8) = Matrix::Identity(8, 8);
  s8.bottomLeftCorner(8, 8) = Matrix::Identity(8, 8);
  s.push_back(s8);
  Matrix s9 = Matrix::Identity(16, 16);
  s9.bottomRightCorner(8, 8) *= -1.0;
  s.push_back(s9);
  for (std::size_t a = 0; a < s.size(); ++a) {
    for (std::size_t b = 0; b < s.size(); ++b) {
      const Matrix ac = s[a] * s[b] + s[b] * s[a];
      const Matrix expected = a == b ? Matrix(2.0 * Matrix::Identity(16, 16)) : Matrix::Zero(16, 16);
      if ((ac - expected).cwiseAbs().maxCoeff() != 0.0) {
        throw ConstructionError("spin(9): Clifford generators do not anticommute");
      }
    }
  }
  std::vector<Matrix> products;
  for (std::size_t a = 0; a < s.size(); ++a) {
    for (std::size_t b = a + 1; b < s.size(); ++b) products.push_back(s[a] * s[b]);
  }
  LieAlgebra out = LieAlgebra::from_matrices("spin(9)", products, Normalization::killing);
  if (out.dim() != 36) throw ConstructionError("spin(9): wrong dimension");
  return out;
}

Subalgebra constrained_subalgebra(const LieAlgebraPtr& parent, const Matrix& within,
                                  const std::function<Matrix(const Matrix&)>& f, std::string name,
                                  const TolerancePolicy& tol) {
  Matrix system;
  for (Eigen::Index k = 0; k < within.cols(); ++k) {
    const Matrix v = f(parent->to_matrix(within.col(k)));
    if (k == 0) system = Matrix::Zero(v.size(), within.cols());
    system.col(k) = Eigen::Map<const Vector>(v.data(), v.size());
  }
  const Matrix kernel = kernel_basis(system, tol);
  if (kernel.cols() == 0) throw ConstructionError("constrained subalgebra '" + name + "' is zero");
  return Subalgebra::from_parent_span(parent, within * kernel, std::move(name), tol);
}

LieAlgebra direct_sum(const std::string& name, const std::vector<const LieAlgebra*>& parts) {
  Eigen::Index n = 0;
  for (const auto* p : parts) n += p->ambient_dim();
  std::vector<Matrix> basis;
  Eigen::Index off = 0;
  for (const auto* p : parts) {
    for (const auto& b : p->basis()) basis.push_back(pad(b, n, off));
    off += p->ambient_dim();
  }
  return LieAlgebra::from_matrices(name, std::move(basis), Normalization::killing);
}

// ---------------------------------------------------------------------------
// Chains and spaces

EmbeddingChain::EmbeddingChain(std::string id, LieAlgebraPtr top, std::vector<Subalgebra> levels,
                               const TolerancePolicy& tol)
    : id_(std::move(id)), top_(std::move(top)), levels_(std::move(levels)) {
  if (levels_.empty()) throw ValidationError("EmbeddingChain needs at least one proper level");
  for (const auto& l : levels_) {
    if (l.parent_ptr() != top_) {
      throw ValidationError("EmbeddingChain: level '" + l.name() + "' is not built inside the top");
    }
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const LieAlgebra& lower = levels_[i].algebra();
    if (i + 1 == levels_.size()) {
      step_.push_back(levels_[i].inclusion());
      continue;
    }
    const LieAlgebra& upper = levels_[i + 1].algebra();
    Matrix s(static_cast<Eigen::Index>(upper.dim()), static_cast<Eigen::Index>(lower.dim()));
    for (std::size_t k = 0; k < lower.dim(); ++k) {
      double residual = 0.0;
      s.col(static_cast<Eigen::Index>(k)) = upper.coordinates(lower.basis()[k], &residual);
      if (residual > tol.feas_tol) {
        throw ConstructionError("EmbeddingChain '" + id_ + "': " + lower.name() + " is not inside " +
                                upper.name());
      }
    }
    step_.push_back(s);
  }
  for (std::size_t i = 0; i < step_.size(); ++i) {
    const LieAlgebra& lower = levels_[i].algebra();
    const LieAlgebra& upper = i + 1 == levels_.size() ? *top_ : levels_[i + 1].algebra();
    const Matrix& s = step_[i];
    for (std::size_t a = 0; a < lower.dim(); ++a) {
      for (std::size_t b = a + 1; b < lower.dim(); ++b) {
        const Vector lhs = s * lower.ad(a).col(static_cast<Eigen::Index>(b));
        const Vector rhs = upper.bracket(s.col(static_cast<Eigen::Index>(a)),
                                         s.col(static_cast<Eigen::Index>(b)));
        hom_residual_ = std::max(hom_residual_, (lhs - rhs).norm());
      }
    }
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    comp_residual_ = std::max(
        comp_residual_, (composite(i, levels_.size()) - levels_[i].inclusion()).cwiseAbs().maxCoeff());
  }
  if (hom_residual_ > tol.feas_tol || comp_residual_ > tol.feas_tol) {
    throw ConstructionError("EmbeddingChain '" + id_ + "': inclusion checks failed");
  }
}

std::string EmbeddingChain::level_name(std::size_t i) const {
  return i < levels_.size() ? levels_.at(i).name() : top_->name();
}

Matrix EmbeddingChain::level_basis(std::size_t i) const {
  if (i < levels_.size()) return levels_[i].image_basis();
  if (i == levels_.size()) return identity_span(*top_);
  throw DimensionError("EmbeddingChain::level_basis: index out of range");
}

Matrix EmbeddingChain::composite(std::size_t i, std::size_t j) const {
  if (!(i < j && j <= levels_.size())) throw DimensionError("EmbeddingChain::composite: bad range");
  Matrix out = step_[i];
  for (std::size_t k = i + 1; k < j; ++k) out = step_[k] * out;
  return out;
}

HomogeneousSpace::HomogeneousSpace(std::string id, LieAlgebraPtr g, Subalgebra h,
                                   const TolerancePolicy& tol)
    : id_(std::move(id)), g_(std::move(g)), h_(std::move(h)) {
  init(tol);
}

HomogeneousSpace::HomogeneousSpace(std::string id, EmbeddingChain chain, const TolerancePolicy& tol)
    : id_(std::move(id)), g_(chain.top_ptr()), h_(chain.bottom()) {
  chain_ = std::make_shared<const EmbeddingChain>(std::move(chain));
  init(tol);
}

void HomogeneousSpace::init(const TolerancePolicy& tol) {
  if (h_.parent_ptr() != g_) throw ValidationError("HomogeneousSpace: h is not a subalgebra of g");
  const auto d = static_cast<Eigen::Index>(g_->dim());
  if ((g_->killing_gram() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e3 * tol.feas_tol) {
    throw ValidationError("HomogeneousSpace: g must be Killing-normalized");
  }
  if (h_.dim() >= g_->dim()) throw ValidationError("HomogeneousSpace: h must be a proper subalgebra");
  m_ = complement_basis(h_.image_basis(), tol);
  const Matrix hproj = projector(h_.image_basis());
  rho_.clear();
  reductivity_ = 0.0;
  for (Eigen::Index k = 0; k < h_.inclusion().cols(); ++k) {
    const Matrix adm = g_->ad_of(h_.inclusion().col(k)) * m_;
    reductivity_ = std::max(reductivity_, (hproj * adm).cwiseAbs().maxCoeff());
    rho_.push_back(m_.transpose() * adm);
  }
  if (reductivity_ > tol.feas_tol) throw ConstructionError("HomogeneousSpace: [h, m] is not inside m");
}

Matrix HomogeneousSpace::subspace_in_m(const Matrix& g_basis) const {
  return range_basis(m_.transpose() * g_basis);
}

// ---------------------------------------------------------------------------
// Space registry

namespace {

using Params = std::map<std::string, int>;

struct Entry {
  std::string family;
  std::string name;
  std::string description;
  std::vector<Params> combos;  // first entry is the default
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"table1", "row1", "Spin(7) ⊂ SO(8) ⊂ SO(9)", {{}}},
      {"table1", "row2", "Spin(7) ⊂ SO(8) ⊂ SO(10)", {{}}},
      {"table1", "row3", "Spin(7) ⊂ SO(8) ⊂ SO(11)", {{}}},
      {"table1",
       "row5",
       "SU(n) ⊂ S(U(n) x U(p)) ⊂ SU(n+p)",
       {{{"n", 2}, {"p", 1}}, {{"n", 3}, {"p", 2}}, {{"n", 4}, {"p", 3}}}},
      {"table1", "row6", "SU(n) ⊂ U(n) ⊂ SO(2n) ⊂ SO(2n+1)", {{{"n", 3}}, {{"n", 4}}, {{"n", 5}}}},
      {"table1", "row7", "SU(2n+1) ⊂ U(2n+1) ⊂ SO(4n+2)", {{{"n", 2}}}},
      {"table1", "row8", "Sp(n) ⊂ Sp(n) x Sp(1) ⊂ Sp(n+1)", {{{"n", 1}}, {{"n", 2}}}},
      {"table1", "row9", "Sp(n) ⊂ SU(2n) ⊂ SU(2n+1)", {{{"n", 2}}}},
      {"table1", "row10", "G2 ⊂ Spin(7) ⊂ Spin(8)", {{}}},
      {"table1", "row11", "G2 ⊂ SO(7) ⊂ SO(9)", {{}}},
      {"lo", "su2", "diagonal SU(2) ⊂ SU(2)^k", {{{"k", 2}}, {{"k", 3}}}},
      {"lo", "su3", "diagonal SU(3) ⊂ SU(3)^k", {{{"k", 2}}}},
      {"prod", "su2+su3", "SU(2) ⊂ SU(2) x SU(3), first factor", {{}}},
      {"prod", "su2+su3diag", "SU(2) ⊂ SU(2) x SU(3), diagonal through SU(2) ⊂ SU(3)", {{}}},
  };
  return entries;
}

std::string params_str(const Params& p) {
  std::string out;
  for (const auto& [k, v] : p) {
    if (!out.empty()) out += '&';
    out += k + "=" + std::to_string(v);
  }
  return out;
}

const Entry& find_entry(const SpaceId& id) {
  if (id.family == "table1" && id.name == "row4") {
    throw ValidationError("table1/row4 (E6/Spin(10)) is not supported");
  }
  for (const auto& e : registry()) {
    if (e.family == id.family && e.name == id.name) return e;
  }
  throw ValidationError("unknown space '" + id.family + "/" + id.name + "'");
}

Params resolve_params(const Entry& e, const Params& given) {
  for (const auto& [k, v] : given) {
    const bool known = std::any_of(e.combos.begin(), e.combos.end(),
                                   [&](const Params& c) { return c.count(k) > 0; });
    if (!known) throw ValidationError("space " + e.family + "/" + e.name + " has no parameter '" + k + "'");
  }
  for (const auto& combo : e.combos) {
    const bool match = std::all_of(given.begin(), given.end(), [&](const auto& kv) {
      const auto it = combo.find(kv.first);
      return it != combo.end() && it->second == kv.second;
    });
    if (match) return combo;
  }
  throw ValidationError("parameters '" + params_str(given) + "' outside the supported range for " +
                        e.family + "/" + e.name);
}

LieAlgebraPtr share(LieAlgebra a) { return std::make_shared<const LieAlgebra>(std::move(a)); }

EmbeddingChain chain_spin7(const std::string& id, int k) {
  auto top = share(build_so(k));
  std::vector<Subalgebra> levels;
  levels.push_back(Subalgebra::from_matrices(top, pad_all(spin7_products(), k), "spin(7)"));
  levels.push_back(Subalgebra::from_matrices(top, pad_all(so_basis(8), k), "so(8)"));
  return EmbeddingChain(id, top, std::move(levels));
}

EmbeddingChain chain_row5(const std::string& id, int n, int p) {
  const int total = n + p;
  auto top = share(auto_normalized("su(" + std::to_string(total) + ")",
                                   realify_all(complex_su_basis(total))));
  std::vector<ComplexMatrix> block;
  for (const auto& x : complex_su_basis(n)) block.push_back(pad(x, total));
  std::vector<ComplexMatrix> su_n = block;
  for (const auto& x : complex_su_basis(p)) block.push_back(pad(x, total, n));
  ComplexMatrix center = ComplexMatrix::Zero(total, total);
  for (int i = 0; i < total; ++i) center(i, i) = cd(0.0, i < n ? p : -n);
  block.push_back(center);
  std::vector<Subalgebra> levels;
  levels.push_back(Subalgebra::from_matrices(top, realify_all(su_n), "su(" + std::to_string(n) + ")"));
  levels.push_back(Subalgebra::from_matrices(
      top, realify_all(block), "s(u(" + std::to_string(n) + ")+u(" + std::to_string(p) + "))"));
  return EmbeddingChain(id, top, std::move(levels));
}

EmbeddingChain chain_row6(const std::string& id, int n) {
  const int amb = 2 * n + 1;
  auto top = share(build_so(amb));
  std::vector<Subalgebra> levels;
  levels.push_back(Subalgebra::from_matrices(top, pad_all(realify_all(complex_su_basis(n)), amb),
                                             "su(" + std::to_string(n) + ")"));
  levels.push_back(Subalgebra::from_matrices(top, pad_all(realify_all(complex_u_basis(n)), amb),
                                             "u(" + std::to_string(n) + ")"));
  levels.push_back(
      Subalgebra::from_matrices(top, pad_all(so_basis(2 * n), amb), "so(" + std::to_string(2 * n) + ")"));
  return EmbeddingChain(id, top, std::move(levels));
}

EmbeddingChain chain_row7(const std::string& id, int n) {
  const int k = 2 * n + 1;
  auto top = share(build_so(2 * k));
  std::vector<Subalgebra> levels;
  levels.push_back(
      Subalgebra::from_matrices(top, realify_all(complex_su_basis(k)), "su(" + std::to_string(k) + ")"));
  levels.push_back(
      Subalgebra::from_matrices(top, realify_all(complex_u_basis(k)), "u(" + std::to_string(k) + ")"));
  return EmbeddingChain(id, top, std::move(levels));
}

EmbeddingChain chain_row8(const std::string& id, int n) {
  auto top = share(build_sp(n + 1));
  // Complex coordinates 0..2n+1 with quaternionic lines {l, l+n+1}; real
  // coordinate c of the realification also carries c + 2(n+1).
  const int complex_dim = 2 * (n + 1);
  std::vector<int> last = {n, 2 * n + 1, n + complex_dim, 2 * n + 1 + complex_dim};
  std::vector<int> rest;
  for (int r = 0; r < 2 * complex_dim; ++r) {
    if (std::find(last.begin(), last.end(), r) == last.end()) rest.push_back(r);
  }
  auto columns = [](const Matrix& x, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = x(rows[i], cols[j]);
    }
    return out;
  };
  std::vector<int> all(2 * complex_dim);
  for (int r = 0; r < 2 * complex_dim; ++r) all[r] = r;
  const Matrix span = identity_span(*top);
  std::vector<Subalgebra> levels;
  levels.push_back(constrained_subalgebra(
      top, span, [&](const Matrix& x) { return columns(x, all, last); },
      "sp(" + std::to_string(n) + ")"));
  levels.push_back(constrained_subalgebra(
      top, span, [&](const Matrix& x) { return columns(x, rest, last); },
      "sp(" + std::to_string(n) + ")+sp(1)"));
  return EmbeddingChain(id, top, std::move(levels));
}

EmbeddingChain chain_row9(const std::string& id, int n) {
  const int k = 2 * n + 1;
  auto top = share(auto_normalized("su(" + std::to_string(k) + ")", realify_all(complex_su_basis(k))));
  std::vector<ComplexMatrix> sp;
  for (const auto& x : complex_sp_basis(n)) sp.push_back(pad(x, k));
  std::vector<ComplexMatrix> su;
  for (const auto& x : complex_su_basis(2 * n)) su.push_back(pad(x, k));
  std::vector<Subalgebra> levels;
  levels.push_back(Subalgebra::from_matrices(top, realify_all(sp), "sp(" + std::to_string(n) + ")"));
  levels.push_back(Subalgebra::from_matrices(top, realify_all(su), "su(" + std::to_string(2 * n) + ")"));
  return EmbeddingChain(id, top, std::move(levels));
}

EmbeddingChain chain_row10(const std::string& id) {
  auto top = share(build_so(8));
  Subalgebra spin7 = build_spin7_in_so8(top);
  Subalgebra g2 = constrained_subalgebra(
      top, spin7.image_basis(), [](const Matrix& x) { return Matrix(x.col(0)); }, "g2");
  std::vector<Subalgebra> levels;
  levels.push_back(std::move(g2));
  levels.push_back(std::move(spin7));
  return EmbeddingChain(id, top, std::move(levels));
}

EmbeddingChain chain_row11(const std::string& id) {
  auto top = share(build_so(9));
  std::vector<Subalgebra> levels;
  levels.push_back(Subalgebra::from_matrices(top, pad_all(g2_derivations(), 9), "g2"));
  levels.push_back(Subalgebra::from_matrices(top, pad_all(so_basis(7), 9), "so(7)"));
  return EmbeddingChain(id, top, std::move(levels));
}

EmbeddingChain chain_diagonal(const std::string& id, int n, int k) {
  const LieAlgebra factor = build_su(n);
  std::vector<const LieAlgebra*> parts(static_cast<std::size_t>(k), &factor);
  std::string name;
  for (int i = 0; i < k; ++i) name += (i ? "+" : "") + factor.name();
  auto top = share(direct_sum(name, parts));
  std::vector<Matrix> diag;
  for (const auto& b : factor.basis()) diag.push_back(block_diag(std::vector<Matrix>(k, b)));
  std::vector<Subalgebra> levels;
  levels.push_back(Subalgebra::from_matrices(top, std::move(diag), "diag " + factor.name()));
  return EmbeddingChain(id, top, std::move(levels));
}

EmbeddingChain chain_su2_su3(const std::string& id, bool diagonal) {
  const LieAlgebra su2 = build_su(2);
  const LieAlgebra su3 = build_su(3);
  auto top = share(direct_sum("su(2)+su(3)", {&su2, &su3}));
  std::vector<Matrix> h;
  for (const auto& z : complex_su_basis(2)) {
    const Matrix first = realify(z);
    const Matrix second = diagonal ? realify(pad(z, 3)) : Matrix::Zero(6, 6);
    h.push_back(block_diag({first, second}));
  }
  std::vector<Subalgebra> levels;
  levels.push_back(Subalgebra::from_matrices(top, std::move(h), "su(2)"));
  return EmbeddingChain(id, top, std::move(levels));
}

}  // namespace

SpaceId SpaceId::parse(const std::string& text) {
  SpaceId id;
  const auto slash = text.find('/');
  if (slash == std::string::npos || slash == 0) {
    throw ValidationError("malformed space id '" + text + "' (expected family/name[?k=v&...])");
  }
  id.family = text.substr(0, slash);
  const auto q = text.find('?', slash);
  id.name = text.substr(slash + 1, q == std::string::npos ? std::string::npos : q - slash - 1);
  if (id.name.empty()) throw ValidationError("malformed space id '" + text + "': empty name");
  if (q != std::string::npos) {
    std::stringstream ss(text.substr(q + 1));
    std::string item;
    while (std::getline(ss, item, '&')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
        throw ValidationError("malformed parameter '" + item + "' in space id '" + text + "'");
      }
      const std::string key = item.substr(0, eq);
      int value = 0;
      const char* first = item.data() + eq + 1;
      const char* last = item.data() + item.size();
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) {
        throw ValidationError("parameter '" + key + "' is not an integer in '" + text + "'");
      }
      if (id.params.count(key)) throw ValidationError("duplicate parameter '" + key + "'");
      id.params[key] = value;
    }
  }
  return id;
}

std::string SpaceId::str() const {
  std::string out = family + "/" + name;
  if (!params.empty()) out += "?" + params_str(params);
  return out;
}

std::vector<SpaceDescriptor> list_spaces() {
  std::vector<SpaceDescriptor> out;
  for (const auto& e : registry()) {
    std::string pattern = e.family + "/" + e.name;
    if (!e.combos.front().empty()) {
      pattern += "?";
      for (std::size_t i = 0; i < e.combos.size(); ++i) {
        if (i) pattern += " | ";
        pattern += params_str(e.combos[i]);
      }
    }
    out.push_back({pattern, e.description});
  }
  return out;
}

std::string canonical_space_id(const std::string& text) {
  SpaceId id = SpaceId::parse(text);
  id.params = resolve_params(find_entry(id), id.params);
  return id.str();
}

EmbeddingChain build_chain(const std::string& text, const TolerancePolicy& tol) {
  (void)tol;
  SpaceId id = SpaceId::parse(text);
  id.params = resolve_params(find_entry(id), id.params);
  const std::string canon = id.str();
  auto param = [&](const char* k) { return id.params.at(k); };
  if (id.family == "table1") {
    if (id.name == "row1") return chain_spin7(canon, 9);
    if (id.name == "row2") return chain_spin7(canon, 10);
    if (id.name == "row3") return chain_spin7(canon, 11);
    if (id.name == "row5") return chain_row5(canon, param("n"), param("p"));
    if (id.name == "row6") return chain_row6(canon, param("n"));
    if (id.name == "row7") return chain_row7(canon, param("n"));
    if (id.name == "row8") return chain_row8(canon, param("n"));
    if (id.name == "row9") return chain_row9(canon, param("n"));
    if (id.name == "row10") return chain_row10(canon);
    if (id.name == "row11") return chain_row11(canon);
  } else if (id.family == "lo") {
    if (id.name == "su2") return chain_diagonal(canon, 2, param("k"));
    if (id.name == "su3") return chain_diagonal(canon, 3, param("k"));
  } else if (id.family == "prod") {
    if (id.name == "su2+su3") return chain_su2_su3(canon, false);
    if (id.name == "su2+su3diag") return chain_su2_su3(canon, true);
  }
  throw ValidationError("no builder for space '" + canon + "'");
}

HomogeneousSpace build_space(const std::string& id, const TolerancePolicy& tol) {
  EmbeddingChain chain = build_chain(id, tol);
  std::string canon = chain.id();
  return HomogeneousSpace(std::move(canon), std::move(chain), tol);
}

}  // namespace gospace
