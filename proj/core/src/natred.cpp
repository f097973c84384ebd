#include "gospace/natred.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gospace/error.hpp"
#include "gospace/json_io.hpp"
#include "gospace/repmod.hpp"

namespace gospace {

std::string to_string(ProjectionKind k) {
  switch (k) {
    case ProjectionKind::trivial: return "trivial";
    case ProjectionKind::injective: return "injective";
    case ProjectionKind::bijective: return "bijective";
  }
  return "unknown";
}

std::string to_string(Construction c) {
  return c == Construction::ideal_complement ? "ideal-complement" : "Q-complement";
}

Matrix IdealDecomposition::form(const std::vector<double>& coefficients) const {
  if (coefficients.size() != ideals.size()) {
    throw ValidationError("expected " + std::to_string(ideals.size()) + " coefficients, got " +
                          std::to_string(coefficients.size()));
  }
  const auto dg = static_cast<Eigen::Index>(space->dim_g());
  Matrix q = Matrix::Zero(dg, dg);
  for (std::size_t i = 0; i < ideals.size(); ++i) q += coefficients[i] * ideals[i].scale * ideals[i].projector();
  return q;
}

IdealDecomposition decompose_ideals(const HomogeneousSpace& space, std::uint64_t seed, const TolerancePolicy& tol) {
  const LieAlgebra& g = space.g();
  if (!g.killing_positive_definite(tol)) {
    throw ValidationError("decompose_ideals: " + g.name() + " is not compact semisimple");
  }
  std::vector<Matrix> ad;
  for (std::size_t k = 0; k < g.dim(); ++k) ad.push_back(g.ad(k));
  const IsotypicDecomposition dec = decompose(Representation("ad " + g.name(), ad, ad), seed, tol);

  IdealDecomposition out;
  out.space = std::make_shared<const HomogeneousSpace>(space);
  const Matrix& hb = space.h_basis();
  const auto dh = static_cast<Eigen::Index>(space.dim_h());
  std::vector<std::pair<Eigen::Index, Ideal>> found;
  for (const auto& s : dec.submodules) {
    if (s.type == ModuleType::trivial) {
      throw ValidationError("decompose_ideals: " + g.name() + " has a center");
    }
    Ideal ideal;
    ideal.basis = s.basis;
    const Matrix proj = ideal.basis.transpose() * hb;
    const auto rank = dh - kernel_basis(proj, hb.norm(), tol).cols();
    if (rank == 0) {
      ideal.kind = ProjectionKind::trivial;
    } else if (rank == dh) {
      ideal.kind = ideal.basis.cols() == dh ? ProjectionKind::bijective : ProjectionKind::injective;
      const Matrix gram = proj.transpose() * proj;
      ideal.scale = static_cast<double>(dh) / gram.trace();
      ideal.normalization_residual = (ideal.scale * gram - Matrix::Identity(dh, dh)).norm();
    } else {
      throw ValidationError("decompose_ideals: projection of h has rank " + std::to_string(rank) +
                            "; h is not simple");
    }
    const Matrix p = ideal.projector();
    Eigen::Index first = 0;
    while (first < p.rows() && p(first, first) <= 1e-8) ++first;
    found.emplace_back(first, std::move(ideal));
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.second.kind < b.second.kind; });
  for (auto& f : found) out.ideals.push_back(std::move(f.second));
  for (const auto& i : out.ideals) {
    if (i.kind == ProjectionKind::trivial) ++out.n0;
    if (i.kind != ProjectionKind::bijective) ++out.n1;
  }
  for (std::size_t i = 0; i < out.ideals.size(); ++i) {
    for (std::size_t j = i + 1; j < out.ideals.size(); ++j) {
      for (Eigen::Index a = 0; a < out.ideals[i].basis.cols(); ++a) {
        const Matrix br = g.ad_of(out.ideals[i].basis.col(a)) * out.ideals[j].basis;
        out.bracket_residual = std::max(out.bracket_residual, br.norm());
      }
    }
  }
  return out;
}

bool analytically_admissible(const IdealDecomposition& ideals, const std::vector<double>& gammas) {
  if (gammas.size() != ideals.size()) return false;
  std::vector<std::size_t> negative;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < 0.0) negative.push_back(i);
  }
  if (negative.empty()) return true;
  if (negative.size() != 1) return false;
  if (ideals.ideals[negative.front()].kind != ProjectionKind::bijective) return false;
  double sum = 0.0;
  for (std::size_t i = ideals.n0; i < gammas.size(); ++i) sum += gammas[i];
  return sum < 0.0;
}

namespace {

void finish(NatRedMetric& m, const TolerancePolicy& tol) {
  const auto dg = static_cast<Eigen::Index>(m.ideals->space->dim_g());
  const auto dh = static_cast<Eigen::Index>(m.ideals->space->dim_h());
  if (m.p.cols() != dg - dh) {
    m.diagnostic = "complement has dimension " + std::to_string(m.p.cols()) + ", expected " +
                   std::to_string(dg - dh) + " (form degenerate on h)";
    m.positive_definite = false;
    m.accepted = false;
    return;
  }
  Matrix both(dg, dg);
  both << m.p, m.ideals->space->h_basis();
  if (kernel_basis(both, tol).cols() > 0) {
    m.diagnostic = "p meets h";
    m.accepted = false;
    return;
  }
  m.gram = m.p.transpose() * m.q * m.p;
  m.gram = 0.5 * (m.gram + m.gram.transpose());
  if (m.gram.rows() > 0) {
    const SymmetricEigen eig = symmetric_eigendecomposition(m.gram, tol);
    m.gram_min_eigenvalue = eig.values(0);
  }
  m.positive_definite = m.gram.rows() == 0 || m.gram_min_eigenvalue > tol.feas_tol;
  m.accepted = m.analytic_admissible && m.positive_definite;
  if (!m.positive_definite) {
    m.diagnostic = "inner product on p is not positive definite (smallest Gram eigenvalue " +
                   std::to_string(m.gram_min_eigenvalue) + ")";
  } else if (!m.analytic_admissible) {
    m.diagnostic = "sign condition fails although the Gram matrix is positive definite";
  }
}

}  // namespace

NatRedMetric natred_case_a(const IdealDecomposition& ideals, std::size_t j, const std::vector<double>& betas,
                           const TolerancePolicy& tol) {
  const std::size_t n = ideals.size();
  const auto bijective = static_cast<std::size_t>(
      std::count_if(ideals.ideals.begin(), ideals.ideals.end(),
                    [](const Ideal& i) { return i.kind == ProjectionKind::bijective; }));
  if (bijective < 2) {
    throw ValidationError("case (a) needs at least two ideals isomorphic to h through the projection, found " +
                          std::to_string(bijective));
  }
  if (j >= n || ideals.ideals[j].kind != ProjectionKind::bijective) {
    throw ValidationError("case (a): ideal " + std::to_string(j) + " is not a bijective projection of h");
  }
  if (betas.size() != n) {
    throw ValidationError("case (a): expected " + std::to_string(n) + " coefficients, got " +
                          std::to_string(betas.size()));
  }
  NatRedMetric m;
  m.construction = Construction::ideal_complement;
  m.ideals = std::make_shared<const IdealDecomposition>(ideals);
  m.j = j;
  m.coefficients = betas;
  m.coefficients[j] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != j && (!(betas[i] > 0.0) || !std::isfinite(betas[i]))) {
      throw ValidationError("case (a): beta_" + std::to_string(i) + " must be positive");
    }
  }
  m.q = ideals.form(m.coefficients);
  Eigen::Index cols = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != j) cols += ideals.ideals[i].basis.cols();
  }
  m.p.resize(static_cast<Eigen::Index>(ideals.space->dim_g()), cols);
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == j) continue;
    m.p.middleCols(off, ideals.ideals[i].basis.cols()) = ideals.ideals[i].basis;
    off += ideals.ideals[i].basis.cols();
  }
  m.analytic_admissible = true;
  finish(m, tol);
  return m;
}

NatRedMetric natred_case_b(const IdealDecomposition& ideals, const std::vector<double>& gammas,
                           const TolerancePolicy& tol) {
  if (gammas.size() != ideals.size()) {
    throw ValidationError("case (b): expected " + std::to_string(ideals.size()) + " coefficients, got " +
                          std::to_string(gammas.size()));
  }
  for (double g : gammas) {
    if (g == 0.0 || !std::isfinite(g)) throw ValidationError("case (b): every gamma must be finite and nonzero");
  }
  NatRedMetric m;
  m.construction = Construction::q_complement;
  m.ideals = std::make_shared<const IdealDecomposition>(ideals);
  m.coefficients = gammas;
  m.q = ideals.form(gammas);
  const Matrix qh = m.q * ideals.space->h_basis();
  m.p = kernel_basis(qh.transpose(), tol);
  m.analytic_admissible = analytically_admissible(ideals, gammas);
  finish(m, tol);
  return m;
}

KostantReport check_kostant(const NatRedMetric& metric, const Matrix& q, const TolerancePolicy& tol) {
  KostantReport r;
  if (metric.construction == Construction::q_complement) {
    r.orthogonality_residual = (metric.p.transpose() * q * metric.ideals->space->h_basis()).norm();
  }
  r.restriction_residual = (metric.p.transpose() * q * metric.p - metric.gram).norm();
  const double scale = std::max(1.0, metric.gram.norm());
  r.passed = r.orthogonality_residual <= tol.feas_tol * scale && r.restriction_residual <= tol.feas_tol * scale;
  return r;
}

KostantReport check_kostant(const NatRedMetric& metric, const TolerancePolicy& tol) {
  return check_kostant(metric, metric.q, tol);
}

namespace {

// Rows of [p, h]^{-1} that read off the p component of a g vector.
Matrix p_component(const Matrix& p, const Matrix& h) {
  Matrix both(p.rows(), p.cols() + h.cols());
  both << p, h;
  if (both.rows() != both.cols()) throw DimensionError("p and h do not span g");
  const Eigen::ColPivHouseholderQR<Matrix> qr(both);
  if (qr.rank() < both.cols()) throw ComputationError("p and h are not complementary");
  return qr.inverse().topRows(p.cols());
}

}  // namespace

double natred_identity_residual(const LieAlgebra& g, const Matrix& p, const Matrix& h, const Matrix& gram) {
  const Matrix pi = p_component(p, h);
  const auto dp = p.cols();
  // t[a](c, b) = ([e_a, e_b]_p, e_c)
  std::vector<Matrix> t;
  t.reserve(static_cast<std::size_t>(dp));
  for (Eigen::Index a = 0; a < dp; ++a) t.push_back(gram * (pi * (g.ad_of(p.col(a)) * p)));
  double worst = 0.0;
  for (Eigen::Index a = 0; a < dp; ++a) {
    for (Eigen::Index c = 0; c < dp; ++c) {
      const auto& ta = t[static_cast<std::size_t>(a)];
      const auto& tc = t[static_cast<std::size_t>(c)];
      worst = std::max(worst, (ta.row(c) + tc.row(a)).cwiseAbs().maxCoeff());
    }
  }
  return worst / std::max(1.0, gram.norm());
}

double check_natred_identity(const NatRedMetric& metric) {
  return natred_identity_residual(metric.ideals->space->g(), metric.p, metric.ideals->space->h_basis(),
                                  metric.gram);
}

Matrix induced_metric_matrix(const NatRedMetric& metric) {
  const HomogeneousSpace& space = *metric.ideals->space;
  const Matrix s = p_component(metric.p, space.h_basis()) * space.m_basis();
  const Matrix a = s.transpose() * metric.gram * s;
  return 0.5 * (a + a.transpose());
}

MetricSpec to_metric_spec(const NatRedMetric& metric, const TolerancePolicy& tol) {
  if (!metric.accepted) throw ValidationError("to_metric_spec: metric was rejected: " + metric.diagnostic);
  const Matrix a = induced_metric_matrix(metric);
  const SymmetricEigen eig = symmetric_eigendecomposition(a, tol);
  const double top = eig.values.cwiseAbs().maxCoeff();
  std::vector<Matrix> spaces;
  std::vector<double> alphas;
  for (const auto& [b, e] : cluster_sorted(eig.values, 1e-7 * top)) {
    const auto begin = static_cast<Eigen::Index>(b);
    const auto len = static_cast<Eigen::Index>(e - b);
    spaces.push_back(eig.vectors.middleCols(begin, len));
    alphas.push_back(eig.values.segment(begin, len).mean());
  }
  return MetricSpec::from_subspaces(*metric.ideals->space, spaces, alphas, tol);
}

nlohmann::json to_json(const IdealDecomposition& ideals) {
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t i = 0; i < ideals.ideals.size(); ++i) {
    const auto& id = ideals.ideals[i];
    list.push_back({{"index", i},
                    {"dim", id.dim()},
                    {"projection", to_string(id.kind)},
                    {"scale", id.scale},
                    {"normalization_residual", id.normalization_residual}});
  }
  return {{"space", ideals.space->id()},
          {"N", ideals.size()},
          {"N0", ideals.n0},
          {"N1", ideals.n1},
          {"bracket_residual", ideals.bracket_residual},
          {"ideals", std::move(list)}};
}

nlohmann::json to_json(const NatRedMetric& m, bool include_bases) {
  nlohmann::json j = {{"construction", to_string(m.construction)},
                      {"coefficients", m.coefficients},
                      {"dim_p", m.p.cols()},
                      {"analytic_admissible", m.analytic_admissible},
                      {"gram_min_eigenvalue", m.gram_min_eigenvalue},
                      {"positive_definite", m.positive_definite},
                      {"accepted", m.accepted},
                      {"diagnostic", m.diagnostic}};
  if (m.construction == Construction::ideal_complement) j["dropped_ideal"] = m.j;
  if (include_bases) {
    j["p"] = matrix_to_json(m.p);
    j["gram"] = matrix_to_json(m.gram);
  }
  return j;
}

nlohmann::json to_json(const KostantReport& r) {
  return {{"orthogonality_residual", r.orthogonality_residual},
          {"restriction_residual", r.restriction_residual},
          {"passed", r.passed}};
}

}  // namespace gospace
