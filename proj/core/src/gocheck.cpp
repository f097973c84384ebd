#include "gospace/gocheck.hpp"

#include <algorithm>
#include <cmath>

#include "gospace/error.hpp"
#include "gospace/json_io.hpp"

namespace gospace {

namespace {

constexpr double kEquivarianceFactor = 1e2;

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

Vector normalized(const Vector& x) {
  const double n = x.norm();
  return n > 0.0 ? Vector(x / n) : x;
}

}  // namespace

MetricSpec build_metric(const HomogeneousSpace& space, std::vector<Eigenspace> groups,
                        const TolerancePolicy& tol) {
  const auto dm = static_cast<Eigen::Index>(space.dim_m());
  if (groups.empty()) throw ValidationError("metric: no eigenspaces given");
  Eigen::Index total = 0;
  for (const auto& g : groups) {
    if (!(g.alpha > 0.0) || !std::isfinite(g.alpha)) {
      throw ValidationError("metric: eigenvalues must be positive and finite");
    }
    if (g.basis.rows() != dm) {
      throw DimensionError("metric: eigenspace basis has " + std::to_string(g.basis.rows()) +
                           " rows, m has dimension " + std::to_string(dm));
    }
    total += g.basis.cols();
  }
  if (total != dm) {
    throw ValidationError("metric: eigenspaces have total dimension " + std::to_string(total) +
                          " but m has dimension " + std::to_string(dm));
  }
  Matrix all(dm, total);
  Eigen::Index off = 0;
  for (const auto& g : groups) {
    all.middleCols(off, g.basis.cols()) = g.basis;
    off += g.basis.cols();
  }
  const double orth = (all.transpose() * all - Matrix::Identity(dm, dm)).cwiseAbs().maxCoeff();
  if (dm > 0 && orth > 1e2 * tol.feas_tol) {
    throw ValidationError("metric: eigenspaces are not orthonormal and mutually orthogonal (deviation " +
                          std::to_string(orth) + ")");
  }

  MetricSpec out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto& g = groups[i];
    auto same = std::find_if(out.spaces_.begin(), out.spaces_.end(), [&](const Eigenspace& e) {
      return relative_gap(e.alpha, g.alpha) <= tol.feas_tol;
    });
    if (same == out.spaces_.end()) {
      g.sources = {i};
      out.spaces_.push_back(std::move(g));
      continue;
    }
    Matrix merged(dm, same->basis.cols() + g.basis.cols());
    merged << same->basis, g.basis;
    same->basis = std::move(merged);
    same->sources.push_back(i);
    same->submodules.insert(same->submodules.end(), g.submodules.begin(), g.submodules.end());
  }
  out.a_ = Matrix::Zero(dm, dm);
  for (const auto& e : out.spaces_) out.a_ += e.alpha * e.basis * e.basis.transpose();

  const double amax = out.max_alpha();
  for (const auto& rho : space.h_action()) {
    out.equivariance_ = std::max(out.equivariance_, (out.a_ * rho - rho * out.a_).norm() / amax);
  }
  out.equivariant_ = out.equivariance_ <= kEquivarianceFactor * tol.feas_tol;
  return out;
}

MetricSpec MetricSpec::normal(const HomogeneousSpace& space, double alpha) {
  Eigenspace e;
  e.basis = Matrix::Identity(static_cast<Eigen::Index>(space.dim_m()), static_cast<Eigen::Index>(space.dim_m()));
  e.alpha = alpha;
  return build_metric(space, {e}, {});
}

MetricSpec MetricSpec::from_subspaces(const HomogeneousSpace& space, const std::vector<Matrix>& subspaces,
                                      const std::vector<double>& alphas, const TolerancePolicy& tol) {
  if (subspaces.size() != alphas.size()) {
    throw ValidationError("metric: " + std::to_string(subspaces.size()) + " eigenspaces but " +
                          std::to_string(alphas.size()) + " eigenvalues");
  }
  std::vector<Eigenspace> groups;
  for (std::size_t i = 0; i < subspaces.size(); ++i) {
    Eigenspace e;
    e.basis = subspaces[i];
    e.alpha = alphas[i];
    groups.push_back(std::move(e));
  }
  return build_metric(space, std::move(groups), tol);
}

MetricSpec MetricSpec::from_grouping(const HomogeneousSpace& space, const IsotypicDecomposition& decomposition,
                                     const std::vector<std::vector<std::size_t>>& groups,
                                     const std::vector<double>& alphas, const TolerancePolicy& tol) {
  if (groups.size() != alphas.size()) {
    throw ValidationError("metric: " + std::to_string(groups.size()) + " groups but " +
                          std::to_string(alphas.size()) + " eigenvalues");
  }
  std::vector<int> used(decomposition.submodules.size(), 0);
  std::vector<Eigenspace> spaces;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (auto s : groups[i]) {
      if (s >= used.size()) throw ValidationError("metric: submodule index " + std::to_string(s) + " out of range");
      ++used[s];
    }
    Eigenspace e;
    e.basis = decomposition.span(groups[i]);
    e.alpha = alphas[i];
    e.submodules = groups[i];
    spaces.push_back(std::move(e));
  }
  for (std::size_t s = 0; s < used.size(); ++s) {
    if (used[s] != 1) {
      throw ValidationError("metric: submodule " + std::to_string(s) + " appears " + std::to_string(used[s]) +
                            " times in the grouping");
    }
  }
  return build_metric(space, std::move(spaces), tol);
}

double MetricSpec::max_alpha() const {
  double m = 0.0;
  for (const auto& e : spaces_) m = std::max(m, e.alpha);
  return m;
}

MetricSpec MetricSpec::scaled(double c) const {
  if (!(c > 0.0)) throw ValidationError("metric: scale factor must be positive");
  MetricSpec out = *this;
  for (auto& e : out.spaces_) e.alpha *= c;
  out.a_ *= c;
  return out;
}

Vector apply_metric(const MetricSpec& a, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != a.dim_m()) throw DimensionError("apply_metric: wrong vector length");
  Vector out = Vector::Zero(x.size());
  for (const auto& e : a.eigenspaces()) out += e.alpha * (e.basis * (e.basis.transpose() * x));
  return out;
}

std::string to_string(Feasibility f) {
  switch (f) {
    case Feasibility::feasible: return "feasible";
    case Feasibility::infeasible: return "infeasible";
    case Feasibility::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::go_consistent: return "GO-consistent";
    case Verdict::not_go: return "not-GO";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

GOSolver::GOSolver(const HomogeneousSpace& space, const MetricSpec& metric, const TolerancePolicy& tol)
    : space_(&space), tol_(tol) {
  tol.validate();
  if (metric.dim_m() != space.dim_m()) throw DimensionError("metric does not match the space");
  scale_ = metric.max_alpha();
  a_ = metric.matrix() / scale_;
  for (Eigen::Index k = 0; k < space.h_basis().cols(); ++k) ad_h_.push_back(space.g().ad_of(space.h_basis().col(k)));
}

FeasibilityResult GOSolver::solve(const Vector& x) const {
  const auto dh = static_cast<Eigen::Index>(ad_h_.size());
  FeasibilityResult out;
  const double xnorm = x.norm();
  if (xnorm == 0.0) {
    out.z = Vector::Zero(dh);
    return out;
  }
  const Vector xn = x / xnorm;
  const Vector xg = space_->m_to_g(xn);
  const Vector axg = space_->m_to_g(a_ * xn);
  Matrix mx(xg.size(), dh);
  for (Eigen::Index k = 0; k < dh; ++k) mx.col(k) = ad_h_[static_cast<std::size_t>(k)] * axg;
  const Vector rhs = space_->g().bracket(axg, xg);
  const LeastSquaresResult ls = solve_least_squares(mx, rhs, tol_);
  out.z = ls.x * xnorm;
  out.residual = ls.relative_residual;
  if (out.residual <= tol_.feas_tol) {
    out.status = Feasibility::feasible;
  } else if (out.residual >= tol_.infeasible_threshold()) {
    out.status = Feasibility::infeasible;
  } else {
    out.status = Feasibility::inconclusive;
  }
  return out;
}

FeasibilityResult go_feasible(const HomogeneousSpace& space, const MetricSpec& metric, const Vector& x,
                              const TolerancePolicy& tol) {
  return GOSolver(space, metric, tol).solve(x);
}

GOReport check_go(const HomogeneousSpace& space, const MetricSpec& metric, std::size_t n_samples,
                  std::uint64_t seed, const TolerancePolicy& tol) {
  if (n_samples < 100) throw ValidationError("check_go: at least 100 samples are required");
  const GOSolver solver(space, metric, tol);
  const auto dm = static_cast<Eigen::Index>(space.dim_m());

  GOReport rep;
  rep.space = space.id();
  rep.seed = seed;
  rep.tolerance = tol;
  rep.requested_samples = n_samples;

  std::vector<double> residuals;
  std::optional<Witness> worst;
  auto record = [&](const Vector& x, std::string origin) {
    FeasibilityResult r = solver.solve(x);
    residuals.push_back(r.residual);
    switch (r.status) {
      case Feasibility::feasible:
        ++rep.feasible;
        rep.worst_feasible_residual = std::max(rep.worst_feasible_residual, r.residual);
        if (rep.audit.size() < 3) rep.audit.push_back({x, r.z, r.residual, origin});
        break;
      case Feasibility::infeasible: ++rep.infeasible; break;
      case Feasibility::inconclusive: ++rep.inconclusive; break;
    }
    if (!worst || r.residual > worst->residual) worst = Witness{x, std::move(r.z), r.residual, std::move(origin)};
  };

  Rng gauss(derive_seed(seed, 1));
  for (std::size_t s = 0; s < n_samples; ++s) record(gauss.gaussian(dm), "gaussian " + std::to_string(s));

  Rng pairs(derive_seed(seed, 2));
  const auto& spaces = metric.eigenspaces();
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    for (std::size_t j = i + 1; j < spaces.size(); ++j) {
      for (int k = 0; k < 3; ++k) {
        const Vector x = spaces[i].basis * pairs.gaussian(spaces[i].basis.cols()) +
                         spaces[j].basis * pairs.gaussian(spaces[j].basis.cols());
        record(x, "pair " + std::to_string(i) + "," + std::to_string(j));
      }
    }
  }
  for (Eigen::Index k = 0; k < dm; ++k) record(Vector::Unit(dm, k), "basis " + std::to_string(k));

  rep.total = residuals.size();
  rep.max_residual = worst ? worst->residual : 0.0;
  if (!residuals.empty()) {
    std::vector<double> sorted = residuals;
    std::sort(sorted.begin(), sorted.end());
    rep.median_residual = sorted[sorted.size() / 2];
  }
  if (rep.infeasible > 0) {
    rep.verdict = Verdict::not_go;
  } else if (rep.inconclusive > 0) {
    rep.verdict = Verdict::inconclusive;
  } else {
    rep.verdict = Verdict::go_consistent;
  }
  if (rep.verdict != Verdict::go_consistent) rep.certificate = worst;
  return rep;
}

BracketReport bracket_structure_check(const HomogeneousSpace& space, const MetricSpec& metric,
                                      std::uint64_t seed, const TolerancePolicy& tol) {
  BracketReport out;
  const LieAlgebra& g = space.g();
  const Matrix& m = space.m_basis();
  const auto& spaces = metric.eigenspaces();
  const std::size_t n = spaces.size();
  const auto dh = space.h_action().size();

  std::vector<Matrix> in_g;
  std::vector<Matrix> trivial_g;
  const Representation rep = Representation::isotropy(space);
  double action_scale = 0.0;
  for (const auto& r : space.h_action()) action_scale = std::max(action_scale, r.norm());
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix& e = spaces[i].basis;
    in_g.push_back(m * e);
    Matrix stacked(static_cast<Eigen::Index>(dh) * space.dim_m(), e.cols());
    for (std::size_t k = 0; k < dh; ++k) {
      stacked.middleRows(static_cast<Eigen::Index>(k * space.dim_m()), static_cast<Eigen::Index>(space.dim_m())) =
          space.h_action()[k] * e;
    }
    const Matrix t = e * kernel_basis(stacked, action_scale, tol);
    trivial_g.push_back(m * t);
    out.trivial_dims.push_back(static_cast<std::size_t>(t.cols()));
    bool large = false;
    if (metric.equivariant() && e.cols() > 0) {
      large = generic_centralizer_dim(rep, e, derive_seed(seed, 300 + i), 10, tol) == 0;
    }
    out.large.push_back(large);
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Matrix& pi = spaces[i].basis;
      const Matrix& pj = spaces[j].basis;
      for (Eigen::Index a = 0; a < in_g[i].cols(); ++a) {
        const Matrix br = g.ad_of(in_g[i].col(a)) * in_g[j];
        const Matrix in_m = m.transpose() * br;
        const Matrix outside = in_m - pi * (pi.transpose() * in_m) - pj * (pj.transpose() * in_m);
        for (Eigen::Index b = 0; b < outside.cols(); ++b) {
          const double r = outside.col(b).norm();
          if (r > out.cross_residual) {
            out.cross_residual = r;
            out.worst_i = i;
            out.worst_j = j;
          }
        }
        if (out.large[i] && out.large[j]) {
          out.large_residual = std::max(out.large_residual, br.colwise().norm().maxCoeff());
        }
      }
      for (Eigen::Index a = 0; a < trivial_g[i].cols(); ++a) {
        if (trivial_g[j].cols() == 0) break;
        const Matrix br = g.ad_of(trivial_g[i].col(a)) * trivial_g[j];
        out.trivial_residual = std::max(out.trivial_residual, br.colwise().norm().maxCoeff());
      }
    }
  }
  out.passed = out.cross_residual <= tol.feas_tol && out.large_residual <= tol.feas_tol &&
               out.trivial_residual <= tol.feas_tol;
  return out;
}

LinearGraphCertificate linear_graph_fit(const HomogeneousSpace& space, const MetricSpec& metric,
                                        std::uint64_t seed, const TolerancePolicy& tol,
                                        const LinearGraphOptions& options) {
  tol.validate();
  const LieAlgebra& g = space.g();
  const Matrix& m = space.m_basis();
  const Matrix& hb = space.h_basis();
  const auto dm = static_cast<Eigen::Index>(space.dim_m());
  const auto dh = static_cast<Eigen::Index>(space.dim_h());
  const auto dg = static_cast<Eigen::Index>(space.dim_g());
  const Matrix a = metric.matrix() / metric.max_alpha();
  const Matrix ag = m * a;

  std::vector<Matrix> ad_a;
  ad_a.reserve(static_cast<std::size_t>(dm));
  for (Eigen::Index b = 0; b < dm; ++b) ad_a.push_back(g.ad_of(ag.col(b)));

  // Diagonal pairs are weighted by 1/sqrt(2) so the residual equals half the
  // full tensor norm over ordered pairs, which is invariant under H.
  const double diag_weight = std::sqrt(0.5);
  auto pair_rhs = [&](Eigen::Index p, Eigen::Index q) {
    Vector r = ad_a[static_cast<std::size_t>(q)] * m.col(p) + ad_a[static_cast<std::size_t>(p)] * m.col(q);
    return p == q ? Vector(diag_weight * r) : r;
  };

  LinearGraphCertificate cert;
  const std::size_t pairs = static_cast<std::size_t>(dm * (dm + 1) / 2);
  cert.equations = pairs * static_cast<std::size_t>(dg);

  Matrix l = Matrix::Zero(dh, dm);
  double abs_residual = 0.0;
  double rhs_norm = 0.0;

  if (options.equivariant_reduction && metric.equivariant()) {
    cert.reduced = true;
    std::vector<Matrix> adjoint;
    for (Eigen::Index k = 0; k < dh; ++k) adjoint.push_back(space.h().algebra().ad(static_cast<std::size_t>(k)));
    const Matrix maps = intertwiners(space.h_action(), adjoint, tol);
    const Eigen::Index r = maps.cols();
    cert.unknowns = static_cast<std::size_t>(r);
    std::vector<Matrix> t(static_cast<std::size_t>(r));
    std::vector<Matrix> ht(static_cast<std::size_t>(r));
    for (Eigen::Index s = 0; s < r; ++s) {
      t[static_cast<std::size_t>(s)] = Eigen::Map<const Matrix>(maps.col(s).data(), dh, dm);
      ht[static_cast<std::size_t>(s)] = hb * t[static_cast<std::size_t>(s)];
    }
    Matrix sys(static_cast<Eigen::Index>(cert.equations), r);
    Vector rhs(static_cast<Eigen::Index>(cert.equations));
    Eigen::Index row = 0;
    for (Eigen::Index p = 0; p < dm; ++p) {
      for (Eigen::Index q = p; q < dm; ++q) {
        const double w = p == q ? diag_weight : 1.0;
        rhs.segment(row, dg) = pair_rhs(p, q);
        for (Eigen::Index s = 0; s < r; ++s) {
          const Matrix& h = ht[static_cast<std::size_t>(s)];
          sys.block(row, s, dg, 1) =
              -w * (ad_a[static_cast<std::size_t>(q)] * h.col(p) + ad_a[static_cast<std::size_t>(p)] * h.col(q));
        }
        row += dg;
      }
    }
    rhs_norm = rhs.norm();
    if (r > 0) {
      const LeastSquaresResult ls = solve_least_squares(sys, rhs, tol);
      for (Eigen::Index s = 0; s < r; ++s) l += ls.x(s) * t[static_cast<std::size_t>(s)];
      abs_residual = (sys * ls.x - rhs).norm();
    } else {
      abs_residual = rhs_norm;
    }
  } else {
    // The L terms lie in m, so only the m rows involve unknowns; the h part of
    // the right-hand side is a fixed contribution to the residual.
    cert.unknowns = static_cast<std::size_t>(dh * dm);
    IncrementalLeastSquares ils(cert.unknowns);
    const Matrix mt = m.transpose();
    std::vector<Matrix> proj;
    for (Eigen::Index b = 0; b < dm; ++b) proj.push_back(mt * ad_a[static_cast<std::size_t>(b)] * hb);
    double h_part = 0.0;
    double m_part = 0.0;
    Matrix block = Matrix::Zero(dm, dh * dm);
    for (Eigen::Index p = 0; p < dm; ++p) {
      for (Eigen::Index q = p; q < dm; ++q) {
        const double w = p == q ? diag_weight : 1.0;
        const Vector rhs = pair_rhs(p, q);
        const Vector rm = mt * rhs;
        h_part += (rhs - m * rm).squaredNorm();
        m_part += rm.squaredNorm();
        block.setZero();
        block.middleCols(p * dh, dh) -= w * proj[static_cast<std::size_t>(q)];
        block.middleCols(q * dh, dh) -= w * proj[static_cast<std::size_t>(p)];
        ils.add_rows(block, rm);
      }
    }
    const LeastSquaresResult ls = ils.solve(tol);
    l = Eigen::Map<const Matrix>(ls.x.data(), dh, dm);
    const double m_abs = ls.relative_residual * std::max(std::sqrt(m_part), 1.0);
    abs_residual = std::sqrt(m_abs * m_abs + h_part);
    rhs_norm = std::sqrt(m_part + h_part);
  }
  cert.l = l;
  cert.system_residual = abs_residual / std::max(rhs_norm, 1.0);

  Rng rng(derive_seed(seed, 7));
  for (int s = 0; s < options.heldout_samples; ++s) {
    const Vector x = normalized(rng.gaussian(dm));
    const Vector xg = m * x;
    const Vector axg = ag * x;
    const Vector bracket = g.bracket(xg, axg);
    const Vector full = g.bracket(hb * (l * x), axg) + bracket;
    cert.heldout_residual = std::max(cert.heldout_residual, full.norm() / std::max(bracket.norm(), 1.0));
  }
  cert.accepted = cert.system_residual <= tol.feas_tol && cert.heldout_residual <= 10.0 * tol.feas_tol;
  return cert;
}

nlohmann::json to_json(const MetricSpec& metric, bool include_bases) {
  nlohmann::json spaces = nlohmann::json::array();
  for (const auto& e : metric.eigenspaces()) {
    nlohmann::json j = {{"dim", e.dim()}, {"alpha", e.alpha}, {"sources", e.sources}};
    if (!e.submodules.empty()) j["submodules"] = e.submodules;
    if (include_bases) j["basis"] = matrix_to_json(e.basis);
    spaces.push_back(std::move(j));
  }
  return {{"dim_m", metric.dim_m()},
          {"eigenspaces", std::move(spaces)},
          {"normal", metric.is_normal()},
          {"equivariant", metric.equivariant()},
          {"equivariance_residual", metric.equivariance_residual()}};
}

namespace {

nlohmann::json witness_json(const Witness& w) {
  return {{"origin", w.origin}, {"residual", w.residual}, {"x", vector_to_json(w.x)}, {"z", vector_to_json(w.z)}};
}

}  // namespace

nlohmann::json to_json(const GOReport& r) {
  nlohmann::json audit = nlohmann::json::array();
  for (const auto& w : r.audit) audit.push_back(witness_json(w));
  const double threshold = r.tolerance.infeasible_threshold();
  nlohmann::json margin = {
      {"worst_feasible_over_feas_tol", r.worst_feasible_residual / r.tolerance.feas_tol},
      {"max_residual_over_threshold", r.max_residual / threshold},
      {"median_residual", r.median_residual},
  };
  return {{"space", r.space},
          {"seed", r.seed},
          {"tolerance", to_json(r.tolerance)},
          {"requested_samples", r.requested_samples},
          {"total_samples", r.total},
          {"feasible", r.feasible},
          {"infeasible", r.infeasible},
          {"inconclusive", r.inconclusive},
          {"worst_feasible_residual", r.worst_feasible_residual},
          {"max_residual", r.max_residual},
          {"margin", std::move(margin)},
          {"verdict", to_string(r.verdict)},
          {"certificate", r.certificate ? witness_json(*r.certificate) : nlohmann::json(nullptr)},
          {"audit", std::move(audit)}};
}

nlohmann::json to_json(const BracketReport& r) {
  std::vector<int> large;
  for (bool b : r.large) large.push_back(b ? 1 : 0);
  return {{"cross_residual", r.cross_residual},
          {"worst_pair", {r.worst_i, r.worst_j}},
          {"large_residual", r.large_residual},
          {"trivial_residual", r.trivial_residual},
          {"large", large},
          {"trivial_dims", r.trivial_dims},
          {"passed", r.passed}};
}

nlohmann::json to_json(const LinearGraphCertificate& c) {
  return {{"accepted", c.accepted},
          {"system_residual", c.system_residual},
          {"heldout_residual", c.heldout_residual},
          {"unknowns", c.unknowns},
          {"equations", c.equations},
          {"equivariant_reduction", c.reduced},
          {"L", matrix_to_json(c.l)}};
}

}  // namespace gospace
