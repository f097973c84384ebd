#include "gospace/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "gospace/error.hpp"
#include "gospace/json_io.hpp"

namespace gospace {

namespace {

bool close(double a, double b, const TolerancePolicy& tol) {
  return std::abs(a - b) <= tol.feas_tol * std::max(std::abs(a), std::abs(b));
}

std::string params_text(const RowParams& p) {
  std::string out;
  for (const auto& [k, v] : p) {
    if (!out.empty()) out += "&";
    out += k + "=" + std::to_string(v);
  }
  return out;
}

Matrix stack(const std::vector<Matrix>& parts, const std::vector<std::size_t>& which) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (auto i : which) {
    rows = parts[i].rows();
    cols += parts[i].cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (auto i : which) {
    out.middleCols(c, parts[i].cols()) = parts[i];
    c += parts[i].cols();
  }
  return out;
}

int param(const RowParams& p, const char* key) {
  auto it = p.find(key);
  if (it == p.end()) throw ValidationError(std::string("missing parameter ") + key);
  return it->second;
}

// g coordinates of level i minus level j of the chain.
Matrix level_difference(const EmbeddingChain& chain, std::size_t outer, std::size_t inner) {
  return subspace_difference(chain.level_basis(outer), chain.level_basis(inner));
}

Matrix centralizer_of_level(const EmbeddingChain& chain, std::size_t level) {
  return centralizer_of_subalgebra(chain.top(), chain.level(level)).basis;
}

Blueprint make_blueprint(const HomogeneousSpace& space, const std::vector<Matrix>& g_parts,
                         std::vector<std::string> labels, std::vector<std::vector<std::size_t>> groups) {
  Blueprint b;
  for (const auto& part : g_parts) b.parts.push_back(space.subspace_in_m(part));
  b.labels = std::move(labels);
  b.groups = std::move(groups);
  return b;
}

Blueprint build_blueprint(const Table1Row& row, const HomogeneousSpace& space, std::uint64_t seed) {
  const EmbeddingChain& chain = space.chain();
  const std::size_t top = chain.length() - 1;
  if (row.id == "1" || row.id == "2" || row.id == "3" || row.id == "11") {
    return make_blueprint(space, {level_difference(chain, top, 1), level_difference(chain, 1, 0)},
                          {"m1", "m2"}, {{0}, {1}});
  }
  if (row.id == "5") {
    const Matrix center = centralizer_of_level(chain, 1);
    const Matrix su_p = subspace_difference(level_difference(chain, 1, 0), center);
    std::vector<Matrix> parts = {level_difference(chain, top, 1)};
    std::vector<std::string> labels = {"pC^n"};
    std::vector<std::size_t> m1 = {0};
    if (su_p.cols() > 0) {
      parts.push_back(su_p);
      labels.push_back("su(p)");
      m1.push_back(1);
    }
    parts.push_back(center);
    labels.push_back("R");
    return make_blueprint(space, parts, labels, {m1, {parts.size() - 1}});
  }
  if (row.id == "6_1" || row.id == "6_2") {
    std::vector<Matrix> parts = {level_difference(chain, top, 2), level_difference(chain, 2, 1),
                                 level_difference(chain, 1, 0)};
    std::vector<std::vector<std::size_t>> groups =
        row.id == "6_1" ? std::vector<std::vector<std::size_t>>{{0}, {1}, {2}}
                        : std::vector<std::vector<std::size_t>>{{0}, {1, 2}};
    return make_blueprint(space, parts, {"C^n", "so(2n)-u(n)", "R"}, groups);
  }
  if (row.id == "7" || row.id == "8") {
    return make_blueprint(space, {level_difference(chain, top, 1), level_difference(chain, 1, 0)},
                          {"m1", "m2"}, {{0}, {1}});
  }
  if (row.id == "9") {
    const Matrix center = centralizer_of_level(chain, 1);
    const Matrix outer = subspace_difference(level_difference(chain, top, 1), center);
    return make_blueprint(space, {outer, level_difference(chain, 1, 0), center}, {"H^n", "su(2n)-sp(n)", "R"},
                          {{0}, {1}, {2}});
  }
  if (row.id == "10") {
    // The two 7-dimensional modules are isomorphic; the table allows any
    // pair of orthogonal submodules of their sum, here a seeded rotation.
    const Matrix a = space.subspace_in_m(level_difference(chain, 1, 0));
    const Matrix b = space.subspace_in_m(level_difference(chain, top, 1));
    const Representation rep = Representation::isotropy(space);
    const auto t = equivariant_isomorphism(rep, a, b);
    if (!t) throw ComputationError("row 10: the two 7-dimensional modules are not isomorphic");
    Rng rng(derive_seed(seed, 10));
    const double theta = rng.uniform(0.2, 1.35);
    const Matrix bt = b * *t;
    Blueprint bp;
    bp.parts = {orthonormalize(std::cos(theta) * a + std::sin(theta) * bt),
                orthonormalize(-std::sin(theta) * a + std::cos(theta) * bt)};
    bp.labels = {"m1", "m2"};
    bp.groups = {{0}, {1}};
    return bp;
  }
  throw ValidationError("no blueprint for row " + row.id);
}

std::vector<std::size_t> expected_submodules(const Table1Row& row, const RowParams& params) {
  std::vector<std::size_t> out;
  auto add = [&](std::size_t dim, std::size_t count) { out.insert(out.end(), count, dim); };
  if (row.id == "1") {
    add(8, 1), add(7, 1);
  } else if (row.id == "2") {
    add(8, 2), add(7, 1), add(1, 1);
  } else if (row.id == "3") {
    add(8, 3), add(7, 1), add(1, 3);
  } else if (row.id == "5") {
    const auto n = static_cast<std::size_t>(param(params, "n"));
    const auto p = static_cast<std::size_t>(param(params, "p"));
    // p copies of C^n, then su(p) and the centre, all trivial.
    add(2 * n, p), add(1, p * p);
  } else if (row.id == "6_1" || row.id == "6_2") {
    const auto n = static_cast<std::size_t>(param(params, "n"));
    // C^n and so(2n) ⊖ u(n); for n = 4 the latter is two copies of R^6 (su(4) = so(6)).
    add(2 * n, 1);
    if (n == 4) {
      add(6, 2);
    } else {
      add(n * (n - 1), 1);
    }
    add(1, 1);
  } else if (row.id == "7") {
    const auto k = static_cast<std::size_t>(2 * param(params, "n") + 1);
    add(k * (k - 1), 1), add(1, 1);
  } else if (row.id == "8") {
    add(static_cast<std::size_t>(4 * param(params, "n")), 1), add(1, 3);
  } else if (row.id == "9") {
    const auto n = static_cast<std::size_t>(param(params, "n"));
    add(4 * n, 1), add((n - 1) * (2 * n + 1), 1), add(1, 1);
  } else if (row.id == "10") {
    add(7, 2);
  } else if (row.id == "11") {
    add(7, 3), add(1, 1);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<std::size_t> expected_eigenspaces(const Table1Row& row, const RowParams& params) {
  if (row.id == "1") return {8, 7};
  if (row.id == "2") return {17, 7};
  if (row.id == "3") return {27, 7};
  if (row.id == "5") {
    const auto n = static_cast<std::size_t>(param(params, "n"));
    const auto p = static_cast<std::size_t>(param(params, "p"));
    return {p * p - 1 + 2 * n * p, 1};
  }
  if (row.id == "6_1" || row.id == "6_2") {
    const auto n = static_cast<std::size_t>(param(params, "n"));
    if (row.id == "6_1") return {2 * n, n * (n - 1), 1};
    return {2 * n, n * (n - 1) + 1};
  }
  if (row.id == "7") {
    const auto k = static_cast<std::size_t>(2 * param(params, "n") + 1);
    return {k * (k - 1), 1};
  }
  if (row.id == "8") return {static_cast<std::size_t>(4 * param(params, "n")), 3};
  if (row.id == "9") {
    const auto n = static_cast<std::size_t>(param(params, "n"));
    return {4 * n, (n - 1) * (2 * n + 1), 1};
  }
  if (row.id == "10") return {7, 7};
  if (row.id == "11") return {15, 7};
  return {};
}

void check_alphas(const Table1Row& row, const std::vector<double>& alphas) {
  if (alphas.size() != row.arity) {
    throw ValidationError("row " + row.id + " takes " + std::to_string(row.arity) + " alphas, got " +
                          std::to_string(alphas.size()));
  }
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("alphas must be positive and finite");
  }
}

// alpha_3 on the identity n / a3 = (n - 1) / a2 + 1 / a1.
double row6_alpha3(int n, double a1, double a2) { return n / ((n - 1) / a2 + 1.0 / a1); }

bool isotypic_union(const IsotypicDecomposition& d, const Matrix& group) {
  const Matrix pg = projector(group);
  for (const auto& cls : d.classes) {
    const Matrix& iso = cls.isotypic_basis;
    const double inside = (pg * iso).squaredNorm();
    const double total = iso.squaredNorm();
    // Either fully inside or orthogonal.
    if (inside > 1e-8 * total && std::abs(inside - total) > 1e-8 * total) return false;
  }
  return true;
}

}  // namespace

std::vector<Matrix> Blueprint::eigenspaces() const {
  std::vector<Matrix> out;
  for (const auto& g : groups) out.push_back(stack(parts, g));
  return out;
}

std::vector<std::size_t> Blueprint::dims() const {
  std::vector<std::size_t> out;
  for (const auto& g : groups) {
    std::size_t d = 0;
    for (auto i : g) d += static_cast<std::size_t>(parts[i].cols());
    out.push_back(d);
  }
  return out;
}

const std::vector<Table1Row>& table1_rows() {
  static const std::vector<Table1Row> rows = {
      {"1", "table1/row1", "Spin(7) ⊂ SO(8) ⊂ SO(9)", {{}}, 2, "a1 != a2"},
      {"2", "table1/row2", "Spin(7) ⊂ SO(8) ⊂ SO(10)", {{}}, 2, "a1 != a2"},
      {"3", "table1/row3", "Spin(7) ⊂ SO(8) ⊂ SO(11)", {{}}, 2, "a1 != a2"},
      {"5",
       "table1/row5",
       "SU(n) ⊂ S(U(n) x U(p)) ⊂ SU(n+p)",
       {{{"n", 3}, {"p", 2}}, {{"n", 2}, {"p", 1}}, {{"n", 4}, {"p", 3}}},
       2,
       "a1 != a2"},
      {"6_1",
       "table1/row6",
       "SU(n) ⊂ U(n) ⊂ SO(2n) ⊂ SO(2n+1), n odd",
       {{{"n", 3}}, {{"n", 5}}},
       3,
       "n/a3 = (n-1)/a2 + 1/a1 and a1 != a2"},
      {"6_2", "table1/row6", "SU(n) ⊂ U(n) ⊂ SO(2n) ⊂ SO(2n+1), n even", {{{"n", 4}}}, 2, "a1 != a2"},
      {"7", "table1/row7", "SU(2n+1) ⊂ U(2n+1) ⊂ SO(4n+2)", {{{"n", 2}}}, 2, "a1 != a2"},
      {"8", "table1/row8", "Sp(n) ⊂ Sp(n) x Sp(1) ⊂ Sp(n+1)", {{{"n", 1}}, {{"n", 2}}}, 2, "a1 != a2"},
      {"9", "table1/row9", "Sp(n) ⊂ SU(2n) ⊂ SU(2n+1)", {{{"n", 2}}}, 3, "not a1 = a2 = a3"},
      {"10", "table1/row10", "G2 ⊂ Spin(7) ⊂ Spin(8)", {{}}, 2, "a1 != a2"},
      {"11", "table1/row11", "G2 ⊂ SO(7) ⊂ SO(9)", {{}}, 2, "a1 != a2"},
  };
  return rows;
}

const Table1Row& table1_row(const std::string& id) {
  for (const auto& r : table1_rows()) {
    if (r.id == id) return r;
  }
  throw ValidationError("unknown table row '" + id + "'");
}

std::string row_space_id(const Table1Row& row, const RowParams& params) {
  if (std::find(row.params.begin(), row.params.end(), params) == row.params.end()) {
    throw ValidationError("row " + row.id + " does not support parameters '" + params_text(params) + "'");
  }
  return params.empty() ? row.space : row.space + "?" + params_text(params);
}

bool all_equal(const std::vector<double>& alphas, const TolerancePolicy& tol) {
  for (double a : alphas) {
    if (!close(a, alphas.front(), tol)) return false;
  }
  return true;
}

bool condition(const Table1Row& row, const RowParams& params, const std::vector<double>& alphas,
               const TolerancePolicy& tol) {
  check_alphas(row, alphas);
  if (row.id == "9") return !all_equal(alphas, tol);
  const bool distinct = !close(alphas[0], alphas[1], tol);
  if (row.id == "6_1") {
    const int n = param(params, "n");
    const double lhs = n / alphas[2];
    const double rhs = (n - 1) / alphas[1] + 1.0 / alphas[0];
    return distinct && close(lhs, rhs, tol);
  }
  return distinct;
}

bool go_expected(const Table1Row& row, const RowParams& params, const std::vector<double>& alphas,
                 const TolerancePolicy& tol) {
  return condition(row, params, alphas, tol) || all_equal(alphas, tol);
}

RowInstance instantiate(const Table1Row& row, const RowParams& params, std::uint64_t seed,
                        const TolerancePolicy& tol) {
  RowInstance out;
  out.row = &row;
  out.params = params;
  out.space = std::make_shared<const HomogeneousSpace>(build_space(row_space_id(row, params), tol));
  out.decomposition = decompose(*out.space, derive_seed(seed, 1), tol);
  out.blueprint = build_blueprint(row, *out.space, seed);
  out.expected_submodule_dims = expected_submodules(row, params);
  out.expected_eigenspace_dims = expected_eigenspaces(row, params);
  return out;
}

std::vector<std::vector<double>> positive_alphas(const RowInstance& instance, std::uint64_t seed) {
  const Table1Row& row = *instance.row;
  Rng rng(derive_seed(seed, 20));
  std::vector<std::vector<double>> pairs = {{1.0, 2.0}, {2.0, 1.0}, {1.0, 0.5}, {1.0, 3.7}, {2.5, 0.4}};
  pairs.push_back({rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)});
  if (row.id == "9") {
    return {{1.0, 2.0, 3.0}, {1.0, 1.0, 2.0}, {2.0, 1.0, 1.0}, {1.0, 2.0, 1.0}, {3.0, 0.5, 1.2},
            {rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)}};
  }
  if (row.id == "6_1") {
    const int n = param(instance.params, "n");
    for (auto& p : pairs) p.push_back(row6_alpha3(n, p[0], p[1]));
  }
  return pairs;
}

std::vector<NegativeCase> negative_cases(const RowInstance& instance, std::uint64_t seed) {
  const Table1Row& row = *instance.row;
  const Blueprint& bp = instance.blueprint;
  std::vector<NegativeCase> out;
  const auto& parts = bp.parts;

  if (row.id == "6_1") {
    const int n = param(instance.params, "n");
    const std::vector<Matrix> spaces = bp.eigenspaces();
    const std::vector<std::pair<double, double>> base = {{1.0, 2.0}, {2.0, 1.0}, {1.0, 0.5}, {1.0, 3.7},
                                                         {2.5, 0.4}};
    const double factors[] = {1.1, 0.9, 1.25, 0.8, 1.5};
    for (std::size_t i = 0; i < base.size(); ++i) {
      const auto [a1, a2] = base[i];
      const double a3 = row6_alpha3(n, a1, a2) * factors[i];
      out.push_back({"identity off by factor " + std::to_string(factors[i]), spaces, {a1, a2, a3}});
    }
    out.push_back({"a1 = a2 != a3", spaces, {1.0, 1.0, 2.0}});
    return out;
  }
  if (row.id == "6_2") {
    // The trivial piece of m_2 gets its own eigenvalue.
    const std::vector<Matrix> spaces = {parts[0], parts[1], parts[2]};
    for (const auto& a : std::vector<std::vector<double>>{
             {1.0, 2.0, 3.0}, {1.0, 2.0, 1.0}, {2.0, 1.0, 3.0}, {1.0, 2.0, 2.5}, {3.0, 1.0, 2.0}}) {
      out.push_back({"R split from m2", spaces, a});
    }
    return out;
  }

  const std::vector<Matrix> spaces = bp.eigenspaces();
  auto without = [&](const Matrix& group, const Matrix& piece) { return subspace_difference(group, piece); };

  if (row.id == "2" || row.id == "3" || row.id == "11") {
    // The centralizer of the middle algebra inside m_1 gets its own eigenvalue.
    const EmbeddingChain& chain = instance.space->chain();
    const Matrix c = instance.space->subspace_in_m(centralizer_of_level(chain, 1));
    const Matrix rest = without(spaces[0], c);
    out.push_back({"centralizer split from m1", {rest, c, spaces[1]}, {1.0, 2.0, 3.0}});
    out.push_back({"centralizer split from m1", {rest, c, spaces[1]}, {1.0, 3.0, 2.0}});
    out.push_back({"centralizer merged into m2", {rest, orthonormalize(stack({c, spaces[1]}, {0, 1}))}, {1.0, 2.0}});
  } else if (row.id == "5" && parts.size() == 3) {
    out.push_back({"su(p) split from m1", {parts[0], parts[1], parts[2]}, {1.0, 2.0, 3.0}});
    out.push_back({"su(p) merged into m2", {parts[0], orthonormalize(stack(parts, {1, 2}))}, {1.0, 2.0}});
  } else if (row.id == "8") {
    const Matrix& sp1 = parts[1];
    out.push_back({"sp(1) split 1+2", {parts[0], sp1.leftCols(1), sp1.rightCols(2)}, {1.0, 2.0, 3.0}});
    out.push_back({"sp(1) split 1+2", {parts[0], sp1.leftCols(1), sp1.rightCols(2)}, {2.0, 1.0, 1.5}});
  }

  // Splits of m_1 into two halves that are not submodules.
  Rng rng(derive_seed(seed, 30));
  const Matrix& m1 = spaces[0];
  const Eigen::Index d = m1.cols();
  const Eigen::Index half = d / 2;
  for (const double a2 : {3.0, 0.5}) {
    Matrix mix(d, d);
    for (Eigen::Index c = 0; c < d; ++c) mix.col(c) = rng.gaussian(d);
    const Matrix rotation = orthonormalize(Matrix(m1 * mix));
    std::vector<Matrix> split = {rotation.leftCols(half), rotation.rightCols(d - half)};
    std::vector<double> alphas = {1.0, a2};
    for (std::size_t i = 1; i < spaces.size(); ++i) {
      split.push_back(spaces[i]);
      alphas.push_back(1.0 + static_cast<double>(i));
    }
    out.push_back({"non-invariant split of m1", split, alphas});
  }
  return out;
}

ReducedCoefficients ReducedCoefficients::from_alphas(double a1, double a2, double a3) {
  return {1.0 - a2 / a1, 1.0 - a3 / a2, 1.0 - a3 / a1};
}

double ReducedCoefficients::identity_residual() const {
  return std::abs((1.0 - tau) - (1.0 - sigma) * (1.0 - rho));
}

bool row6_closed_form(int n, const ReducedCoefficients& c, const TolerancePolicy& tol) {
  // The coefficients are dimensionless, so an absolute floor of one is safe.
  if (n % 2 == 0) return std::abs(c.sigma) <= tol.feas_tol;
  const double lhs = (n - 1) * c.sigma;
  const double rhs = -c.tau;
  return std::abs(lhs - rhs) <= tol.feas_tol * std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

CrossCheck reduced_condition_crosscheck(const RowInstance& row6, const std::vector<double>& alphas,
                                        std::uint64_t seed, std::size_t samples, const TolerancePolicy& tol) {
  if (row6.row == nullptr || (row6.row->id != "6_1" && row6.row->id != "6_2")) {
    throw ValidationError("the reduced condition applies to row 6 only");
  }
  if (alphas.size() != 2 && alphas.size() != 3) throw ValidationError("row 6 takes two or three alphas");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("alphas must be positive and finite");
  }
  CrossCheck out;
  out.n = param(row6.params, "n");
  out.alphas = alphas;
  if (out.alphas.size() == 2) out.alphas.push_back(alphas[1]);
  out.coefficients = ReducedCoefficients::from_alphas(out.alphas[0], out.alphas[1], out.alphas[2]);
  out.closed_form = row6_closed_form(out.n, out.coefficients, tol);
  out.normal = all_equal(out.alphas, tol);
  const auto& p = row6.blueprint.parts;
  const MetricSpec metric = MetricSpec::from_subspaces(*row6.space, {p[0], p[1], p[2]}, out.alphas, tol);
  out.go = check_go(*row6.space, metric, samples, seed, tol);
  out.agree = out.closed_form == (out.go.verdict == Verdict::go_consistent);
  return out;
}

namespace {

InstanceResult run_instance(const RowInstance& inst, std::string kind, std::string label,
                            const std::vector<Matrix>& spaces, const std::vector<double>& alphas,
                            bool expected_go, std::uint64_t seed, const CampaignOptions& options,
                            const TolerancePolicy& tol) {
  InstanceResult r;
  r.kind = std::move(kind);
  r.label = std::move(label);
  r.alphas = alphas;
  r.expected_go = expected_go;
  const MetricSpec metric = MetricSpec::from_subspaces(*inst.space, spaces, alphas, tol);
  for (const auto& e : metric.eigenspaces()) r.eigenspace_dims.push_back(e.dim());
  r.go = check_go(*inst.space, metric, options.samples, seed, tol);
  const bool go = r.go.verdict == Verdict::go_consistent;
  if (go != expected_go) {
    r.failures.push_back(std::string("expected ") + (expected_go ? "GO-consistent" : "not-GO") + ", got " +
                         to_string(r.go.verdict));
  }
  if (!expected_go && r.go.verdict == Verdict::not_go &&
      (!r.go.certificate || r.go.certificate->residual <= tol.infeasible_threshold())) {
    r.failures.push_back("not-GO without a certificate above the margin");
  }
  if (go && options.brackets) {
    r.brackets = bracket_structure_check(*inst.space, metric, seed, tol);
    if (!r.brackets->passed) r.failures.push_back("bracket structure check failed");
  }
  if (go && options.linear_graph) {
    r.linear_graph = linear_graph_fit(*inst.space, metric, seed, tol);
    if (metric.is_normal()) {
      if (!r.linear_graph->accepted || r.linear_graph->system_residual > 1e-10) {
        r.failures.push_back("normal metric not certified naturally reductive");
      }
    } else if (r.linear_graph->accepted || r.linear_graph->heldout_residual <= tol.infeasible_threshold()) {
      r.failures.push_back("linear graph fit did not refuse a non-normal metric");
    }
  }
  r.passed = r.failures.empty();
  return r;
}

}  // namespace

RowReport verify_row(const Table1Row& row, const RowParams& params, std::uint64_t seed,
                     const CampaignOptions& options, const TolerancePolicy& tol) {
  RowReport rep;
  rep.row = row.id;
  rep.space = row_space_id(row, params);
  rep.params = params;
  rep.seed = seed;
  const RowInstance inst = instantiate(row, params, seed, tol);

  rep.submodule_dims = inst.decomposition.dims();
  std::sort(rep.submodule_dims.begin(), rep.submodule_dims.end(), std::greater<>());
  rep.expected_submodule_dims = inst.expected_submodule_dims;
  rep.eigenspace_dims = inst.blueprint.dims();
  rep.expected_eigenspace_dims = inst.expected_eigenspace_dims;
  if (rep.submodule_dims != rep.expected_submodule_dims) rep.failures.push_back("submodule dimensions differ");
  if (rep.eigenspace_dims != rep.expected_eigenspace_dims) rep.failures.push_back("eigenspace dimensions differ");

  const Representation iso = Representation::isotropy(*inst.space);
  for (const auto& part : inst.blueprint.parts) {
    rep.blueprint_invariance = std::max(rep.blueprint_invariance, iso.invariance_residual(part));
  }
  if (rep.blueprint_invariance > 1e2 * tol.feas_tol) rep.failures.push_back("blueprint part not invariant");
  for (const auto& e : inst.blueprint.eigenspaces()) rep.isotypic_unions.push_back(isotypic_union(inst.decomposition, e));

  const std::vector<Matrix> spaces = inst.blueprint.eigenspaces();
  std::uint64_t k = 0;
  if (options.positives) {
    for (const auto& a : positive_alphas(inst, seed)) {
      const bool expected = go_expected(row, params, a, tol);
      rep.instances.push_back(
          run_instance(inst, "positive", "table metric", spaces, a, expected, derive_seed(seed, 100 + k++), options, tol));
    }
  }
  if (options.normal) {
    const std::vector<double> ones(row.arity, 1.0);
    rep.instances.push_back(
        run_instance(inst, "normal", "normal metric", spaces, ones, true, derive_seed(seed, 100 + k++), options, tol));
  }
  if (options.negatives) {
    for (const auto& c : negative_cases(inst, seed)) {
      bool expected = false;
      if (c.eigenspaces.size() == spaces.size() && c.alphas.size() == row.arity && row.id == "6_1") {
        expected = go_expected(row, params, c.alphas, tol);
      }
      rep.instances.push_back(
          run_instance(inst, "negative", c.label, c.eigenspaces, c.alphas, expected, derive_seed(seed, 100 + k++), options, tol));
    }
  }
  if (row.id == "6_1" || row.id == "6_2") {
    const int n = param(params, "n");
    std::vector<std::vector<double>> probes = {{1.0, 2.0, row6_alpha3(n, 1.0, 2.0)},
                                               {1.0, 2.0},
                                               {1.0, 1.0, 2.0},
                                               {2.0, 2.0, 2.0},
                                               {1.0, 2.0, 3.0}};
    for (const auto& a : probes) {
      rep.crosschecks.push_back(reduced_condition_crosscheck(inst, a, derive_seed(seed, 200 + k++), options.samples, tol));
      if (!rep.crosschecks.back().agree) rep.failures.push_back("reduced condition disagrees with the sampler");
    }
  }
  for (const auto& r : rep.instances) {
    if (!r.passed) rep.failures.push_back(r.kind + " instance '" + r.label + "' failed");
  }
  rep.passed = rep.failures.empty();
  return rep;
}

std::vector<std::pair<std::string, RowParams>> all_row_instances() {
  std::vector<std::pair<std::string, RowParams>> out;
  for (const auto& r : table1_rows()) {
    for (const auto& p : r.params) out.emplace_back(r.id, p);
  }
  return out;
}

CampaignReport run_campaign(const std::vector<std::pair<std::string, RowParams>>& rows, std::uint64_t seed,
                            const CampaignOptions& options, const TolerancePolicy& tol) {
  const auto jobs = rows.empty() ? all_row_instances() : rows;
  for (const auto& [id, params] : jobs) row_space_id(table1_row(id), params);

  std::vector<RowReport> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::size_t next = 0;
  std::mutex lock;
  auto worker = [&] {
    for (;;) {
      std::size_t i = 0;
      {
        std::lock_guard<std::mutex> guard(lock);
        if (next >= jobs.size()) return;
        i = next++;
      }
      try {
        results[i] = verify_row(table1_row(jobs[i].first), jobs[i].second, seed, options, tol);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(jobs.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CampaignReport out;
  out.seed = seed;
  out.rows = std::move(results);
  out.passed = std::all_of(out.rows.begin(), out.rows.end(), [](const RowReport& r) { return r.passed; });
  return out;
}

// ---------------------------------------------------------------------------
// Tiny modules

namespace {

Representation s_module(const LieAlgebraPtr& top, const std::vector<ComplexMatrix>& sub,
                        const std::vector<ComplexMatrix>& middle, const std::string& name) {
  const Subalgebra h = Subalgebra::from_matrices(top, realify_all(sub), name);
  const Matrix mid = Subalgebra::from_matrices(top, realify_all(middle), "middle").image_basis();
  const Matrix complement = subspace_difference(Matrix::Identity(static_cast<Eigen::Index>(top->dim()),
                                                                 static_cast<Eigen::Index>(top->dim())),
                                                mid);
  return Representation::restricted_adjoint(h, complement);
}

std::size_t dim_so(std::size_t n) { return n * (n - 1) / 2; }
std::size_t dim_sp(std::size_t n) { return n * (2 * n + 1); }

}  // namespace

const std::vector<Table2Entry>& table2_entries() {
  static const std::vector<Table2Entry> entries = [] {
    std::vector<Table2Entry> out;
    for (int n = 5; n <= 7; ++n) {
      const auto un = static_cast<std::size_t>(n);
      out.push_back({"so" + std::to_string(n) + "/standard", "SO(" + std::to_string(n) + ")", "standard R^n", un,
                     ModuleType::real, dim_so(un - 1), [n] { return Representation::standard(build_so(n)); }});
    }
    for (int n = 3; n <= 5; ++n) {
      const auto un = static_cast<std::size_t>(n);
      out.push_back({"su" + std::to_string(n) + "/standard", "SU(" + std::to_string(n) + ")", "standard C^n",
                     2 * un, ModuleType::complex, un * un - 2 * un,
                     [n] { return Representation::standard(build_su(n)); }});
    }
    for (int n = 2; n <= 3; ++n) {
      const auto un = static_cast<std::size_t>(n);
      out.push_back({"sp" + std::to_string(n) + "/standard", "Sp(" + std::to_string(n) + ")", "standard H^n",
                     4 * un, ModuleType::quaternionic, dim_sp(un - 1),
                     [n] { return Representation::standard(build_sp(n)); }});
    }
    for (int n = 5; n <= 6; ++n) {
      const auto un = static_cast<std::size_t>(n);
      out.push_back({"su" + std::to_string(n) + "/s-module", "SU(" + std::to_string(n) + ")",
                     "so(2n) ⊖ u(n)", un * (un - 1), ModuleType::complex, 3 * (un / 2), [n] {
                       auto top = std::make_shared<const LieAlgebra>(build_so(2 * n));
                       return s_module(top, complex_su_basis(n), complex_u_basis(n),
                                       "su(" + std::to_string(n) + ")");
                     }});
    }
    out.push_back({"sp3/s-module", "Sp(3)", "su(2n) ⊖ sp(n)", 14, ModuleType::real, 9, [] {
                     auto top = std::make_shared<const LieAlgebra>(build_su(6));
                     return s_module(top, complex_sp_basis(3), complex_sp_basis(3), "sp(3)");
                   }});
    out.push_back({"spin7/spin", "Spin(7)", "spin R^8", 8, ModuleType::real, 14,
                   [] { return Representation::standard(build_spin7_in_so8().algebra()); }});
    out.push_back({"spin9/spin", "Spin(9)", "spin R^16", 16, ModuleType::real, 21,
                   [] { return Representation::standard(build_spin9()); }});
    out.push_back({"g2/standard", "G2", "standard R^7", 7, ModuleType::real, 8,
                   [] { return Representation::standard(build_g2().algebra()); }});
    return out;
  }();
  return entries;
}

Table2Result verify_table2(const Table2Entry& entry, std::uint64_t seed, int samples, const TolerancePolicy& tol) {
  Table2Result out;
  out.id = entry.id;
  out.expected_centralizer_dim = entry.stationary_dim;
  const Representation rep = entry.build();
  const IsotypicDecomposition d = decompose(rep, derive_seed(seed, 1), tol);
  out.submodule_dims = d.dims();
  const Matrix whole = Matrix::Identity(rep.dim(), rep.dim());
  if (d.submodules.size() == 1) out.type = d.submodules.front().type;
  out.centralizer_dim = generic_centralizer_dim(rep, whole, derive_seed(seed, 2), samples, tol);
  out.passed = d.submodules.size() == 1 && out.submodule_dims.front() == entry.module_dim &&
               out.type == entry.type && out.centralizer_dim == entry.stationary_dim;
  return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const Blueprint& b, bool include_bases) {
  nlohmann::json parts = nlohmann::json::array();
  for (std::size_t i = 0; i < b.parts.size(); ++i) {
    nlohmann::json p = {{"label", b.labels[i]}, {"dim", b.parts[i].cols()}};
    if (include_bases) p["basis"] = matrix_to_json(b.parts[i]);
    parts.push_back(p);
  }
  return {{"parts", parts}, {"groups", b.groups}, {"dims", b.dims()}};
}

nlohmann::json to_json(const ReducedCoefficients& c) {
  return {{"rho", c.rho}, {"sigma", c.sigma}, {"tau", c.tau}, {"identity_residual", c.identity_residual()}};
}

nlohmann::json to_json(const CrossCheck& c) {
  return {{"n", c.n},
          {"alphas", c.alphas},
          {"reduced", to_json(c.coefficients)},
          {"closed_form", c.closed_form},
          {"normal", c.normal},
          {"verdict", to_string(c.go.verdict)},
          {"max_residual", c.go.max_residual},
          {"agree", c.agree}};
}

nlohmann::json to_json(const InstanceResult& r) {
  nlohmann::json j = {{"kind", r.kind},
                      {"label", r.label},
                      {"alphas", r.alphas},
                      {"eigenspace_dims", r.eigenspace_dims},
                      {"expected_go", r.expected_go},
                      {"go", to_json(r.go)},
                      {"passed", r.passed},
                      {"failures", r.failures}};
  if (r.brackets) j["brackets"] = to_json(*r.brackets);
  if (r.linear_graph) {
    nlohmann::json lg = to_json(*r.linear_graph);
    lg.erase("L");
    j["linear_graph"] = lg;
  }
  return j;
}

nlohmann::json to_json(const RowReport& r) {
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& i : r.instances) instances.push_back(to_json(i));
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.crosschecks) checks.push_back(to_json(c));
  return {{"row", r.row},
          {"space", r.space},
          {"params", r.params},
          {"seed", r.seed},
          {"submodule_dims", r.submodule_dims},
          {"expected_submodule_dims", r.expected_submodule_dims},
          {"eigenspace_dims", r.eigenspace_dims},
          {"expected_eigenspace_dims", r.expected_eigenspace_dims},
          {"blueprint_invariance", r.blueprint_invariance},
          {"isotypic_unions", r.isotypic_unions},
          {"instances", instances},
          {"crosschecks", checks},
          {"passed", r.passed},
          {"failures", r.failures}};
}

nlohmann::json to_json(const CampaignReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  return {{"seed", r.seed}, {"rows", rows}, {"passed", r.passed}};
}

nlohmann::json to_json(const Table2Result& r) {
  return {{"id", r.id},
          {"submodule_dims", r.submodule_dims},
          {"type", to_string(r.type)},
          {"centralizer_dim", r.centralizer_dim},
          {"expected_centralizer_dim", r.expected_centralizer_dim},
          {"passed", r.passed}};
}

}  // namespace gospace
