#pragma once

// The GO metrics of the classification table as executable data: which
// submodules form each eigenspace, the condition on the eigenvalues, and
// campaigns that check both directions numerically.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gospace/builders.hpp"
#include "gospace/gocheck.hpp"
#include "gospace/numerics.hpp"
#include "gospace/repmod.hpp"

namespace gospace {

using RowParams = std::map<std::string, int>;

/// Named invariant pieces of m and how they group into eigenspaces.
struct Blueprint {
  std::vector<Matrix> parts;  // orthonormal m coordinates, mutually orthogonal
  std::vector<std::string> labels;
  /// Parts forming m_1, m_2, ... for the table's metrics.
  std::vector<std::vector<std::size_t>> groups;

  /// Orthonormal basis of each group.
  std::vector<Matrix> eigenspaces() const;
  std::vector<std::size_t> dims() const;
};

struct Table1Row {
  std::string id;     // "1", "6_1", ...
  std::string space;  // builder id without parameters, e.g. "table1/row6"
  std::string description;
  /// Supported parameters; the first entry is the default.
  std::vector<RowParams> params;
  std::size_t arity = 2;  // number of alphas
  std::string condition_text;
};

const std::vector<Table1Row>& table1_rows();
/// Throws ValidationError for unknown ids.
const Table1Row& table1_row(const std::string& id);
/// Throws ValidationError when the parameters are not supported by the row.
std::string row_space_id(const Table1Row& row, const RowParams& params);

/// Scale-invariant; equalities use |a - b| <= feas_tol * max(|a|, |b|).
/// Throws ValidationError on wrong arity or non-positive alphas.
bool condition(const Table1Row& row, const RowParams& params, const std::vector<double>& alphas,
               const TolerancePolicy& tol = {});
bool all_equal(const std::vector<double>& alphas, const TolerancePolicy& tol = {});
/// The table's metrics together with the normal one.
bool go_expected(const Table1Row& row, const RowParams& params, const std::vector<double>& alphas,
                 const TolerancePolicy& tol = {});

struct RowInstance {
  const Table1Row* row = nullptr;
  RowParams params;
  std::shared_ptr<const HomogeneousSpace> space;
  IsotypicDecomposition decomposition;
  Blueprint blueprint;
  std::vector<std::size_t> expected_submodule_dims;  // sorted descending
  std::vector<std::size_t> expected_eigenspace_dims;
};

/// Builds the space, decomposes m and assembles the blueprint from the chain.
RowInstance instantiate(const Table1Row& row, const RowParams& params, std::uint64_t seed,
                        const TolerancePolicy& tol = {});

/// At least five alphas satisfying the condition (never all equal).
std::vector<std::vector<double>> positive_alphas(const RowInstance& instance, std::uint64_t seed);

/// A metric that the table excludes.
struct NegativeCase {
  std::string label;
  std::vector<Matrix> eigenspaces;
  std::vector<double> alphas;
};

/// Alphas violating the condition where the eigenvalues alone can do so
/// (row 6), otherwise subdivisions of the blueprint the table does not list.
std::vector<NegativeCase> negative_cases(const RowInstance& instance, std::uint64_t seed);

/// rho = 1 - a2/a1, sigma = 1 - a3/a2, tau = 1 - a3/a1.
struct ReducedCoefficients {
  double rho = 0.0;
  double sigma = 0.0;
  double tau = 0.0;

  static ReducedCoefficients from_alphas(double a1, double a2, double a3);
  /// |(1 - tau) - (1 - sigma)(1 - rho)|.
  double identity_residual() const;
};

/// Odd n: (n - 1) sigma + tau = 0. Even n: sigma = 0.
bool row6_closed_form(int n, const ReducedCoefficients& c, const TolerancePolicy& tol = {});

struct CrossCheck {
  int n = 0;
  std::vector<double> alphas;
  ReducedCoefficients coefficients;
  bool closed_form = false;
  bool normal = false;
  GOReport go;
  bool agree = false;
};

/// Compares the closed form with the sampler on the three-part blueprint
/// C^n, so(2n) ⊖ u(n), R. Two alphas mean alpha_3 = alpha_2.
CrossCheck reduced_condition_crosscheck(const RowInstance& row6, const std::vector<double>& alphas,
                                        std::uint64_t seed, std::size_t samples = 200,
                                        const TolerancePolicy& tol = {});

struct CampaignOptions {
  std::size_t samples = 200;
  bool positives = true;
  bool negatives = true;
  bool normal = true;
  bool linear_graph = true;
  bool brackets = true;
};

struct InstanceResult {
  std::string kind;  // "positive", "normal", "negative"
  std::string label;
  std::vector<double> alphas;
  std::vector<std::size_t> eigenspace_dims;
  bool expected_go = false;
  GOReport go;
  std::optional<BracketReport> brackets;
  std::optional<LinearGraphCertificate> linear_graph;
  bool passed = false;
  std::vector<std::string> failures;
};

struct RowReport {
  std::string row;
  std::string space;
  RowParams params;
  std::uint64_t seed = 0;
  std::vector<std::size_t> submodule_dims;
  std::vector<std::size_t> expected_submodule_dims;
  std::vector<std::size_t> eigenspace_dims;
  std::vector<std::size_t> expected_eigenspace_dims;
  /// Largest invariance residual over the blueprint parts.
  double blueprint_invariance = 0.0;
  /// Per group: whether it is a union of isotypic components.
  std::vector<bool> isotypic_unions;
  std::vector<InstanceResult> instances;
  std::vector<CrossCheck> crosschecks;
  bool passed = false;
  std::vector<std::string> failures;
};

RowReport verify_row(const Table1Row& row, const RowParams& params, std::uint64_t seed,
                     const CampaignOptions& options = {}, const TolerancePolicy& tol = {});

struct CampaignReport {
  std::uint64_t seed = 0;
  std::vector<RowReport> rows;
  bool passed = false;
};

/// Every (row, params) pair listed, or all supported ones when `rows` is empty.
/// Instances are evaluated concurrently and merged in row order.
CampaignReport run_campaign(const std::vector<std::pair<std::string, RowParams>>& rows, std::uint64_t seed,
                            const CampaignOptions& options = {}, const TolerancePolicy& tol = {});
std::vector<std::pair<std::string, RowParams>> all_row_instances();

/// Tiny modules with known stationary subalgebras.
struct Table2Entry {
  std::string id;  // e.g. "su5/s-module"
  std::string group;
  std::string module;
  std::size_t module_dim = 0;
  ModuleType type = ModuleType::real;
  std::size_t stationary_dim = 0;
  std::function<Representation()> build;
};

const std::vector<Table2Entry>& table2_entries();

struct Table2Result {
  std::string id;
  std::vector<std::size_t> submodule_dims;
  ModuleType type = ModuleType::real;
  std::size_t centralizer_dim = 0;
  std::size_t expected_centralizer_dim = 0;
  bool passed = false;
};

/// Minimum centralizer over `samples` random vectors.
Table2Result verify_table2(const Table2Entry& entry, std::uint64_t seed, int samples = 10,
                           const TolerancePolicy& tol = {});

nlohmann::json to_json(const Blueprint& blueprint, bool include_bases = false);
nlohmann::json to_json(const ReducedCoefficients& c);
nlohmann::json to_json(const CrossCheck& c);
nlohmann::json to_json(const InstanceResult& r);
nlohmann::json to_json(const RowReport& r);
nlohmann::json to_json(const CampaignReport& r);
nlohmann::json to_json(const Table2Result& r);

}  // namespace gospace
