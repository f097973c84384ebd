// End-to-end checks over the whole catalog. Prints one PASS/FAIL line per
// criterion and exits nonzero if any fails.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gospace/catalog.hpp"
#include "gospace/natred.hpp"

namespace {

using namespace gospace;

constexpr double kFeasTol = 1e-8;
constexpr double kNegative = 1e-4;  // feas_tol * margin_factor
constexpr double kNormalL = 1e-10;
constexpr std::size_t kSamples = 200;
constexpr std::uint64_t kSeed = 1;
const std::vector<std::uint64_t> kSeedSet = {1, 2, 3, 4, 5};

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    passed = false;
    if (notes.size() < 8) notes.push_back(why);
  }
};

void report(int number, const std::string& title, const Outcome& o, bool& all) {
  std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << number << ": " << title << "\n";
  for (const auto& n : o.notes) std::cout << "    " << n << "\n";
  std::cout.flush();
  all = all && o.passed;
}

std::string params_text(const RowParams& p) {
  std::string s;
  for (const auto& [k, v] : p) s += (s.empty() ? "" : ",") + k + "=" + std::to_string(v);
  return s;
}

std::string dims_text(const std::vector<std::size_t>& d) {
  std::string s = "{";
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s + "}";
}

std::string where(const RowReport& r) { return "row " + r.row + (r.params.empty() ? "" : " (" + params_text(r.params) + ")"); }

// Eigenspace dimensions derived by hand from dim g - dim h and the chain.
struct ShapeOracle {
  std::string row;
  RowParams params;
  std::vector<std::size_t> dims;
};

std::vector<ShapeOracle> shape_oracles() {
  return {
      // so(9) / spin(7): so(9) - so(8) = 8, so(8) - spin(7) = 7.
      {"1", {}, {8, 7}},
      // so(10): so(10) - so(8) = 2*8 + 1 = 17.
      {"2", {}, {17, 7}},
      // so(11): 3*8 + 3 = 27.
      {"3", {}, {27, 7}},
      // su(5) / su(3): 2*3*2 + (2^2 - 1) = 15, center 1.
      {"5", {{"n", 3}, {"p", 2}}, {15, 1}},
      // so(7) / su(3): C^3 = 6, so(6) - u(3) = 15 - 9 = 6, center 1.
      {"6_1", {{"n", 3}}, {6, 6, 1}},
      // so(9) / su(4): C^4 = 8, so(8) - su(4) = 28 - 15 = 13.
      {"6_2", {{"n", 4}}, {8, 13}},
      // so(10) / su(5): 45 - 24 = 21 = 20 + 1.
      {"7", {{"n", 2}}, {20, 1}},
      // sp(2) / sp(1): H = 4, sp(1) = 3.
      {"8", {{"n", 1}}, {4, 3}},
      // su(5) / sp(2): H^2 = 8, su(4) - sp(2) = 5, center 1.
      {"9", {{"n", 2}}, {8, 5, 1}},
      // spin(8) / g2: 28 - 21 = 7, 21 - 14 = 7.
      {"10", {}, {7, 7}},
      // so(9) / g2: 36 - 21 = 15, 21 - 14 = 7.
      {"11", {}, {15, 7}},
  };
}

Outcome shapes(const CampaignReport& c) {
  Outcome o;
  for (const auto& oracle : shape_oracles()) {
    const RowReport* found = nullptr;
    for (const auto& r : c.rows) {
      if (r.row == oracle.row && r.params == oracle.params) found = &r;
    }
    if (found == nullptr) {
      o.fail("row " + oracle.row + " missing from the campaign");
      continue;
    }
    if (found->eigenspace_dims != oracle.dims) {
      o.fail(where(*found) + ": got " + dims_text(found->eigenspace_dims) + ", expected " + dims_text(oracle.dims));
    }
    if (found->submodule_dims != found->expected_submodule_dims) {
      o.fail(where(*found) + ": submodules " + dims_text(found->submodule_dims));
    }
  }
  return o;
}

Outcome positives(const CampaignReport& c) {
  Outcome o;
  for (const auto& r : c.rows) {
    const Table1Row& row = table1_row(r.row);
    std::size_t count = 0;
    for (const auto& inst : r.instances) {
      if (inst.kind != "positive") continue;
      ++count;
      if (!condition(row, r.params, inst.alphas)) o.fail(where(r) + ": positive alphas violate the condition");
      if (inst.go.total < kSamples) o.fail(where(r) + ": only " + std::to_string(inst.go.total) + " samples");
      if (inst.go.feasible != inst.go.total || inst.go.worst_feasible_residual > kFeasTol) {
        std::ostringstream s;
        s << where(r) << ": residual " << inst.go.max_residual << " for a positive metric";
        o.fail(s.str());
      }
    }
    if (count < 5) o.fail(where(r) + ": only " + std::to_string(count) + " positive alpha vectors");
  }
  return o;
}

Outcome negatives(const std::vector<CampaignReport>& campaigns) {
  Outcome o;
  std::size_t total = 0;
  bool identity_case = false;
  for (const auto& c : campaigns) {
    for (const auto& r : c.rows) {
      for (const auto& inst : r.instances) {
        if (inst.kind != "negative" || inst.expected_go) continue;
        ++total;
        identity_case |= inst.label.rfind("identity off", 0) == 0;
        const bool witnessed = inst.go.verdict == Verdict::not_go && inst.go.certificate &&
                               inst.go.certificate->residual > kNegative;
        if (!witnessed) {
          o.fail("seed " + std::to_string(c.seed) + ", " + where(r) + ", '" + inst.label + "': no witness above 1e-4");
        }
      }
    }
  }
  if (!identity_case) o.fail("no identity-violation cases were run");
  if (total == 0) o.fail("no negative cases were run");
  return o;
}

Outcome separation(const CampaignReport& c) {
  Outcome o;
  std::size_t refused = 0;
  std::size_t accepted = 0;
  for (const auto& r : c.rows) {
    for (const auto& inst : r.instances) {
      if (inst.go.verdict != Verdict::go_consistent) continue;
      if (!inst.linear_graph) {
        o.fail(where(r) + ": no linear graph fit for '" + inst.label + "'");
        continue;
      }
      const auto& lg = *inst.linear_graph;
      if (inst.eigenspace_dims.size() == 1) {
        if (!lg.accepted || lg.system_residual > kNormalL || lg.l.norm() > kNormalL) {
          o.fail(where(r) + ": normal metric not accepted with L = 0");
        }
        ++accepted;
      } else {
        if (lg.accepted || lg.heldout_residual <= kNegative) {
          std::ostringstream s;
          s << where(r) << ": non-normal alphas accepted (held-out " << lg.heldout_residual << ")";
          o.fail(s.str());
        }
        ++refused;
      }
    }
  }
  if (refused == 0 || accepted == 0) o.fail("nothing to separate");
  return o;
}

// All sign patterns of k coefficients, 100 draws each.
Outcome sharpness() {
  Outcome o;
  for (const char* id : {"lo/su2?k=2", "lo/su2?k=3"}) {
    const HomogeneousSpace space = build_space(id);
    const IdealDecomposition ideals = decompose_ideals(space, kSeed);
    const std::size_t k = ideals.size();
    Rng rng(derive_seed(kSeed, k));
    for (unsigned pattern = 0; pattern < (1u << k); ++pattern) {
      for (int draw = 0; draw < 100; ++draw) {
        std::vector<double> gammas(k);
        int negatives = 0;
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          const bool neg = (pattern >> i) & 1u;
          gammas[i] = rng.uniform(0.1, 3.0) * (neg ? -1.0 : 1.0);
          negatives += neg;
          sum += gammas[i];
        }
        const bool admissible = negatives == 0 || (negatives == 1 && sum < 0.0);
        const NatRedMetric m = natred_case_b(ideals, gammas);
        std::ostringstream tag;
        tag << id << " gamma (";
        for (std::size_t i = 0; i < k; ++i) tag << (i ? ", " : "") << gammas[i];
        tag << ")";
        if (admissible) {
          if (!m.positive_definite || !m.accepted) {
            o.fail(tag.str() + ": admissible but Gram not positive definite");
            continue;
          }
          if (!check_kostant(m).passed) o.fail(tag.str() + ": Kostant check failed");
          if (check_natred_identity(m) > kFeasTol) o.fail(tag.str() + ": identity residual too large");
          if (!linear_graph_fit(space, to_metric_spec(m), derive_seed(kSeed, draw)).accepted) {
            o.fail(tag.str() + ": linear graph fit refused");
          }
        } else if (m.gram_min_eigenvalue > 0.0 || m.accepted) {
          o.fail(tag.str() + ": inadmissible but Gram eigenvalues all positive");
        }
      }
    }
  }
  return o;
}

// Stationary subalgebra dimensions from the group and module alone.
std::size_t stationary_oracle(const std::string& id) {
  const auto slash = id.find('/');
  const std::string group = id.substr(0, slash);
  const std::string module = id.substr(slash + 1);
  const std::size_t digits = group.find_first_of("0123456789");
  const std::string family = group.substr(0, digits);
  const std::size_t n = std::stoul(group.substr(digits));
  if (family == "so" && module == "standard") return (n - 1) * (n - 2) / 2;
  if (family == "su" && module == "standard") return n * n - 2 * n;
  if (family == "sp" && module == "standard") return (n - 1) * (2 * n - 1);
  if (family == "su" && module == "s-module") return 3 * (n / 2);
  if (family == "sp" && module == "s-module") return 3 * n;
  if (family == "spin" && n == 7) return 14;
  if (family == "spin" && n == 9) return 21;
  if (family == "g" && n == 2) return 8;
  return static_cast<std::size_t>(-1);
}

Outcome tiny_modules() {
  Outcome o;
  for (const auto& e : table2_entries()) {
    const Table2Result r = verify_table2(e, kSeed, 10);
    const std::size_t oracle = stationary_oracle(e.id);
    if (r.centralizer_dim != oracle || !r.passed) {
      o.fail(e.id + ": stationary dim " + std::to_string(r.centralizer_dim) + ", expected " + std::to_string(oracle));
    }
  }
  return o;
}

Outcome brackets(const CampaignReport& c) {
  Outcome o;
  std::size_t checked = 0;
  for (const auto& r : c.rows) {
    for (const auto& inst : r.instances) {
      if (inst.go.verdict != Verdict::go_consistent) continue;
      if (!inst.brackets) {
        o.fail(where(r) + ": bracket check missing");
        continue;
      }
      ++checked;
      const auto& b = *inst.brackets;
      if (b.cross_residual > kFeasTol || b.trivial_residual > kFeasTol || !b.passed) {
        std::ostringstream s;
        s << where(r) << " '" << inst.label << "': cross " << b.cross_residual << ", trivial " << b.trivial_residual;
        o.fail(s.str());
      }
    }
  }
  if (checked == 0) o.fail("no GO-consistent instances");
  return o;
}

}  // namespace

int main() {
  CampaignOptions full;
  full.samples = kSamples;
  const auto rows = all_row_instances();

  std::cout << "running the full campaign (seed " << kSeed << ")\n" << std::flush;
  const CampaignReport campaign = run_campaign(rows, kSeed, full);
  const std::string first = to_json(campaign).dump();

  CampaignOptions neg_only = full;
  neg_only.positives = false;
  neg_only.normal = false;
  neg_only.linear_graph = false;
  neg_only.brackets = false;
  std::vector<CampaignReport> negative_campaigns;
  for (std::uint64_t s : kSeedSet) negative_campaigns.push_back(run_campaign(rows, s, neg_only));

  bool all = true;
  report(1, "isotropy decompositions and eigenspace shapes", shapes(campaign), all);
  report(2, "condition-satisfying metrics are GO at every sample (residual <= 1e-8)", positives(campaign), all);
  report(3, "perturbed metrics are not GO with a witness above 1e-4 for seeds 1..5", negatives(negative_campaigns),
         all);
  report(4, "linear graph fit refuses non-normal GO metrics and accepts normal ones", separation(campaign), all);
  report(5, "sign condition on the form coefficients is sharp", sharpness(), all);
  report(6, "stationary subalgebras of the tiny modules", tiny_modules(), all);
  report(7, "bracket structure on GO-consistent instances", brackets(campaign), all);

  Outcome determinism;
  const std::string second = to_json(run_campaign(rows, kSeed, full)).dump();
  if (first != second) determinism.fail("campaign JSON differs between identical runs");
  if (!campaign.passed) determinism.notes.push_back("note: the campaign itself reported failures");
  report(8, "identical seeds give byte-identical campaign JSON", determinism, all);

  std::cout << (all ? "all criteria passed" : "some criteria failed") << "\n";
  return all ? 0 : 1;
}
