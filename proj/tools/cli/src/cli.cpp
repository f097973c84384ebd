#include "gospace_cli/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gospace/builders.hpp"
#include "gospace/catalog.hpp"
#include "gospace/error.hpp"
#include "gospace/gocheck.hpp"
#include "gospace/json_io.hpp"
#include "gospace/natred.hpp"
#include "gospace/repmod.hpp"

namespace gospace::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string space;
  std::string row;
  std::string grouping;
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> beta;
  int drop = -1;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  std::size_t samples = 200;
  std::vector<std::string> tol;
  std::vector<std::string> rows;
  std::string out;
  std::string config;
  bool timing = false;
  bool bases = false;
  bool certify = false;
  bool table2 = false;
  bool quick = false;
};

// Fills options that were not given on the command line from a JSON config.
void apply_config(const std::string& path, Options& o, const CLI::App& cmd) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw ValidationError("config file must hold a JSON object");
  auto unset = [&](const char* flag) {
    const CLI::Option* opt = cmd.get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  try {
    if (cfg.contains("space") && unset("--space")) o.space = cfg["space"].get<std::string>();
    if (cfg.contains("row") && unset("--row")) o.row = cfg["row"].get<std::string>();
    if (cfg.contains("grouping") && unset("--grouping")) o.grouping = cfg["grouping"].get<std::string>();
    if (cfg.contains("alpha") && unset("--alpha")) o.alpha = cfg["alpha"].get<std::vector<double>>();
    if (cfg.contains("gamma") && unset("--gamma")) o.gamma = cfg["gamma"].get<std::vector<double>>();
    if (cfg.contains("beta") && unset("--beta")) o.beta = cfg["beta"].get<std::vector<double>>();
    if (cfg.contains("drop") && unset("--drop")) o.drop = cfg["drop"].get<int>();
    if (cfg.contains("samples") && unset("--samples")) o.samples = cfg["samples"].get<std::size_t>();
    if (cfg.contains("out") && unset("--out")) o.out = cfg["out"].get<std::string>();
    if (cfg.contains("certify") && unset("--certify")) o.certify = cfg["certify"].get<bool>();
    if (cfg.contains("rows") && unset("--row")) o.rows = cfg["rows"].get<std::vector<std::string>>();
    if (cfg.contains("seed") && unset("--seed")) {
      if (cfg["seed"].is_array()) {
        o.seeds = cfg["seed"].get<std::vector<std::uint64_t>>();
        if (!o.seeds.empty()) o.seed = o.seeds.front();
      } else {
        o.seed = cfg["seed"].get<std::uint64_t>();
        o.seeds = {o.seed};
      }
    }
    if (cfg.contains("tol") && unset("--tol")) {
      for (const auto& [k, v] : cfg["tol"].items()) o.tol.push_back(k + "=" + json(v.get<double>()).dump());
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config file: ") + e.what());
  }
}

TolerancePolicy parse_tolerance(const std::vector<std::string>& items) {
  TolerancePolicy tol;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("tolerance override '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("tolerance override '" + item + "' has no numeric value");
    }
    if (key == "feas_tol") {
      tol.feas_tol = value;
    } else if (key == "margin_factor") {
      tol.margin_factor = value;
    } else if (key == "rel_rank_tol") {
      tol.rel_rank_tol = value;
    } else {
      throw ValidationError("unknown tolerance '" + key + "'");
    }
  }
  tol.validate();
  return tol;
}

json header(const std::string& command, std::uint64_t seed, const TolerancePolicy& tol) {
  return {{"schema", kSchemaVersion},
          {"tool_version", kToolVersion},
          {"command", command},
          {"seed", seed},
          {"tolerance", to_json(tol)}};
}

// "0,1;2" -> {{0, 1}, {2}}.
std::vector<std::vector<std::size_t>> parse_grouping(const std::string& text) {
  std::vector<std::vector<std::size_t>> groups;
  std::stringstream outer(text);
  std::string group;
  while (std::getline(outer, group, ';')) {
    std::vector<std::size_t> members;
    std::stringstream inner(group);
    std::string item;
    while (std::getline(inner, item, ',')) {
      if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
        throw ValidationError("grouping '" + text + "' must look like 0,1;2");
      }
      members.push_back(static_cast<std::size_t>(std::stoul(item)));
    }
    if (members.empty()) throw ValidationError("grouping '" + text + "' has an empty group");
    groups.push_back(std::move(members));
  }
  if (groups.empty()) throw ValidationError("grouping is empty");
  return groups;
}

RowParams parse_params(const std::string& text) {
  RowParams out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '&')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("parameter '" + item + "' is not key=value");
    try {
      out[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ValidationError("parameter '" + item + "' is not an integer");
    }
  }
  return out;
}

// The table row whose space is `canonical`, if any.
const Table1Row* row_for_space(const std::string& canonical, const std::string& explicit_row) {
  const SpaceId id = SpaceId::parse(canonical);
  if (!explicit_row.empty()) {
    const Table1Row& row = table1_row(explicit_row);
    if (row_space_id(row, id.params) != canonical) {
      throw ValidationError("row " + row.id + " does not describe " + canonical);
    }
    return &row;
  }
  for (const auto& row : table1_rows()) {
    if (row.space != id.family + "/" + id.name) continue;
    if (std::find(row.params.begin(), row.params.end(), id.params) != row.params.end()) return &row;
  }
  return nullptr;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct Result {
  json report;
  int code = kOk;
};

Result cmd_list_spaces(const Options& o, const TolerancePolicy& tol) {
  json spaces = json::array();
  for (const auto& d : list_spaces()) spaces.push_back({{"pattern", d.pattern}, {"description", d.description}});
  json rows = json::array();
  for (const auto& r : table1_rows()) {
    rows.push_back({{"id", r.id},
                    {"space", r.space},
                    {"description", r.description},
                    {"params", r.params},
                    {"alphas", r.arity},
                    {"condition", r.condition_text}});
  }
  json tiny = json::array();
  for (const auto& e : table2_entries()) {
    tiny.push_back({{"id", e.id},
                    {"group", e.group},
                    {"module", e.module},
                    {"dim", e.module_dim},
                    {"type", to_string(e.type)},
                    {"stationary_dim", e.stationary_dim}});
  }
  json report = header("list-spaces", o.seed, tol);
  report["spaces"] = spaces;
  report["table_rows"] = rows;
  report["tiny_modules"] = tiny;
  return {report, kOk};
}

Result cmd_decompose(const Options& o, const TolerancePolicy& tol) {
  if (o.space.empty()) throw ValidationError("--space is required");
  const std::string canonical = canonical_space_id(o.space);
  const HomogeneousSpace space = build_space(canonical, tol);
  const IsotypicDecomposition d = decompose(space, o.seed, tol);
  json report = header("decompose", o.seed, tol);
  report["space"] = canonical;
  report["dim_g"] = space.dim_g();
  report["dim_h"] = space.dim_h();
  report["dim_m"] = space.dim_m();
  report["decomposition"] = to_json(d, o.bases);
  return {report, kOk};
}

Result cmd_check_go(const Options& o, const TolerancePolicy& tol) {
  if (o.space.empty()) throw ValidationError("--space is required");
  if (o.alpha.empty()) throw ValidationError("--alpha is required");
  if (o.samples < 100) throw ValidationError("--samples must be at least 100");
  const std::string canonical = canonical_space_id(o.space);
  json report = header("check-go", o.seed, tol);
  report["space"] = canonical;
  report["samples"] = o.samples;
  report["alphas"] = o.alpha;

  std::shared_ptr<const HomogeneousSpace> space;
  MetricSpec metric;
  const Table1Row* row = o.grouping.empty() ? row_for_space(canonical, o.row) : nullptr;
  if (row != nullptr) {
    const RowParams params = SpaceId::parse(canonical).params;
    condition(*row, params, o.alpha, tol);  // arity and sign checks
    const RowInstance inst = instantiate(*row, params, o.seed, tol);
    space = inst.space;
    metric = MetricSpec::from_subspaces(*space, inst.blueprint.eigenspaces(), o.alpha, tol);
    report["row"] = row->id;
    report["blueprint"] = to_json(inst.blueprint);
    report["condition"] = condition(*row, params, o.alpha, tol);
    report["go_expected"] = go_expected(*row, params, o.alpha, tol);
  } else {
    space = std::make_shared<const HomogeneousSpace>(build_space(canonical, tol));
    const IsotypicDecomposition d = decompose(*space, o.seed, tol);
    std::vector<std::vector<std::size_t>> groups;
    if (!o.grouping.empty()) {
      groups = parse_grouping(o.grouping);
    } else {
      for (const auto& c : d.classes) groups.push_back(c.members);
    }
    metric = MetricSpec::from_grouping(*space, d, groups, o.alpha, tol);
    report["grouping"] = groups;
  }
  report["metric"] = to_json(metric, o.bases);

  const GOReport go = check_go(*space, metric, o.samples, o.seed, tol);
  report["report"] = to_json(go);
  if (o.certify) {
    report["brackets"] = to_json(bracket_structure_check(*space, metric, o.seed, tol));
    json lg = to_json(linear_graph_fit(*space, metric, o.seed, tol));
    if (!o.bases) lg.erase("L");
    report["linear_graph"] = lg;
  }
  int code = kOk;
  if (go.verdict == Verdict::not_go) code = kNegative;
  if (go.verdict == Verdict::inconclusive) code = kInconclusive;
  return {report, code};
}

Result cmd_natred(const Options& o, const TolerancePolicy& tol) {
  if (o.space.empty()) throw ValidationError("--space is required");
  if (o.gamma.empty() == o.beta.empty()) throw ValidationError("give exactly one of --gamma and --beta");
  if (!o.beta.empty() && o.drop < 0) throw ValidationError("--beta needs --drop");
  const std::string canonical = canonical_space_id(o.space);
  auto space = std::make_shared<const HomogeneousSpace>(build_space(canonical, tol));
  auto ideals = std::make_shared<const IdealDecomposition>(decompose_ideals(*space, o.seed, tol));
  json report = header("nat-red", o.seed, tol);
  report["space"] = canonical;
  report["ideals"] = to_json(*ideals);

  const NatRedMetric m = o.gamma.empty()
                             ? natred_case_a(*ideals, static_cast<std::size_t>(o.drop), o.beta, tol)
                             : natred_case_b(*ideals, o.gamma, tol);
  report["metric"] = to_json(m, o.bases);
  if (!m.accepted) return {report, kNegative};

  const KostantReport k = check_kostant(m, tol);
  const double identity = check_natred_identity(m);
  const MetricSpec induced = to_metric_spec(m, tol);
  const LinearGraphCertificate lg = linear_graph_fit(*space, induced, o.seed, tol);
  report["kostant"] = to_json(k);
  report["identity_residual"] = identity;
  report["induced_metric"] = to_json(induced, o.bases);
  json lgj = to_json(lg);
  if (!o.bases) lgj.erase("L");
  report["linear_graph"] = lgj;
  bool certified = k.passed && identity <= tol.feas_tol && lg.accepted;
  if (o.samples > 0) {
    if (o.samples < 100) throw ValidationError("--samples must be 0 or at least 100");
    const GOReport go = check_go(*space, induced, o.samples, o.seed, tol);
    report["go"] = to_json(go);
    certified = certified && go.verdict == Verdict::go_consistent;
  }
  report["certified"] = certified;
  return {report, certified ? kOk : kComputation};
}

Result cmd_campaign(const Options& o, const TolerancePolicy& tol) {
  std::vector<std::pair<std::string, RowParams>> jobs;
  for (const auto& entry : o.rows) {
    const auto q = entry.find('?');
    const Table1Row& row = table1_row(entry.substr(0, q));
    if (q == std::string::npos) {
      for (const auto& p : row.params) jobs.emplace_back(row.id, p);
    } else {
      const RowParams p = parse_params(entry.substr(q + 1));
      row_space_id(row, p);
      jobs.emplace_back(row.id, p);
    }
  }
  if (o.rows.empty()) jobs = all_row_instances();
  std::vector<std::uint64_t> seeds = o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : o.seeds;
  CampaignOptions options;
  options.samples = o.samples;
  if (o.samples < 100) throw ValidationError("--samples must be at least 100");
  options.linear_graph = !o.quick;

  json report = header("campaign", seeds.front(), tol);
  report["seeds"] = seeds;
  report["samples"] = o.samples;
  json campaigns = json::array();
  bool passed = true;
  for (std::uint64_t s : seeds) {
    const CampaignReport c = run_campaign(jobs, s, options, tol);
    passed = passed && c.passed;
    campaigns.push_back(to_json(c));
  }
  report["campaigns"] = campaigns;
  if (o.table2) {
    json tiny = json::array();
    for (const auto& e : table2_entries()) {
      const Table2Result r = verify_table2(e, seeds.front(), 10, tol);
      passed = passed && r.passed;
      tiny.push_back(to_json(r));
    }
    report["tiny_modules"] = tiny;
  }
  report["passed"] = passed;
  return {report, passed ? kOk : kNegative};
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--tol", o.tol, "Tolerance override key=value (feas_tol, margin_factor, rel_rank_tol)");
  cmd->add_option("--out", o.out, "Write the JSON report to this file");
  cmd->add_option("--config", o.config, "JSON config file; command line flags take precedence");
  cmd->add_flag("--timing", o.timing, "Add wall-clock time to the report");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Geodesic orbit metrics on compact homogeneous spaces", "gospace"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CLI::App* list = app.add_subcommand("list-spaces", "List the buildable spaces and catalog entries");
  list->add_option("--out", o.out, "Write the JSON report to this file");

  CLI::App* dec = app.add_subcommand("decompose", "Split the isotropy representation into irreducibles");
  dec->add_option("--space", o.space, "Space id, e.g. table1/row8?n=1");
  dec->add_flag("--bases", o.bases, "Include submodule bases");
  add_common(dec, o);

  CLI::App* go = app.add_subcommand("check-go", "Sample the geodesic orbit condition for a metric");
  go->add_option("--space", o.space, "Space id");
  go->add_option("--row", o.row, "Table row whose eigenspaces to use (inferred for table spaces)");
  go->add_option("--grouping", o.grouping, "Submodule indices per eigenspace, e.g. 0,1;2");
  go->add_option("--alpha", o.alpha, "Eigenvalues, comma separated")->delimiter(',');
  go->add_option("--samples", o.samples, "Number of random X (at least 100)");
  go->add_flag("--certify", o.certify, "Also run the bracket checks and the linear graph fit");
  go->add_flag("--bases", o.bases, "Include eigenspace bases");
  add_common(go, o);

  CLI::App* nr = app.add_subcommand("nat-red", "Build and certify a naturally reductive metric");
  nr->add_option("--space", o.space, "Space id");
  nr->add_option("--gamma", o.gamma, "Form coefficients per ideal (complement construction)")->delimiter(',');
  nr->add_option("--beta", o.beta, "Form coefficients per ideal (ideal construction)")->delimiter(',');
  nr->add_option("--drop", o.drop, "Ideal left out by the ideal construction");
  nr->add_option("--samples", o.samples, "GO samples on the induced metric (0 skips)");
  nr->add_flag("--bases", o.bases, "Include bases");
  add_common(nr, o);

  CLI::App* camp = app.add_subcommand("campaign", "Verify table rows in both directions");
  camp->add_option("--row", o.rows, "Row id, optionally with parameters (6_1?n=3); default all");
  camp->add_option("--seed", o.seeds, "Seeds; one campaign per seed");
  camp->add_option("--samples", o.samples, "Samples per metric");
  camp->add_flag("--tiny-modules", o.table2, "Also verify the tiny module stationary subalgebras");
  camp->add_flag("--quick", o.quick, "Skip the linear graph fits");
  camp->add_option("--tol", o.tol, "Tolerance override key=value");
  camp->add_option("--out", o.out, "Write the JSON report to this file");
  camp->add_option("--config", o.config, "JSON config file; command line flags take precedence");
  camp->add_flag("--timing", o.timing, "Add wall-clock time to the report");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidation;
  }

  const Timer timer;
  Result result;
  try {
    CLI::App* cmd = app.get_subcommands().front();
    if (!o.config.empty()) apply_config(o.config, o, *cmd);
    if (!o.seeds.empty() && cmd != camp) o.seed = o.seeds.front();
    const TolerancePolicy tol = parse_tolerance(o.tol);
    if (cmd == list) {
      result = cmd_list_spaces(o, tol);
    } else if (cmd == dec) {
      result = cmd_decompose(o, tol);
    } else if (cmd == go) {
      result = cmd_check_go(o, tol);
    } else if (cmd == nr) {
      result = cmd_natred(o, tol);
    } else {
      result = cmd_campaign(o, tol);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "computation failed: " << e.what() << "\n";
    return kComputation;
  }
  if (o.timing) result.report["wall_clock_seconds"] = timer.seconds();

  const std::string text = result.report.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream file(o.out);
    if (!file) {
      err << "error: cannot write '" << o.out << "'\n";
      return kValidation;
    }
    file << text;
  }
  return result.code;
}

}  // namespace gospace::cli
