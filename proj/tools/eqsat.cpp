// eqsat: simplify terms, check equivalences and run the rebuilding benchmark.
//
// Exit codes: 0 success / equal, 1 unknown, 2 parse or usage error,
// 3 analysis contradiction.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "eqsat/bench.hpp"
#include "eqsat/domains/lambda.hpp"
#include "eqsat/domains/math.hpp"
#include "eqsat/extract.hpp"
#include "eqsat/rules_file.hpp"
#include "eqsat/runner.hpp"

namespace {

using namespace eqsat;
using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

enum Exit { kOk = 0, kUnknown = 1, kParseError = 2, kContradiction = 3 };

struct Options {
  std::string rules = "math";
  std::string lang = "math";
  size_t iters = 30;
  size_t nodes = 10000;
  long time_ms = 5000;
  std::string scheduler = "backoff";
  std::string cost = "ast-size";
  bool json = false;
  bool unsafe_math = false;
};

RunnerConfig runner_config(const Options &o) {
  RunnerConfig cfg;
  cfg.iter_limit = o.iters;
  cfg.node_limit = o.nodes;
  cfg.time_limit = std::chrono::milliseconds(o.time_ms);
  cfg.scheduler = o.scheduler == "every" ? SchedulerKind::EveryRule : SchedulerKind::Backoff;
  return cfg;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class A>
std::vector<Rewrite<A>> load_rules(const Options &o, const LanguageDef &lang) {
  if (o.rules != "math" && o.rules != "lambda") return parse_rules<A>(read_file(o.rules), lang);
  if constexpr (std::is_same_v<A, MathAnalysis>) {
    return math_rules(o.unsafe_math);
  } else {
    return lambda_rules();
  }
}

template <class A>
std::pair<Term, double> best_term(const EGraph<A> &g, EClassId root, const std::string &cost) {
  if (cost == "ast-depth") return extract_best(g, root, AstDepth{});
  return extract_best(g, root, AstSize{});
}

json iterations_json(const std::vector<IterationReport> &its) {
  json arr = json::array();
  for (const auto &it : its) arr.push_back(json::parse(to_json_line(it)));
  return arr;
}

template <class A>
int simplify(const Options &o, const LanguageDef &lang, const std::string &expr) {
  auto rules = load_rules<A>(o, lang);
  Term term = parse_term(expr, lang);
  Runner<A> runner(runner_config(o));
  runner.add_root(term);
  runner.run(rules);
  StopReason reason = *runner.stop_reason();
  if (reason == StopReason::AnalysisContradiction) {
    std::cerr << "analysis contradiction: " << runner.diagnostic() << "\n";
    if (o.json) {
      json j;
      j["schema_version"] = kSchemaVersion;
      j["stop_reason"] = to_string(reason);
      j["diagnostic"] = runner.diagnostic();
      j["iterations"] = iterations_json(runner.iterations());
      std::cout << j.dump(2) << "\n";
    }
    return kContradiction;
  }
  auto [best, cost] = best_term(runner.egraph(), runner.roots()[0], o.cost);
  if (o.json) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["stop_reason"] = to_string(reason);
    j["iterations"] = iterations_json(runner.iterations());
    j["best"] = {{"term", print_term(best)}, {"cost", cost}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << print_term(best) << "\n";
    std::cerr << "cost " << cost << ", " << runner.iterations().size() << " iterations, " << to_string(reason) << "\n";
  }
  return kOk;
}

std::vector<std::pair<std::string, std::string>> read_pairs(const std::string &path) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    auto items = read_sexprs(line);
    if (items.empty()) continue;
    if (items.size() != 2) throw ParseError("pairs file: expected two terms per line: " + line, 0);
    auto print = [](const SExpr &e, auto &&self) -> std::string {
      if (e.is_atom) return e.atom;
      std::string s = "(";
      for (size_t i = 0; i < e.items.size(); ++i) s += (i ? " " : "") + self(e.items[i], self);
      return s + ")";
    };
    out.emplace_back(print(items[0], print), print(items[1], print));
  }
  return out;
}

template <class A>
int check_equiv_cmd(const Options &o, const LanguageDef &lang, const std::vector<std::string> &terms,
                    const std::string &pairs_file, bool batched) {
  auto rules = load_rules<A>(o, lang);
  std::vector<std::pair<Term, Term>> pairs;
  if (!pairs_file.empty()) {
    for (const auto &[l, r] : read_pairs(pairs_file)) pairs.emplace_back(parse_term(l, lang), parse_term(r, lang));
  } else {
    if (terms.size() != 2) throw CLI::ValidationError("check-equiv", "expected LHS and RHS, or --pairs FILE");
    pairs.emplace_back(parse_term(terms[0], lang), parse_term(terms[1], lang));
  }
  auto cfg = runner_config(o);

  std::vector<bool> verdicts;
  std::vector<size_t> iterations;
  std::vector<StopReason> reasons;
  bool contradiction = false;
  if (batched) {
    auto r = check_equiv_batch<A>(pairs, rules, cfg);
    verdicts = r.equal;
    iterations.assign(pairs.size(), r.iterations);
    reasons.assign(pairs.size(), r.stop_reason);
    contradiction = r.stop_reason == StopReason::AnalysisContradiction;
  } else {
    for (const auto &[l, r] : pairs) {
      auto res = check_equiv<A>(l, r, rules, cfg);
      verdicts.push_back(res.equal);
      iterations.push_back(res.iterations);
      reasons.push_back(res.stop_reason);
      contradiction = contradiction || res.stop_reason == StopReason::AnalysisContradiction;
    }
  }
  bool all_equal = std::all_of(verdicts.begin(), verdicts.end(), [](bool b) { return b; });
  if (o.json) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json results = json::array();
    for (size_t i = 0; i < pairs.size(); ++i) {
      results.push_back({{"lhs", print_term(pairs[i].first)},
                         {"rhs", print_term(pairs[i].second)},
                         {"verdict", verdicts[i] ? "equal" : "unknown"},
                         {"iterations", iterations[i]},
                         {"stop_reason", to_string(reasons[i])}});
    }
    j["batched"] = batched;
    j["results"] = std::move(results);
    std::cout << j.dump(2) << "\n";
  } else {
    for (size_t i = 0; i < pairs.size(); ++i) {
      std::cout << (verdicts[i] ? "equal" : "unknown") << " (" << iterations[i] << " iterations)\n";
    }
  }
  if (contradiction) return kContradiction;
  return all_equal ? kOk : kUnknown;
}

int bench_cmd(const Options &o, size_t reps, const std::string &csv_path, const std::string &report_path) {
  BenchOptions bo;
  bo.repetitions = reps;
  bo.verify = false;
  auto result = run_bench(default_corpus(), bo);
  if (o.json) {
    write_json_lines(std::cout, result.records);
  } else {
    write_csv(std::cout, result.records);
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    write_csv(out, result.records);
  }
  auto report = speedup_report(result.records);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << to_json(report) << "\n";
  }
  std::cerr << "geomean congruence speedup " << report.geomean_speedup << ", repairs/time spearman "
            << report.repair_time_spearman << "\n";
  for (const auto &m : result.mismatches) std::cerr << "MISMATCH " << m << "\n";
  return result.mismatches.empty() ? kOk : kUnknown;
}

void add_common(CLI::App *cmd, Options &o) {
  cmd->add_option("--rules", o.rules, "Rule set: math, lambda, or a rules file")->capture_default_str();
  cmd->add_option("--lang", o.lang, "Language of a rules file")
      ->check(CLI::IsMember({"math", "lambda"}))
      ->capture_default_str();
  cmd->add_option("--iters", o.iters, "Iteration limit")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--nodes", o.nodes, "E-node limit")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--time-ms", o.time_ms, "Time limit in milliseconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--scheduler", o.scheduler, "Rule scheduler")
      ->check(CLI::IsMember({"every", "backoff"}))
      ->capture_default_str();
  cmd->add_option("--cost", o.cost, "Extraction cost")
      ->check(CLI::IsMember({"ast-size", "ast-depth"}))
      ->capture_default_str();
  cmd->add_flag("--json", o.json, "Machine-readable output");
  cmd->add_flag("--unsafe-math", o.unsafe_math, "Apply x/x => 1 without a nonzero guard");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Equality saturation with deferred rebuilding"};
  app.require_subcommand(1);
  Options o;

  std::string expr;
  auto *simplify_cmd = app.add_subcommand("simplify", "Saturate a term and print the cheapest equivalent");
  add_common(simplify_cmd, o);
  simplify_cmd->add_option("expr", expr, "Term to simplify")->required();

  std::vector<std::string> terms;
  std::string pairs_file;
  bool batched = false;
  auto *equiv_cmd = app.add_subcommand("check-equiv", "Check whether two terms can be proven equal");
  add_common(equiv_cmd, o);
  equiv_cmd->add_option("terms", terms, "LHS and RHS")->expected(0, 2);
  equiv_cmd->add_option("--pairs", pairs_file, "File with one `lhs rhs` pair per line");
  equiv_cmd->add_flag("--batched", batched, "Check all pairs in one shared e-graph");

  size_t reps = 5;
  std::string csv_path;
  std::string report_path;
  auto *bench_cmd_app = app.add_subcommand("bench", "Compare immediate and deferred rebuilding");
  bench_cmd_app->add_option("--reps", reps, "Repetitions per workload")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd_app->add_option("--csv", csv_path, "Also write the records as CSV to this file");
  bench_cmd_app->add_option("--report", report_path, "Write the speedup report (JSON) to this file");
  bench_cmd_app->add_flag("--json", o.json, "Emit JSON lines instead of CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kParseError;
  }

  try {
    std::string lang_name = o.rules == "math" || o.rules == "lambda" ? o.rules : o.lang;
    if (simplify_cmd->parsed()) {
      if (lang_name == "lambda") return simplify<LambdaAnalysis>(o, lambda_language(), expr);
      return simplify<MathAnalysis>(o, math_language(), expr);
    }
    if (equiv_cmd->parsed()) {
      if (lang_name == "lambda") return check_equiv_cmd<LambdaAnalysis>(o, lambda_language(), terms, pairs_file, batched);
      return check_equiv_cmd<MathAnalysis>(o, math_language(), terms, pairs_file, batched);
    }
    return bench_cmd(o, reps, csv_path, report_path);
  } catch (const ParseError &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const CLI::Error &e) {
    std::cerr << e.what() << "\n";
    return kParseError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseError;
  }
}
