#include "spreadlab/cli.hpp"

#include <cstdlib>
#include <functional>
#include <sstream>

#include <CLI11.hpp>

namespace spreadlab::cli {

namespace {

struct Options {
  std::string report;
  bool decimal = false;
  std::string market, strategy, cps;
  std::string lambda, epsilon, resolution, x;
  std::string lambda_prime = "1/4", m_tilde = "4", variant, mode = "nb";
  std::vector<std::string> grid;
  bool ac = false, numeraire_free = false, literal_sale = false;
  std::size_t steps = 2;
  std::string out_dir = ".";
};

struct Outcome {
  int exit_code = kSuccess;
  std::string summary;
  io::Json report;
};

Rational parse_flag(const std::string& text, const char* flag) {
  try {
    return parse_rational(text);
  } catch (const ParseError& e) {
    throw ParseError(std::string(flag) + ": " + e.what());
  }
}

Rational epsilon_option(const Options& o) {
  if (o.ac) return 0;
  if (!o.epsilon.empty()) return parse_flag(o.epsilon, "--epsilon");
  if (const char* env = std::getenv("SPREADLAB_EPSILON"); env && *env) return parse_flag(env, "SPREADLAB_EPSILON");
  return default_epsilon();
}

CpsQuery query_for(const Rational& lambda_prime, const Rational& epsilon) {
  return epsilon > 0 ? CpsQuery::equivalent(lambda_prime, epsilon) : CpsQuery::absolutely_continuous(lambda_prime);
}

Market market_of(const Options& o) { return io::load_market(io::read_json_file(o.market)); }

Strategy strategy_of(const Options& o, const Market& market) {
  return io::load_strategy(io::read_json_file(o.strategy), market);
}

std::string node_text(NodeId id) { return "node " + std::to_string(id.value); }

Outcome run_validate(const Options& o) {
  Outcome out;
  const Market market = market_of(o);
  out.report["valid"] = true;
  out.report["nodes"] = market.tree.size();
  out.report["horizon"] = market.tree.horizon();
  out.report["leaves"] = market.tree.leaves().size();
  out.report["lambda"] = to_string(market.lambda);
  out.summary = "market valid: " + std::to_string(market.tree.size()) + " nodes, " +
                std::to_string(market.tree.horizon()) + " periods, lambda " + to_string(market.lambda);
  if (!o.strategy.empty()) {
    const Strategy strategy = strategy_of(o, market);
    const auto sf = check_self_financing(market, strategy);
    out.report["strategy"] = io::self_financing_to_json(market, sf, o.decimal);
    out.summary += sf.self_financing ? "\nstrategy valid and self-financing" : "\nstrategy valid, not self-financing";
  }
  return out;
}

Outcome run_check_strategy(const Options& o) {
  Outcome out;
  if (o.mode != "nb" && o.mode != "nf") throw ParseError("--mode must be nb or nf");
  const Market market = market_of(o);
  const Strategy strategy = strategy_of(o, market);
  const auto mode = o.mode == "nf" ? AdmissibilityMode::NumeraireFree : AdmissibilityMode::NumeraireBased;
  const auto sf = check_self_financing(market, strategy);
  const auto adm = admissibility_bound(market, strategy, mode);
  out.report["self_financing"] = io::self_financing_to_json(market, sf, o.decimal);
  out.report["admissibility"] = io::admissibility_to_json(market, adm, o.decimal);
  std::ostringstream s;
  if (sf.self_financing) {
    s << "self-financing: yes";
  } else {
    NodeIndex first = 0;
    while (sf.pass[first]) ++first;
    s << "self-financing: no (first failure at " << node_text(market.tree.id(first)) << ", slack "
      << to_string(sf.slack[first]) << ")";
    out.exit_code = kConclusionViolated;
  }
  s << "\nadmissible (" << to_string(mode) << ") with M = " << to_string(adm.minimal_M) << ", worst at "
    << node_text(adm.worst_node);
  out.summary = s.str();
  return out;
}

Outcome run_find_cps(const Options& o) {
  Outcome out;
  const Market market = market_of(o);
  const Rational lambda_prime = parse_flag(o.lambda, "--lambda");
  const Rational epsilon = epsilon_option(o);
  const CpsResult result = find_cps(market, query_for(lambda_prime, epsilon));
  if (result.feasible) {
    out.report = io::cps_to_json(market, *result.cps, lambda_prime, epsilon);
    out.report["feasible"] = true;
    out.report["pivots"] = result.pivots;
    out.summary = "consistent price system found at lambda' = " + to_string(lambda_prime);
  } else {
    out.report = io::certificate_to_json(*result.certificate, lambda_prime, epsilon);
    out.report["pivots"] = result.pivots;
    out.exit_code = kInfeasible;
    out.summary = "no consistent price system at lambda' = " + to_string(lambda_prime) + "; Farkas certificate " +
                  (result.certificate->verified ? "verified" : "NOT verified");
  }
  return out;
}

Outcome run_cps_threshold(const Options& o) {
  Outcome out;
  const Market market = market_of(o);
  const Rational resolution = parse_flag(o.resolution, "--resolution");
  const Rational epsilon = epsilon_option(o);
  const Threshold t = cps_threshold(market, epsilon, resolution);
  out.report = io::threshold_to_json(t, resolution, epsilon, o.decimal);
  if (t.found) {
    out.summary = "smallest feasible lambda' in (" + to_string(t.lower) + ", " + to_string(t.value) + "]";
  } else {
    out.exit_code = kInfeasible;
    out.summary = "no consistent price system for any lambda' < 1";
  }
  return out;
}

Outcome run_decompose(const Options& o) {
  Outcome out;
  const Market market = market_of(o);
  const Strategy strategy = strategy_of(o, market);
  const io::CpsDocument doc = io::load_cps(io::read_json_file(o.cps), market);
  const EventTree& tree = market.tree;
  const auto check = verify_cps(market, doc.cps, market.lambda, Rational(0));
  if (!check.ok) throw DiagnosticError(check.violations);

  const auto sf = check_self_financing(market, strategy);
  const auto split = shadow_decomposition(market, strategy, doc.cps);
  const auto ossm = check_ossm(tree, split.value, doc.cps.density);
  out.report["self_financing"] = sf.self_financing;
  io::put_node_map(out.report, "shadow_value", tree, split.value.values(), o.decimal);
  io::put_node_map(out.report, "cost", tree, split.cost.values(), o.decimal);
  io::put_node_map(out.report, "transform", tree, split.transform.values(), o.decimal);
  out.report["cost_violations"] = io::diagnostics_to_json(split.violations);
  out.report["supermartingale"] = ossm.holds;
  if (ossm.holds) {
    const auto doob = doob_decompose(tree, split.value, doc.cps.density);
    io::put_node_map(out.report, "martingale", tree, doob.martingale.values(), o.decimal);
    io::put_node_map(out.report, "compensator", tree, doob.compensator.values(), o.decimal);
    out.summary = "shadow value is a Q-supermartingale; Doob decomposition written";
  } else {
    io::Json witness = io::Json::array();
    for (std::size_t i = 0; i < ossm.violating.size(); ++i) {
      io::Json row;
      row["node"] = ossm.violating[i].value;
      row["drift"] = to_string(ossm.drift[i]);
      witness.push_back(std::move(row));
    }
    out.report["positive_drift"] = std::move(witness);
    out.exit_code = kConclusionViolated;
    out.summary = "shadow value has positive Q-drift at " + node_text(ossm.violating.front());
  }
  return out;
}

Outcome run_theorem(const Options& o) {
  Outcome out;
  const Market market = market_of(o);
  const Strategy strategy = strategy_of(o, market);
  const Rational x = parse_flag(o.x, "--x");
  std::vector<Rational> grid;
  for (const auto& g : o.grid) grid.push_back(parse_flag(g, "--grid"));
  if (grid.empty()) grid = default_lambda_grid(market.lambda);
  const auto mode = o.numeraire_free ? AdmissibilityMode::NumeraireFree : AdmissibilityMode::NumeraireBased;
  const TheoremVerdict verdict = check_admissibility_theorem(market, strategy, x, grid, mode, epsilon_option(o));
  out.report = io::verdict_to_json(market, verdict, o.decimal);
  std::ostringstream s;
  s << "status: " << to_string(verdict.status());
  for (const auto& f : verdict.precondition_failures) s << "\n  precondition: " << f;
  for (const auto& h : verdict.hypothesis) {
    if (!h.feasible) s << "\n  no consistent price system at lambda' = " << to_string(h.lambda_prime);
  }
  if (verdict.witness) {
    s << "\n  witness " << to_string(verdict.witness->kind) << " at " << node_text(verdict.witness->node)
      << " with value " << to_string(verdict.witness->value) << " < -x = " << to_string(Rational(-x));
  }
  out.summary = s.str();
  switch (verdict.status()) {
    case VerdictStatus::Holds:
      out.exit_code = kSuccess;
      break;
    case VerdictStatus::ConclusionViolated:
      out.exit_code = kConclusionViolated;
      break;
    case VerdictStatus::HypothesisUnmet:
    case VerdictStatus::PreconditionFailed:
      out.exit_code = kInfeasible;
      break;
  }
  return out;
}

Outcome run_counterexample(const Options& o, std::optional<std::filesystem::path>& report_path) {
  Outcome out;
  const Rational lambda = parse_flag(o.lambda.empty() ? "1/2" : o.lambda, "--lambda");
  CounterexampleReport report = [&] {
    if (o.variant == "det") return deterministic_counterexample(lambda, o.steps);
    if (o.variant == "stoch") {
      return stochastic_counterexample(lambda, parse_flag(o.lambda_prime, "--lambda-prime"),
                                       parse_flag(o.m_tilde, "--m-tilde"),
                                       o.literal_sale ? SaleConvention::Literal : SaleConvention::SelfFinancing);
    }
    throw ParseError("--variant must be det or stoch");
  }();
  out.report = io::counterexample_to_json(report, o.decimal);
  if (o.variant == "det") {
    const Rational resolution = pow2_inverse(20);
    out.report["cps_threshold"] =
        io::threshold_to_json(cps_threshold(report.market, default_epsilon(), resolution), resolution,
                              default_epsilon(), o.decimal);
  }
  const std::filesystem::path dir = o.out_dir;
  std::filesystem::create_directories(dir);
  io::write_json_file(dir / "market.json", io::market_to_json(report.market));
  io::write_json_file(dir / "strategy.json", io::strategy_to_json(report.market.tree, report.strategy));
  io::write_json_file(dir / "cps.json", io::cps_to_json(report.market, report.cps_witness, report.lambda_prime,
                                                        Rational(0)));
  if (!report_path) report_path = dir / "report.json";

  const auto& m = out.report["measured"];
  out.summary = std::string(report.m_tilde ? "stochastic" : "deterministic") + " counter-example written to " +
                dir.string() + "\n  terminal liquidation value >= " + m["terminal_min"].get<std::string>() +
                "\n  mid-time liquidation value " + m["midtime_value"].get<std::string>() + " at " +
                node_text(report.midtime_node) + "\n  self-financing: " +
                (m["self_financing"].get<bool>() ? "yes" : "no");
  return out;
}

io::Json error_report(const std::string& message, const std::vector<Diagnostic>* diagnostics) {
  io::Json report;
  report["error"] = message;
  if (diagnostics) report["diagnostics"] = io::diagnostics_to_json(*diagnostics);
  return report;
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& args) {
  Options o;
  CLI::App app{"Exact finite-tree toolkit for markets with proportional transaction costs", "spreadlab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--report", o.report, "Write the JSON report here (default: <subcommand>.json)");
  app.add_flag("--decimal", o.decimal, "Add approximate decimal columns to the report");

  auto* validate = app.add_subcommand("validate", "Validate a market file and optionally a strategy file");
  validate->add_option("--market", o.market)->required();
  validate->add_option("--strategy", o.strategy);

  auto* check = app.add_subcommand("check-strategy", "Self-financing and admissibility report");
  check->add_option("--market", o.market)->required();
  check->add_option("--strategy", o.strategy)->required();
  check->add_option("--mode", o.mode, "nb (numeraire-based) or nf (numeraire-free)");

  auto* find = app.add_subcommand("find-cps", "Search for a consistent price system");
  find->add_option("--market", o.market)->required();
  find->add_option("--lambda", o.lambda, "lambda'")->required();
  find->add_option("--epsilon", o.epsilon, "Equivalence floor for Z at the leaves");
  find->add_flag("--ac", o.ac, "Allow Q absolutely continuous (epsilon = 0)");

  auto* threshold = app.add_subcommand("cps-threshold", "Smallest lambda' admitting a consistent price system");
  threshold->add_option("--market", o.market)->required();
  threshold->add_option("--resolution", o.resolution)->required();
  threshold->add_option("--epsilon", o.epsilon);
  threshold->add_flag("--ac", o.ac);

  auto* decompose = app.add_subcommand("decompose", "Shadow value and its Doob decomposition under Q");
  decompose->add_option("--market", o.market)->required();
  decompose->add_option("--strategy", o.strategy)->required();
  decompose->add_option("--cps", o.cps)->required();

  auto* theorem = app.add_subcommand("theorem", "Check the admissibility theorem for a strategy");
  theorem->add_option("--market", o.market)->required();
  theorem->add_option("--strategy", o.strategy)->required();
  theorem->add_option("--x", o.x)->required();
  theorem->add_option("--grid", o.grid, "lambda' values (default: lambda 2^-k, k = 0..10)")->delimiter(',');
  theorem->add_option("--epsilon", o.epsilon);
  theorem->add_flag("--numeraire-free", o.numeraire_free);

  auto* example = app.add_subcommand("counterexample", "Generate a counter-example instance");
  example->add_option("--variant", o.variant, "det or stoch")->required();
  example->add_option("--lambda", o.lambda, "default 1/2");
  example->add_option("--lambda-prime", o.lambda_prime, "default 1/4");
  example->add_option("--m-tilde", o.m_tilde, "default 4");
  example->add_option("--steps", o.steps, "grid steps of the deterministic variant (even, default 2)");
  example->add_flag("--literal-sale", o.literal_sale, "Sell on A+ at (1 - lambda') S (not self-financing)");
  example->add_option("--out-dir", o.out_dir, "default: current directory");

  CommandResult result;
  std::vector<std::string> owned{"spreadlab"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : owned) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    const int code = app.exit(e, out, err);
    result.exit_code = code == 0 ? kSuccess : kInputError;
    result.human_summary = out.str() + err.str();
    return result;
  }

  const CLI::App* sub = app.get_subcommands().front();
  if (!o.report.empty()) result.report_path = o.report;
  try {
    Outcome outcome;
    if (sub == validate) outcome = run_validate(o);
    if (sub == check) outcome = run_check_strategy(o);
    if (sub == find) outcome = run_find_cps(o);
    if (sub == threshold) outcome = run_cps_threshold(o);
    if (sub == decompose) outcome = run_decompose(o);
    if (sub == theorem) outcome = run_theorem(o);
    if (sub == example) outcome = run_counterexample(o, result.report_path);
    result.exit_code = outcome.exit_code;
    result.human_summary = std::move(outcome.summary);
    result.report = std::move(outcome.report);
  } catch (const DiagnosticError& e) {
    result.exit_code = kInputError;
    result.human_summary = std::string("error: ") + e.what();
    result.report = error_report(e.what(), &e.diagnostics());
  } catch (const std::exception& e) {
    result.exit_code = kInputError;
    result.human_summary = std::string("error: ") + e.what();
    result.report = error_report(e.what(), nullptr);
  }

  if (!result.report_path) result.report_path = sub->get_name() + ".json";
  try {
    io::write_json_file(*result.report_path, result.report);
  } catch (const std::exception& e) {
    result.exit_code = kInputError;
    result.human_summary += std::string("\nerror: ") + e.what();
  }
  return result;
}

}  // namespace spreadlab::cli
