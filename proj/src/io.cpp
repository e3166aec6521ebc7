#include "spreadlab/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace spreadlab::io {

namespace {

const Json& require(const Json& object, const char* key, const std::string& where) {
  if (!object.is_object()) throw ParseError(where + ": expected an object");
  auto it = object.find(key);
  if (it == object.end()) throw ParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

std::uint64_t node_id_from_json(const Json& value, const std::string& where) {
  if (!value.is_number_unsigned()) throw ParseError(where + ": node id must be a nonnegative integer");
  return value.get<std::uint64_t>();
}

std::uint64_t node_id_from_key(const std::string& key, const std::string& where) {
  if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(where + ": \"" + key + "\" is not a node id");
  }
  try {
    return std::stoull(key);
  } catch (const std::exception&) {
    throw ParseError(where + ": node id \"" + key + "\" is out of range");
  }
}

std::string node_where(const char* section, std::uint64_t id) {
  return std::string(section) + " node " + std::to_string(id);
}

// Reads {id: rational} into index order; nodes absent from the map stay empty.
std::vector<std::optional<Rational>> read_node_map(const Json& object, const EventTree& tree, const char* field) {
  if (!object.is_object()) throw ParseError(std::string(field) + ": expected an object keyed by node id");
  std::vector<std::optional<Rational>> out(tree.size());
  for (const auto& [key, value] : object.items()) {
    const std::uint64_t id = node_id_from_key(key, field);
    if (!tree.contains(NodeId{id})) throw ParseError(node_where(field, id) + ": unknown node");
    out[tree.index(NodeId{id})] = rational_from_json(value, node_where(field, id));
  }
  return out;
}

Json id_list(const std::vector<NodeId>& ids) {
  Json out = Json::array();
  for (NodeId id : ids) out.push_back(id.value);
  return out;
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& document) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << document.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

Rational rational_from_json(const Json& value, const std::string& where) {
  if (!value.is_string()) throw ParseError(where + ": rationals must be strings such as \"1/2\"");
  try {
    return parse_rational(value.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

Json rational_to_json(const Rational& value) { return to_string(value); }

EventTree load_tree(const Json& document) {
  const Json& times_json = require(document, "times", "tree");
  const Json& nodes_json = require(document, "nodes", "tree");
  if (!times_json.is_array()) throw ParseError("tree: \"times\" must be an array");
  if (!nodes_json.is_array()) throw ParseError("tree: \"nodes\" must be an array");

  std::vector<Rational> times;
  for (std::size_t k = 0; k < times_json.size(); ++k) {
    times.push_back(rational_from_json(times_json[k], "times[" + std::to_string(k) + "]"));
  }
  std::vector<NodeSpec> specs;
  for (std::size_t k = 0; k < nodes_json.size(); ++k) {
    const Json& node = nodes_json[k];
    const std::string where = "nodes[" + std::to_string(k) + "]";
    const std::uint64_t id = node_id_from_json(require(node, "id", where), where + ".id");
    const Json& parent = require(node, "parent", node_where("tree", id));
    NodeSpec spec{NodeId{id}, std::nullopt, rational_from_json(require(node, "prob", node_where("tree", id)),
                                                               node_where("tree", id) + " prob")};
    if (!parent.is_null()) spec.parent = NodeId{node_id_from_json(parent, node_where("tree", id) + " parent")};
    specs.push_back(std::move(spec));
  }
  return EventTree::create(std::move(times), specs);
}

Market load_market(const Json& document) {
  EventTree tree = load_tree(document);
  std::vector<Rational> price(tree.size());
  for (const Json& node : document.at("nodes")) {
    const std::uint64_t id = node.at("id").get<std::uint64_t>();
    price[tree.index(NodeId{id})] = rational_from_json(require(node, "S", node_where("market", id)),
                                                       node_where("market", id) + " S");
  }
  Rational lambda = rational_from_json(require(document, "lambda", "market"), "market lambda");
  return make_market(std::move(tree), std::move(price), std::move(lambda));
}

Json market_to_json(const Market& market) {
  const EventTree& tree = market.tree;
  Json doc;
  doc["times"] = Json::array();
  for (const auto& t : tree.times()) doc["times"].push_back(rational_to_json(t));
  doc["nodes"] = Json::array();
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    Json node;
    node["id"] = tree.id(n).value;
    const auto p = tree.parent(n);
    node["parent"] = p ? Json(tree.id(*p).value) : Json(nullptr);
    node["prob"] = rational_to_json(tree.cond_prob(n));
    node["S"] = rational_to_json(market.price[n]);
    doc["nodes"].push_back(std::move(node));
  }
  doc["lambda"] = rational_to_json(market.lambda);
  return doc;
}

Strategy load_strategy(const Json& document, const Market& market) {
  const EventTree& tree = market.tree;
  const Json& holdings = require(document, "holdings", "strategy");
  if (!holdings.is_array()) throw ParseError("strategy: \"holdings\" must be an array");
  std::vector<std::optional<Holdings>> given(tree.size());
  for (std::size_t k = 0; k < holdings.size(); ++k) {
    const std::string where = "holdings[" + std::to_string(k) + "]";
    const std::uint64_t id = node_id_from_json(require(holdings[k], "node", where), where + ".node");
    if (!tree.contains(NodeId{id})) throw ParseError(node_where("strategy", id) + ": unknown node");
    auto& slot = given[tree.index(NodeId{id})];
    if (slot) throw ParseError(node_where("strategy", id) + ": listed twice");
    slot = Holdings{rational_from_json(require(holdings[k], "phi0", where), node_where("strategy", id) + " phi0"),
                    rational_from_json(require(holdings[k], "phi1", where), node_where("strategy", id) + " phi1")};
  }
  std::vector<Rational> phi0(tree.size()), phi1(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (given[n]) {
      phi0[n] = given[n]->bond;
      phi1[n] = given[n]->stock;
    } else if (const auto p = tree.parent(n)) {
      phi0[n] = phi0[*p];
      phi1[n] = phi1[*p];
    }
  }
  return Strategy(AdaptedProcess(tree, std::move(phi0)), AdaptedProcess(tree, std::move(phi1)));
}

Json strategy_to_json(const EventTree& tree, const Strategy& strategy) {
  require_same_tree(tree, strategy.phi0.tree_tag(), "strategy");
  Json doc;
  doc["holdings"] = Json::array();
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    Json row;
    row["node"] = tree.id(n).value;
    row["phi0"] = rational_to_json(strategy.phi0[n]);
    row["phi1"] = rational_to_json(strategy.phi1[n]);
    doc["holdings"].push_back(std::move(row));
  }
  return doc;
}

CpsDocument load_cps(const Json& document, const Market& market) {
  const EventTree& tree = market.tree;
  const auto shadow = read_node_map(require(document, "S_tilde", "cps"), tree, "S_tilde");
  const auto density = read_node_map(require(document, "Z", "cps"), tree, "Z");
  std::vector<Rational> s(tree.size()), z(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (!density[n]) throw ParseError(node_where("Z", tree.id(n).value) + ": missing");
    z[n] = *density[n];
    if (shadow[n]) {
      s[n] = *shadow[n];
    } else if (z[n] == 0) {
      s[n] = market.price[n];
    } else {
      throw ParseError(node_where("S_tilde", tree.id(n).value) + ": missing on the support of Q");
    }
  }
  return {make_cps(tree, AdaptedProcess(tree, std::move(s)), AdaptedProcess(tree, std::move(z))),
          rational_from_json(require(document, "lambda_prime", "cps"), "cps lambda_prime"),
          rational_from_json(require(document, "epsilon", "cps"), "cps epsilon")};
}

Json cps_to_json(const Market& market, const ConsistentPriceSystem& cps, const Rational& lambda_prime,
                 const Rational& epsilon) {
  const EventTree& tree = market.tree;
  Json doc, shadow = Json::object(), density = Json::object(), off = Json::array();
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const std::string key = std::to_string(tree.id(n).value);
    if (cps.support[n]) {
      shadow[key] = rational_to_json(cps.shadow_price[n]);
    } else {
      off.push_back(tree.id(n).value);
    }
    density[key] = rational_to_json(cps.density[n]);
  }
  doc["S_tilde"] = std::move(shadow);
  doc["Z"] = std::move(density);
  doc["lambda_prime"] = rational_to_json(lambda_prime);
  doc["epsilon"] = rational_to_json(epsilon);
  doc["off_support"] = std::move(off);
  return doc;
}

Json node_map(const EventTree& tree, const std::vector<Rational>& values) {
  Json out = Json::object();
  for (NodeIndex n = 0; n < tree.size(); ++n) out[std::to_string(tree.id(n).value)] = rational_to_json(values[n]);
  return out;
}

void put_node_map(Json& out, const std::string& key, const EventTree& tree, const std::vector<Rational>& values,
                  bool decimal) {
  out[key] = node_map(tree, values);
  if (!decimal) return;
  Json approx = Json::object();
  for (NodeIndex n = 0; n < tree.size(); ++n) approx[std::to_string(tree.id(n).value)] = to_double(values[n]);
  out[key + "_decimal"] = std::move(approx);
}

void put_rational(Json& out, const std::string& key, const Rational& value, bool decimal) {
  out[key] = rational_to_json(value);
  if (decimal) out[key + "_decimal"] = to_double(value);
}

Json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics) {
  Json out = Json::array();
  for (const auto& d : diagnostics) {
    Json row;
    row["node"] = d.node ? Json(d.node->value) : Json(nullptr);
    row["message"] = d.message;
    out.push_back(std::move(row));
  }
  return out;
}

Json self_financing_to_json(const Market& market, const SelfFinancingReport& report, bool decimal) {
  const EventTree& tree = market.tree;
  Json out;
  out["self_financing"] = report.self_financing;
  std::vector<NodeId> failing;
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (!report.pass[n]) failing.push_back(tree.id(n));
  }
  out["failing_nodes"] = id_list(failing);
  put_node_map(out, "slack", tree, report.slack, decimal);
  return out;
}

Json admissibility_to_json(const Market& market, const AdmissibilityReport& report, bool decimal) {
  const EventTree& tree = market.tree;
  Json out;
  out["mode"] = to_string(report.mode);
  put_rational(out, "minimal_M", report.minimal_M, decimal);
  out["worst_node"] = report.worst_node.value;
  put_node_map(out, "per_node_bound", tree, report.per_node_bound, decimal);
  put_node_map(out, "liquidation_pre", tree, report.liquidation_pre, decimal);
  put_node_map(out, "liquidation_post", tree, report.liquidation_post, decimal);
  return out;
}

Json certificate_to_json(const InfeasibilityCertificate& certificate, const Rational& lambda_prime,
                         const Rational& epsilon) {
  Json out;
  out["feasible"] = false;
  out["lambda_prime"] = rational_to_json(lambda_prime);
  out["epsilon"] = rational_to_json(epsilon);
  out["verified"] = certificate.verified;
  Json rows = Json::array();
  for (std::size_t i = 0; i < certificate.multipliers.size(); ++i) {
    Json row;
    row["row"] = certificate.row_labels.at(i);
    row["multiplier"] = rational_to_json(certificate.multipliers[i]);
    rows.push_back(std::move(row));
  }
  out["farkas"] = std::move(rows);
  out["basis"] = certificate.basis;
  return out;
}

Json threshold_to_json(const Threshold& threshold, const Rational& resolution, const Rational& epsilon,
                       bool decimal) {
  Json out;
  out["found"] = threshold.found;
  put_rational(out, "threshold", threshold.value, decimal);
  put_rational(out, "lower", threshold.lower, decimal);
  out["resolution"] = rational_to_json(resolution);
  out["epsilon"] = rational_to_json(epsilon);
  out["evaluations"] = threshold.evaluations;
  return out;
}

Json verdict_to_json(const Market& market, const TheoremVerdict& verdict, bool decimal) {
  Json out;
  out["status"] = to_string(verdict.status());
  out["holds"] = verdict.holds;
  put_rational(out, "x", verdict.x, decimal);
  out["mode"] = to_string(verdict.mode);
  out["hypothesis_met"] = verdict.hypothesis_met;
  Json grid = Json::array();
  for (const auto& point : verdict.hypothesis) {
    Json row;
    row["lambda_prime"] = rational_to_json(point.lambda_prime);
    row["feasible"] = point.feasible;
    grid.push_back(std::move(row));
  }
  out["hypothesis"] = std::move(grid);
  out["precondition_failures"] = verdict.precondition_failures;
  if (verdict.witness) {
    Json w;
    w["node"] = verdict.witness->node.value;
    w["classification"] = to_string(verdict.witness->kind);
    put_rational(w, "value", verdict.witness->value, decimal);
    out["witness"] = std::move(w);
  } else {
    out["witness"] = nullptr;
  }
  put_node_map(out, "values", market.tree, verdict.values, decimal);
  return out;
}

Json counterexample_to_json(const CounterexampleReport& report, bool decimal) {
  const Market& market = report.market;
  const EventTree& tree = market.tree;
  Json out;
  out["variant"] = report.m_tilde ? "stochastic" : "deterministic";
  put_rational(out, "lambda", report.lambda, decimal);
  put_rational(out, "lambda_prime", report.lambda_prime, decimal);
  if (report.m_tilde) put_rational(out, "M_tilde", *report.m_tilde, decimal);
  if (report.bond_after_sale) put_rational(out, "M", *report.bond_after_sale, decimal);
  if (report.m_tilde) out["sale"] = report.sale == SaleConvention::SelfFinancing ? "self_financing" : "literal";
  Json probs = Json::object();
  for (const auto& [name, p] : report.branch_probabilities) probs[name] = rational_to_json(p);
  out["branch_probabilities"] = std::move(probs);
  Json labels = Json::object();
  for (const auto& [name, id] : report.labels) labels[name] = id.value;
  out["labels"] = std::move(labels);
  put_rational(out, "expected_terminal_bound", report.expected_terminal_bound, decimal);
  put_rational(out, "expected_midtime_value", report.expected_midtime_value, decimal);
  out["midtime_node"] = report.midtime_node.value;

  Json measured;
  std::vector<Rational> post(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    post[n] = liquidation_value(market, report.strategy.phi0[n], report.strategy.phi1[n], n);
  }
  std::optional<Rational> terminal_min;
  for (NodeIndex leaf : tree.leaves()) {
    if (!terminal_min || post[leaf] < *terminal_min) terminal_min = post[leaf];
  }
  put_rational(measured, "terminal_min", *terminal_min, decimal);
  put_rational(measured, "midtime_value", post[tree.index(report.midtime_node)], decimal);
  measured["self_financing"] = check_self_financing(market, report.strategy).self_financing;
  const auto check = verify_cps(market, report.cps_witness, report.lambda_prime, Rational(0));
  measured["cps_verified"] = check.ok;
  measured["cps_violations"] = diagnostics_to_json(check.violations);
  put_node_map(measured, "liquidation_value", tree, post, decimal);
  out["measured"] = std::move(measured);
  return out;
}

}  // namespace spreadlab::io
