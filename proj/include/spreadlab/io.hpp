#pragma once
// JSON documents and reports. Rationals always travel as "p/q" strings;
// the optional decimal columns are approximate and for humans only.

#include <filesystem>

#include <json.hpp>

#include "spreadlab/counterexample.hpp"
#include "spreadlab/theorem.hpp"

namespace spreadlab::io {

using Json = nlohmann::ordered_json;

/// Throws ParseError naming the file on I/O or syntax errors.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& document);

Rational rational_from_json(const Json& value, const std::string& where);
Json rational_to_json(const Rational& value);

/// {"times": [...], "nodes": [{"id", "parent", "prob", "S"}], "lambda"}.
/// Price and lambda fields are ignored by load_tree.
EventTree load_tree(const Json& document);
Market load_market(const Json& document);
Json market_to_json(const Market& market);

/// {"holdings": [{"node", "phi0", "phi1"}]}, post-trade values; omitted
/// nodes inherit the parent's holdings, and the root defaults to (0, 0).
Strategy load_strategy(const Json& document, const Market& market);
Json strategy_to_json(const EventTree& tree, const Strategy& strategy);

struct CpsDocument {
  ConsistentPriceSystem cps;
  Rational lambda_prime;
  Rational epsilon;
};

/// {"S_tilde": {id: q}, "Z": {id: q}, "lambda_prime", "epsilon"}. S_tilde
/// may omit nodes with Z = 0; those are listed under "off_support" on output
/// and take the ask price as placeholder on input.
CpsDocument load_cps(const Json& document, const Market& market);
Json cps_to_json(const Market& market, const ConsistentPriceSystem& cps, const Rational& lambda_prime,
                 const Rational& epsilon);

/// Per-node map keyed by node id.
Json node_map(const EventTree& tree, const std::vector<Rational>& values);
/// Adds `key` and, when `decimal` is set, `key + "_decimal"`.
void put_node_map(Json& out, const std::string& key, const EventTree& tree, const std::vector<Rational>& values,
                  bool decimal);
void put_rational(Json& out, const std::string& key, const Rational& value, bool decimal);

Json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics);
Json self_financing_to_json(const Market& market, const SelfFinancingReport& report, bool decimal);
Json admissibility_to_json(const Market& market, const AdmissibilityReport& report, bool decimal);
Json certificate_to_json(const InfeasibilityCertificate& certificate, const Rational& lambda_prime,
                         const Rational& epsilon);
Json threshold_to_json(const Threshold& threshold, const Rational& resolution, const Rational& epsilon,
                       bool decimal);
Json verdict_to_json(const Market& market, const TheoremVerdict& verdict, bool decimal);
/// Asserted constants of a generated instance next to the values measured
/// on the generated market and strategy.
Json counterexample_to_json(const CounterexampleReport& report, bool decimal);

}  // namespace spreadlab::io
