#pragma once

#include <utility>
#include <vector>

#include "spreadlab/event_tree.hpp"

namespace spreadlab {

/// Bid-ask market on an event tree. The bond is the numeraire (B = 1); the
/// stock can be bought at S and sold at (1 - lambda) S.
struct Market {
  EventTree tree;
  AdaptedProcess price;  // S, in units of bond per share
  Rational lambda;

  /// Builds without validation; see validate_market and make_market.
  Market(EventTree t, AdaptedProcess s, Rational l);
};

/// Every violation of "S > 0 everywhere" and "0 <= lambda < 1".
std::vector<Diagnostic> validate_market(const Market& market);

/// Builds and validates; throws DiagnosticError on any violation.
Market make_market(EventTree tree, std::vector<Rational> price, Rational lambda);

struct Quote {
  Rational bid;
  Rational ask;
};

Quote bid_ask(const Market& market, NodeId node);
Quote bid_ask(const Market& market, NodeIndex node);

}  // namespace spreadlab
