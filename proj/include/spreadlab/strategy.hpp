#pragma once

#include <vector>

#include "spreadlab/market.hpp"

namespace spreadlab {

/// Post-trade holdings per node: phi0 units of bond, phi1 shares. The
/// pre-trade holdings at a node are the parent's post-trade holdings, and
/// (0, 0) at the root (zero endowment).
///
/// One trade per node, executed at that node's price with that node's
/// information. A "left jump" trade just before n in continuous time is the
/// same economic object as a trade at n's parent, so the tree needs no
/// second slot.
struct Strategy {
  AdaptedProcess phi0;
  AdaptedProcess phi1;

  Strategy(AdaptedProcess bond, AdaptedProcess stock);
  static Strategy zero(const EventTree& tree);
};

struct Holdings {
  Rational bond;
  Rational stock;
};

Holdings pre_trade(const EventTree& tree, const Strategy& strategy, NodeIndex node);
Holdings post_trade(const Strategy& strategy, NodeIndex node);

/// Canonical split of the share increments into purchases and sales.
struct TradeDecomposition {
  std::vector<Rational> buy;   // shares bought at the ask
  std::vector<Rational> sell;  // shares sold at the bid
};

TradeDecomposition decompose_trades(const EventTree& tree, const Strategy& strategy);

/// The unique strategy holding `phi1` that is self-financing with equality:
/// every purchase is paid at the ask and every sale credited at the bid.
Strategy derive_bond_account(const Market& market, const std::vector<Rational>& phi1);

struct SelfFinancingReport {
  std::vector<bool> pass;
  /// Right side minus left side of the cash inequality; >= 0 iff pass.
  std::vector<Rational> slack;
  bool self_financing = true;
};

/// A node passes iff
///   phi0(n) - phi0(parent) <= (1 - lambda) S(n) sell(n) - S(n) buy(n).
/// Lowering phi0 ("throwing away money") never breaks it.
SelfFinancingReport check_self_financing(const Market& market, const Strategy& strategy);

struct TotalVariation {
  Rational bond;
  Rational stock;
};

/// Maximum over leaves of the summed absolute increments along the root
/// path, the initial trade at the root included.
TotalVariation total_variation(const EventTree& tree, const Strategy& strategy);

}  // namespace spreadlab
