#pragma once

// Node-wise and query-wise loops that run under OpenMP. Each parallel
// kernel has a serial twin with identical results; the serial versions are
// the reference for the tests and the baseline for bench/.

#include <optional>
#include <span>
#include <vector>

#include "spreadlab/cps.hpp"
#include "spreadlab/strategy.hpp"

namespace spreadlab::kernels {

/// E_Q[X(children) | n] - X(n) per node; empty at leaves and wherever the
/// density vanishes.
std::vector<std::optional<Rational>> drift_serial(const EventTree& tree, const AdaptedProcess& x,
                                                  const AdaptedProcess& density);
std::vector<std::optional<Rational>> drift_parallel(const EventTree& tree, const AdaptedProcess& x,
                                                    const AdaptedProcess& density);

/// Liquidation values of the pre-trade and post-trade holdings per node.
struct LiquidationProfile {
  std::vector<Rational> pre;
  std::vector<Rational> post;
};

LiquidationProfile liquidation_profile_serial(const Market& market, const Strategy& strategy);
LiquidationProfile liquidation_profile_parallel(const Market& market, const Strategy& strategy);

/// One find_cps call per query. Each call is single-threaded; the parallel
/// version spreads queries across threads.
std::vector<CpsResult> cps_scan_serial(const Market& market, std::span<const CpsQuery> queries);
std::vector<CpsResult> cps_scan_parallel(const Market& market, std::span<const CpsQuery> queries);

}  // namespace spreadlab::kernels
