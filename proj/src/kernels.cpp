#include "spreadlab/kernels.hpp"

#include <exception>

#include <omp.h>

#include "spreadlab/valuation.hpp"

namespace spreadlab::kernels {

namespace {

std::optional<Rational> drift_at(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density,
                                 NodeIndex n) {
  if (tree.is_leaf(n) || density[n] == 0) return std::nullopt;
  Rational expect = 0;
  for (NodeIndex c : tree.children(n)) expect += tree.cond_prob(c) * density[c] * x[c];
  return expect / density[n] - x[n];
}

void liquidation_at(const Market& market, const Strategy& strategy, NodeIndex n, LiquidationProfile& out) {
  const Holdings before = pre_trade(market.tree, strategy, n);
  out.pre[n] = liquidation_value(market, before.bond, before.stock, n);
  out.post[n] = liquidation_value(market, strategy.phi0[n], strategy.phi1[n], n);
}

// Exceptions must not escape an OpenMP region; keep the first and rethrow.
class ErrorSlot {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(spreadlab_error_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace

std::vector<std::optional<Rational>> drift_serial(const EventTree& tree, const AdaptedProcess& x,
                                                  const AdaptedProcess& density) {
  std::vector<std::optional<Rational>> out(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) out[n] = drift_at(tree, x, density, n);
  return out;
}

std::vector<std::optional<Rational>> drift_parallel(const EventTree& tree, const AdaptedProcess& x,
                                                    const AdaptedProcess& density) {
  const auto size = static_cast<std::ptrdiff_t>(tree.size());
  std::vector<std::optional<Rational>> out(tree.size());
#pragma omp parallel for schedule(static) if (size > 256)
  for (std::ptrdiff_t n = 0; n < size; ++n) out[n] = drift_at(tree, x, density, static_cast<NodeIndex>(n));
  return out;
}

LiquidationProfile liquidation_profile_serial(const Market& market, const Strategy& strategy) {
  LiquidationProfile out{std::vector<Rational>(market.tree.size()), std::vector<Rational>(market.tree.size())};
  for (NodeIndex n = 0; n < market.tree.size(); ++n) liquidation_at(market, strategy, n, out);
  return out;
}

LiquidationProfile liquidation_profile_parallel(const Market& market, const Strategy& strategy) {
  const auto size = static_cast<std::ptrdiff_t>(market.tree.size());
  LiquidationProfile out{std::vector<Rational>(market.tree.size()), std::vector<Rational>(market.tree.size())};
#pragma omp parallel for schedule(static) if (size > 256)
  for (std::ptrdiff_t n = 0; n < size; ++n) liquidation_at(market, strategy, static_cast<NodeIndex>(n), out);
  return out;
}

std::vector<CpsResult> cps_scan_serial(const Market& market, std::span<const CpsQuery> queries) {
  std::vector<CpsResult> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(find_cps(market, q));
  return out;
}

std::vector<CpsResult> cps_scan_parallel(const Market& market, std::span<const CpsQuery> queries) {
  const auto count = static_cast<std::ptrdiff_t>(queries.size());
  std::vector<CpsResult> out(queries.size());
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    errors.run([&] { out[i] = find_cps(market, queries[i]); });
  }
  errors.rethrow();
  return out;
}

}  // namespace spreadlab::kernels
