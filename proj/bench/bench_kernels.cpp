// Serial vs OpenMP kernels on random markets of growing size.
#include <benchmark/benchmark.h>

#include <random>

#include "spreadlab/kernels.hpp"

namespace {

using namespace spreadlab;

// Full tree with `children` branches and `periods` steps; prices k/4.
Market full_market(std::size_t periods, std::size_t children) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> price(1, 16);
  std::vector<Rational> times;
  for (std::size_t t = 0; t <= periods; ++t) times.emplace_back(static_cast<long>(t));
  std::vector<NodeSpec> specs{{NodeId{0}, std::nullopt, Rational(1)}};
  std::vector<std::uint64_t> frontier{0};
  std::uint64_t next = 1;
  for (std::size_t t = 0; t < periods; ++t) {
    std::vector<std::uint64_t> grown;
    for (auto parent : frontier) {
      for (std::size_t c = 0; c < children; ++c) {
        specs.push_back({NodeId{next}, NodeId{parent}, Rational(1, static_cast<long>(children))});
        grown.push_back(next++);
      }
    }
    frontier = std::move(grown);
  }
  const auto tree = EventTree::create(times, specs);
  std::vector<Rational> s(tree.size());
  for (auto& v : s) v = Rational(price(rng), 4);
  return make_market(tree, s, Rational(1, 4));
}

Strategy hold_one(const Market& m) {
  return derive_bond_account(m, std::vector<Rational>(m.tree.size(), Rational(1)));
}

template <auto Kernel>
void BM_drift(benchmark::State& state) {
  const auto m = full_market(static_cast<std::size_t>(state.range(0)), 3);
  const auto one = AdaptedProcess::constant(m.tree, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m.tree, m.price, one));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m.tree.size()));
}

template <auto Kernel>
void BM_liquidation(benchmark::State& state) {
  const auto m = full_market(static_cast<std::size_t>(state.range(0)), 3);
  const auto s = hold_one(m);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m, s));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m.tree.size()));
}

template <auto Kernel>
void BM_cps_scan(benchmark::State& state) {
  const auto m = full_market(2, 3);
  std::vector<CpsQuery> queries;
  for (long k = 0; k < state.range(0); ++k) queries.push_back(CpsQuery::equivalent(Rational(k % 8, 16)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m, queries));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_drift<kernels::drift_serial>)->DenseRange(4, 7);
BENCHMARK(BM_drift<kernels::drift_parallel>)->DenseRange(4, 7);
BENCHMARK(BM_liquidation<kernels::liquidation_profile_serial>)->DenseRange(4, 7);
BENCHMARK(BM_liquidation<kernels::liquidation_profile_parallel>)->DenseRange(4, 7);
BENCHMARK(BM_cps_scan<kernels::cps_scan_serial>)->Arg(16)->Arg(512);
BENCHMARK(BM_cps_scan<kernels::cps_scan_parallel>)->Arg(16)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
