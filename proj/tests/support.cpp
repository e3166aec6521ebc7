#include "support.hpp"

#include <algorithm>
#include <numeric>

namespace spreadlab::testing {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

EventTree random_tree(Rng& rng, std::size_t periods, std::size_t max_children, bool shuffle_ids) {
  struct Pending {
    std::uint64_t id;
    std::size_t depth;
  };
  std::vector<NodeSpec> specs{{NodeId{0}, std::nullopt, Rational(1)}};
  std::vector<Pending> frontier{{0, 0}};
  std::uint64_t next = 1;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const Pending at = frontier[i];
    if (at.depth == periods) continue;
    const int count = uniform(rng, 1, static_cast<int>(max_children));
    std::vector<int> weights(count);
    for (int& w : weights) w = uniform(rng, 1, 4);
    const int total = std::accumulate(weights.begin(), weights.end(), 0);
    for (int w : weights) {
      specs.push_back({NodeId{next}, NodeId{at.id}, Rational(w, total)});
      frontier.push_back({next, at.depth + 1});
      ++next;
    }
  }
  if (shuffle_ids) {
    std::vector<std::uint64_t> fresh(next - 1);
    for (std::size_t k = 0; k < fresh.size(); ++k) fresh[k] = 7 * (k + 1) + 3;
    std::shuffle(fresh.begin(), fresh.end(), rng);
    auto rename = [&](NodeId id) { return id.value == 0 ? id : NodeId{fresh[id.value - 1]}; };
    for (auto& s : specs) {
      s.id = rename(s.id);
      if (s.parent) s.parent = rename(*s.parent);
    }
    std::shuffle(specs.begin() + 1, specs.end(), rng);
  }
  std::vector<Rational> times;
  for (std::size_t t = 0; t <= periods; ++t) times.emplace_back(static_cast<long>(t), static_cast<long>(periods ? periods : 1));
  return EventTree::create(times, specs);
}

std::vector<Rational> random_prices(Rng& rng, const EventTree& tree) {
  std::vector<Rational> price(tree.size());
  for (auto& s : price) s = Rational(uniform(rng, 1, 16), 4);
  return price;
}

Market random_market(Rng& rng, std::size_t periods, std::size_t max_children, const Rational& lambda) {
  EventTree tree = random_tree(rng, periods, max_children);
  auto price = random_prices(rng, tree);
  return make_market(std::move(tree), std::move(price), lambda);
}

namespace {

std::vector<Rational> averaged_prices(Rng& rng, const EventTree& tree) {
  std::vector<Rational> price(tree.size());
  for (NodeIndex n = tree.size(); n-- > 0;) {
    if (tree.is_leaf(n)) {
      price[n] = Rational(uniform(rng, 1, 16), 4);
      continue;
    }
    Rational mean = 0;
    for (NodeIndex c : tree.children(n)) mean += tree.cond_prob(c) * price[c];
    price[n] = mean;
  }
  return price;
}

}  // namespace

Market martingale_market(Rng& rng, std::size_t periods, std::size_t max_children, const Rational& lambda) {
  EventTree tree = random_tree(rng, periods, max_children);
  auto price = averaged_prices(rng, tree);
  return make_market(std::move(tree), std::move(price), lambda);
}

Market binomial_martingale_market(Rng& rng, std::size_t periods, const Rational& lambda) {
  std::vector<NodeSpec> specs{{NodeId{0}, std::nullopt, Rational(1)}};
  std::vector<Rational> price{Rational(uniform(rng, 1, 8))};
  std::vector<std::size_t> depth{0};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (depth[i] == periods) continue;
    const Rational up(uniform(rng, 1, 8), 8), down(uniform(rng, 1, 7), 8);
    const Rational p_up = down / (up + down);
    const std::uint64_t parent = specs[i].id.value;
    const Rational s = price[i];
    specs.push_back({NodeId{specs.size()}, NodeId{parent}, p_up});
    price.push_back(s * (1 + up));
    depth.push_back(depth[i] + 1);
    specs.push_back({NodeId{specs.size()}, NodeId{parent}, 1 - p_up});
    price.push_back(s * (1 - down));
    depth.push_back(depth[i] + 1);
  }
  std::vector<Rational> times;
  for (std::size_t t = 0; t <= periods; ++t) times.emplace_back(static_cast<long>(t));
  EventTree tree = EventTree::create(times, specs);
  std::vector<Rational> ordered(tree.size());
  for (std::size_t k = 0; k < specs.size(); ++k) ordered[tree.index(specs[k].id)] = price[k];
  return make_market(std::move(tree), std::move(ordered), lambda);
}

Market market_with_cps(Rng& rng, std::size_t periods, std::size_t max_children, const Rational& lambda,
                       const Rational& lambda_prime) {
  EventTree tree = random_tree(rng, periods, max_children);
  auto price = averaged_prices(rng, tree);
  const Rational top = 1 / (1 - lambda_prime) - 1;
  for (auto& s : price) s *= 1 + top * Rational(uniform(rng, 0, 4), 4);
  return make_market(std::move(tree), std::move(price), lambda);
}

std::vector<Rational> random_phi1(Rng& rng, const EventTree& tree) {
  std::vector<Rational> phi1(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const auto p = tree.parent(n);
    if (p && uniform(rng, 0, 2) == 0) {
      phi1[n] = phi1[*p];
    } else {
      phi1[n] = Rational(uniform(rng, -4, 4), 2);
    }
  }
  return phi1;
}

Strategy random_strategy(Rng& rng, const Market& market, bool waste) {
  Strategy s = derive_bond_account(market, random_phi1(rng, market.tree));
  if (!waste) return s;
  const EventTree& tree = market.tree;
  std::vector<Rational> lost(tree.size());
  std::vector<Rational> phi0 = s.phi0.values();
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const auto p = tree.parent(n);
    lost[n] = (p ? lost[*p] : Rational(0)) + (uniform(rng, 0, 3) == 0 ? Rational(uniform(rng, 1, 4), 4) : Rational(0));
    phi0[n] -= lost[n];
  }
  return Strategy(AdaptedProcess(tree, std::move(phi0)), s.phi1);
}

std::vector<Rational> random_predictable(Rng& rng, const EventTree& tree, int bound) {
  std::vector<Rational> h(tree.size());
  h[0] = Rational(uniform(rng, -bound, bound));
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (tree.is_leaf(n)) continue;
    const Rational v(uniform(rng, -2 * bound, 2 * bound), 2);
    for (NodeIndex c : tree.children(n)) h[c] = v;
  }
  return h;
}

Rational leaf_enumeration_expectation(const EventTree& tree, const std::vector<Rational>& x,
                                      const std::vector<Rational>& density, NodeIndex node, std::size_t horizon) {
  Rational mass = 0, total = 0;
  for (NodeIndex leaf : tree.leaves()) {
    if (!tree.is_ancestor(node, leaf)) continue;
    NodeIndex at = leaf;
    while (tree.depth(at) > horizon) at = *tree.parent(at);
    const Rational q = tree.probability(leaf) * density[leaf];
    mass += q;
    total += q * x[at];
  }
  return total / mass;
}

namespace {

// Stopping times restricted to the subtree of n, as maps leaf position -> node.
void cuts_below(const EventTree& tree, NodeIndex n, std::vector<std::vector<std::pair<std::size_t, NodeIndex>>>& out) {
  std::vector<std::pair<std::size_t, NodeIndex>> stop_here;
  for (std::size_t k = 0; k < tree.leaves().size(); ++k) {
    if (tree.is_ancestor(n, tree.leaves()[k])) stop_here.emplace_back(k, n);
  }
  out.push_back(stop_here);
  if (tree.is_leaf(n)) return;
  std::vector<std::vector<std::pair<std::size_t, NodeIndex>>> combined{{}};
  for (NodeIndex c : tree.children(n)) {
    std::vector<std::vector<std::pair<std::size_t, NodeIndex>>> sub, next;
    cuts_below(tree, c, sub);
    for (const auto& left : combined) {
      for (const auto& right : sub) {
        auto merged = left;
        merged.insert(merged.end(), right.begin(), right.end());
        next.push_back(std::move(merged));
      }
    }
    combined = std::move(next);
  }
  out.insert(out.end(), combined.begin(), combined.end());
}

}  // namespace

std::vector<std::vector<NodeIndex>> all_stopping_times(const EventTree& tree) {
  std::vector<std::vector<std::pair<std::size_t, NodeIndex>>> raw;
  cuts_below(tree, EventTree::root(), raw);
  std::vector<std::vector<NodeIndex>> out;
  for (const auto& cut : raw) {
    std::vector<NodeIndex> tau(tree.leaves().size());
    for (const auto& [k, node] : cut) tau[k] = node;
    out.push_back(std::move(tau));
  }
  return out;
}

bool optional_strong_supermartingale_by_enumeration(const EventTree& tree, const std::vector<Rational>& x,
                                                    const std::vector<Rational>& density) {
  const auto times = all_stopping_times(tree);
  const auto leaves = tree.leaves();
  for (const auto& sigma : times) {
    for (const auto& tau : times) {
      bool ordered = true;
      for (std::size_t k = 0; k < leaves.size() && ordered; ++k) ordered = tree.is_ancestor(sigma[k], tau[k]);
      if (!ordered) continue;
      // Group leaves by the node sigma stops at.
      std::vector<Rational> mass(tree.size()), total(tree.size());
      for (std::size_t k = 0; k < leaves.size(); ++k) {
        const Rational q = tree.probability(leaves[k]) * density[leaves[k]];
        mass[sigma[k]] += q;
        total[sigma[k]] += q * x[tau[k]];
      }
      for (NodeIndex m = 0; m < tree.size(); ++m) {
        if (mass[m] > 0 && total[m] / mass[m] > x[m]) return false;
      }
    }
  }
  return true;
}

bool self_financing_two_inequalities(const Market& market, const Strategy& strategy, NodeIndex node) {
  const auto p = market.tree.parent(node);
  const Rational d0 = strategy.phi0[node] - (p ? strategy.phi0[*p] : Rational(0));
  const Rational d1 = strategy.phi1[node] - (p ? strategy.phi1[*p] : Rational(0));
  const Rational& s = market.price[node];
  return d0 + s * d1 <= 0 && d0 + (1 - market.lambda) * s * d1 <= 0;
}

}  // namespace spreadlab::testing
