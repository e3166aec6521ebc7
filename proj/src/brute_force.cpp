#include <algorithm>

#include "spreadlab/cps.hpp"

namespace spreadlab {

namespace {

using Grid = std::vector<Rational>;

bool contains(const Grid& g, const Rational& s) { return std::binary_search(g.begin(), g.end(), s); }

// Conditional Q-weights q over children with values v such that
// sum q = 1 and sum q v = s. `strict` demands q > 0 everywhere.
std::optional<std::vector<Rational>> weights(const Rational& s, const std::vector<Rational>& v,
                                             const std::vector<Rational>& p, bool strict) {
  const std::size_t k = v.size();
  const auto lo = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  const auto hi = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  Rational mass = 0;
  for (const auto& x : p) mass += x;

  if (v[lo] < s && s < v[hi]) {
    Rational mean = 0;
    for (std::size_t i = 0; i < k; ++i) mean += p[i] * v[i];
    mean /= mass;
    std::vector<Rational> q(k);
    if (mean == s) {
      for (std::size_t i = 0; i < k; ++i) q[i] = p[i] / mass;
      return q;
    }
    // Mix P with a point mass on the extreme on the far side of s; the
    // largest admissible share of P keeps every weight positive.
    const std::size_t extreme = mean > s ? lo : hi;
    const Rational beta = (s - v[extreme]) / (mean - v[extreme]);
    for (std::size_t i = 0; i < k; ++i) q[i] = beta * p[i] / mass;
    q[extreme] += 1 - beta;
    return q;
  }
  // s sits on the boundary of the hull: only children valued exactly s may carry weight.
  Rational on_s = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (v[i] == s) on_s += p[i];
  }
  if (on_s == 0) return std::nullopt;
  if (strict && on_s != mass) return std::nullopt;
  std::vector<Rational> q(k);
  for (std::size_t i = 0; i < k; ++i) q[i] = v[i] == s ? Rational(p[i] / on_s) : Rational(0);
  return q;
}

std::vector<Rational> candidates(const Grid& g, const Rational& s) {
  std::vector<Rational> out{g.front(), g.back()};
  const auto it = std::lower_bound(g.begin(), g.end(), s);
  if (it != g.begin()) out.push_back(*(it - 1));
  if (it != g.end()) {
    out.push_back(*it);
    if (*it == s && it + 1 != g.end()) out.push_back(*(it + 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

BruteForceResult brute_force_cps(const Market& market, const CpsQuery& query, const Rational& grid_resolution) {
  validate(query);
  const EventTree& tree = market.tree;
  if (tree.horizon() > 3 || tree.max_branching() > 3) {
    throw PreconditionError("brute-force oracle scale exceeded: at most 3 periods and 3 children per node");
  }
  if (grid_resolution <= 0 || grid_resolution > 1) throw PreconditionError("grid resolution must lie in (0, 1]");
  const bool strict = query.mode == MeasureMode::Equivalent;

  const Rational steps_q = 1 / grid_resolution;
  boost::multiprecision::mpz_int steps = numerator(steps_q) / denominator(steps_q);
  if (steps * denominator(steps_q) != numerator(steps_q)) ++steps;

  BruteForceResult result;
  result.resolution = Rational(1) / Rational(steps);

  const std::size_t n = tree.size();
  std::vector<Grid> feasible(n);
  const Rational low = 1 - query.lambda_prime;
  for (NodeIndex idx = n; idx-- > 0;) {
    const Rational& price = market.price[idx];
    // Spread endpoints plus the multiples of the resolution inside the
    // spread; a common lattice lets parent and child share values.
    const Rational bottom = low * price;
    Grid grid{bottom};
    if (query.lambda_prime > 0) {
      const Rational first_step = bottom * Rational(steps);
      boost::multiprecision::mpz_int k = numerator(first_step) / denominator(first_step);
      if (k * denominator(first_step) != numerator(first_step)) ++k;
      for (Rational v = Rational(k) / Rational(steps); v < price; v += result.resolution) {
        if (v > bottom) grid.push_back(v);
      }
      grid.push_back(price);
    }
    if (tree.is_leaf(idx)) {
      feasible[idx] = std::move(grid);
      continue;
    }
    std::vector<const Grid*> kids;
    bool missing = false;
    for (NodeIndex c : tree.children(idx)) {
      if (feasible[c].empty()) {
        missing = true;
      } else {
        kids.push_back(&feasible[c]);
      }
    }
    if (kids.empty() || (strict && missing)) continue;
    for (const Rational& s : grid) {
      bool ok = false;
      if (strict) {
        ok = std::all_of(kids.begin(), kids.end(), [&](const Grid* g) { return contains(*g, s); });
      } else {
        ok = std::any_of(kids.begin(), kids.end(), [&](const Grid* g) { return contains(*g, s); });
      }
      for (std::size_t i = 0; !ok && i < kids.size(); ++i) {
        for (std::size_t j = 0; !ok && j < kids.size(); ++j) {
          ok = i != j && kids[i]->front() < s && s < kids[j]->back();
        }
      }
      if (ok) feasible[idx].push_back(s);
    }
  }
  if (feasible[EventTree::root()].empty()) return result;

  // Rebuild one concrete system top-down, choosing at every node the child
  // values whose weights keep the density ratio q/p as large as possible.
  std::vector<Rational> shadow(n), density(n);
  const Grid& root_grid = feasible[EventTree::root()];
  shadow[0] = root_grid[root_grid.size() / 2];
  density[0] = 1;
  for (NodeIndex idx = 0; idx < n; ++idx) {
    if (density[idx] == 0) shadow[idx] = market.price[idx];
    if (tree.is_leaf(idx) || density[idx] == 0) continue;
    const Rational& s = shadow[idx];
    std::vector<NodeIndex> used;
    for (NodeIndex c : tree.children(idx)) {
      if (!feasible[c].empty()) used.push_back(c);
    }
    std::vector<std::vector<Rational>> options;
    std::vector<Rational> p;
    for (NodeIndex c : used) {
      options.push_back(candidates(feasible[c], s));
      p.push_back(tree.cond_prob(c));
    }
    std::optional<Rational> best_score;
    std::vector<Rational> best_values, best_q;
    std::vector<std::size_t> pick(used.size(), 0);
    while (true) {
      std::vector<Rational> v;
      for (std::size_t i = 0; i < used.size(); ++i) v.push_back(options[i][pick[i]]);
      if (auto q = weights(s, v, p, strict)) {
        std::optional<Rational> score;
        for (std::size_t i = 0; i < used.size(); ++i) {
          if ((*q)[i] == 0) continue;
          Rational ratio = (*q)[i] / p[i];
          if (!score || ratio < *score) score = std::move(ratio);
        }
        if (score && (!best_score || *score > *best_score)) {
          best_score = score;
          best_values = v;
          best_q = std::move(*q);
        }
      }
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    if (!best_score) {
      throw std::logic_error("brute-force oracle: feasible grid value without admissible child weights");
    }
    for (std::size_t i = 0; i < used.size(); ++i) {
      shadow[used[i]] = best_values[i];
      density[used[i]] = density[idx] * best_q[i] / p[i];
    }
  }

  ConsistentPriceSystem witness =
      make_cps(tree, AdaptedProcess(tree, std::move(shadow)), AdaptedProcess(tree, std::move(density)));
  const CpsVerification check = verify_cps(market, witness, query.lambda_prime, query.epsilon);
  if (!check.ok) {
    for (NodeIndex leaf : tree.leaves()) {
      if (witness.density[leaf] < query.epsilon) result.epsilon_limited = true;
    }
    if (!result.epsilon_limited) {
      throw std::logic_error("brute-force oracle built an invalid witness: " + format(check.violations));
    }
    return result;
  }
  result.feasible = true;
  result.witness = std::move(witness);
  return result;
}

}  // namespace spreadlab
