#include "spreadlab/event_tree.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <sstream>

#include "spreadlab/kernels.hpp"

namespace spreadlab {

namespace {

std::uint64_t next_tree_tag() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

std::string node_label(NodeId id) { return "node " + std::to_string(id.value); }

}  // namespace

std::string format(const std::vector<Diagnostic>& diagnostics) {
  std::ostringstream out;
  for (std::size_t i = 0; i < diagnostics.size(); ++i) {
    if (i) out << "; ";
    if (diagnostics[i].node) out << node_label(*diagnostics[i].node) << ": ";
    out << diagnostics[i].message;
  }
  return out.str();
}

DiagnosticError::DiagnosticError(std::vector<Diagnostic> diagnostics)
    : ValidationError(format(diagnostics)), diagnostics_(std::move(diagnostics)) {}

EventTree EventTree::create(std::vector<Rational> times, const std::vector<NodeSpec>& nodes) {
  std::vector<Diagnostic> issues;
  if (times.empty()) issues.push_back({std::nullopt, "time grid is empty"});
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] <= times[k - 1]) {
      issues.push_back({std::nullopt, "time stamps must be strictly increasing (t" + std::to_string(k) + " = " +
                                          to_string(times[k]) + ")"});
    }
  }
  if (nodes.empty()) issues.push_back({std::nullopt, "tree has no nodes"});
  if (!issues.empty()) throw DiagnosticError(std::move(issues));

  std::map<NodeId, std::size_t> position;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!position.emplace(nodes[i].id, i).second) {
      issues.push_back({nodes[i].id, "duplicate node id"});
    }
  }

  std::optional<std::size_t> root;
  std::vector<std::vector<std::size_t>> kids(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeSpec& spec = nodes[i];
    if (!spec.parent) {
      if (root) {
        issues.push_back({spec.id, "second root (only one node may have a null parent)"});
      } else {
        root = i;
      }
      if (spec.prob != 1) issues.push_back({spec.id, "root probability must be 1, got " + to_string(spec.prob)});
      continue;
    }
    if (spec.prob <= 0) issues.push_back({spec.id, "nonpositive probability " + to_string(spec.prob)});
    const auto it = position.find(*spec.parent);
    if (it == position.end()) {
      issues.push_back({spec.id, "orphan: parent " + std::to_string(spec.parent->value) + " does not exist"});
    } else {
      kids[it->second].push_back(i);
    }
  }
  if (!root) {
    issues.push_back({std::nullopt, "tree has no root"});
  } else if (nodes[*root].id != NodeId{0}) {
    issues.push_back({nodes[*root].id, "root must have id 0"});
  }
  if (!issues.empty()) throw DiagnosticError(std::move(issues));

  auto data = std::make_shared<Data>();
  data->tag = next_tree_tag();
  data->times = std::move(times);
  const std::size_t horizon = data->times.size() - 1;

  // Breadth-first renumbering: parents precede children, levels are contiguous.
  std::vector<std::optional<NodeIndex>> dense(nodes.size());
  std::deque<std::size_t> queue{*root};
  dense[*root] = 0;
  std::vector<std::size_t> order;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    order.push_back(i);
    for (std::size_t c : kids[i]) {
      if (dense[c]) continue;
      dense[c] = order.size() + queue.size();
      queue.push_back(c);
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!dense[i]) issues.push_back({nodes[i].id, "orphan: not reachable from the root"});
  }
  if (!issues.empty()) throw DiagnosticError(std::move(issues));

  const std::size_t n = order.size();
  data->ids.resize(n);
  data->parent.resize(n);
  data->children.resize(n);
  data->depth.assign(n, 0);
  data->cond_prob.resize(n);
  data->probability.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    data->ids[k] = nodes[i].id;
    data->cond_prob[k] = nodes[i].prob;
    if (nodes[i].parent) {
      const NodeIndex p = *dense[position.at(*nodes[i].parent)];
      data->parent[k] = p;
      data->depth[k] = data->depth[p] + 1;
      data->probability[k] = data->probability[p] * nodes[i].prob;
    } else {
      data->probability[k] = 1;
    }
    for (std::size_t c : kids[i]) data->children[k].push_back(*dense[c]);
  }

  for (NodeIndex k = 0; k < n; ++k) {
    const auto& ch = data->children[k];
    if (ch.empty()) {
      if (data->depth[k] != horizon) {
        issues.push_back({data->ids[k], "ragged leaf depth: leaf at depth " + std::to_string(data->depth[k]) +
                                            " but the time grid has horizon " + std::to_string(horizon)});
      }
      data->leaves.push_back(k);
      continue;
    }
    if (data->depth[k] >= horizon) {
      issues.push_back({data->ids[k], "node at depth " + std::to_string(data->depth[k]) +
                                          " has children beyond the time grid horizon " + std::to_string(horizon)});
    }
    Rational sum = 0;
    for (NodeIndex c : ch) sum += data->cond_prob[c];
    if (sum != 1) issues.push_back({data->ids[k], "children probabilities sum to " + to_string(sum) + " ≠ 1"});
  }
  if (!issues.empty()) throw DiagnosticError(std::move(issues));
  return EventTree(std::move(data));
}

NodeIndex EventTree::index(NodeId id) const {
  const auto it = std::find(data_->ids.begin(), data_->ids.end(), id);
  if (it == data_->ids.end()) throw PreconditionError("unknown " + node_label(id));
  return static_cast<NodeIndex>(it - data_->ids.begin());
}

bool EventTree::contains(NodeId id) const noexcept {
  return std::find(data_->ids.begin(), data_->ids.end(), id) != data_->ids.end();
}

std::vector<NodeIndex> EventTree::level(std::size_t d) const {
  std::vector<NodeIndex> out;
  for (NodeIndex n = 0; n < size(); ++n) {
    if (data_->depth[n] == d) out.push_back(n);
  }
  return out;
}

bool EventTree::is_ancestor(NodeIndex ancestor, NodeIndex node) const {
  std::optional<NodeIndex> cur = node;
  while (cur) {
    if (*cur == ancestor) return true;
    cur = data_->parent[*cur];
  }
  return false;
}

std::size_t EventTree::max_branching() const noexcept {
  std::size_t best = 0;
  for (const auto& ch : data_->children) best = std::max(best, ch.size());
  return best;
}

void require_same_tree(const EventTree& tree, std::uint64_t tag, const char* what) {
  if (tree.tag() != tag) throw PreconditionError(std::string(what) + " belongs to a different tree");
}

AdaptedProcess::AdaptedProcess(const EventTree& tree, std::vector<Rational> values)
    : tree_tag_(tree.tag()), values_(std::move(values)) {
  if (values_.size() != tree.size()) {
    throw PreconditionError("adapted process has " + std::to_string(values_.size()) + " values for a tree of " +
                            std::to_string(tree.size()) + " nodes");
  }
}

AdaptedProcess AdaptedProcess::constant(const EventTree& tree, const Rational& value) {
  return AdaptedProcess(tree, std::vector<Rational>(tree.size(), value));
}

PredictableProcess::PredictableProcess(const EventTree& tree, std::vector<Rational> values)
    : tree_tag_(tree.tag()), values_(std::move(values)) {
  if (values_.size() != tree.size()) {
    throw PreconditionError("predictable process has " + std::to_string(values_.size()) + " values for a tree of " +
                            std::to_string(tree.size()) + " nodes");
  }
  std::vector<Diagnostic> issues;
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const auto ch = tree.children(n);
    for (NodeIndex c : ch) {
      if (values_[c] != values_[ch.front()]) {
        issues.push_back({tree.id(c), "predictable process differs across siblings"});
      }
    }
  }
  if (!issues.empty()) throw DiagnosticError(std::move(issues));
}

Rational conditional_expectation(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density,
                                 NodeId node, std::size_t horizon) {
  return conditional_expectation(tree, x, density, tree.index(node), horizon);
}

Rational conditional_expectation(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density,
                                 NodeIndex node, std::size_t horizon) {
  require_same_tree(tree, x.tree_tag(), "process");
  require_same_tree(tree, density.tree_tag(), "density");
  if (node >= tree.size()) throw PreconditionError("node index out of range");
  if (horizon < tree.depth(node) || horizon > tree.horizon()) {
    throw PreconditionError("horizon " + std::to_string(horizon) + " outside [" + std::to_string(tree.depth(node)) +
                            ", " + std::to_string(tree.horizon()) + "]");
  }
  if (density[node] == 0) {
    throw PreconditionError("conditioning on a null event: zero density at node " + std::to_string(tree.id(node).value));
  }
  // Weighted descent: weight(d) = P(d | node) * Z(d).
  Rational total = 0;
  std::vector<std::pair<NodeIndex, Rational>> frontier{{node, Rational(1)}};
  while (!frontier.empty()) {
    auto [n, w] = std::move(frontier.back());
    frontier.pop_back();
    if (tree.depth(n) == horizon) {
      total += w * density[n] * x[n];
      continue;
    }
    for (NodeIndex c : tree.children(n)) frontier.emplace_back(c, w * tree.cond_prob(c));
  }
  return total / density[node];
}

AdaptedProcess one_step_drift(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density) {
  require_same_tree(tree, x.tree_tag(), "process");
  require_same_tree(tree, density.tree_tag(), "density");
  std::vector<Rational> out(tree.size());
  const auto drift = kernels::drift_parallel(tree, x, density);
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (tree.is_leaf(n)) continue;
    if (!drift[n]) {
      throw PreconditionError("conditioning on a null event: zero density at node " + std::to_string(tree.id(n).value));
    }
    out[n] = *drift[n];
  }
  return AdaptedProcess(tree, std::move(out));
}

std::vector<Diagnostic> validate_density(const EventTree& tree, const AdaptedProcess& density) {
  require_same_tree(tree, density.tree_tag(), "density");
  std::vector<Diagnostic> issues;
  if (density[EventTree::root()] != 1) {
    issues.push_back({tree.id(EventTree::root()), "density must equal 1 at the root, got " +
                                                      to_string(density[EventTree::root()])});
  }
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (density[n] < 0) issues.push_back({tree.id(n), "negative density " + to_string(density[n])});
    if (tree.is_leaf(n)) continue;
    Rational expect = 0;
    for (NodeIndex c : tree.children(n)) expect += tree.cond_prob(c) * density[c];
    if (expect != density[n]) {
      issues.push_back({tree.id(n), "density is not a P-martingale: drift " + to_string(expect - density[n])});
    }
  }
  return issues;
}

}  // namespace spreadlab
