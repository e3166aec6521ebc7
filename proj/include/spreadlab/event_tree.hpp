#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spreadlab/rational.hpp"

namespace spreadlab {

/// External node identifier, as it appears in documents and reports.
struct NodeId {
  std::uint64_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

/// Dense position of a node inside an EventTree. Parents always precede
/// their children, and nodes are grouped by depth.
using NodeIndex = std::size_t;

/// One finding of a validator, optionally pinned to a node.
struct Diagnostic {
  std::optional<NodeId> node;
  std::string message;
};

std::string format(const std::vector<Diagnostic>& diagnostics);

/// Validation failure carrying every diagnostic that was found.
class DiagnosticError : public ValidationError {
 public:
  explicit DiagnosticError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Input row for EventTree::create.
struct NodeSpec {
  NodeId id;
  std::optional<NodeId> parent;
  Rational prob;  // probability given the parent; 1 for the root
};

/// Finite filtered probability space realized as a rooted tree. The atoms
/// of F_t are the nodes at depth t; transition probabilities are exact and
/// strictly positive. Immutable and cheap to copy.
class EventTree {
 public:
  /// Validates and builds. Children keep the order in which they appear in
  /// `nodes`. Throws DiagnosticError naming every offending node.
  static EventTree create(std::vector<Rational> times, const std::vector<NodeSpec>& nodes);

  std::size_t size() const noexcept { return data_->ids.size(); }
  /// Index of the last time step (N); leaves all sit at this depth.
  std::size_t horizon() const noexcept { return data_->times.size() - 1; }
  static constexpr NodeIndex root() noexcept { return 0; }

  NodeId id(NodeIndex n) const { return data_->ids.at(n); }
  /// Throws PreconditionError for ids that are not in this tree.
  NodeIndex index(NodeId id) const;
  bool contains(NodeId id) const noexcept;

  std::optional<NodeIndex> parent(NodeIndex n) const { return data_->parent.at(n); }
  std::span<const NodeIndex> children(NodeIndex n) const { return data_->children.at(n); }
  bool is_leaf(NodeIndex n) const { return data_->children.at(n).empty(); }
  std::size_t depth(NodeIndex n) const { return data_->depth.at(n); }
  const Rational& time(NodeIndex n) const { return data_->times.at(depth(n)); }
  const std::vector<Rational>& times() const noexcept { return data_->times; }

  /// Probability of n given its parent (1 at the root).
  const Rational& cond_prob(NodeIndex n) const { return data_->cond_prob.at(n); }
  /// Unconditional probability of the atom n.
  const Rational& probability(NodeIndex n) const { return data_->probability.at(n); }

  std::span<const NodeIndex> leaves() const noexcept { return data_->leaves; }
  /// Nodes at a given depth, in index order.
  std::vector<NodeIndex> level(std::size_t depth) const;
  /// True when `ancestor` lies on the root path of `node` (inclusive).
  bool is_ancestor(NodeIndex ancestor, NodeIndex node) const;
  std::size_t max_branching() const noexcept;

  /// Identity of the underlying tree; processes remember it to reject
  /// mixing data from different trees.
  std::uint64_t tag() const noexcept { return data_->tag; }

 private:
  struct Data {
    std::uint64_t tag = 0;
    std::vector<Rational> times;
    std::vector<NodeId> ids;
    std::vector<std::optional<NodeIndex>> parent;
    std::vector<std::vector<NodeIndex>> children;
    std::vector<std::size_t> depth;
    std::vector<Rational> cond_prob;
    std::vector<Rational> probability;
    std::vector<NodeIndex> leaves;
  };
  explicit EventTree(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

/// A rational value per node of one tree.
class AdaptedProcess {
 public:
  AdaptedProcess(const EventTree& tree, std::vector<Rational> values);
  static AdaptedProcess constant(const EventTree& tree, const Rational& value);

  const Rational& operator[](NodeIndex n) const { return values_[n]; }
  Rational& operator[](NodeIndex n) { return values_[n]; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<Rational>& values() const noexcept { return values_; }
  std::uint64_t tree_tag() const noexcept { return tree_tag_; }

  friend bool operator==(const AdaptedProcess&, const AdaptedProcess&) = default;

 private:
  std::uint64_t tree_tag_;
  std::vector<Rational> values_;
};

/// A process whose value at a node is already known at the parent: sibling
/// values coincide. The root carries the initial value.
class PredictableProcess {
 public:
  /// Throws ValidationError when two siblings disagree.
  PredictableProcess(const EventTree& tree, std::vector<Rational> values);

  const Rational& operator[](NodeIndex n) const { return values_[n]; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<Rational>& values() const noexcept { return values_; }
  std::uint64_t tree_tag() const noexcept { return tree_tag_; }

 private:
  std::uint64_t tree_tag_;
  std::vector<Rational> values_;
};

/// E_Q[X at depth `horizon` | node]. `density` is the density process of Q
/// with respect to P; pass AdaptedProcess::constant(tree, 1) for P itself.
/// Throws when the node has zero density or the processes belong to another
/// tree.
Rational conditional_expectation(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density,
                                 NodeId node, std::size_t horizon);
Rational conditional_expectation(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density,
                                 NodeIndex node, std::size_t horizon);

/// E_Q[X(children) | n] - X(n) at internal nodes, 0 at leaves. Throws if an
/// internal node has zero density.
AdaptedProcess one_step_drift(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density);

/// Checks Z(root) = 1, Z >= 0 and the P-martingale property of Z.
std::vector<Diagnostic> validate_density(const EventTree& tree, const AdaptedProcess& density);

void require_same_tree(const EventTree& tree, std::uint64_t tag, const char* what);

}  // namespace spreadlab
