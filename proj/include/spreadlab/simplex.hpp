#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spreadlab/rational.hpp"

namespace spreadlab::lp {

/// minimize c^T x  subject to  A x = b,  x >= 0.
///
/// Rows are stored sparsely; the solver expands them into a dense tableau.
class Problem {
 public:
  std::size_t add_variable(std::string label);
  /// Adds sum(coef * x[var]) = rhs. Repeated variables are accumulated.
  std::size_t add_row(const std::vector<std::pair<std::size_t, Rational>>& terms, Rational rhs, std::string label);
  void set_objective(std::size_t var, Rational coef);

  std::size_t num_vars() const noexcept { return var_labels_.size(); }
  std::size_t num_rows() const noexcept { return rows_.size(); }
  const std::vector<std::pair<std::size_t, Rational>>& row(std::size_t i) const { return rows_[i]; }
  const Rational& rhs(std::size_t i) const { return rhs_[i]; }
  const std::vector<Rational>& objective() const noexcept { return objective_; }
  bool has_objective() const noexcept;
  const std::string& row_label(std::size_t i) const { return row_labels_[i]; }
  const std::string& var_label(std::size_t j) const { return var_labels_[j]; }

 private:
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows_;
  std::vector<Rational> rhs_;
  std::vector<Rational> objective_;
  std::vector<std::string> row_labels_;
  std::vector<std::string> var_labels_;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<Rational> x;
  Rational objective_value;
  /// When infeasible: y with y^T A <= 0 componentwise and y^T b > 0, an
  /// exact Farkas certificate that no x >= 0 solves A x = b.
  std::vector<Rational> farkas;
  /// Final basis; indices >= num_vars denote phase-I artificials.
  std::vector<std::size_t> basis;
  std::size_t pivots = 0;
};

/// Two-phase dense tableau simplex over exact rationals with Bland's rule,
/// which rules out cycling. A problem without an objective is a pure
/// feasibility query and stops after phase I.
Solution solve(const Problem& problem);

/// Independent check of a Farkas certificate against the problem data.
bool verify_farkas(const Problem& problem, std::span<const Rational> y);

/// Exact residual check A x = b, x >= 0.
bool verify_feasible(const Problem& problem, std::span<const Rational> x);

}  // namespace spreadlab::lp
