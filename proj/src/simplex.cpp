#include "spreadlab/simplex.hpp"

#include <optional>

namespace spreadlab::lp {

std::size_t Problem::add_variable(std::string label) {
  var_labels_.push_back(std::move(label));
  objective_.emplace_back(0);
  return var_labels_.size() - 1;
}

std::size_t Problem::add_row(const std::vector<std::pair<std::size_t, Rational>>& terms, Rational rhs,
                             std::string label) {
  std::vector<std::pair<std::size_t, Rational>> merged;
  for (const auto& [var, coef] : terms) {
    if (var >= num_vars()) throw PreconditionError("row references unknown variable");
    bool found = false;
    for (auto& [v, c] : merged) {
      if (v == var) {
        c += coef;
        found = true;
        break;
      }
    }
    if (!found) merged.emplace_back(var, coef);
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0; });
  rows_.push_back(std::move(merged));
  rhs_.push_back(std::move(rhs));
  row_labels_.push_back(std::move(label));
  return rows_.size() - 1;
}

void Problem::set_objective(std::size_t var, Rational coef) { objective_.at(var) = std::move(coef); }

bool Problem::has_objective() const noexcept {
  for (const auto& c : objective_) {
    if (c != 0) return true;
  }
  return false;
}

namespace {

class Tableau {
 public:
  Tableau(const Problem& p) : m_(p.num_rows()), n_(p.num_vars()), width_(n_ + m_ + 1) {
    cells_.assign(m_ * width_, Rational(0));
    sign_.assign(m_, 1);
    basis_.resize(m_);
    active_.assign(m_, true);
    for (std::size_t i = 0; i < m_; ++i) {
      if (p.rhs(i) < 0) sign_[i] = -1;
      for (const auto& [j, coef] : p.row(i)) at(i, j) = sign_[i] * coef;
      at(i, n_ + i) = 1;
      rhs(i) = sign_[i] * p.rhs(i);
      basis_[i] = n_ + i;
    }
    cost_.assign(width_, Rational(0));
  }

  Rational& at(std::size_t i, std::size_t j) { return cells_[i * width_ + j]; }
  Rational& rhs(std::size_t i) { return cells_[i * width_ + width_ - 1]; }
  std::size_t rows() const { return m_; }
  std::size_t structural() const { return n_; }
  std::size_t columns() const { return n_ + m_; }
  std::vector<std::size_t>& basis() { return basis_; }
  std::vector<Rational>& cost() { return cost_; }
  bool active(std::size_t i) const { return active_[i]; }
  void deactivate(std::size_t i) { active_[i] = false; }
  int sign(std::size_t i) const { return sign_[i]; }
  std::size_t pivots() const { return pivots_; }

  void pivot(std::size_t r, std::size_t col) {
    ++pivots_;
    const Rational inv = 1 / at(r, col);
    Rational* prow = &cells_[r * width_];
    for (std::size_t j = 0; j < width_; ++j) {
      if (prow[j] != 0) prow[j] *= inv;
    }
    auto eliminate = [&](Rational* row) {
      if (row[col] == 0) return;
      const Rational factor = row[col];
      for (std::size_t j = 0; j < width_; ++j) {
        if (prow[j] != 0) row[j] -= factor * prow[j];
      }
    };
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r && active_[i]) eliminate(&cells_[i * width_]);
    }
    eliminate(cost_.data());
    basis_[r] = col;
  }

  /// Bland: lowest-index improving column, then lowest-index leaving basic
  /// variable among minimum ratios. Returns false when optimal.
  enum class Step { Optimal, Pivoted, Unbounded };
  Step step(std::size_t column_limit) {
    std::optional<std::size_t> entering;
    for (std::size_t j = 0; j < column_limit; ++j) {
      if (cost_[j] < 0) {
        entering = j;
        break;
      }
    }
    if (!entering) return Step::Optimal;
    std::optional<std::size_t> leave;
    Rational best_ratio;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const Rational& a = at(i, *entering);
      if (a <= 0) continue;
      Rational ratio = rhs(i) / a;
      if (!leave || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[*leave])) {
        leave = i;
        best_ratio = std::move(ratio);
      }
    }
    if (!leave) return Step::Unbounded;
    pivot(*leave, *entering);
    return Step::Pivoted;
  }

 private:
  std::size_t m_, n_, width_;
  std::vector<Rational> cells_;
  std::vector<int> sign_;
  std::vector<std::size_t> basis_;
  std::vector<bool> active_;
  std::vector<Rational> cost_;
  std::size_t pivots_ = 0;
};

}  // namespace

Solution solve(const Problem& problem) {
  Tableau t(problem);
  const std::size_t m = t.rows();
  const std::size_t n = t.structural();
  auto& cost = t.cost();

  // Phase I: minimize the sum of artificials.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[j] -= t.at(i, j);
    cost.back() -= t.rhs(i);
  }
  while (t.step(t.columns()) == Tableau::Step::Pivoted) {
  }

  Solution out;
  const Rational infeasibility = -cost.back();
  if (infeasibility > 0) {
    out.status = Status::Infeasible;
    out.farkas.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.farkas[i] = t.sign(i) * (1 - cost[n + i]);
    out.basis = t.basis();
    out.pivots = t.pivots();
    return out;
  }

  // Drive zero-level artificials out of the basis; rows where that is
  // impossible are linearly dependent and dropped.
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis()[r] < n) continue;
    std::optional<std::size_t> col;
    for (std::size_t j = 0; j < n; ++j) {
      if (t.at(r, j) != 0) {
        col = j;
        break;
      }
    }
    if (col) {
      t.pivot(r, *col);
    } else {
      t.deactivate(r);
    }
  }

  out.status = Status::Optimal;
  if (problem.has_objective()) {
    const auto& c = problem.objective();
    for (std::size_t j = 0; j < cost.size(); ++j) cost[j] = j < n ? c[j] : Rational(0);
    for (std::size_t r = 0; r < m; ++r) {
      if (!t.active(r)) continue;
      const std::size_t b = t.basis()[r];
      if (b >= n || c[b] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (t.at(r, j) != 0) cost[j] -= c[b] * t.at(r, j);
      }
      cost.back() -= c[b] * t.rhs(r);
    }
    Tableau::Step s;
    while ((s = t.step(n)) == Tableau::Step::Pivoted) {
    }
    if (s == Tableau::Step::Unbounded) out.status = Status::Unbounded;
  }

  out.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < m; ++r) {
    if (t.active(r) && t.basis()[r] < n) out.x[t.basis()[r]] = t.rhs(r);
  }
  Rational value = 0;
  for (std::size_t j = 0; j < n; ++j) value += problem.objective()[j] * out.x[j];
  out.objective_value = value;
  out.basis = t.basis();
  out.pivots = t.pivots();
  return out;
}

bool verify_farkas(const Problem& problem, std::span<const Rational> y) {
  if (y.size() != problem.num_rows()) return false;
  std::vector<Rational> ya(problem.num_vars());
  Rational yb = 0;
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    if (y[i] == 0) continue;
    for (const auto& [j, coef] : problem.row(i)) ya[j] += y[i] * coef;
    yb += y[i] * problem.rhs(i);
  }
  for (const auto& v : ya) {
    if (v > 0) return false;
  }
  return yb > 0;
}

bool verify_feasible(const Problem& problem, std::span<const Rational> x) {
  if (x.size() != problem.num_vars()) return false;
  for (const auto& v : x) {
    if (v < 0) return false;
  }
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    Rational lhs = 0;
    for (const auto& [j, coef] : problem.row(i)) lhs += coef * x[j];
    if (lhs != problem.rhs(i)) return false;
  }
  return true;
}

}  // namespace spreadlab::lp
