#include "spreadlab/cps.hpp"

#include "spreadlab/simplex.hpp"

namespace spreadlab {

const char* to_string(MeasureMode mode) {
  return mode == MeasureMode::Equivalent ? "equivalent" : "absolutely_continuous";
}

Rational default_epsilon() { return Rational(1, 1000000); }

CpsQuery CpsQuery::equivalent(Rational lambda_prime, Rational epsilon) {
  return {std::move(lambda_prime), std::move(epsilon), MeasureMode::Equivalent};
}

CpsQuery CpsQuery::absolutely_continuous(Rational lambda_prime) {
  return {std::move(lambda_prime), Rational(0), MeasureMode::AbsolutelyContinuous};
}

void validate(const CpsQuery& query) {
  if (query.lambda_prime < 0 || query.lambda_prime >= 1) {
    throw PreconditionError("lambda' must satisfy 0 ≤ λ' < 1 (got " + to_string(query.lambda_prime) + ")");
  }
  if (query.epsilon < 0) throw PreconditionError("epsilon must be nonnegative");
  if ((query.epsilon > 0) != (query.mode == MeasureMode::Equivalent)) {
    throw PreconditionError("epsilon must be positive exactly in equivalent mode (got " + to_string(query.epsilon) +
                            " in " + to_string(query.mode) + " mode)");
  }
}

ConsistentPriceSystem make_cps(const EventTree& tree, AdaptedProcess shadow_price, AdaptedProcess density) {
  require_same_tree(tree, shadow_price.tree_tag(), "shadow price");
  require_same_tree(tree, density.tree_tag(), "density");
  std::vector<bool> support(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) support[n] = density[n] > 0;
  return {std::move(shadow_price), std::move(density), std::move(support)};
}

namespace {

struct CpsProgram {
  lp::Problem problem;
  std::vector<std::size_t> z, w, u;
  std::optional<std::size_t> margin;
};

// Variables per node: Z, W = Y - (1 - lambda') S Z >= 0 and U = S Z - Y >= 0.
CpsProgram build_program(const Market& market, const Rational& lambda_prime, const Rational& epsilon,
                         bool maximize_margin) {
  const EventTree& tree = market.tree;
  CpsProgram prog;
  auto& lp = prog.problem;
  const std::size_t n = tree.size();
  for (NodeIndex k = 0; k < n; ++k) {
    const std::string id = std::to_string(tree.id(k).value);
    prog.z.push_back(lp.add_variable("Z[" + id + "]"));
    prog.w.push_back(lp.add_variable("W[" + id + "]"));
    prog.u.push_back(lp.add_variable("U[" + id + "]"));
  }
  if (maximize_margin) {
    prog.margin = lp.add_variable("t");
    lp.set_objective(*prog.margin, Rational(-1));
  }
  const Rational low = 1 - lambda_prime;
  lp.add_row({{prog.z[0], Rational(1)}}, Rational(1), "Z(root) = 1");
  for (NodeIndex k = 0; k < n; ++k) {
    if (tree.is_leaf(k)) continue;
    const std::string id = std::to_string(tree.id(k).value);
    std::vector<std::pair<std::size_t, Rational>> zrow{{prog.z[k], Rational(-1)}};
    std::vector<std::pair<std::size_t, Rational>> yrow{{prog.w[k], Rational(-1)},
                                                       {prog.z[k], -low * market.price[k]}};
    for (NodeIndex c : tree.children(k)) {
      const Rational& p = tree.cond_prob(c);
      zrow.emplace_back(prog.z[c], p);
      yrow.emplace_back(prog.w[c], p);
      yrow.emplace_back(prog.z[c], p * low * market.price[c]);
    }
    lp.add_row(zrow, Rational(0), "Z martingale at node " + id);
    lp.add_row(yrow, Rational(0), "Y martingale at node " + id);
  }
  for (NodeIndex k = 0; k < n; ++k) {
    const std::string id = std::to_string(tree.id(k).value);
    lp.add_row({{prog.z[k], lambda_prime * market.price[k]}, {prog.w[k], Rational(-1)}, {prog.u[k], Rational(-1)}},
               Rational(0), "Y <= S Z at node " + id);
  }
  for (NodeIndex leaf : tree.leaves()) {
    const std::string id = std::to_string(tree.id(leaf).value);
    if (prog.margin) {
      const auto slack = lp.add_variable("E[" + id + "]");
      lp.add_row({{prog.z[leaf], Rational(1)}, {*prog.margin, Rational(-1)}, {slack, Rational(-1)}}, Rational(0),
                 "Z >= t at leaf " + id);
    } else if (epsilon > 0) {
      const auto slack = lp.add_variable("E[" + id + "]");
      lp.add_row({{prog.z[leaf], Rational(1)}, {slack, Rational(-1)}}, epsilon, "Z >= epsilon at leaf " + id);
    }
  }
  return prog;
}

}  // namespace

CpsResult find_cps(const Market& market, const CpsQuery& query) {
  validate(query);
  const EventTree& tree = market.tree;
  CpsProgram prog = build_program(market, query.lambda_prime, query.epsilon, false);
  const lp::Solution sol = lp::solve(prog.problem);

  CpsResult result;
  result.pivots = sol.pivots;
  if (sol.status == lp::Status::Infeasible) {
    InfeasibilityCertificate cert;
    cert.multipliers = sol.farkas;
    for (std::size_t i = 0; i < prog.problem.num_rows(); ++i) cert.row_labels.push_back(prog.problem.row_label(i));
    for (std::size_t b : sol.basis) {
      cert.basis.push_back(b < prog.problem.num_vars() ? prog.problem.var_label(b)
                                                       : "artificial[" + std::to_string(b - prog.problem.num_vars()) + "]");
    }
    cert.verified = lp::verify_farkas(prog.problem, cert.multipliers);
    result.certificate = std::move(cert);
    return result;
  }

  std::vector<Rational> z(tree.size()), s_tilde(tree.size());
  const Rational low = 1 - query.lambda_prime;
  for (NodeIndex k = 0; k < tree.size(); ++k) {
    z[k] = sol.x[prog.z[k]];
    if (z[k] > 0) {
      const Rational y = sol.x[prog.w[k]] + low * market.price[k] * z[k];
      s_tilde[k] = y / z[k];
    } else {
      s_tilde[k] = market.price[k];
    }
  }
  result.feasible = true;
  result.cps = make_cps(tree, AdaptedProcess(tree, std::move(s_tilde)), AdaptedProcess(tree, std::move(z)));
  return result;
}

std::optional<Rational> max_equivalence_margin(const Market& market, const Rational& lambda_prime) {
  validate(CpsQuery::absolutely_continuous(lambda_prime));
  CpsProgram prog = build_program(market, lambda_prime, Rational(0), true);
  const lp::Solution sol = lp::solve(prog.problem);
  if (sol.status != lp::Status::Optimal) return std::nullopt;
  return sol.x[*prog.margin];
}

CpsVerification verify_cps(const Market& market, const ConsistentPriceSystem& cps, const Rational& lambda_prime,
                           const Rational& epsilon) {
  const EventTree& tree = market.tree;
  require_same_tree(tree, cps.shadow_price.tree_tag(), "shadow price");
  CpsVerification out;
  out.violations = validate_density(tree, cps.density);
  const Rational low = 1 - lambda_prime;
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const Rational& z = cps.density[n];
    if (z > 0) {
      const Rational& st = cps.shadow_price[n];
      if (st < low * market.price[n] || st > market.price[n]) {
        out.violations.push_back({tree.id(n), "shadow price " + to_string(st) + " outside the spread [" +
                                                  to_string(low * market.price[n]) + ", " +
                                                  to_string(market.price[n]) + "]"});
      }
    }
    if (!tree.is_leaf(n)) {
      Rational expect = 0;
      for (NodeIndex c : tree.children(n)) {
        if (cps.density[c] != 0) expect += tree.cond_prob(c) * cps.density[c] * cps.shadow_price[c];
      }
      const Rational here = z != 0 ? Rational(z * cps.shadow_price[n]) : Rational(0);
      if (expect != here) {
        out.violations.push_back({tree.id(n), "S_tilde Z is not a P-martingale: drift " + to_string(expect - here)});
      }
    } else if (epsilon > 0 && z < epsilon) {
      out.violations.push_back({tree.id(n), "density " + to_string(z) + " below the equivalence floor " +
                                                to_string(epsilon)});
    }
  }
  out.ok = out.violations.empty();
  return out;
}

Threshold cps_threshold(const Market& market, const Rational& epsilon, const Rational& resolution) {
  if (resolution <= 0) throw PreconditionError("resolution must be positive");
  auto feasible = [&](const Rational& lp) {
    const CpsQuery q = epsilon > 0 ? CpsQuery::equivalent(lp, epsilon) : CpsQuery::absolutely_continuous(lp);
    return find_cps(market, q).feasible;
  };
  Threshold out;
  out.evaluations = 1;
  if (feasible(Rational(0))) {
    out.value = 0;
    out.lower = 0;
    out.found = true;
    return out;
  }
  Rational lo = 0, hi = 1;
  while (hi - lo > resolution) {
    const Rational mid = (lo + hi) / 2;
    ++out.evaluations;
    if (feasible(mid)) {
      hi = mid;
      out.found = true;
    } else {
      lo = mid;
    }
  }
  out.value = hi;
  out.lower = lo;
  return out;
}

ConsistentPriceSystem scale_shadow_price(const EventTree& tree, const ConsistentPriceSystem& cps,
                                         const Rational& factor) {
  std::vector<Rational> scaled(cps.shadow_price.values());
  for (auto& v : scaled) v *= factor;
  return make_cps(tree, AdaptedProcess(tree, std::move(scaled)), cps.density);
}

std::pair<ConsistentPriceSystem, ConsistentPriceSystem> scale_cps(const EventTree& tree,
                                                                  const ConsistentPriceSystem& cps,
                                                                  const Rational& lambda, const Rational& alpha,
                                                                  const Rational& lambda_prime) {
  if (!(lambda_prime < alpha && alpha < lambda && lambda < 1 && lambda_prime >= 0)) {
    throw PreconditionError("scale_cps requires 0 ≤ λ' < α < λ < 1");
  }
  if ((1 - alpha) * (1 - lambda_prime) < 1 - lambda) {
    throw PreconditionError("scale_cps requires (1 - α)(1 - λ') ≥ 1 - λ; choose α ≤ λ/2");
  }
  return {scale_shadow_price(tree, cps, 1 - alpha), scale_shadow_price(tree, cps, (1 - lambda) / (1 - alpha))};
}

}  // namespace spreadlab
