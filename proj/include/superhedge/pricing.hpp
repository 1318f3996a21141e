#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "superhedge/constraints.hpp"
#include "superhedge/lattice.hpp"
#include "superhedge/lp.hpp"
#include "superhedge/orderbook.hpp"
#include "superhedge/payoff.hpp"

namespace superhedge {

struct PricingProblem {
  PathLattice lattice;
  PayoffExpr payoff;
  std::vector<TradableOption> options;
  ConstraintSpec constraint;

  // Binds the target and option payoffs against the model dimensions.
  static PricingProblem make(PathLattice lattice, PayoffExpr payoff,
                             std::vector<TradableOption> options,
                             ConstraintSpec constraint);
};

// Payoff values cached per path (payoffs are evaluated once; path count
// dominates runtime).
struct PathTable {
  std::vector<double> phi;               // target payoff per path
  std::vector<std::vector<double>> psi;  // per option, per path
};

PathTable evaluate_paths(const PricingProblem& p);

enum class PricingStatus { priced, primal_unbounded_below, error };

struct StaticPosition {
  int time = 0;
  int asset = 0;
  double strike = 0.0;
  double coefficient = 0.0;
};

struct StrategyNode {
  int time = 0;
  long long node = 0;
  std::vector<double> delta;   // position held over (t, t+1)
  std::vector<double> lambda;  // vertex weights (per-node constraints)
  std::vector<double> rho;     // ray weights
};

struct PrimalCertificate {
  double cash = 0.0;
  std::vector<StaticPosition> statics;  // nonzero call coefficients
  std::vector<double> eta;              // per option
  std::vector<StrategyNode> strategy;   // per (t, node)
};

struct DualCertificate {
  std::vector<double> path_weights;                 // optimizing measure
  std::vector<std::vector<double>> node_penalties;  // [t][node] support values
  std::vector<double> option_conjugates;            // per option
};

struct PricingReport {
  PricingStatus status = PricingStatus::error;
  double primal_value = std::numeric_limits<double>::quiet_NaN();
  double dual_value = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  PrimalCertificate primal;
  DualCertificate dual;
  double min_margin = std::numeric_limits<double>::quiet_NaN();
  bool non_approximable = false;
  std::string message;
  int primal_iterations = 0;
  int dual_iterations = 0;
};

// Superhedging LP: cash + static calls on strictly positive grid strikes +
// order-book split positions + constrained strategy, one domination row per
// lattice path, static cost minimized.
LinearProgram build_primal(const PricingProblem& p);

// Transport LP over path weights with per-node support-function epigraphs and
// per-option conjugate epigraphs; rejects gamma constraints, whose optimizer
// is extracted from the primal multipliers inside price() instead.
LinearProgram build_dual(const PricingProblem& p);

// Solves the primal, obtains the optimizing measure (dual LP for per-node
// families, path-row multipliers for gamma), re-evaluates both certificates
// independently and cross-checks the values to tol::report_gap.
PricingReport price(const PricingProblem& p);

// rho(phi) = superhedging price of -phi.
double risk_measure(const PricingProblem& p, const PayoffExpr& phi);

// Penalty of a measure: node support-function total plus option conjugates
// (gamma families price the strategy sup by an inner LP); +inf when a ray
// condition or an unbounded book side fails.
double penalty(const PricingProblem& p, const LatticeMeasure& q);

// Terminal value of a certificate portfolio along one path (true ladder
// costs, not the LP linearization).
double portfolio_value(const PricingProblem& p, const PrimalCertificate& cert,
                       long long path, const PathTable& table);

// Static-leg cost under the model marginals: cash + sum coef * call price.
double static_cost(const PricingProblem& p, const PrimalCertificate& cert);

// A portfolio with value >= 1 on every path and zero static cost, if one
// exists. Backs arbitrage certificates when the optimal profit is infinite
// and the zero-payoff superhedge has no optimizer.
std::optional<PrimalCertificate> unit_margin_portfolio(const PricingProblem& p);

PayoffExpr negate_payoff(const PayoffExpr& e);
PayoffExpr zero_payoff();

}  // namespace superhedge
