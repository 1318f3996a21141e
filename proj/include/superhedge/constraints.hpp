#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "superhedge/common.hpp"
#include "superhedge/lattice.hpp"
#include "superhedge/lp.hpp"
#include "superhedge/payoff.hpp"

namespace superhedge {

// Closed convex set in V-representation: conv(vertices) + cone(rays). Must
// contain the origin (checked by LP feasibility at construction).
struct NodeSet {
  int dim = 0;
  std::vector<std::vector<double>> vertices;  // nonempty
  std::vector<std::vector<double>> rays;      // possibly empty

  static NodeSet make(int dim, std::vector<std::vector<double>> vertices,
                      std::vector<std::vector<double>> rays);
};

// sup over the set of delta . m: +inf if some ray points along m, otherwise
// the maximum over vertices. Always >= 0 because 0 is in the set.
double support_function(const NodeSet& k, std::span<const double> m);

// delta in conv(vertices)+cone(rays) within `tolerance`, decided by LP.
bool membership(const NodeSet& k, std::span<const double> delta,
                double tolerance);

// Everything a per-node rule may inspect when producing the constraint set
// for the strategy position held over (t, t+1).
struct NodeContext {
  int time = 0;                     // decision time t, 0-based
  std::span<const double> history;  // x_1..x_t, row-major t*d (empty at t=0)
  std::span<const double> x0;
  int assets = 0;
};

using NodeSetRule = std::function<NodeSet(const NodeContext&)>;

struct ConstraintSpec {
  enum class Kind { unconstrained, per_node, gamma };

  Kind kind = Kind::unconstrained;
  NodeSetRule rule;           // per_node only
  std::vector<double> gamma;  // per-asset increment bound, gamma only
  bool non_approximable = false;  // user-declared warning flag
  std::string label;              // description for reports

  static ConstraintSpec unconstrained();
  static ConstraintSpec per_node(NodeSetRule rule, bool non_approximable = false,
                                 std::string label = "per_node");
  static ConstraintSpec gamma_bound(std::vector<double> gamma);
};

// The full-space set {0} + cone(+-e_n): what "unconstrained" means per node.
NodeSet unconstrained_node_set(int dim);

// Constraint set of the node (t, node) on this lattice; throws for gamma
// specs, whose coupling across times has no per-node set.
NodeSet node_set_for(const ConstraintSpec& spec, const PathLattice& lattice,
                     int t, long long node);

// Delta^n >= -c^n: vertex {-c}, rays {+e_n}.
ConstraintSpec builder_shortselling(const std::vector<double>& c);

// Per-node box [a(xt), b(xt)] driven by the relative drawdown vector
// xt_n = x_t^n / max(x0^n, ..., x_t^n); a and b are expressions over x[1][n].
// Requires a <= 0 <= b at every lattice node (checked during emission).
ConstraintSpec builder_drawdown(std::vector<PayoffExpr> a,
                                std::vector<PayoffExpr> b);

// First d' assets frozen at zero, the rest unconstrained.
ConstraintSpec builder_non_tradable(int d_prime, int assets);

// Strategy variables and rows the constraint family contributes to the
// superhedging LP. Delta_t(node) = sum of term.weight * x[term.var].
struct StrategyEmission {
  struct Term {
    int var = 0;                 // local strategy-variable index
    std::vector<double> weight;  // d-vector
  };
  struct VarInfo {
    int time = 0;
    long long node = 0;
    char kind = 'd';  // 'd' direct delta, 'l' lambda, 'r' ray
    int index = 0;    // asset (d) or vertex/ray ordinal (l/r)
  };

  int num_vars = 0;
  std::vector<double> lo, hi;
  std::vector<VarInfo> var_info;
  std::vector<std::vector<std::vector<Term>>> node_terms;  // [t][node]
  std::vector<LinearProgram::Row> rows;  // over local variable indices
};

StrategyEmission emit_primal_constraints(const ConstraintSpec& spec,
                                         const PathLattice& lattice);

}  // namespace superhedge
