#include "superhedge/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace superhedge {

namespace {

std::string fmt_node(int t, std::span<const double> history, int assets) {
  std::ostringstream os;
  os << "t=" << t;
  if (!history.empty()) {
    os << " x=";
    const int steps = static_cast<int>(history.size()) / assets;
    for (int s = 0; s < steps; ++s) {
      os << '(';
      for (int n = 0; n < assets; ++n) {
        if (n) os << ',';
        os << history[static_cast<std::size_t>(s) * assets + n];
      }
      os << ')';
    }
  }
  return os.str();
}

}  // namespace

NodeSet NodeSet::make(int dim, std::vector<std::vector<double>> vertices,
                      std::vector<std::vector<double>> rays) {
  if (dim < 1) throw ValidationError("node set dimension must be positive");
  if (vertices.empty())
    throw ValidationError("node set needs at least one vertex");
  for (const auto& v : vertices)
    if (static_cast<int>(v.size()) != dim)
      throw ValidationError("node set vertex with wrong dimension");
  for (const auto& r : rays)
    if (static_cast<int>(r.size()) != dim)
      throw ValidationError("node set ray with wrong dimension");

  NodeSet k;
  k.dim = dim;
  k.vertices = std::move(vertices);
  k.rays = std::move(rays);
  const std::vector<double> zero(dim, 0.0);
  if (!membership(k, zero, tol::feasibility * 10))
    throw ValidationError("node set must contain the origin");
  return k;
}

double support_function(const NodeSet& k, std::span<const double> m) {
  if (static_cast<int>(m.size()) != k.dim)
    throw ValidationError("support function direction has wrong dimension");
  for (const auto& r : k.rays) {
    double s = 0.0;
    for (int i = 0; i < k.dim; ++i) s += r[i] * m[i];
    if (s > tol::ray_drift) return kInf;
  }
  double best = -kInf;
  for (const auto& v : k.vertices) {
    double s = 0.0;
    for (int i = 0; i < k.dim; ++i) s += v[i] * m[i];
    best = std::max(best, s);
  }
  return best;
}

bool membership(const NodeSet& k, std::span<const double> delta,
                double tolerance) {
  if (static_cast<int>(delta.size()) != k.dim)
    throw ValidationError("membership query has wrong dimension");
  // min sum of L1 slacks s.t. sum lambda v + sum rho r + s+ - s- = delta,
  // sum lambda = 1; member iff the optimum is within tolerance
  LinearProgram lp;
  const int nv = static_cast<int>(k.vertices.size());
  const int nr = static_cast<int>(k.rays.size());
  for (int j = 0; j < nv; ++j) lp.add_var(0.0, kInf, 0.0);
  for (int j = 0; j < nr; ++j) lp.add_var(0.0, kInf, 0.0);
  for (int i = 0; i < k.dim; ++i) {
    lp.add_var(0.0, kInf, 1.0);  // s+
    lp.add_var(0.0, kInf, 1.0);  // s-
  }
  for (int i = 0; i < k.dim; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < nv; ++j)
      if (k.vertices[j][i] != 0.0) row.emplace_back(j, k.vertices[j][i]);
    for (int j = 0; j < nr; ++j)
      if (k.rays[j][i] != 0.0) row.emplace_back(nv + j, k.rays[j][i]);
    row.emplace_back(nv + nr + 2 * i, 1.0);
    row.emplace_back(nv + nr + 2 * i + 1, -1.0);
    lp.add_row(std::move(row), Rel::eq, delta[i]);
  }
  {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < nv; ++j) row.emplace_back(j, 1.0);
    lp.add_row(std::move(row), Rel::eq, 1.0);
  }
  auto sol = solve(lp);
  return sol.status == LpSolution::Status::optimal && sol.objective <= tolerance;
}

ConstraintSpec ConstraintSpec::unconstrained() {
  ConstraintSpec s;
  s.kind = Kind::unconstrained;
  s.label = "unconstrained";
  return s;
}

ConstraintSpec ConstraintSpec::per_node(NodeSetRule rule, bool non_approximable,
                                        std::string label) {
  ConstraintSpec s;
  s.kind = Kind::per_node;
  s.rule = std::move(rule);
  s.non_approximable = non_approximable;
  s.label = std::move(label);
  return s;
}

ConstraintSpec ConstraintSpec::gamma_bound(std::vector<double> gamma) {
  for (double g : gamma)
    if (g < 0.0)
      throw ValidationError("gamma bound must be componentwise nonnegative");
  ConstraintSpec s;
  s.kind = Kind::gamma;
  s.gamma = std::move(gamma);
  s.label = "gamma";
  return s;
}

NodeSet unconstrained_node_set(int dim) {
  std::vector<std::vector<double>> rays;
  for (int n = 0; n < dim; ++n) {
    std::vector<double> up(dim, 0.0), dn(dim, 0.0);
    up[n] = 1.0;
    dn[n] = -1.0;
    rays.push_back(up);
    rays.push_back(dn);
  }
  return NodeSet::make(dim, {std::vector<double>(dim, 0.0)}, std::move(rays));
}

NodeSet node_set_for(const ConstraintSpec& spec, const PathLattice& lattice,
                     int t, long long node) {
  switch (spec.kind) {
    case ConstraintSpec::Kind::unconstrained:
      return unconstrained_node_set(lattice.assets());
    case ConstraintSpec::Kind::per_node: {
      const std::vector<double> history = lattice.node_history(t, node);
      NodeContext ctx{t, history, lattice.x0(), lattice.assets()};
      NodeSet k = spec.rule(ctx);
      if (k.dim != lattice.assets())
        throw ValidationError("node-set rule returned wrong dimension at node " +
                              fmt_node(t, history, lattice.assets()));
      return k;
    }
    case ConstraintSpec::Kind::gamma:
      throw ValidationError(
          "gamma constraints have no per-node set; use the increment rows");
  }
  throw ValidationError("corrupt constraint spec");
}

ConstraintSpec builder_shortselling(const std::vector<double>& c) {
  for (double v : c)
    if (v < 0.0) throw ValidationError("shortselling bound must be nonnegative");
  const int d = static_cast<int>(c.size());
  std::vector<double> vertex(c);
  for (double& v : vertex) v = -v;
  std::vector<std::vector<double>> rays;
  for (int n = 0; n < d; ++n) {
    std::vector<double> r(d, 0.0);
    r[n] = 1.0;
    rays.push_back(std::move(r));
  }
  NodeSet k = NodeSet::make(d, {vertex}, rays);
  return ConstraintSpec::per_node([k](const NodeContext&) { return k; }, false,
                                  "shortselling");
}

ConstraintSpec builder_drawdown(std::vector<PayoffExpr> a,
                                std::vector<PayoffExpr> b) {
  if (a.size() != b.size() || a.empty())
    throw ValidationError("drawdown needs one (a, b) expression pair per asset");
  const int d = static_cast<int>(a.size());
  if (d > 12)
    throw ValidationError("drawdown boxes support at most 12 assets");
  for (const auto& e : a) bind_payoff(e, d, 1);
  for (const auto& e : b) bind_payoff(e, d, 1);

  auto rule = [a = std::move(a), b = std::move(b), d](const NodeContext& ctx) {
    // relative drawdown at decision time t, using the running maximum that
    // includes x0
    std::vector<double> rel(d);
    for (int n = 0; n < d; ++n) {
      double peak = ctx.x0[n];
      double cur = ctx.x0[n];
      const int steps = static_cast<int>(ctx.history.size()) / d;
      for (int s = 0; s < steps; ++s) {
        cur = ctx.history[static_cast<std::size_t>(s) * d + n];
        peak = std::max(peak, cur);
      }
      rel[n] = peak > 0.0 ? cur / peak : 1.0;
    }
    std::vector<double> alo(d), bhi(d);
    for (int n = 0; n < d; ++n) {
      alo[n] = evaluate(a[n], rel, d);
      bhi[n] = evaluate(b[n], rel, d);
      if (alo[n] > 1e-12 || bhi[n] < -1e-12)
        throw ValidationError("drawdown bounds must satisfy a <= 0 <= b at node " +
                              fmt_node(ctx.time, ctx.history, d));
      if (alo[n] > 0.0) alo[n] = 0.0;
      if (bhi[n] < 0.0) bhi[n] = 0.0;
    }
    // box corners
    std::vector<std::vector<double>> corners;
    corners.reserve(1u << d);
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      std::vector<double> v(d);
      for (int n = 0; n < d; ++n) v[n] = (mask >> n) & 1u ? bhi[n] : alo[n];
      corners.push_back(std::move(v));
    }
    return NodeSet::make(d, std::move(corners), {});
  };
  return ConstraintSpec::per_node(std::move(rule), false, "drawdown");
}

ConstraintSpec builder_non_tradable(int d_prime, int assets) {
  if (d_prime < 0 || d_prime > assets)
    throw ValidationError("non-tradable count must lie in [0, assets]");
  if (d_prime == 0) return ConstraintSpec::unconstrained();
  std::vector<std::vector<double>> rays;
  for (int n = d_prime; n < assets; ++n) {
    std::vector<double> up(assets, 0.0), dn(assets, 0.0);
    up[n] = 1.0;
    dn[n] = -1.0;
    rays.push_back(up);
    rays.push_back(dn);
  }
  NodeSet k =
      NodeSet::make(assets, {std::vector<double>(assets, 0.0)}, std::move(rays));
  return ConstraintSpec::per_node([k](const NodeContext&) { return k; }, false,
                                  "non_tradable(" + std::to_string(d_prime) + ")");
}

StrategyEmission emit_primal_constraints(const ConstraintSpec& spec,
                                         const PathLattice& lattice) {
  StrategyEmission em;
  const int d = lattice.assets();
  const int T = lattice.periods();
  em.node_terms.resize(T);

  auto new_var = [&](double lo, double hi, StrategyEmission::VarInfo info) {
    em.lo.push_back(lo);
    em.hi.push_back(hi);
    em.var_info.push_back(info);
    return em.num_vars++;
  };

  switch (spec.kind) {
    case ConstraintSpec::Kind::unconstrained: {
      for (int t = 0; t < T; ++t) {
        em.node_terms[t].resize(lattice.num_nodes(t));
        for (long long node = 0; node < lattice.num_nodes(t); ++node) {
          auto& terms = em.node_terms[t][node];
          for (int n = 0; n < d; ++n) {
            const int v = new_var(-kInf, kInf, {t, node, 'd', n});
            std::vector<double> w(d, 0.0);
            w[n] = 1.0;
            terms.push_back({v, std::move(w)});
          }
        }
      }
      break;
    }
    case ConstraintSpec::Kind::per_node: {
      for (int t = 0; t < T; ++t) {
        em.node_terms[t].resize(lattice.num_nodes(t));
        for (long long node = 0; node < lattice.num_nodes(t); ++node) {
          const NodeSet k = node_set_for(spec, lattice, t, node);
          auto& terms = em.node_terms[t][node];
          std::vector<std::pair<int, double>> convex_row;
          for (std::size_t j = 0; j < k.vertices.size(); ++j) {
            const int v =
                new_var(0.0, kInf, {t, node, 'l', static_cast<int>(j)});
            convex_row.emplace_back(v, 1.0);
            terms.push_back({v, k.vertices[j]});
          }
          for (std::size_t j = 0; j < k.rays.size(); ++j) {
            const int v =
                new_var(0.0, kInf, {t, node, 'r', static_cast<int>(j)});
            terms.push_back({v, k.rays[j]});
          }
          em.rows.push_back({std::move(convex_row), Rel::eq, 1.0});
        }
      }
      break;
    }
    case ConstraintSpec::Kind::gamma: {
      if (static_cast<int>(spec.gamma.size()) != d)
        throw ValidationError("gamma bound must list one entry per asset");
      // delta variables per node; |Delta_0| <= gamma as bounds, increments as
      // rows against the parent node
      std::vector<std::vector<int>> vars(T);
      for (int t = 0; t < T; ++t) {
        em.node_terms[t].resize(lattice.num_nodes(t));
        vars[t].resize(lattice.num_nodes(t) * d);
        for (long long node = 0; node < lattice.num_nodes(t); ++node) {
          auto& terms = em.node_terms[t][node];
          for (int n = 0; n < d; ++n) {
            const double g = spec.gamma[n];
            const int v = t == 0 ? new_var(-g, g, {t, node, 'd', n})
                                 : new_var(-kInf, kInf, {t, node, 'd', n});
            vars[t][node * d + n] = v;
            std::vector<double> w(d, 0.0);
            w[n] = 1.0;
            terms.push_back({v, std::move(w)});
          }
        }
      }
      for (int t = 1; t < T; ++t) {
        const long long fan = lattice.num_nodes(t) / lattice.num_nodes(t - 1);
        for (long long node = 0; node < lattice.num_nodes(t); ++node) {
          const long long parent = node / fan;
          for (int n = 0; n < d; ++n) {
            const int cur = vars[t][node * d + n];
            const int par = vars[t - 1][parent * d + n];
            em.rows.push_back(
                {{{cur, 1.0}, {par, -1.0}}, Rel::le, spec.gamma[n]});
            em.rows.push_back(
                {{{cur, 1.0}, {par, -1.0}}, Rel::ge, -spec.gamma[n]});
          }
        }
      }
      break;
    }
  }
  return em;
}

}  // namespace superhedge
