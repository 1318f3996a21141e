#include "superhedge/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace superhedge {

namespace {

struct PrimalLayout {
  int cash = -1;
  struct StaticVar {
    int var = 0;
    int time = 0;
    int asset = 0;
    double strike = 0.0;
    double price = 0.0;  // model call price, the objective coefficient
  };
  std::vector<StaticVar> statics;
  struct OptionVars {
    std::vector<int> ask_vars, bid_vars;
    int unb_ask = -1, unb_bid = -1;
  };
  std::vector<OptionVars> options;
  int strategy_base = 0;
};

double option_eta(const PrimalLayout::OptionVars& ov,
                  const std::vector<double>& x) {
  double eta = 0.0;
  for (int v : ov.ask_vars) eta += x[v];
  if (ov.unb_ask >= 0) eta += x[ov.unb_ask];
  for (int v : ov.bid_vars) eta -= x[v];
  if (ov.unb_bid >= 0) eta -= x[ov.unb_bid];
  return eta;
}

LinearProgram build_primal_impl(const PricingProblem& p, const PathTable& table,
                                PrimalLayout& layout) {
  const PathLattice& lat = p.lattice;
  const int d = lat.assets();
  const int T = lat.periods();
  const long long P = lat.num_paths();

  LinearProgram lp;
  lp.sense = Sense::minimize;
  layout.cash = lp.add_var(-kInf, kInf, 1.0, "cash");

  for (int t = 1; t <= T; ++t) {
    for (int n = 1; n <= d; ++n) {
      const auto& marg = lat.model().marginal(n, t);
      for (double strike : lat.grid(n, t)) {
        if (strike <= 0.0) continue;  // the linear leg belongs to the strategy
        std::ostringstream name;
        name << "b_" << t << '_' << n << '_' << strike;
        const int var = lp.add_var(-kInf, kInf, marg.call_price(strike),
                                   name.str());
        layout.statics.push_back({var, t, n, strike, marg.call_price(strike)});
      }
    }
  }

  for (std::size_t i = 0; i < p.options.size(); ++i) {
    const CostLadder& ladder = p.options[i].ladder;
    PrimalLayout::OptionVars ov;
    for (std::size_t m = 0; m < ladder.asks.size(); ++m)
      ov.ask_vars.push_back(
          lp.add_var(0.0, ladder.asks[m].quantity, 0.0,
                     "buy_" + p.options[i].id + "_" + std::to_string(m)));
    for (std::size_t m = 0; m < ladder.bids.size(); ++m)
      ov.bid_vars.push_back(
          lp.add_var(0.0, ladder.bids[m].quantity, 0.0,
                     "sell_" + p.options[i].id + "_" + std::to_string(m)));
    if (ladder.unbounded_ask_price)
      ov.unb_ask = lp.add_var(0.0, kInf, 0.0, "buy_" + p.options[i].id + "_tail");
    if (ladder.unbounded_bid_price)
      ov.unb_bid =
          lp.add_var(0.0, kInf, 0.0, "sell_" + p.options[i].id + "_tail");
    layout.options.push_back(std::move(ov));
  }

  StrategyEmission em = emit_primal_constraints(p.constraint, lat);
  layout.strategy_base = lp.num_vars();
  for (int v = 0; v < em.num_vars; ++v)
    lp.add_var(em.lo[v], em.hi[v], 0.0);

  // one domination row per path
  std::vector<double> coords(static_cast<std::size_t>(d) * T);
  for (long long path = 0; path < P; ++path) {
    lat.path_coords(path, coords);
    std::vector<std::pair<int, double>> row;
    row.reserve(1 + layout.statics.size() + 4 * p.options.size() + 2 * T * d);
    row.emplace_back(layout.cash, 1.0);
    for (const auto& sv : layout.statics) {
      const double v =
          coords[static_cast<std::size_t>(sv.time - 1) * d + (sv.asset - 1)] -
          sv.strike;
      if (v > 0.0) row.emplace_back(sv.var, v);
    }
    for (std::size_t i = 0; i < p.options.size(); ++i) {
      const CostLadder& ladder = p.options[i].ladder;
      const double psi = table.psi[i][path];
      const auto& ov = layout.options[i];
      for (std::size_t m = 0; m < ov.ask_vars.size(); ++m)
        row.emplace_back(ov.ask_vars[m], psi - ladder.asks[m].price);
      for (std::size_t m = 0; m < ov.bid_vars.size(); ++m)
        row.emplace_back(ov.bid_vars[m], -psi + ladder.bids[m].price);
      if (ov.unb_ask >= 0)
        row.emplace_back(ov.unb_ask, psi - *ladder.unbounded_ask_price);
      if (ov.unb_bid >= 0)
        row.emplace_back(ov.unb_bid, -psi + *ladder.unbounded_bid_price);
    }
    for (int t = 0; t < T; ++t) {
      const long long node = lat.node_of_path(path, t);
      for (const auto& term : em.node_terms[t][node]) {
        double c = 0.0;
        for (int n = 0; n < d; ++n) {
          const double xt = t == 0 ? lat.x0()[n]
                                   : coords[static_cast<std::size_t>(t - 1) * d + n];
          c += term.weight[n] * (coords[static_cast<std::size_t>(t) * d + n] - xt);
        }
        if (c != 0.0) row.emplace_back(layout.strategy_base + term.var, c);
      }
    }
    lp.add_row(std::move(row), Rel::ge, table.phi[path]);
  }

  for (const auto& r : em.rows) {
    std::vector<std::pair<int, double>> row;
    row.reserve(r.coeffs.size());
    for (auto [v, c] : r.coeffs) row.emplace_back(layout.strategy_base + v, c);
    lp.add_row(std::move(row), r.rel, r.rhs);
  }

  return lp;
}

struct DualLayout {
  // epigraph variable per (t, node) with a nonzero vertex, else -1
  std::vector<std::vector<int>> tvar;
  std::vector<int> svar;  // per option
};

LinearProgram build_dual_impl(const PricingProblem& p, const PathTable& table,
                              DualLayout& layout) {
  if (p.constraint.kind == ConstraintSpec::Kind::gamma)
    throw ValidationError(
        "gamma constraints have no per-node transport dual; price() extracts "
        "the optimizer from the primal multipliers instead");

  const PathLattice& lat = p.lattice;
  const int d = lat.assets();
  const int T = lat.periods();
  const long long P = lat.num_paths();

  LinearProgram lp;
  lp.sense = Sense::maximize;
  for (long long path = 0; path < P; ++path)
    lp.add_var(0.0, kInf, table.phi[path]);

  // cache node sets; create epigraph scalars only where a vertex can push
  std::vector<std::vector<NodeSet>> sets(T);
  layout.tvar.assign(T, {});
  for (int t = 0; t < T; ++t) {
    const long long nodes = lat.num_nodes(t);
    sets[t].reserve(nodes);
    layout.tvar[t].assign(nodes, -1);
    for (long long node = 0; node < nodes; ++node) {
      sets[t].push_back(node_set_for(p.constraint, lat, t, node));
      bool nonzero_vertex = false;
      for (const auto& v : sets[t][node].vertices)
        for (double c : v)
          if (c != 0.0) nonzero_vertex = true;
      if (nonzero_vertex)
        layout.tvar[t][node] = lp.add_var(0.0, kInf, -1.0);
    }
  }
  layout.svar.assign(p.options.size(), -1);
  for (std::size_t i = 0; i < p.options.size(); ++i) {
    if (breakpoints(p.options[i].ladder).size() > 1)
      layout.svar[i] = lp.add_var(0.0, kInf, -1.0);
  }

  // marginal consistency rows, one per grid level (zero for extra levels)
  for (int t = 1; t <= T; ++t) {
    for (int n = 1; n <= d; ++n) {
      const auto& grid = lat.grid(n, t);
      const auto& marg = lat.model().marginal(n, t);
      std::vector<double> weight(grid.size(), 0.0);
      for (const auto& a : marg.atoms) {
        auto it = std::lower_bound(grid.begin(), grid.end(),
                                   a.level - tol::atom_merge);
        weight[static_cast<std::size_t>(it - grid.begin())] = a.weight;
      }
      const std::size_t c = static_cast<std::size_t>(t - 1) * d + (n - 1);
      const long long stride = lat.coord_stride(c);
      std::vector<std::vector<std::pair<int, double>>> rows(grid.size());
      for (long long path = 0; path < P; ++path) {
        const long long digit =
            (path / stride) % static_cast<long long>(grid.size());
        rows[digit].emplace_back(static_cast<int>(path), 1.0);
      }
      for (std::size_t g = 0; g < grid.size(); ++g) {
        std::ostringstream name;
        name << "marg_" << t << '_' << n << '_' << grid[g];
        lp.add_row(std::move(rows[g]), Rel::eq, weight[g], name.str());
      }
    }
  }

  // per-node support-function epigraph and ray rows
  std::vector<double> coords(static_cast<std::size_t>(d) * T);
  for (int t = 0; t < T; ++t) {
    for (long long node = 0; node < lat.num_nodes(t); ++node) {
      const NodeSet& k = sets[t][node];
      const long long begin = lat.first_path(t, node);
      const long long end = begin + lat.paths_per_node(t);
      std::vector<double> xt(d);
      if (t == 0)
        xt = lat.x0();
      else
        lat.node_prices(t, node, xt);

      auto drift_row = [&](std::span<const double> dir) {
        std::vector<std::pair<int, double>> row;
        row.reserve(end - begin);
        for (long long path = begin; path < end; ++path) {
          lat.path_coords(path, coords);
          double c = 0.0;
          for (int n = 0; n < d; ++n)
            c += dir[n] * (coords[static_cast<std::size_t>(t) * d + n] - xt[n]);
          if (c != 0.0) row.emplace_back(static_cast<int>(path), c);
        }
        return row;
      };

      for (const auto& v : k.vertices) {
        bool zero = true;
        for (double c : v)
          if (c != 0.0) zero = false;
        if (zero) continue;
        auto row = drift_row(v);
        row.emplace_back(layout.tvar[t][node], -1.0);
        lp.add_row(std::move(row), Rel::le, 0.0,
                   "vert_" + std::to_string(t) + "_" + std::to_string(node));
      }
      for (const auto& r : k.rays) {
        lp.add_row(drift_row(r), Rel::le, 0.0,
                   "ray_" + std::to_string(t) + "_" + std::to_string(node));
      }
    }
  }

  // option conjugate epigraphs plus hard bounds from unbounded sides
  for (std::size_t i = 0; i < p.options.size(); ++i) {
    const CostLadder& ladder = p.options[i].ladder;
    auto psi_row = [&](double scale) {
      std::vector<std::pair<int, double>> row;
      row.reserve(P);
      for (long long path = 0; path < P; ++path) {
        const double c = scale * table.psi[i][path];
        if (c != 0.0) row.emplace_back(static_cast<int>(path), c);
      }
      return row;
    };
    for (double eta : breakpoints(ladder)) {
      if (eta == 0.0) continue;  // s >= 0 is already a bound
      auto row = psi_row(eta);
      row.emplace_back(layout.svar[i], -1.0);
      lp.add_row(std::move(row), Rel::le, cost(ladder, eta),
                 "conj_" + p.options[i].id);
    }
    if (ladder.unbounded_ask_price)
      lp.add_row(psi_row(1.0), Rel::le, *ladder.unbounded_ask_price,
                 "ask_bound_" + p.options[i].id);
    if (ladder.unbounded_bid_price)
      lp.add_row(psi_row(1.0), Rel::ge, *ladder.unbounded_bid_price,
                 "bid_bound_" + p.options[i].id);
  }

  return lp;
}

PrimalCertificate extract_certificate(const PricingProblem& p,
                                      const PrimalLayout& layout,
                                      const StrategyEmission& em,
                                      const std::vector<double>& x) {
  PrimalCertificate cert;
  cert.cash = x[layout.cash];
  for (const auto& sv : layout.statics) {
    const double c = x[sv.var];
    if (std::fabs(c) > 1e-12)
      cert.statics.push_back({sv.time, sv.asset, sv.strike, c});
  }
  for (const auto& ov : layout.options) cert.eta.push_back(option_eta(ov, x));

  const int d = p.lattice.assets();
  for (int t = 0; t < p.lattice.periods(); ++t) {
    for (long long node = 0; node < p.lattice.num_nodes(t); ++node) {
      StrategyNode sn;
      sn.time = t;
      sn.node = node;
      sn.delta.assign(d, 0.0);
      for (const auto& term : em.node_terms[t][node]) {
        const double v = x[layout.strategy_base + term.var];
        for (int n = 0; n < d; ++n) sn.delta[n] += v * term.weight[n];
        const auto& info = em.var_info[term.var];
        if (info.kind == 'l') sn.lambda.push_back(v);
        if (info.kind == 'r') sn.rho.push_back(v);
      }
      cert.strategy.push_back(std::move(sn));
    }
  }
  return cert;
}

const StrategyNode& strategy_at(const PricingProblem& p,
                                const PrimalCertificate& cert, int t,
                                long long node) {
  long long idx = 0;
  for (int s = 0; s < t; ++s) idx += p.lattice.num_nodes(s);
  return cert.strategy[static_cast<std::size_t>(idx + node)];
}

// snap onto a hard book boundary within the witness tolerance, so solver
// noise cannot flip a liquid conjugate to +inf
double snapped_option_mean(const CostLadder& ladder, double mean) {
  const double snap = tol::mean_match * (1.0 + std::fabs(mean));
  if (ladder.unbounded_ask_price && mean > *ladder.unbounded_ask_price &&
      mean <= *ladder.unbounded_ask_price + snap)
    return *ladder.unbounded_ask_price;
  if (ladder.unbounded_bid_price && mean < *ladder.unbounded_bid_price &&
      mean >= *ladder.unbounded_bid_price - snap)
    return *ladder.unbounded_bid_price;
  return mean;
}

double penalty_impl(const PricingProblem& p, const LatticeMeasure& q,
                    const PathTable& table) {
  double total = 0.0;
  if (p.constraint.kind == ConstraintSpec::Kind::gamma) {
    // strategy value sup via the increment system
    StrategyEmission em = emit_primal_constraints(p.constraint, p.lattice);
    LinearProgram lp;
    lp.sense = Sense::maximize;
    for (int v = 0; v < em.num_vars; ++v) lp.add_var(em.lo[v], em.hi[v], 0.0);
    for (const auto& r : em.rows) lp.add_row(r.coeffs, r.rel, r.rhs);
    for (int t = 0; t < p.lattice.periods(); ++t) {
      const auto drift = drift_mass(p.lattice, q, t);
      for (long long node = 0; node < p.lattice.num_nodes(t); ++node) {
        for (const auto& term : em.node_terms[t][node]) {
          double c = 0.0;
          for (int n = 0; n < p.lattice.assets(); ++n)
            c += term.weight[n] * drift[node][n];
          lp.objective[term.var] += c;
        }
      }
    }
    auto sol = solve(lp);
    if (sol.status != LpSolution::Status::optimal)
      throw Error("strategy-sup subproblem failed to solve");
    total += sol.objective;
  } else {
    for (int t = 0; t < p.lattice.periods(); ++t) {
      const auto drift = drift_mass(p.lattice, q, t);
      for (long long node = 0; node < p.lattice.num_nodes(t); ++node) {
        const NodeSet k = node_set_for(p.constraint, p.lattice, t, node);
        const double s = support_function(k, drift[node]);
        if (!std::isfinite(s)) return kInf;
        total += s;
      }
    }
  }
  for (std::size_t i = 0; i < p.options.size(); ++i) {
    double mean = 0.0;
    for (long long path = 0; path < p.lattice.num_paths(); ++path)
      mean += q.weights[path] * table.psi[i][path];
    const double c = conjugate(p.options[i].ladder,
                               snapped_option_mean(p.options[i].ladder, mean));
    if (!std::isfinite(c)) return kInf;
    total += c;
  }
  return total;
}

}  // namespace

PricingProblem PricingProblem::make(PathLattice lattice, PayoffExpr payoff,
                                    std::vector<TradableOption> options,
                                    ConstraintSpec constraint) {
  bind_payoff(payoff, lattice.assets(), lattice.periods());
  for (const auto& opt : options)
    bind_payoff(opt.payoff, lattice.assets(), lattice.periods());
  if (constraint.kind == ConstraintSpec::Kind::gamma &&
      static_cast<int>(constraint.gamma.size()) != lattice.assets())
    throw ValidationError("gamma bound must list one entry per asset");
  PricingProblem p{std::move(lattice), std::move(payoff), std::move(options),
                   std::move(constraint)};
  return p;
}

PathTable evaluate_paths(const PricingProblem& p) {
  const long long P = p.lattice.num_paths();
  PathTable t;
  t.phi.resize(P);
  t.psi.assign(p.options.size(), std::vector<double>(P));
  std::vector<double> coords(
      static_cast<std::size_t>(p.lattice.assets()) * p.lattice.periods());
  for (long long path = 0; path < P; ++path) {
    p.lattice.path_coords(path, coords);
    t.phi[path] = evaluate(p.payoff, coords, p.lattice.assets());
    for (std::size_t i = 0; i < p.options.size(); ++i)
      t.psi[i][path] = evaluate(p.options[i].payoff, coords, p.lattice.assets());
  }
  return t;
}

LinearProgram build_primal(const PricingProblem& p) {
  PathTable table = evaluate_paths(p);
  PrimalLayout layout;
  return build_primal_impl(p, table, layout);
}

LinearProgram build_dual(const PricingProblem& p) {
  PathTable table = evaluate_paths(p);
  DualLayout layout;
  return build_dual_impl(p, table, layout);
}

double portfolio_value(const PricingProblem& p, const PrimalCertificate& cert,
                       long long path, const PathTable& table) {
  const int d = p.lattice.assets();
  std::vector<double> coords(static_cast<std::size_t>(d) * p.lattice.periods());
  p.lattice.path_coords(path, coords);

  double v = cert.cash;
  for (const auto& s : cert.statics) {
    const double intrinsic =
        coords[static_cast<std::size_t>(s.time - 1) * d + (s.asset - 1)] -
        s.strike;
    if (intrinsic > 0.0) v += s.coefficient * intrinsic;
  }
  for (std::size_t i = 0; i < p.options.size(); ++i) {
    const double eta = cert.eta[i];
    if (eta == 0.0) continue;
    v += eta * table.psi[i][path] - cost(p.options[i].ladder, eta);
  }
  for (int t = 0; t < p.lattice.periods(); ++t) {
    const auto& sn = strategy_at(p, cert, t, p.lattice.node_of_path(path, t));
    for (int n = 0; n < d; ++n) {
      const double xt =
          t == 0 ? p.lattice.x0()[n]
                 : coords[static_cast<std::size_t>(t - 1) * d + n];
      v += sn.delta[n] * (coords[static_cast<std::size_t>(t) * d + n] - xt);
    }
  }
  return v;
}

double static_cost(const PricingProblem& p, const PrimalCertificate& cert) {
  double c = cert.cash;
  for (const auto& s : cert.statics)
    c += s.coefficient * p.lattice.model().marginal(s.asset, s.time).call_price(s.strike);
  return c;
}

double penalty(const PricingProblem& p, const LatticeMeasure& q) {
  PathTable table = evaluate_paths(p);
  return penalty_impl(p, q, table);
}

PayoffExpr negate_payoff(const PayoffExpr& e) {
  PayoffExpr out = e;
  if (out.empty()) return parse_payoff("0");
  out.nodes.push_back({PayoffExpr::Op::neg, 0.0, 0, 0, out.root, -1, 0});
  out.root = static_cast<int>(out.nodes.size()) - 1;
  return out;
}

PayoffExpr zero_payoff() { return parse_payoff("0"); }

PricingReport price(const PricingProblem& p) {
  PricingReport rep;
  rep.non_approximable = p.constraint.non_approximable;
  const long long P = p.lattice.num_paths();
  const PathTable table = evaluate_paths(p);

  PrimalLayout layout;
  LinearProgram plp = build_primal_impl(p, table, layout);
  StrategyEmission em = emit_primal_constraints(p.constraint, p.lattice);
  LpSolution psol = solve(plp);
  rep.primal_iterations = psol.iterations;

  if (psol.status == LpSolution::Status::unbounded) {
    rep.status = PricingStatus::primal_unbounded_below;
    rep.message =
        "superhedging cost is unbounded below: no measure carries a finite "
        "penalty";
    return rep;
  }
  if (psol.status != LpSolution::Status::optimal) {
    rep.status = PricingStatus::error;
    rep.message = "primal solve failed";
    return rep;
  }
  rep.primal_value = psol.objective;
  rep.primal = extract_certificate(p, layout, em, psol.x);

  // certificate re-evaluation: domination margin and reported cost
  double margin = kInf;
  for (long long path = 0; path < P; ++path)
    margin = std::min(margin,
                      portfolio_value(p, rep.primal, path, table) -
                          table.phi[path]);
  rep.min_margin = margin;
  const double cost_check = static_cost(p, rep.primal);
  if (std::fabs(cost_check - rep.primal_value) >
          tol::report_gap * (1.0 + std::fabs(rep.primal_value)) ||
      margin < -1e-6) {
    rep.status = PricingStatus::error;
    rep.message = "primal certificate failed re-evaluation";
    return rep;
  }

  // optimizing measure
  std::vector<double> qraw(P, 0.0);
  if (p.constraint.kind == ConstraintSpec::Kind::gamma) {
    // path-row multipliers of the minimization primal are the measure
    for (long long path = 0; path < P; ++path)
      qraw[path] = std::max(0.0, psol.y[path]);
    rep.dual_iterations = 0;
  } else {
    DualLayout dlayout;
    LinearProgram dlp = build_dual_impl(p, table, dlayout);
    LpSolution dsol = solve(dlp);
    rep.dual_iterations = dsol.iterations;
    if (dsol.status != LpSolution::Status::optimal) {
      rep.status = PricingStatus::error;
      rep.message = "transport dual failed although the primal is bounded";
      return rep;
    }
    rep.dual_value = dsol.objective;
    for (long long path = 0; path < P; ++path)
      qraw[path] = std::max(0.0, dsol.x[path]);
  }

  double total = 0.0;
  for (double w : qraw) total += w;
  if (total <= 0.0) {
    rep.status = PricingStatus::error;
    rep.message = "optimizing measure has no mass";
    return rep;
  }
  for (double& w : qraw) w /= total;
  LatticeMeasure qstar = LatticeMeasure::make(p.lattice, std::move(qraw));

  // marginal residuals of the extracted measure
  for (int t = 1; t <= p.lattice.periods(); ++t) {
    for (int n = 1; n <= p.lattice.assets(); ++n) {
      const auto got = marginal_of(p.lattice, qstar, n, t);
      const auto& want = p.lattice.model().marginal(n, t);
      double resid = 0.0;
      if (got.atoms.size() != want.atoms.size()) {
        resid = 1.0;
      } else {
        for (std::size_t i = 0; i < got.atoms.size(); ++i)
          resid = std::max({resid,
                            std::fabs(got.atoms[i].level - want.atoms[i].level),
                            std::fabs(got.atoms[i].weight - want.atoms[i].weight)});
      }
      if (resid > 1e-8) {
        rep.status = PricingStatus::error;
        rep.message = "optimizing measure violates the marginals";
        return rep;
      }
    }
  }

  // independent re-evaluation of the dual objective
  double ephi = 0.0;
  for (long long path = 0; path < P; ++path)
    ephi += qstar.weights[path] * table.phi[path];
  const double pen = penalty_impl(p, qstar, table);
  const double indep = ephi - pen;

  rep.dual.path_weights = qstar.weights;
  rep.dual.node_penalties.resize(p.lattice.periods());
  if (p.constraint.kind != ConstraintSpec::Kind::gamma) {
    for (int t = 0; t < p.lattice.periods(); ++t) {
      const auto drift = drift_mass(p.lattice, qstar, t);
      rep.dual.node_penalties[t].resize(p.lattice.num_nodes(t));
      for (long long node = 0; node < p.lattice.num_nodes(t); ++node)
        rep.dual.node_penalties[t][node] = support_function(
            node_set_for(p.constraint, p.lattice, t, node), drift[node]);
    }
  }
  for (std::size_t i = 0; i < p.options.size(); ++i) {
    double mean = 0.0;
    for (long long path = 0; path < P; ++path)
      mean += qstar.weights[path] * table.psi[i][path];
    rep.dual.option_conjugates.push_back(conjugate(
        p.options[i].ladder, snapped_option_mean(p.options[i].ladder, mean)));
  }

  if (p.constraint.kind == ConstraintSpec::Kind::gamma) {
    rep.dual_value = indep;
  } else if (std::fabs(indep - rep.dual_value) >
             tol::report_gap * (1.0 + std::fabs(rep.dual_value))) {
    rep.status = PricingStatus::error;
    rep.message = "dual certificate failed independent re-evaluation";
    return rep;
  }

  rep.gap = std::fabs(rep.primal_value - rep.dual_value);
  if (rep.gap > tol::report_gap * (1.0 + std::fabs(rep.primal_value))) {
    rep.status = PricingStatus::error;
    rep.message = "primal and dual values disagree";
    return rep;
  }
  rep.status = PricingStatus::priced;
  return rep;
}

std::optional<PrimalCertificate> unit_margin_portfolio(const PricingProblem& p) {
  PricingProblem zero = p;
  zero.payoff = zero_payoff();
  const PathTable table = evaluate_paths(zero);
  PrimalLayout layout;
  LinearProgram lp = build_primal_impl(zero, table, layout);
  StrategyEmission em = emit_primal_constraints(zero.constraint, zero.lattice);

  // floor every path at one unit and demand nonpositive static cost; any
  // feasible point is an arbitrage portfolio once the cost folds into cash
  const long long P = zero.lattice.num_paths();
  for (long long path = 0; path < P; ++path) lp.rows[path].rhs = 1.0;
  std::vector<std::pair<int, double>> cost_row;
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.objective[j] != 0.0) cost_row.emplace_back(j, lp.objective[j]);
  lp.add_row(std::move(cost_row), Rel::le, 0.0);
  for (auto& c : lp.objective) c = 0.0;

  auto sol = solve(lp);
  if (sol.status != LpSolution::Status::optimal) return std::nullopt;
  PrimalCertificate cert = extract_certificate(zero, layout, em, sol.x);
  cert.cash -= static_cost(zero, cert);
  return cert;
}

double risk_measure(const PricingProblem& p, const PayoffExpr& phi) {
  PricingProblem q = p;
  q.payoff = negate_payoff(phi);
  bind_payoff(q.payoff, q.lattice.assets(), q.lattice.periods());
  PricingReport rep = price(q);
  if (rep.status == PricingStatus::primal_unbounded_below) return -kInf;
  if (rep.status != PricingStatus::priced)
    throw Error("risk measure evaluation failed: " + rep.message);
  return rep.primal_value;
}

}  // namespace superhedge
