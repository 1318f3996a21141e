#include "superhedge/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace superhedge {

namespace {

// Witness-system LP: q >= 0 consistent with the marginals, zero penalty
// (per-node vertex/ray conditions, or zero drift for gamma), option means
// inside bid-ask. Row names carry a kind prefix for farkas attribution.
LinearProgram build_witness_system(const PricingProblem& p,
                                   const PathTable& table) {
  const PathLattice& lat = p.lattice;
  const int d = lat.assets();
  const int T = lat.periods();
  const long long P = lat.num_paths();

  LinearProgram lp;
  lp.sense = Sense::minimize;
  for (long long path = 0; path < P; ++path) lp.add_var(0.0, kInf, 0.0);

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
      for (std::size_t g = 0; g < grid.size(); ++g)
        lp.add_row(std::move(rows[g]), Rel::eq, weight[g], "marginal");
    }
  }

  std::vector<double> coords(static_cast<std::size_t>(d) * T);
  for (int t = 0; t < T; ++t) {
    for (long long node = 0; node < lat.num_nodes(t); ++node) {
      const long long begin = lat.first_path(t, node);
      const long long end = begin + lat.paths_per_node(t);
      std::vector<double> xt(d);
      if (t == 0)
        xt = lat.x0();
      else
        lat.node_prices(t, node, xt);

      auto drift_row = [&](std::span<const double> dir) {
        std::vector<std::pair<int, double>> row;
        for (long long path = begin; path < end; ++path) {
          lat.path_coords(path, coords);
          double c = 0.0;
          for (int n = 0; n < d; ++n)
            c += dir[n] * (coords[static_cast<std::size_t>(t) * d + n] - xt[n]);
          if (c != 0.0) row.emplace_back(static_cast<int>(path), c);
        }
        return row;
      };

      if (p.constraint.kind == ConstraintSpec::Kind::gamma) {
        // zero drift at every node: the witness set is the martingale system
        for (int n = 0; n < d; ++n) {
          std::vector<double> dir(d, 0.0);
          dir[n] = 1.0;
          lp.add_row(drift_row(dir), Rel::eq, 0.0, "drift");
        }
      } else {
        const NodeSet k = node_set_for(p.constraint, lat, t, node);
        for (const auto& v : k.vertices) {
          bool zero = true;
          for (double c : v)
            if (c != 0.0) zero = false;
          if (zero) continue;
          lp.add_row(drift_row(v), Rel::le, 0.0, "drift");
        }
        for (const auto& r : k.rays)
          lp.add_row(drift_row(r), Rel::le, 0.0, "drift");
      }
    }
  }

  for (std::size_t i = 0; i < p.options.size(); ++i) {
    const auto [lo, hi] = bid_ask(p.options[i].ladder);
    std::vector<std::pair<int, double>> row;
    for (long long path = 0; path < P; ++path) {
      const double c = table.psi[i][path];
      if (c != 0.0) row.emplace_back(static_cast<int>(path), c);
    }
    if (std::isfinite(hi)) lp.add_row(row, Rel::le, hi, "bid-ask");
    lp.add_row(std::move(row), Rel::ge, lo, "bid-ask");
  }
  return lp;
}

}  // namespace

CertificateCheck verify_certificate(const PrimalCertificate& cert,
                                    const PricingProblem& p,
                                    bool as_arbitrage) {
  const PathTable table = evaluate_paths(p);
  CertificateCheck out;
  out.static_cost = static_cost(p, cert);
  out.min_margin = kInf;
  long long worst = -1;
  for (long long path = 0; path < p.lattice.num_paths(); ++path) {
    const double target = as_arbitrage ? 0.0 : table.phi[path];
    const double margin = portfolio_value(p, cert, path, table) - target;
    if (margin < out.min_margin) {
      out.min_margin = margin;
      worst = path;
    }
  }
  if (as_arbitrage) {
    out.ok = out.min_margin > 0.0 &&
             std::fabs(out.static_cost) <= tol::feasibility;
  } else {
    out.ok = out.min_margin >= -tol::feasibility;
  }
  if (!out.ok && worst >= 0) {
    std::ostringstream os;
    const auto coords = p.lattice.path_coords(worst);
    os << "path";
    for (int t = 0; t < p.lattice.periods(); ++t) {
      os << " (";
      for (int n = 0; n < p.lattice.assets(); ++n) {
        if (n) os << ',';
        os << coords[static_cast<std::size_t>(t) * p.lattice.assets() + n];
      }
      os << ')';
    }
    out.violating_path = os.str();
  }
  return out;
}

FtapReport ftap_check(const PricingProblem& p) {
  const PathTable table = evaluate_paths(p);
  FtapReport rep;
  LinearProgram sys = build_witness_system(p, table);
  LpSolution sol = solve(sys);

  if (sol.status == LpSolution::Status::optimal) {
    rep.verdict = FtapVerdict::no_arbitrage;
    std::vector<double> w(sol.x.begin(),
                          sol.x.begin() + p.lattice.num_paths());
    double total = 0.0;
    for (double& v : w) total += (v = std::max(0.0, v));
    for (double& v : w) v /= total;
    rep.witness = LatticeMeasure::make(p.lattice, std::move(w));
    rep.witness_penalty = penalty(p, rep.witness);
    return rep;
  }
  if (sol.status != LpSolution::Status::infeasible)
    throw Error("witness system solve failed");

  // attribute the infeasibility to row families
  {
    bool drift = false, bidask = false;
    for (int i = 0; i < sys.num_rows(); ++i) {
      if (std::fabs(sol.farkas[i]) <= 1e-9) continue;
      const std::string& name = sys.row_names[i];
      if (name == "drift") drift = true;
      if (name == "bid-ask") bidask = true;
    }
    if (drift) rep.violated_row_kinds.push_back("drift");
    if (bidask) rep.violated_row_kinds.push_back("bid-ask");
  }

  rep.verdict = FtapVerdict::arbitrage;
  PricingProblem zero = p;
  zero.payoff = zero_payoff();
  PricingReport zrep = price(zero);

  if (zrep.status == PricingStatus::primal_unbounded_below) {
    // no optimizer to rescale; fall back to a unit-margin portfolio
    rep.optimal_profit = kInf;
    auto cert = unit_margin_portfolio(p);
    if (!cert)
      throw Error("unbounded profit reported but no unit-margin portfolio");
    rep.certificate = *cert;
  } else if (zrep.status == PricingStatus::priced) {
    const double g = -zrep.primal_value;
    rep.optimal_profit = g;
    if (g <= tol::feasibility)
      throw Error("witness system infeasible but the zero superhedge is free");
    // halve the optimal portfolio and return the saved half of the proceeds
    // as cash: the static cost vanishes and every path keeps at least g/2
    PrimalCertificate cert = zrep.primal;
    cert.cash = 0.5 * cert.cash + 0.5 * g;
    for (auto& s : cert.statics) s.coefficient *= 0.5;
    for (auto& e : cert.eta) e *= 0.5;
    for (auto& sn : cert.strategy) {
      for (auto& v : sn.delta) v *= 0.5;
      for (auto& v : sn.lambda) v *= 0.5;  // remaining weight moves to zero
      for (auto& v : sn.rho) v *= 0.5;
    }
    rep.certificate = cert;
  } else {
    throw Error("superhedge of the zero payoff failed after infeasibility: " +
                zrep.message);
  }

  auto check = verify_certificate(rep.certificate, p, /*as_arbitrage=*/true);
  rep.margin = check.min_margin;
  if (!check.ok)
    throw Error("arbitrage certificate failed verification at " +
                check.violating_path);
  return rep;
}

OapResult optimal_arbitrage_profit(const PricingProblem& p) {
  PricingProblem zero = p;
  zero.payoff = zero_payoff();
  PricingReport rep = price(zero);
  OapResult out;
  if (rep.status == PricingStatus::primal_unbounded_below) {
    out.classification = OapResult::Profit::infinite;
    out.value = kInf;
    return out;
  }
  if (rep.status != PricingStatus::priced)
    throw Error("optimal-profit pricing failed: " + rep.message);
  out.value = std::max(0.0, -rep.primal_value);

  // cross-check against the optimizing measure's penalty
  LatticeMeasure q{rep.dual.path_weights};
  const double pen = penalty(zero, q);
  if (std::fabs(pen - out.value) > tol::report_gap * (1.0 + out.value))
    throw Error("optimal profit disagrees with the witness penalty");

  out.classification = out.value <= tol::feasibility
                           ? OapResult::Profit::none
                           : OapResult::Profit::finite;
  return out;
}

}  // namespace superhedge
