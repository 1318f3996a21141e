// Acceptance suite: every criterion prints one PASS/FAIL line and the binary
// exits nonzero if any fails. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "superhedge/arbitrage.hpp"
#include "superhedge/scenario.hpp"
#include "test_support.hpp"

using namespace superhedge;
using namespace testsupport;

namespace {

int g_failures = 0;

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {
    start_ = std::chrono::steady_clock::now();
  }

  void check(const std::string& what, bool ok) {
    all_ok_ = all_ok_ && ok;
    if (!ok) detail_ += (detail_.empty() ? "" : "; ") + what;
  }
  void check_close(const std::string& what, double got, double want,
                   double tolerance) {
    const bool ok = std::fabs(got - want) <= tolerance;
    if (!ok) {
      std::ostringstream os;
      os << what << " got " << got << " want " << want << " +- " << tolerance;
      detail_ += (detail_.empty() ? "" : "; ") + os.str();
    }
    all_ok_ = all_ok_ && ok;
  }

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

  void finish(double time_limit_s) {
    const double s = seconds();
    if (s > time_limit_s) {
      std::ostringstream os;
      os << "runtime " << s << " s exceeds " << time_limit_s << " s";
      detail_ += (detail_.empty() ? "" : "; ") + os.str();
      all_ok_ = false;
    }
    std::printf("%s  %s (%.2f s)%s%s\n", all_ok_ ? "PASS" : "FAIL",
                name_.c_str(), s, detail_.empty() ? "" : " -- ",
                detail_.c_str());
    std::fflush(stdout);
    if (!all_ok_) ++g_failures;
  }

 private:
  std::string name_;
  std::string detail_;
  bool all_ok_ = true;
  std::chrono::steady_clock::time_point start_;
};

bool martingale_system_feasible(const PricingProblem& p) {
  try {
    martingale_transport_value(p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void criterion_1_binding_node() {
  Criterion c("1. two-path binding-node instance");
  auto sc = builtin_scenario("appendix_a");
  auto p = sc.assemble();
  auto rep = price(p);
  c.check("priced", rep.status == PricingStatus::priced);
  c.check_close("dual value", rep.dual_value, -0.5, 1e-9);
  c.check_close("primal value", rep.primal_value, -0.5, 1e-9);
  c.check_close("penalty of the unique measure",
                penalty(p, LatticeMeasure::make(p.lattice, {0.5, 0.5})), 0.5,
                1e-9);
  auto f = ftap_check(p);
  c.check("verdict arbitrage", f.verdict == FtapVerdict::arbitrage);
  c.check_close("optimal profit", f.optimal_profit, 0.5, 1e-9);
  c.check("warning flag on the constraint family", rep.non_approximable);
  c.finish(1.0);
}

void criterion_2_two_marginal_demo() {
  Criterion c("2. uniform-to-tent market at 40 atoms");
  auto m1 = discretize_density(DensityPreset::uniform(1.0, 3.0), 40, 1, 1);
  auto m2 = discretize_density(DensityPreset::tent(), 40, 1, 2);
  auto model = MarketModel::make(1, 2, {2.0}, {m1, m2});
  auto lat = PathLattice::build(model);
  auto phi = parse_payoff("powi(x[2][1] - x[1][1], 2)");
  auto straddle_payoff = parse_payoff("abs(x[2][1] - x[1][1])");

  // (a) squared increment without additional options
  {
    auto rep =
        price(PricingProblem::make(lat, phi, {}, ConstraintSpec::unconstrained()));
    c.check("plain pricing status", rep.status == PricingStatus::priced);
    c.check_close("price without books", rep.primal_value, 0.5, 0.02);
  }
  // (b) straddle books at three quote pairs
  const double third = 1.0 / 3.0;
  const struct {
    double ask, bid;
  } quotes[] = {{0.2, 0.1}, {0.5, 0.4}, {third, third}};
  for (const auto& q : quotes) {
    TradableOption straddle{"straddle", straddle_payoff,
                            CostLadder::make({{q.ask, 1.0}}, {{q.bid, 1.0}})};
    auto rep = price(PricingProblem::make(lat, phi, {straddle},
                                          ConstraintSpec::unconstrained()));
    const double want =
        0.5 - std::max(std::max(third - q.ask, 0.0), std::max(q.bid - third, 0.0));
    std::ostringstream what;
    what << "price at (ask, bid) = (" << q.ask << ", " << q.bid << ")";
    c.check("book pricing status", rep.status == PricingStatus::priced);
    c.check_close(what.str(), rep.primal_value, want, 0.02);
  }
  // (c) the transport lower bound of the straddle itself
  {
    auto rep = price(PricingProblem::make(lat, negate_payoff(straddle_payoff),
                                          {}, ConstraintSpec::unconstrained()));
    c.check("lower-bound pricing status", rep.status == PricingStatus::priced);
    c.check_close("straddle transport lower bound", -rep.primal_value, third,
                  0.02);
  }
  c.finish(60.0);
}

void criterion_3_disk_polygon() {
  Criterion c("3. one-period polygon constraint");
  auto sc = builtin_scenario("disk_4_1");
  auto p = sc.assemble();
  auto rep = ftap_check(p);
  c.check("verdict arbitrage", rep.verdict == FtapVerdict::arbitrage);
  c.check("profit positive", rep.optimal_profit > 0.0);
  auto check = verify_certificate(rep.certificate, p, true);
  c.check("certificate verifies", check.ok);
  c.check("strictly positive margin on all grid paths", check.min_margin > 0.0);
  c.finish(5.0);
}

void criterion_4_duality_suite() {
  Criterion c("4. strong/weak duality property suite");
  std::mt19937_64 rng(424242);
  int instances = 0, measure_checks = 0;
  for (int k = 0; k < 50; ++k) {
    auto model = random_model(rng, 15);
    auto lat = PathLattice::build(model);
    std::vector<TradableOption> options;
    const int nopt = static_cast<int>(rng() % 3);
    for (int i = 0; i < nopt; ++i) {
      options.push_back(
          {"opt" + std::to_string(i),
           i == 0 ? parse_payoff("abs(x[2][1]-x[1][1])")
                  : parse_payoff("pos(x[2][1] - 1)"),
           random_finite_ladder(rng, 0.3 + 0.4 * (i + 1))});
    }
    auto p = PricingProblem::make(
        lat, random_payoff(rng), options,
        ConstraintSpec::per_node(random_box_rule(31000 + k)));
    auto rep = price(p);
    if (rep.status != PricingStatus::priced) {
      c.check("instance " + std::to_string(k) + " priced (" + rep.message + ")",
              false);
      continue;
    }
    ++instances;
    c.check("gap on instance " + std::to_string(k),
            rep.gap <= 1e-7 * (1.0 + std::fabs(rep.primal_value)));

    const PathTable table = evaluate_paths(p);
    for (int j = 0; j < 10; ++j) {
      auto q = random_consistent_measure(lat, rng);
      const double pen = penalty(p, q);
      if (!std::isfinite(pen)) continue;
      double ephi = 0.0;
      for (long long path = 0; path < lat.num_paths(); ++path)
        ephi += q.weights[path] * table.phi[path];
      ++measure_checks;
      if (ephi - pen > rep.primal_value + 1e-7)
        c.check("weak duality on instance " + std::to_string(k), false);
    }
  }
  c.check("at least 50 instances priced", instances >= 50);
  c.check("spot-checked measures", measure_checks >= 200);
  c.finish(120.0);
}

void criterion_5_unconstrained_reduction() {
  Criterion c("5. unconstrained reduction to direct transport");
  std::mt19937_64 rng(555);
  for (int k = 0; k < 20; ++k) {
    auto model = random_convex_order_model(rng, 6);
    auto p = PricingProblem::make(PathLattice::build(model), random_payoff(rng),
                                  {}, ConstraintSpec::unconstrained());
    auto rep = price(p);
    if (rep.status != PricingStatus::priced) {
      c.check("instance " + std::to_string(k) + " priced", false);
      continue;
    }
    const double oracle = martingale_transport_value(p);
    c.check_close("instance " + std::to_string(k), rep.primal_value, oracle,
                  1e-8 * (1.0 + std::fabs(oracle)));
  }
  c.finish(60.0);
}

void criterion_6_gamma_suite() {
  Criterion c("6. gamma-bound suite");
  std::mt19937_64 rng(666);

  // every consistent measure has a finite penalty under a gamma bound
  {
    auto model = MarketModel::make(
        1, 2, {2.0},
        {MarginalDistribution::make(
             1, 1, {{1.0, 0.25}, {1.5, 0.25}, {2.0, 0.25}, {3.0, 0.25}}),
         MarginalDistribution::make(
             1, 2, {{0.5, 0.2}, {1.5, 0.3}, {2.5, 0.3}, {3.5, 0.2}})});
    auto lat = PathLattice::build(model);
    auto p = PricingProblem::make(lat, zero_payoff(), {},
                                  ConstraintSpec::gamma_bound({0.4}));
    int finite = 0;
    for (int k = 0; k < 100; ++k) {
      auto q = random_consistent_measure(lat, rng);
      if (std::isfinite(penalty(p, q))) ++finite;
    }
    c.check("penalty finite on 100 consistent measures", finite == 100);
  }

  // verdict equals martingale-system feasibility, in and out of convex order
  int agree = 0, out_of_order_seen = 0;
  for (int k = 0; k < 8; ++k) {
    auto model = k % 2 ? random_convex_order_model(rng, 5)
                       : random_model(rng, 5);
    auto p = PricingProblem::make(PathLattice::build(model), zero_payoff(), {},
                                  ConstraintSpec::gamma_bound({0.5}));
    const bool feasible = martingale_system_feasible(p);
    if (!feasible) ++out_of_order_seen;
    auto rep = ftap_check(p);
    if ((rep.verdict == FtapVerdict::no_arbitrage) == feasible) ++agree;
  }
  c.check("verdicts match martingale feasibility", agree == 8);
  c.check("both sides exercised", out_of_order_seen > 0 &&
                                      out_of_order_seen < 8);

  // large bounds converge to the unconstrained value
  {
    auto model = random_convex_order_model(rng, 6);
    auto lat = PathLattice::build(model);
    auto phi = parse_payoff("abs(x[2][1]-x[1][1])");
    auto unc = price(PricingProblem::make(lat, phi, {},
                                          ConstraintSpec::unconstrained()));
    auto big = price(PricingProblem::make(lat, phi, {},
                                          ConstraintSpec::gamma_bound({100.0})));
    c.check("large-bound pricing status",
            unc.status == PricingStatus::priced &&
                big.status == PricingStatus::priced);
    c.check_close("large-bound convergence", big.primal_value,
                  unc.primal_value, 1e-6);
  }
  c.finish(120.0);
}

void criterion_7_risk_measure() {
  Criterion c("7. risk-measure axioms and minimal penalty");
  std::mt19937_64 rng(777);
  for (int k = 0; k < 10; ++k) {
    auto model = random_convex_order_model(rng, 4);
    auto lat = PathLattice::build(model);
    auto spec = ConstraintSpec::per_node(random_box_rule(70000 + k));
    auto base = PricingProblem::make(lat, zero_payoff(), {}, spec);
    auto phi = parse_payoff("abs(x[2][1]-x[1][1])");
    auto psi = parse_payoff("pos(x[1][1] - 1.5)");
    const double ra = risk_measure(base, phi);
    const double rb = risk_measure(base, psi);

    for (double m : {-1.0, 0.5, 2.0}) {
      std::ostringstream os;
      os << to_string(phi) << " + " << m;
      c.check_close("translation invariance",
                    risk_measure(base, parse_payoff(os.str())), ra - m, 1e-8);
    }
    for (double lam : {0.25, 0.5, 0.75}) {
      std::ostringstream os;
      os << lam << " * (" << to_string(phi) << ") + " << 1.0 - lam << " * ("
         << to_string(psi) << ")";
      const double mix = risk_measure(base, parse_payoff(os.str()));
      c.check("convexity", mix <= lam * ra + (1.0 - lam) * rb + 1e-8);
    }
    {
      std::ostringstream os;
      os << to_string(phi) << " + 0.25";
      c.check("monotonicity",
              risk_measure(base, parse_payoff(os.str())) <= ra + 1e-8);
    }
  }

  // minimal penalty: every representation value extracted from dual
  // certificates stays below the canonical penalty
  {
    auto model = random_convex_order_model(rng, 4);
    auto lat = PathLattice::build(model);
    auto spec = ConstraintSpec::per_node(random_box_rule(71000));
    auto base = PricingProblem::make(lat, zero_payoff(), {}, spec);
    std::vector<PayoffExpr> payoffs = {
        parse_payoff("abs(x[2][1]-x[1][1])"),
        parse_payoff("pos(x[1][1] - 1.5)"),
        parse_payoff("powi(x[2][1]-x[1][1], 2)"),
        parse_payoff("0"),
    };
    std::vector<double> rho;
    std::vector<LatticeMeasure> measures;
    for (const auto& f : payoffs) {
      PricingProblem prob = base;
      prob.payoff = negate_payoff(f);
      auto rep = price(prob);
      c.check("representation pricing status",
              rep.status == PricingStatus::priced);
      rho.push_back(rep.primal_value);
      measures.push_back(LatticeMeasure::make(lat, rep.dual.path_weights));
    }
    for (const auto& q : measures) {
      const double alpha_star = penalty(base, q);
      double best = -kInf;
      for (std::size_t i = 0; i < payoffs.size(); ++i) {
        PricingProblem prob = base;
        prob.payoff = payoffs[i];
        const PathTable table = evaluate_paths(prob);
        double e = 0.0;
        for (long long path = 0; path < lat.num_paths(); ++path)
          e += q.weights[path] * -table.phi[path];
        best = std::max(best, e - rho[i]);
      }
      c.check("minimal penalty dominates sampled representations",
              best <= alpha_star + 1e-8);
    }
  }
  c.finish(120.0);
}

void criterion_8_lp_core() {
  Criterion c("8. simplex core against vertex enumeration");
  std::mt19937_64 rng(20240601);
  int optimal_seen = 0, infeasible_seen = 0;
  for (int k = 0; k < 200; ++k) {
    LinearProgram lp = random_boxed_lp(rng);
    auto oracle = vertex_enumeration_oracle(lp);
    auto sol = solve(lp);
    if (oracle.feasible) {
      if (sol.status != LpSolution::Status::optimal) {
        c.check("status on instance " + std::to_string(k), false);
        continue;
      }
      ++optimal_seen;
      c.check_close("objective on instance " + std::to_string(k),
                    sol.objective, oracle.objective,
                    1e-8 * (1.0 + std::fabs(oracle.objective)));
      c.check("kkt verification on instance " + std::to_string(k),
              verify(lp, sol, 1e-8).ok);
    } else {
      if (sol.status != LpSolution::Status::infeasible) {
        c.check("infeasible status on instance " + std::to_string(k), false);
        continue;
      }
      ++infeasible_seen;
      c.check("farkas certificate on instance " + std::to_string(k),
              verify_farkas(lp, sol.farkas, 1e-9).ok);
    }
  }
  c.check("saw both outcomes", optimal_seen > 50 && infeasible_seen > 10);
  c.finish(120.0);
}

void criterion_9_order_book() {
  Criterion c("9. conjugate against grid maximization");
  std::mt19937_64 rng(999);
  std::uniform_real_distribution<double> u(-0.5, 4.0);
  for (int k = 0; k < 50; ++k) {
    auto l = random_book_ladder(rng);
    for (int j = 0; j < 8; ++j) {
      const double y = u(rng);
      const double exact = conjugate(l, y);
      const double grid = conjugate_grid_oracle(l, y);
      if (std::fabs(exact - grid) > 1e-6 * (1.0 + std::fabs(exact)))
        c.check("grid agreement on ladder " + std::to_string(k), false);
    }
    const auto [b, a] = bid_ask(l);
    c.check("zero at the bid", conjugate(l, b) == 0.0);
    c.check("zero at the ask", conjugate(l, a) == 0.0);
    c.check("zero inside the spread", conjugate(l, 0.5 * (a + b)) == 0.0);
  }
  c.finish(60.0);
}

}  // namespace

int main() {
  criterion_1_binding_node();
  criterion_2_two_marginal_demo();
  criterion_3_disk_polygon();
  criterion_4_duality_suite();
  criterion_5_unconstrained_reduction();
  criterion_6_gamma_suite();
  criterion_7_risk_measure();
  criterion_8_lp_core();
  criterion_9_order_book();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
