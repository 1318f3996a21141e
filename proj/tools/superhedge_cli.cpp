// superhedge: scenario-driven robust pricing, arbitrage detection and
// optimal-profit computation on finite path lattices.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "superhedge/arbitrage.hpp"
#include "superhedge/report.hpp"
#include "superhedge/scenario.hpp"

namespace {

using namespace superhedge;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitArbitrage = 2;
constexpr int kExitUnbounded = 3;
constexpr int kExitInput = 4;

struct Flags {
  double tol = tol::report_gap;
  long long max_paths = 0;  // 0 = keep the scenario's cap
  std::string report = "text";
  unsigned long long seed = 1;
  std::string dump_lp;
};

Scenario load_scenario(const std::string& path, const Flags& flags) {
  Scenario sc = Scenario::load(path);
  if (flags.max_paths > 0) sc.max_paths = flags.max_paths;
  return sc;
}

void maybe_dump_lp(const PricingProblem& p, const Flags& flags) {
  if (flags.dump_lp.empty()) return;
  std::ofstream f(flags.dump_lp);
  if (!f) throw IoError("cannot open '" + flags.dump_lp + "' for the LP dump");
  write_lp_text(build_primal(p), f);
}

int cmd_price(const std::string& path, const Flags& flags, bool dual_view) {
  Scenario sc = load_scenario(path, flags);
  PricingProblem p = sc.assemble();
  maybe_dump_lp(p, flags);
  PricingReport rep = price(p);
  if (flags.report == "json") {
    std::cout << report_json(rep, p) << "\n";
  } else {
    report_text(std::cout, rep, p);
    if (dual_view && rep.status == PricingStatus::priced) {
      std::cout << "dual value: " << rep.dual_value << "\n";
      std::cout << "dual measure:\n";
      for (long long path_idx = 0;
           path_idx < static_cast<long long>(rep.dual.path_weights.size());
           ++path_idx) {
        const double w = rep.dual.path_weights[path_idx];
        if (w > 1e-12)
          std::cout << "  " << path_key(p.lattice, path_idx) << " : " << w
                    << "\n";
      }
    }
  }
  if (rep.status == PricingStatus::primal_unbounded_below)
    return kExitUnbounded;
  return rep.status == PricingStatus::priced ? kExitOk : kExitFail;
}

// a random vertex of the consistent set, for weak-duality spot checks
LatticeMeasure random_consistent_measure(const PathLattice& lat,
                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LinearProgram lp;
  const long long P = lat.num_paths();
  for (long long p = 0; p < P; ++p) lp.add_var(0.0, kInf, u(rng));
  lp.sense = Sense::maximize;
  for (int t = 1; t <= lat.periods(); ++t) {
    for (int n = 1; n <= lat.assets(); ++n) {
      const auto& grid = lat.grid(n, t);
      const auto& marg = lat.model().marginal(n, t);
      std::vector<double> weight(grid.size(), 0.0);
      for (const auto& a : marg.atoms) {
        auto it = std::lower_bound(grid.begin(), grid.end(),
                                   a.level - tol::atom_merge);
        weight[static_cast<std::size_t>(it - grid.begin())] = a.weight;
      }
      const std::size_t c =
          static_cast<std::size_t>(t - 1) * lat.assets() + (n - 1);
      const long long stride = lat.coord_stride(c);
      std::vector<std::vector<std::pair<int, double>>> rows(grid.size());
      for (long long p = 0; p < P; ++p)
        rows[(p / stride) % static_cast<long long>(grid.size())].emplace_back(
            static_cast<int>(p), 1.0);
      for (std::size_t g = 0; g < grid.size(); ++g)
        lp.add_row(std::move(rows[g]), Rel::eq, weight[g]);
    }
  }
  auto sol = solve(lp);
  if (sol.status != LpSolution::Status::optimal)
    throw Error("marginal system infeasible while sampling measures");
  std::vector<double> w(P);
  double total = 0.0;
  for (long long p = 0; p < P; ++p) total += (w[p] = std::max(0.0, sol.x[p]));
  for (double& v : w) v /= total;
  return LatticeMeasure::make(lat, std::move(w));
}

int cmd_verify(const std::string& path, const Flags& flags) {
  Scenario sc = load_scenario(path, flags);
  PricingProblem p = sc.assemble();
  PricingReport rep = price(p);
  if (rep.status != PricingStatus::priced) {
    std::cout << "verify: pricing failed (" << rep.message << ")\n";
    return rep.status == PricingStatus::primal_unbounded_below ? kExitUnbounded
                                                               : kExitFail;
  }
  bool ok = true;
  auto line = [&](const std::string& what, bool pass, double value) {
    std::printf("%-42s %s (%.3e)\n", what.c_str(), pass ? "PASS" : "FAIL",
                value);
    ok = ok && pass;
  };
  line("duality gap", rep.gap <= flags.tol * (1 + std::fabs(rep.primal_value)),
       rep.gap);
  line("primal certificate margin", rep.min_margin >= -flags.tol,
       rep.min_margin);

  auto check = verify_certificate(rep.primal, p, false);
  line("certificate re-evaluation", check.ok, check.min_margin);
  line("certificate cost recomputation",
       std::fabs(check.static_cost - rep.primal_value) <=
           flags.tol * (1 + std::fabs(rep.primal_value)),
       std::fabs(check.static_cost - rep.primal_value));

  // weak-duality spot checks on random consistent measures
  std::mt19937_64 rng(flags.seed);
  const PathTable table = evaluate_paths(p);
  double worst = -kInf;
  for (int k = 0; k < 10; ++k) {
    auto q = random_consistent_measure(p.lattice, rng);
    const double pen = penalty(p, q);
    if (!std::isfinite(pen)) continue;
    double ephi = 0.0;
    for (long long i = 0; i < p.lattice.num_paths(); ++i)
      ephi += q.weights[i] * table.phi[i];
    worst = std::max(worst, ephi - pen - rep.primal_value);
  }
  line("weak duality on sampled measures", worst <= flags.tol, worst);
  return ok ? kExitOk : kExitFail;
}

int cmd_ftap(const std::string& path, const Flags& flags) {
  Scenario sc = load_scenario(path, flags);
  PricingProblem p = sc.assemble();
  FtapReport rep = ftap_check(p);
  if (flags.report == "json")
    std::cout << report_json(rep, p) << "\n";
  else
    report_text(std::cout, rep, p);
  return rep.verdict == FtapVerdict::arbitrage ? kExitArbitrage : kExitOk;
}

int cmd_oap(const std::string& path, const Flags& flags) {
  Scenario sc = load_scenario(path, flags);
  PricingProblem p = sc.assemble();
  OapResult rep = optimal_arbitrage_profit(p);
  if (flags.report == "json")
    std::cout << report_json(rep) << "\n";
  else
    report_text(std::cout, rep);
  return rep.classification == OapResult::Profit::infinite ? kExitUnbounded
                                                           : kExitOk;
}

// --- builtin example expectations -------------------------------------------

struct Expectation {
  std::string what;
  double got = 0.0, want = 0.0, tolerance = 0.0;
  bool pass() const { return std::fabs(got - want) <= tolerance; }
};

bool run_example(const std::string& name) {
  Scenario sc = builtin_scenario(name);
  PricingProblem p = sc.assemble();
  std::vector<Expectation> checks;
  bool ok = true;

  auto expect = [&](const std::string& what, double got, double want,
                    double tolerance) {
    checks.push_back({what, got, want, tolerance});
  };
  auto expect_flag = [&](const std::string& what, bool pass) {
    checks.push_back({what, pass ? 1.0 : 0.0, 1.0, 0.5});
  };

  if (name == "appendix_a") {
    auto rep = price(p);
    expect_flag("pricing status", rep.status == PricingStatus::priced);
    expect("primal value", rep.primal_value, -0.5, 1e-9);
    expect("dual value", rep.dual_value, -0.5, 1e-9);
    expect("penalty of the unique measure",
           penalty(p, LatticeMeasure::make(p.lattice, {0.5, 0.5})), 0.5, 1e-9);
    auto f = ftap_check(p);
    expect_flag("verdict is arbitrage", f.verdict == FtapVerdict::arbitrage);
    expect("optimal profit", f.optimal_profit, 0.5, 1e-9);
    expect("certificate margin", f.margin, 0.25, 1e-9);
  } else if (name == "example_5_4") {
    auto rep = price(p);
    expect_flag("pricing status", rep.status == PricingStatus::priced);
    expect("price with the straddle book", rep.primal_value,
           0.5 - (1.0 / 3.0 - 0.2), 0.02);
  } else if (name == "disk_4_1") {
    auto f = ftap_check(p);
    expect_flag("verdict is arbitrage", f.verdict == FtapVerdict::arbitrage);
    // support function of the 32-gon at the consistent drift (0.5, -1)
    double want = -1e300;
    const double pi = std::acos(-1.0);
    for (int k = 0; k < 32; ++k) {
      const double th = -pi / 2 + 2 * pi * k / 32;
      want = std::max(want, 0.5 * std::cos(th) - 1.0 - std::sin(th));
    }
    expect("optimal profit", f.optimal_profit, want, 1e-9);
    expect_flag("certificate margin positive", f.margin > 0.0);
  } else if (name == "gamma_demo") {
    auto f = ftap_check(p);
    expect_flag("verdict is no_arbitrage",
                f.verdict == FtapVerdict::no_arbitrage);
    auto rep = price(p);
    expect_flag("pricing status", rep.status == PricingStatus::priced);
    expect("increment-bounded straddle price", rep.primal_value, 0.9, 1e-9);
  } else if (name == "shortselling_demo") {
    auto f = ftap_check(p);
    expect_flag("verdict is no_arbitrage",
                f.verdict == FtapVerdict::no_arbitrage);
    auto rep = price(p);
    expect_flag("pricing status", rep.status == PricingStatus::priced);
    expect("squared-increment price", rep.primal_value, 0.63, 1e-9);
  } else if (name == "non_tradable_demo") {
    auto f = ftap_check(p);
    expect_flag("verdict is no_arbitrage",
                f.verdict == FtapVerdict::no_arbitrage);
    auto rep = price(p);
    expect_flag("pricing status", rep.status == PricingStatus::priced);
    expect("tradable-asset call price", rep.primal_value, 0.25, 1e-9);
  } else {
    throw ValidationError("unknown builtin example '" + name + "'");
  }

  for (const auto& c : checks) {
    const bool pass = c.pass();
    std::printf("%s %s: %s (got %.10g, want %.10g +- %.2g)\n",
                pass ? "PASS" : "FAIL", name.c_str(), c.what.c_str(), c.got,
                c.want, c.tolerance);
    ok = ok && pass;
  }
  return ok;
}

int cmd_example(const std::string& name) {
  bool ok = true;
  if (name == "all") {
    for (const auto& n : builtin_scenario_names()) ok = run_example(n) && ok;
  } else {
    ok = run_example(name);
  }
  return ok ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "superhedge: robust superhedging prices, arbitrage detection and "
      "optimal arbitrage profit on finite path lattices"};
  app.require_subcommand(1);

  Flags flags;
  app.add_option("--tol", flags.tol, "verification tolerance");
  app.add_option("--max-paths", flags.max_paths,
                 "override the scenario path cap");
  app.add_option("--report", flags.report, "report format: text | json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", flags.seed, "seed for sampled verification measures");
  app.add_option("--dump-lp", flags.dump_lp,
                 "write the superhedging LP in interchange format");

  std::string scenario_path, example_name;
  auto* c_price = app.add_subcommand("price", "superhedging price of the task payoff");
  c_price->add_option("scenario", scenario_path, "scenario file")->required();
  auto* c_dual = app.add_subcommand("dual", "price plus the optimizing measure");
  c_dual->add_option("scenario", scenario_path, "scenario file")->required();
  auto* c_verify =
      app.add_subcommand("verify", "re-verify certificates and spot checks");
  c_verify->add_option("scenario", scenario_path, "scenario file")->required();
  auto* c_ftap = app.add_subcommand("ftap", "no-arbitrage verdict with witness "
                                            "or certificate");
  c_ftap->add_option("scenario", scenario_path, "scenario file")->required();
  auto* c_oap = app.add_subcommand("oap", "optimal arbitrage profit");
  c_oap->add_option("scenario", scenario_path, "scenario file")->required();
  auto* c_example =
      app.add_subcommand("example", "run a builtin scenario against stored "
                                    "expectations (or 'all')");
  c_example->add_option("name", example_name, "builtin name or 'all'")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_price->parsed()) return cmd_price(scenario_path, flags, false);
    if (c_dual->parsed()) return cmd_price(scenario_path, flags, true);
    if (c_verify->parsed()) return cmd_verify(scenario_path, flags);
    if (c_ftap->parsed()) return cmd_ftap(scenario_path, flags);
    if (c_oap->parsed()) return cmd_oap(scenario_path, flags);
    if (c_example->parsed()) return cmd_example(example_name);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitFail;
}
