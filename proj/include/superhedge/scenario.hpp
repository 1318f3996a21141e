#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "superhedge/marginal.hpp"
#include "superhedge/pricing.hpp"

namespace superhedge {

// A parsed scenario file: the raw description plus resolved auxiliary
// content (call-quote CSVs, per-node constraint tables), assembled into a
// PricingProblem on demand. Serialization is canonical, so a reloaded
// scenario reproduces pricing results bit for bit.
struct Scenario {
  struct Marginal {
    int asset = 1, time = 1;
    enum class Source { atoms, preset, csv } source = Source::atoms;
    std::vector<MarginalAtom> atoms;
    DensityPreset preset;
    int n_atoms = 1;
    std::string csv_ref;  // reference name recorded in the file
  };

  struct Option {
    std::string id;
    std::string payoff;
    std::vector<LadderLevel> asks, bids;
    std::optional<double> unbounded_ask_price, unbounded_bid_price;
  };

  struct Constraint {
    std::string kind = "unconstrained";
    std::vector<double> numbers;  // shortselling / gamma / non_tradable
    std::string a_expr, b_expr;   // drawdown ( ';'-separated per asset )
    std::string per_node_ref;     // per_node table reference
    bool non_approximable = false;
  };

  int assets = 0, periods = 0;
  std::vector<double> x0;
  std::vector<Marginal> marginals;
  std::vector<Option> options;
  Constraint constraint;
  std::map<std::pair<int, int>, std::vector<double>> extra_levels;
  long long max_paths = PathLattice::kDefaultMaxPaths;
  std::string task_payoff = "0";
  std::optional<double> task_tol;

  // auxiliary content keyed by reference name, captured at parse time
  std::map<std::string, std::string> aux;

  // maps a reference name to file content; parse() uses it for csv and
  // per_node references
  using Resolver = std::function<std::string(const std::string&)>;

  static Scenario parse(const std::string& text, const Resolver& resolver);
  static Scenario load(const std::string& path);  // resolves relative to path
  std::string serialize() const;

  PricingProblem assemble() const;
  PayoffExpr task() const { return parse_payoff(task_payoff); }
};

// Built-in demonstration scenarios; throws ValidationError for unknown names.
const std::vector<std::string>& builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);

}  // namespace superhedge
