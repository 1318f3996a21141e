#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "superhedge/scenario.hpp"

namespace superhedge {

namespace {

std::string disk_node_table(int sides) {
  std::ostringstream os;
  os << "default: vertices = [";
  const double pi = std::acos(-1.0);
  for (int k = 0; k < sides; ++k) {
    const double th = -pi / 2 + 2 * pi * k / sides;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s(%.17g, %.17g)", k ? ", " : "",
                  std::cos(th), 1.0 + std::sin(th));
    os << buf;
  }
  os << "]\n";
  return os.str();
}

const std::map<std::string, std::string>& aux_files() {
  static const std::map<std::string, std::string> files = {
      {"two_state_nodes",
       "# strategy frozen everywhere except the lower time-1 node\n"
       "default: vertices = [(0)]\n"
       "node t=1 x=(1): vertices = [(0), (1)]\n"},
      {"disk_nodes", disk_node_table(32)},
  };
  return files;
}

const std::map<std::string, std::string>& scenario_files() {
  static const std::map<std::string, std::string> files = {
      {"appendix_a",
       "# two-path market whose only consistent measure is penalized:\n"
       "# the dynamic leg may only act on the lower time-1 node\n"
       "[model]\n"
       "assets = 1\n"
       "periods = 2\n"
       "x0 = (1)\n"
       "\n"
       "[marginal asset=1 time=1]\n"
       "atoms = [(1, 0.5), (2, 0.5)]\n"
       "\n"
       "[marginal asset=1 time=2]\n"
       "atoms = [(2, 1)]\n"
       "\n"
       "[constraint]\n"
       "constraint = per_node(\"two_state_nodes\")\n"
       "non_approximable = true\n"
       "\n"
       "[task]\n"
       "payoff = \"0\"\n"},

      {"example_5_4",
       "# uniform-to-tent two-period market; a forward-start straddle with a\n"
       "# shallow book tightens the superhedge of the squared increment\n"
       "[model]\n"
       "assets = 1\n"
       "periods = 2\n"
       "x0 = (2)\n"
       "\n"
       "[marginal asset=1 time=1]\n"
       "preset = uniform(1, 3)\n"
       "n_atoms = 40\n"
       "\n"
       "[marginal asset=1 time=2]\n"
       "preset = tent\n"
       "n_atoms = 40\n"
       "\n"
       "[option straddle]\n"
       "payoff = \"abs(x[2][1] - x[1][1])\"\n"
       "asks = [(0.2, 1)]\n"
       "bids = [(0.1, 1)]\n"
       "\n"
       "[constraint]\n"
       "constraint = unconstrained\n"
       "\n"
       "[task]\n"
       "payoff = \"powi(x[2][1] - x[1][1], 2)\"\n"},

      {"disk_4_1",
       "# one period, two assets: the first drifts upward, the second drops\n"
       "# to zero; strategies live on a 32-gon inscribed in a shifted disk\n"
       "[model]\n"
       "assets = 2\n"
       "periods = 1\n"
       "x0 = (1, 1)\n"
       "\n"
       "[marginal asset=1 time=1]\n"
       "preset = uniform(1, 2)\n"
       "n_atoms = 20\n"
       "\n"
       "[marginal asset=2 time=1]\n"
       "atoms = [(0, 1)]\n"
       "\n"
       "[constraint]\n"
       "constraint = per_node(\"disk_nodes\")\n"
       "\n"
       "[task]\n"
       "payoff = \"0\"\n"},

      {"gamma_demo",
       "# increment-bounded trading on a martingale-feasible market\n"
       "[model]\n"
       "assets = 1\n"
       "periods = 2\n"
       "x0 = (2)\n"
       "\n"
       "[marginal asset=1 time=1]\n"
       "atoms = [(1, 0.25), (2, 0.5), (3, 0.25)]\n"
       "\n"
       "[marginal asset=1 time=2]\n"
       "atoms = [(0.5, 0.2), (2, 0.6), (3.5, 0.2)]\n"
       "\n"
       "[constraint]\n"
       "constraint = gamma(0.4)\n"
       "\n"
       "[task]\n"
       "payoff = \"abs(x[2][1] - x[1][1])\"\n"},

      {"shortselling_demo",
       "# falling mean: martingales are ruled out, supermartingales remain\n"
       "[model]\n"
       "assets = 1\n"
       "periods = 2\n"
       "x0 = (2)\n"
       "\n"
       "[marginal asset=1 time=1]\n"
       "atoms = [(1.5, 0.5), (2.5, 0.5)]\n"
       "\n"
       "[marginal asset=1 time=2]\n"
       "atoms = [(1, 0.5), (2.6, 0.5)]\n"
       "\n"
       "[constraint]\n"
       "constraint = shortselling(0)\n"
       "\n"
       "[task]\n"
       "payoff = \"powi(x[2][1] - x[1][1], 2)\"\n"},

      {"non_tradable_demo",
       "# asset 1 cannot be traded and may drift; asset 2 must stay fair\n"
       "[model]\n"
       "assets = 2\n"
       "periods = 1\n"
       "x0 = (1, 1)\n"
       "\n"
       "[marginal asset=1 time=1]\n"
       "atoms = [(1.2, 0.5), (1.8, 0.5)]\n"
       "\n"
       "[marginal asset=2 time=1]\n"
       "atoms = [(0.5, 0.5), (1.5, 0.5)]\n"
       "\n"
       "[constraint]\n"
       "constraint = non_tradable(1)\n"
       "\n"
       "[task]\n"
       "payoff = \"pos(x[1][2] - 1)\"\n"},
  };
  return files;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = {
      "appendix_a",   "example_5_4",        "disk_4_1",
      "gamma_demo",   "shortselling_demo",  "non_tradable_demo"};
  return names;
}

Scenario builtin_scenario(const std::string& name) {
  auto it = scenario_files().find(name);
  if (it == scenario_files().end()) {
    std::string known;
    for (const auto& n : builtin_scenario_names()) known += " " + n;
    throw ValidationError("unknown builtin scenario '" + name +
                          "'; available:" + known);
  }
  auto resolver = [](const std::string& ref) -> std::string {
    auto a = aux_files().find(ref);
    if (a == aux_files().end())
      throw IoError("builtin auxiliary '" + ref + "' not found");
    return a->second;
  };
  return Scenario::parse(it->second, resolver);
}

}  // namespace superhedge
