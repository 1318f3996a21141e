#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "superhedge/common.hpp"
#include "superhedge/payoff.hpp"

namespace superhedge {

struct LadderLevel {
  double price = 0.0;
  double quantity = 0.0;  // strictly positive
};

// Limit order book compiled to a convex piecewise-linear total cost c with
// c(0) = 0. Finite levels cap the tradable quantity; the optional unbounded
// prices extend one side with a terminal slope of unlimited depth.
struct CostLadder {
  std::vector<LadderLevel> asks;  // prices nondecreasing
  std::vector<LadderLevel> bids;  // prices nonincreasing
  std::optional<double> unbounded_ask_price;
  std::optional<double> unbounded_bid_price;

  static CostLadder make(std::vector<LadderLevel> asks,
                         std::vector<LadderLevel> bids,
                         std::optional<double> unbounded_ask_price = {},
                         std::optional<double> unbounded_bid_price = {});

  // single two-sided price with unlimited depth on both sides
  static CostLadder liquid(double price);

  double max_buy() const;   // total ask depth (inf with the unbounded flag)
  double max_sell() const;  // total bid depth
};

// Ladder-sum cost of trading eta units; +inf outside the tradable range.
double cost(const CostLadder& ladder, double eta);

// cost(eta)/eta for eta != 0, right derivative at 0 for eta = 0. Throws
// Error("quantity exceeds book depth") when the cost is infinite.
double unit_price(const CostLadder& ladder, double eta);

// (c'(0-), c'(0+)); an empty bid side yields 0 on the left, an empty ask
// side +inf on the right.
std::pair<double, double> bid_ask(const CostLadder& ladder);

// Convex conjugate sup_eta { eta*y - cost(eta) }, evaluated exactly over the
// ladder breakpoints; +inf only when an unbounded side lets eta run away.
double conjugate(const CostLadder& ladder, double y);

// True iff the option trades at one price with unlimited depth both ways.
bool is_liquid(const CostLadder& ladder);

// Cumulative-quantity breakpoints {-R_k, ..., -R_1, 0, Q_1, ..., Q_l}.
std::vector<double> breakpoints(const CostLadder& ladder);

struct TradableOption {
  std::string id;
  PayoffExpr payoff;
  CostLadder ladder;
};

}  // namespace superhedge
