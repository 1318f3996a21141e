#include "superhedge/orderbook.hpp"

#include <algorithm>
#include <cmath>

#include "superhedge/lp.hpp"

namespace superhedge {

CostLadder CostLadder::make(std::vector<LadderLevel> asks,
                            std::vector<LadderLevel> bids,
                            std::optional<double> unbounded_ask_price,
                            std::optional<double> unbounded_bid_price) {
  for (const auto& l : asks) {
    if (l.price < 0.0) throw ValidationError("ask price must be nonnegative");
    if (l.quantity <= 0.0)
      throw ValidationError("ask level with nonpositive quantity");
  }
  for (const auto& l : bids) {
    if (l.price < 0.0) throw ValidationError("bid price must be nonnegative");
    if (l.quantity <= 0.0)
      throw ValidationError("bid level with nonpositive quantity");
  }
  for (std::size_t i = 1; i < asks.size(); ++i)
    if (asks[i].price < asks[i - 1].price - tol::convexity)
      throw ValidationError("ask prices must be nondecreasing");
  for (std::size_t i = 1; i < bids.size(); ++i)
    if (bids[i].price > bids[i - 1].price + tol::convexity)
      throw ValidationError("bid prices must be nonincreasing");

  const double best_bid = !bids.empty() ? bids.front().price
                          : unbounded_bid_price ? *unbounded_bid_price
                                                : 0.0;
  const double best_ask = !asks.empty() ? asks.front().price
                          : unbounded_ask_price ? *unbounded_ask_price
                                                : kInf;
  if (best_bid > best_ask + tol::convexity)
    throw ValidationError("negative bid-ask spread");

  if (unbounded_ask_price) {
    if (*unbounded_ask_price < 0.0)
      throw ValidationError("unbounded ask price must be nonnegative");
    if (!asks.empty() && *unbounded_ask_price < asks.back().price - tol::convexity)
      throw ValidationError(
          "unbounded ask price must not undercut the final ask level");
  }
  if (unbounded_bid_price) {
    if (*unbounded_bid_price < 0.0)
      throw ValidationError("unbounded bid price must be nonnegative");
    if (!bids.empty() && *unbounded_bid_price > bids.back().price + tol::convexity)
      throw ValidationError(
          "unbounded bid price must not exceed the final bid level");
  }

  CostLadder l;
  l.asks = std::move(asks);
  l.bids = std::move(bids);
  l.unbounded_ask_price = unbounded_ask_price;
  l.unbounded_bid_price = unbounded_bid_price;
  return l;
}

CostLadder CostLadder::liquid(double price) {
  return make({}, {}, price, price);
}

double CostLadder::max_buy() const {
  if (unbounded_ask_price) return kInf;
  double s = 0.0;
  for (const auto& l : asks) s += l.quantity;
  return s;
}

double CostLadder::max_sell() const {
  if (unbounded_bid_price) return kInf;
  double s = 0.0;
  for (const auto& l : bids) s += l.quantity;
  return s;
}

double cost(const CostLadder& ladder, double eta) {
  // cumulative caps accumulate in the same order as breakpoints() so that
  // cost is finite exactly up to the final breakpoint
  if (eta == 0.0) return 0.0;
  if (eta > 0.0) {
    double total = 0.0, cap = 0.0, filled = 0.0;
    for (const auto& l : ladder.asks) {
      cap += l.quantity;
      const double up_to = std::min(eta, cap);
      if (up_to > filled) {
        total += (up_to - filled) * l.price;
        filled = up_to;
      }
      if (eta <= cap) return total;
    }
    if (ladder.unbounded_ask_price)
      return total + (eta - cap) * *ladder.unbounded_ask_price;
    return kInf;
  }
  const double sell = -eta;
  double total = 0.0, cap = 0.0, filled = 0.0;
  for (const auto& l : ladder.bids) {
    cap += l.quantity;
    const double up_to = std::min(sell, cap);
    if (up_to > filled) {
      total -= (up_to - filled) * l.price;
      filled = up_to;
    }
    if (sell <= cap) return total;
  }
  if (ladder.unbounded_bid_price)
    return total - (sell - cap) * *ladder.unbounded_bid_price;
  return kInf;
}

double unit_price(const CostLadder& ladder, double eta) {
  if (eta == 0.0) return bid_ask(ladder).second;
  const double c = cost(ladder, eta);
  if (!std::isfinite(c)) throw Error("quantity exceeds book depth");
  return c / eta;
}

std::pair<double, double> bid_ask(const CostLadder& ladder) {
  const double lo = !ladder.bids.empty() ? ladder.bids.front().price
                    : ladder.unbounded_bid_price ? *ladder.unbounded_bid_price
                                                 : 0.0;
  const double hi = !ladder.asks.empty() ? ladder.asks.front().price
                    : ladder.unbounded_ask_price ? *ladder.unbounded_ask_price
                                                 : kInf;
  return {lo, hi};
}

std::vector<double> breakpoints(const CostLadder& ladder) {
  std::vector<double> pts;
  double r = 0.0;
  for (const auto& l : ladder.bids) r += l.quantity;
  // from -R_k up to -R_1
  {
    std::vector<double> neg;
    double acc = 0.0;
    for (const auto& l : ladder.bids) {
      acc += l.quantity;
      neg.push_back(-acc);
    }
    for (auto it = neg.rbegin(); it != neg.rend(); ++it) pts.push_back(*it);
  }
  pts.push_back(0.0);
  double acc = 0.0;
  for (const auto& l : ladder.asks) {
    acc += l.quantity;
    pts.push_back(acc);
  }
  return pts;
}

double conjugate(const CostLadder& ladder, double y) {
  if (ladder.unbounded_ask_price && y > *ladder.unbounded_ask_price) return kInf;
  if (ladder.unbounded_bid_price && y < *ladder.unbounded_bid_price) return kInf;
  double best = 0.0;  // eta = 0 contributes 0
  for (double eta : breakpoints(ladder)) {
    const double v = eta * y - cost(ladder, eta);
    if (v > best) best = v;
  }
  return best;
}

bool is_liquid(const CostLadder& ladder) {
  if (!ladder.unbounded_ask_price || !ladder.unbounded_bid_price) return false;
  const double p = *ladder.unbounded_ask_price;
  if (*ladder.unbounded_bid_price != p) return false;
  for (const auto& l : ladder.asks)
    if (l.price != p) return false;
  for (const auto& l : ladder.bids)
    if (l.price != p) return false;
  return true;
}

}  // namespace superhedge
