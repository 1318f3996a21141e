#pragma once

#include <string>
#include <vector>

#include "superhedge/pricing.hpp"

namespace superhedge {

enum class FtapVerdict { no_arbitrage, arbitrage };

struct FtapReport {
  FtapVerdict verdict = FtapVerdict::no_arbitrage;

  // no-arbitrage branch: a consistent measure with zero penalty and option
  // means inside every bid-ask interval
  LatticeMeasure witness;
  double witness_penalty = 0.0;

  // arbitrage branch: a zero-static-cost portfolio with strictly positive
  // value on every lattice path
  PrimalCertificate certificate;
  double margin = 0.0;          // min over paths
  double optimal_profit = 0.0;  // G

  // heuristic attribution from the infeasibility certificate: which row
  // families the multipliers lean on
  std::vector<std::string> violated_row_kinds;
};

// Decides no-arbitrage by feasibility of the witness system (marginals +
// per-node drift conditions + bid-ask rows; gamma families use the martingale
// system). Infeasibility yields an arbitrage portfolio from the superhedge of
// the zero payoff, rescaled so the static cost vanishes and the pathwise
// margin is half the optimal profit.
FtapReport ftap_check(const PricingProblem& p);

struct OapResult {
  enum class Profit { none, finite, infinite };
  Profit classification = Profit::none;
  double value = 0.0;
};

// G = -(superhedging price of 0); cross-checked against the optimizing
// measure's penalty.
OapResult optimal_arbitrage_profit(const PricingProblem& p);

struct CertificateCheck {
  bool ok = false;
  double min_margin = 0.0;
  double static_cost = 0.0;
  std::string violating_path;  // set when a path breaks the inequality
};

// Re-evaluates a certificate from scratch over every lattice path. Pricing
// certificates must dominate the target payoff within tolerance; arbitrage
// certificates must be strictly positive everywhere and carry zero static
// cost.
CertificateCheck verify_certificate(const PrimalCertificate& cert,
                                    const PricingProblem& p, bool as_arbitrage);

}  // namespace superhedge
