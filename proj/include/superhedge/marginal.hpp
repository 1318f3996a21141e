#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "superhedge/common.hpp"

namespace superhedge {

struct MarginalAtom {
  double level = 0.0;   // nonnegative price
  double weight = 0.0;  // strictly positive probability
};

// Discrete law of one asset at one time. Atoms are sorted by level; levels
// closer than tol::atom_merge are merged at construction.
struct MarginalDistribution {
  int asset = 1;  // 1-based
  int time = 1;   // 1-based
  std::vector<MarginalAtom> atoms;

  static MarginalDistribution make(int asset, int time,
                                   std::vector<MarginalAtom> atoms);

  double mean() const;
  double call_price(double strike) const;  // E[(S - K)^+]
};

struct CallQuote {
  double strike = 0.0;
  double price = 0.0;
};

// Market quotes of vanilla calls for one (asset, time): strictly increasing
// strikes starting at 0, prices nonnegative, convex and nonincreasing in the
// strike, right-slope at zero >= -1.
struct CallCurve {
  int asset = 1;
  int time = 1;
  std::vector<CallQuote> samples;

  static CallCurve make(int asset, int time, std::vector<CallQuote> samples);
};

struct MarketModel {
  int assets = 0;
  int periods = 0;
  std::vector<double> x0;  // strictly positive initial prices
  std::vector<MarginalDistribution> marginals;  // ordered (t, n) row-major

  static MarketModel make(int assets, int periods, std::vector<double> x0,
                          std::vector<MarginalDistribution> marginals);

  const MarginalDistribution& marginal(int asset, int time) const;
};

// Extracts the implied discrete law on `strike_grid` (which must contain all
// sample strikes) by second-differencing the piecewise-linear call curve.
// Prices at the sample strikes are reproduced exactly when the final sampled
// price is zero.
MarginalDistribution marginal_from_calls(const CallCurve& curve,
                                         const std::vector<double>& strike_grid);

// Prices calls off a discrete law; `strikes` must be strictly increasing and
// start at 0 so the result is a valid CallCurve.
CallCurve calls_from_marginal(const MarginalDistribution& m,
                              const std::vector<double>& strikes);

struct ConvexOrderResult {
  bool holds = false;
  std::string reason;  // set when holds is false
  // Row-stochastic martingale transition matrix, rows follow m1's atoms.
  std::vector<std::vector<double>> kernel;
};

// Decides whether a one-step martingale coupling from m1 to m2 exists
// (feasibility of the joint-measure system); returns the kernel when it does.
ConvexOrderResult check_convex_order(const MarginalDistribution& m1,
                                     const MarginalDistribution& m2);

struct DensityPreset {
  enum class Kind { uniform, tent, dirac };
  Kind kind = Kind::dirac;
  double lo = 0.0, hi = 0.0;  // uniform support
  double x = 0.0;             // dirac location

  static DensityPreset uniform(double lo, double hi);
  static DensityPreset tent();  // x/3 on [0,1], 1/3 on [1,3], (4-x)/3 on [3,4]
  static DensityPreset dirac(double x);
};

// Equal-probability quantile atoms shifted by a common additive correction so
// the discrete mean matches the continuous mean exactly.
MarginalDistribution discretize_density(const DensityPreset& preset, int n_atoms,
                                        int asset = 1, int time = 1);

// Reads call quotes from CSV with header `asset,time,strike,price`; rows may
// appear in any order and are grouped into one curve per (asset, time).
std::map<std::pair<int, int>, CallCurve> load_call_quotes_csv(std::istream& in);
std::map<std::pair<int, int>, CallCurve> load_call_quotes_csv(
    const std::string& path);

}  // namespace superhedge
