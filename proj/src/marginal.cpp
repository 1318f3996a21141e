#include "superhedge/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "superhedge/lp.hpp"

namespace superhedge {

namespace {

std::string tag(int asset, int time) {
  return "(asset " + std::to_string(asset) + ", time " + std::to_string(time) +
         ")";
}

}  // namespace

MarginalDistribution MarginalDistribution::make(int asset, int time,
                                                std::vector<MarginalAtom> atoms) {
  if (asset < 1 || time < 1)
    throw ValidationError("marginal indices are 1-based " + tag(asset, time));
  if (atoms.empty())
    throw ValidationError("marginal " + tag(asset, time) + " has no atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const MarginalAtom& a, const MarginalAtom& b) {
              return a.level < b.level;
            });
  std::vector<MarginalAtom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && a.level - merged.back().level < tol::atom_merge) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(a);
    }
  }
  double sum = 0.0;
  for (const auto& a : merged) {
    if (a.level < 0.0)
      throw ValidationError("marginal " + tag(asset, time) +
                            " has a negative level " + std::to_string(a.level));
    if (a.weight <= 0.0)
      throw ValidationError("marginal " + tag(asset, time) +
                            " has a nonpositive weight at level " +
                            std::to_string(a.level));
    sum += a.weight;
  }
  if (std::fabs(sum - 1.0) > tol::weight_sum)
    throw ValidationError("marginal " + tag(asset, time) +
                          " weights sum to " + std::to_string(sum));
  MarginalDistribution m;
  m.asset = asset;
  m.time = time;
  m.atoms = std::move(merged);
  return m;
}

double MarginalDistribution::mean() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.level * a.weight;
  return s;
}

double MarginalDistribution::call_price(double strike) const {
  double s = 0.0;
  for (const auto& a : atoms)
    if (a.level > strike) s += a.weight * (a.level - strike);
  return s;
}

CallCurve CallCurve::make(int asset, int time, std::vector<CallQuote> samples) {
  if (samples.size() < 2)
    throw ValidationError("call curve " + tag(asset, time) +
                          " needs at least two quotes");
  std::sort(samples.begin(), samples.end(),
            [](const CallQuote& a, const CallQuote& b) {
              return a.strike < b.strike;
            });
  if (samples.front().strike != 0.0)
    throw ValidationError("call curve " + tag(asset, time) +
                          " must start at strike 0");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].price < 0.0)
      throw ValidationError("call curve " + tag(asset, time) +
                            " has a negative price at strike " +
                            std::to_string(samples[i].strike));
    if (i > 0 && samples[i].strike <= samples[i - 1].strike + tol::atom_merge)
      throw ValidationError("call curve " + tag(asset, time) +
                            " has duplicate strike " +
                            std::to_string(samples[i].strike));
    if (i > 0 && samples[i].price > samples[i - 1].price + tol::convexity)
      throw ValidationError("call curve " + tag(asset, time) +
                            " increases between strikes " +
                            std::to_string(samples[i - 1].strike) + " and " +
                            std::to_string(samples[i].strike));
  }
  auto slope = [&](std::size_t i) {
    return (samples[i + 1].price - samples[i].price) /
           (samples[i + 1].strike - samples[i].strike);
  };
  if (slope(0) < -1.0 - tol::convexity)
    throw ValidationError("call curve " + tag(asset, time) +
                          " has right-slope below -1 at strike 0");
  for (std::size_t i = 0; i + 2 < samples.size(); ++i) {
    if (slope(i + 1) < slope(i) - tol::convexity)
      throw ValidationError(
          "call curve " + tag(asset, time) + " is concave on strikes (" +
          std::to_string(samples[i].strike) + ", " +
          std::to_string(samples[i + 1].strike) + ", " +
          std::to_string(samples[i + 2].strike) + ")");
  }
  CallCurve c;
  c.asset = asset;
  c.time = time;
  c.samples = std::move(samples);
  return c;
}

MarketModel MarketModel::make(int assets, int periods, std::vector<double> x0,
                              std::vector<MarginalDistribution> marginals) {
  if (assets < 1 || periods < 1)
    throw ValidationError("model needs at least one asset and one period");
  if (static_cast<int>(x0.size()) != assets)
    throw ValidationError("x0 must list one initial price per asset");
  for (double v : x0)
    if (!(v > 0.0))
      throw ValidationError("initial prices must be strictly positive");
  if (static_cast<int>(marginals.size()) != assets * periods)
    throw ValidationError("expected " + std::to_string(assets * periods) +
                          " marginals, got " + std::to_string(marginals.size()));

  std::vector<MarginalDistribution> ordered(marginals.size());
  std::vector<bool> seen(marginals.size(), false);
  for (auto& m : marginals) {
    if (m.asset < 1 || m.asset > assets || m.time < 1 || m.time > periods)
      throw ValidationError("marginal " + tag(m.asset, m.time) +
                            " outside the model dimensions");
    const std::size_t k =
        static_cast<std::size_t>(m.time - 1) * assets + (m.asset - 1);
    if (seen[k])
      throw ValidationError("duplicate marginal " + tag(m.asset, m.time));
    seen[k] = true;
    ordered[k] = std::move(m);
  }
  MarketModel model;
  model.assets = assets;
  model.periods = periods;
  model.x0 = std::move(x0);
  model.marginals = std::move(ordered);
  return model;
}

const MarginalDistribution& MarketModel::marginal(int asset, int time) const {
  return marginals[static_cast<std::size_t>(time - 1) * assets + (asset - 1)];
}

MarginalDistribution marginal_from_calls(const CallCurve& curve,
                                         const std::vector<double>& strike_grid) {
  if (strike_grid.size() < 2)
    throw ValidationError("strike grid needs at least two points");
  for (std::size_t i = 1; i < strike_grid.size(); ++i)
    if (strike_grid[i] <= strike_grid[i - 1])
      throw ValidationError("strike grid must be strictly increasing");
  if (strike_grid.front() != 0.0)
    throw ValidationError("strike grid must contain 0");
  for (const auto& q : curve.samples) {
    bool found = false;
    for (double k : strike_grid)
      if (std::fabs(k - q.strike) <= tol::atom_merge) {
        found = true;
        break;
      }
    if (!found)
      throw ValidationError("strike grid misses sample strike " +
                            std::to_string(q.strike));
  }

  // piecewise-linear interpolation of the quoted curve, flat past the end
  auto price_at = [&](double k) {
    const auto& s = curve.samples;
    if (k >= s.back().strike) return s.back().price;
    std::size_t i = 0;
    while (s[i + 1].strike < k) ++i;
    const double t = (k - s[i].strike) / (s[i + 1].strike - s[i].strike);
    return s[i].price + t * (s[i + 1].price - s[i].price);
  };

  const std::size_t m = strike_grid.size();
  std::vector<double> c(m);
  for (std::size_t i = 0; i < m; ++i) c[i] = price_at(strike_grid[i]);

  std::vector<double> slope(m);  // slope on [K_j, K_{j+1}); flat after the end
  for (std::size_t j = 0; j + 1 < m; ++j)
    slope[j] = (c[j + 1] - c[j]) / (strike_grid[j + 1] - strike_grid[j]);
  slope[m - 1] = 0.0;

  std::vector<MarginalAtom> atoms;
  for (std::size_t j = 0; j < m; ++j) {
    const double w = j == 0 ? 1.0 + slope[0] : slope[j] - slope[j - 1];
    if (w > 1e-13) atoms.push_back({strike_grid[j], w});
  }
  return MarginalDistribution::make(curve.asset, curve.time, std::move(atoms));
}

CallCurve calls_from_marginal(const MarginalDistribution& m,
                              const std::vector<double>& strikes) {
  std::vector<CallQuote> quotes;
  quotes.reserve(strikes.size());
  for (double k : strikes) quotes.push_back({k, m.call_price(k)});
  return CallCurve::make(m.asset, m.time, std::move(quotes));
}

ConvexOrderResult check_convex_order(const MarginalDistribution& m1,
                                     const MarginalDistribution& m2) {
  if (m1.asset != m2.asset)
    throw ValidationError("convex-order check requires the same asset");
  if (m1.time >= m2.time)
    throw ValidationError("convex-order check requires increasing times");

  ConvexOrderResult result;
  if (std::fabs(m1.mean() - m2.mean()) > tol::mean_match) {
    result.reason = "mean mismatch";
    return result;
  }

  const int n1 = static_cast<int>(m1.atoms.size());
  const int n2 = static_cast<int>(m2.atoms.size());
  LinearProgram lp;
  for (int j = 0; j < n1; ++j)
    for (int k = 0; k < n2; ++k) lp.add_var(0.0, kInf, 0.0);
  auto var = [&](int j, int k) { return j * n2 + k; };
  for (int j = 0; j < n1; ++j) {
    std::vector<std::pair<int, double>> row;
    std::vector<std::pair<int, double>> mart;
    for (int k = 0; k < n2; ++k) {
      row.emplace_back(var(j, k), 1.0);
      mart.emplace_back(var(j, k), m2.atoms[k].level - m1.atoms[j].level);
    }
    lp.add_row(std::move(row), Rel::eq, m1.atoms[j].weight);
    lp.add_row(std::move(mart), Rel::eq, 0.0);
  }
  for (int k = 0; k < n2; ++k) {
    std::vector<std::pair<int, double>> col;
    for (int j = 0; j < n1; ++j) col.emplace_back(var(j, k), 1.0);
    lp.add_row(std::move(col), Rel::eq, m2.atoms[k].weight);
  }

  auto sol = solve(lp);
  if (sol.status != LpSolution::Status::optimal) {
    result.reason = "no martingale coupling";
    return result;
  }
  result.holds = true;
  result.kernel.assign(n1, std::vector<double>(n2, 0.0));
  for (int j = 0; j < n1; ++j)
    for (int k = 0; k < n2; ++k)
      result.kernel[j][k] =
          std::max(0.0, sol.x[var(j, k)]) / m1.atoms[j].weight;
  return result;
}

DensityPreset DensityPreset::uniform(double lo, double hi) {
  DensityPreset p;
  p.kind = Kind::uniform;
  p.lo = lo;
  p.hi = hi;
  return p;
}

DensityPreset DensityPreset::tent() {
  DensityPreset p;
  p.kind = Kind::tent;
  return p;
}

DensityPreset DensityPreset::dirac(double x) {
  DensityPreset p;
  p.kind = Kind::dirac;
  p.x = x;
  return p;
}

namespace {

// quantile of the piecewise density x/3 on [0,1], 1/3 on [1,3], (4-x)/3 on [3,4]
double tent_quantile(double p) {
  if (p <= 1.0 / 6.0) return std::sqrt(6.0 * p);
  if (p <= 5.0 / 6.0) return 1.0 + 3.0 * (p - 1.0 / 6.0);
  return 4.0 - std::sqrt(6.0 * (1.0 - p));
}

}  // namespace

MarginalDistribution discretize_density(const DensityPreset& preset, int n_atoms,
                                        int asset, int time) {
  if (n_atoms < 1) throw ValidationError("n_atoms must be >= 1");
  std::vector<MarginalAtom> atoms;
  double target_mean = 0.0;
  switch (preset.kind) {
    case DensityPreset::Kind::dirac:
      if (preset.x < 0.0)
        throw ValidationError("dirac location must be nonnegative");
      return MarginalDistribution::make(asset, time, {{preset.x, 1.0}});
    case DensityPreset::Kind::uniform: {
      if (!(preset.lo < preset.hi) || preset.lo < 0.0)
        throw ValidationError("uniform preset needs 0 <= lo < hi");
      target_mean = 0.5 * (preset.lo + preset.hi);
      for (int i = 0; i < n_atoms; ++i) {
        const double p = (2.0 * i + 1.0) / (2.0 * n_atoms);
        atoms.push_back({preset.lo + p * (preset.hi - preset.lo), 1.0 / n_atoms});
      }
      break;
    }
    case DensityPreset::Kind::tent: {
      target_mean = 2.0;
      for (int i = 0; i < n_atoms; ++i) {
        const double p = (2.0 * i + 1.0) / (2.0 * n_atoms);
        atoms.push_back({tent_quantile(p), 1.0 / n_atoms});
      }
      break;
    }
  }
  double mean = 0.0;
  for (const auto& a : atoms) mean += a.level * a.weight;
  const double shift = target_mean - mean;
  for (auto& a : atoms) a.level += shift;
  return MarginalDistribution::make(asset, time, std::move(atoms));
}

std::map<std::pair<int, int>, CallCurve> load_call_quotes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty call-quote stream");
  auto strip = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  {
    std::istringstream hs(line);
    std::string col;
    const char* expect[] = {"asset", "time", "strike", "price"};
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(hs, col, ',') || strip(col) != expect[i])
        throw IoError("call-quote CSV must start with header "
                      "'asset,time,strike,price'");
    }
  }
  std::map<std::pair<int, int>, std::vector<CallQuote>> grouped;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    double vals[4];
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(ls, cell, ','))
        throw IoError("call-quote CSV line " + std::to_string(lineno) +
                      " has fewer than 4 fields");
      try {
        vals[i] = std::stod(strip(cell));
      } catch (const std::exception&) {
        throw IoError("call-quote CSV line " + std::to_string(lineno) +
                      " has a non-numeric field '" + strip(cell) + "'");
      }
    }
    grouped[{static_cast<int>(vals[0]), static_cast<int>(vals[1])}].push_back(
        {vals[2], vals[3]});
  }
  std::map<std::pair<int, int>, CallCurve> curves;
  for (auto& [key, quotes] : grouped)
    curves.emplace(key, CallCurve::make(key.first, key.second, std::move(quotes)));
  return curves;
}

std::map<std::pair<int, int>, CallCurve> load_call_quotes_csv(
    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open call-quote file '" + path + "'");
  return load_call_quotes_csv(f);
}

}  // namespace superhedge
