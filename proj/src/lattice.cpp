#include "superhedge/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace superhedge {

PathLattice PathLattice::build(
    const MarketModel& model,
    const std::map<std::pair<int, int>, std::vector<double>>& extra_levels,
    long long max_paths) {
  PathLattice lat;
  lat.model_ = model;
  lat.assets_ = model.assets;
  lat.periods_ = model.periods;
  lat.x0_ = model.x0;

  const int ncoord = model.assets * model.periods;
  lat.grids_.resize(ncoord);
  for (int t = 1; t <= model.periods; ++t) {
    for (int n = 1; n <= model.assets; ++n) {
      std::vector<double> levels;
      for (const auto& a : model.marginal(n, t).atoms) levels.push_back(a.level);
      if (auto it = extra_levels.find({n, t}); it != extra_levels.end()) {
        for (double v : it->second) {
          if (v < 0.0)
            throw ValidationError("extra lattice level must be nonnegative");
          levels.push_back(v);
        }
      }
      std::sort(levels.begin(), levels.end());
      std::vector<double> grid;
      for (double v : levels) {
        // marginal atoms come first in sorted order only by value; keep the
        // earliest representative of a cluster so atom levels stay exact
        if (grid.empty() || v - grid.back() >= tol::atom_merge) grid.push_back(v);
      }
      lat.grids_[lat.coord(t, n)] = std::move(grid);
    }
  }

  // extra levels may shadow an atom from below within the merge tolerance;
  // re-align grid points onto exact atom levels
  for (int t = 1; t <= model.periods; ++t) {
    for (int n = 1; n <= model.assets; ++n) {
      auto& grid = lat.grids_[lat.coord(t, n)];
      for (const auto& a : model.marginal(n, t).atoms) {
        auto it = std::lower_bound(grid.begin(), grid.end(),
                                   a.level - tol::atom_merge);
        if (it != grid.end() && std::fabs(*it - a.level) < tol::atom_merge)
          *it = a.level;
      }
    }
  }

  lat.num_paths_ = 1;
  for (const auto& g : lat.grids_) {
    if (g.empty()) throw ValidationError("empty lattice grid");
    if (lat.num_paths_ > max_paths / static_cast<long long>(g.size()) + 1)
      lat.num_paths_ = max_paths + 1;  // saturate, checked below
    else
      lat.num_paths_ *= static_cast<long long>(g.size());
  }
  if (lat.num_paths_ > max_paths) {
    long long exact = 1;
    bool overflow = false;
    for (const auto& g : lat.grids_) {
      if (exact > (1LL << 56) / static_cast<long long>(g.size())) {
        overflow = true;
        break;
      }
      exact *= static_cast<long long>(g.size());
    }
    throw ValidationError(
        "path count " + (overflow ? std::string("> 2^56") : std::to_string(exact)) +
        " exceeds the cap of " + std::to_string(max_paths));
  }

  lat.coord_stride_.assign(ncoord, 1);
  for (int c = ncoord - 2; c >= 0; --c)
    lat.coord_stride_[c] =
        lat.coord_stride_[c + 1] * static_cast<long long>(lat.grids_[c + 1].size());

  lat.suffix_stride_.assign(model.periods + 1, 1);
  lat.node_counts_.assign(model.periods + 1, 1);
  for (int t = model.periods; t >= 0; --t) {
    long long suffix = 1;
    for (int c = t * model.assets; c < ncoord; ++c)
      suffix *= static_cast<long long>(lat.grids_[c].size());
    lat.suffix_stride_[t] = suffix;
    lat.node_counts_[t] = lat.num_paths_ / suffix;
  }
  return lat;
}

void PathLattice::path_coords(long long p, std::span<double> out) const {
  const int ncoord = assets_ * periods_;
  for (int c = 0; c < ncoord; ++c) {
    const auto& g = grids_[c];
    out[c] = g[(p / coord_stride_[c]) % static_cast<long long>(g.size())];
  }
}

std::vector<double> PathLattice::path_coords(long long p) const {
  std::vector<double> out(static_cast<std::size_t>(assets_) * periods_);
  path_coords(p, out);
  return out;
}

void PathLattice::node_prices(int t, long long node, std::span<double> out) const {
  // a node at time t is a prefix index; its time-t digits are the last d
  const long long first = first_path(t, node);
  for (int n = 1; n <= assets_; ++n) {
    const std::size_t c = coord(t, n);
    const auto& g = grids_[c];
    out[n - 1] = g[(first / coord_stride_[c]) % static_cast<long long>(g.size())];
  }
}

std::vector<double> PathLattice::node_history(int t, long long node) const {
  std::vector<double> out(static_cast<std::size_t>(t) * assets_);
  const long long first = first_path(t, node);
  for (int s = 1; s <= t; ++s) {
    for (int n = 1; n <= assets_; ++n) {
      const std::size_t c = coord(s, n);
      const auto& g = grids_[c];
      out[static_cast<std::size_t>(s - 1) * assets_ + (n - 1)] =
          g[(first / coord_stride_[c]) % static_cast<long long>(g.size())];
    }
  }
  return out;
}

LatticeMeasure LatticeMeasure::make(const PathLattice& lattice,
                                    std::vector<double> weights) {
  if (static_cast<long long>(weights.size()) != lattice.num_paths())
    throw ValidationError("measure must assign one weight per path");
  double sum = 0.0;
  for (double w : weights) {
    if (w < -tol::measure_sum)
      throw ValidationError("measure has a negative path weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > tol::measure_sum)
    throw ValidationError("measure weights sum to " + std::to_string(sum));
  for (double& w : weights) w = std::max(w, 0.0);
  LatticeMeasure q;
  q.weights = std::move(weights);
  return q;
}

MarginalDistribution marginal_of(const PathLattice& lattice,
                                 const LatticeMeasure& q, int asset, int time) {
  const auto& grid = lattice.grid(asset, time);
  std::vector<double> mass(grid.size(), 0.0);
  // accumulate by digit rather than by value to avoid float lookups
  const std::size_t c =
      static_cast<std::size_t>(time - 1) * lattice.assets() + (asset - 1);
  const long long stride = lattice.coord_stride(c);
  const long long P = lattice.num_paths();
  for (long long p = 0; p < P; ++p) {
    const long long digit = (p / stride) % static_cast<long long>(grid.size());
    mass[digit] += q.weights[p];
  }
  double total = 0.0;
  for (double v : mass) total += v;
  std::vector<MarginalAtom> atoms;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double w = mass[i];
    if (std::fabs(total - 1.0) > 1e-13 && total > 0.0) w /= total;
    if (w > 0.0) atoms.push_back({grid[i], w});
  }
  return MarginalDistribution::make(asset, time, std::move(atoms));
}

std::vector<std::vector<double>> drift_mass(const PathLattice& lattice,
                                            const LatticeMeasure& q, int t) {
  if (t < 0 || t >= lattice.periods())
    throw ValidationError("drift time must lie in [0, periods)");
  const int d = lattice.assets();
  std::vector<std::vector<double>> m(lattice.num_nodes(t),
                                     std::vector<double>(d, 0.0));
  std::vector<double> coords(static_cast<std::size_t>(d) * lattice.periods());
  const long long P = lattice.num_paths();
  for (long long p = 0; p < P; ++p) {
    const double w = q.weights[p];
    if (w == 0.0) continue;
    lattice.path_coords(p, coords);
    const long long node = lattice.node_of_path(p, t);
    for (int n = 0; n < d; ++n) {
      const double xt =
          t == 0 ? lattice.x0()[n] : coords[static_cast<std::size_t>(t - 1) * d + n];
      const double xt1 = coords[static_cast<std::size_t>(t) * d + n];
      m[node][n] += w * (xt1 - xt);
    }
  }
  return m;
}

LatticeMeasure product_measure(const PathLattice& lattice) {
  const long long P = lattice.num_paths();
  std::vector<double> w(P, 1.0);
  const int d = lattice.assets();
  const int T = lattice.periods();
  for (int t = 1; t <= T; ++t) {
    for (int n = 1; n <= d; ++n) {
      const auto& marg = lattice.model().marginal(n, t);
      const auto& grid = lattice.grid(n, t);
      // per-level weight (zero on extra levels)
      std::vector<double> lw(grid.size(), 0.0);
      for (const auto& a : marg.atoms) {
        auto it = std::lower_bound(grid.begin(), grid.end(),
                                   a.level - tol::atom_merge);
        lw[static_cast<std::size_t>(it - grid.begin())] = a.weight;
      }
      const std::size_t c = static_cast<std::size_t>(t - 1) * d + (n - 1);
      const long long stride = lattice.coord_stride(c);
      for (long long p = 0; p < P; ++p) {
        const long long digit =
            (p / stride) % static_cast<long long>(grid.size());
        w[p] *= lw[digit];
      }
    }
  }
  return LatticeMeasure::make(lattice, std::move(w));
}

}  // namespace superhedge
