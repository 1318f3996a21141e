#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "superhedge/common.hpp"
#include "superhedge/marginal.hpp"

namespace superhedge {

// Finite product path space: one sorted level grid per (time, asset), paths
// enumerated lexicographically (time outer, asset inner, last coordinate
// fastest). A node at time t is the shared (x_1..x_t) prefix of its paths.
class PathLattice {
 public:
  static constexpr long long kDefaultMaxPaths = 100000;

  // Grids are the union of marginal atom levels and user extra levels keyed
  // by (asset, time); extra levels carry no mass but do generate path rows.
  static PathLattice build(
      const MarketModel& model,
      const std::map<std::pair<int, int>, std::vector<double>>& extra_levels = {},
      long long max_paths = kDefaultMaxPaths);

  int assets() const { return assets_; }
  int periods() const { return periods_; }
  const std::vector<double>& x0() const { return x0_; }
  const MarketModel& model() const { return model_; }

  const std::vector<double>& grid(int asset, int time) const {
    return grids_[coord(time, asset)];
  }

  long long num_paths() const { return num_paths_; }
  // nodes at time t (prefix histories); t = 0 is the single root
  long long num_nodes(int t) const { return node_counts_[t]; }

  // node index of path p at time t, 0 <= t <= periods
  long long node_of_path(long long p, int t) const {
    return p / suffix_stride_[t];
  }
  // first path passing through the node, plus how many consecutive paths do
  long long first_path(int t, long long node) const {
    return node * suffix_stride_[t];
  }
  long long paths_per_node(int t) const { return suffix_stride_[t]; }

  // full path coordinates, row-major (t, n) -> out[(t-1)*d + n-1]
  void path_coords(long long p, std::span<double> out) const;
  std::vector<double> path_coords(long long p) const;

  // the time-t price vector along a node (t >= 1); for t = 0 use x0()
  void node_prices(int t, long long node, std::span<double> out) const;

  // history (x_1..x_t) of a node, row-major length t*d
  std::vector<double> node_history(int t, long long node) const;

  // enumeration stride of coordinate c = (t-1)*d + (n-1)
  long long coord_stride(std::size_t c) const { return coord_stride_[c]; }

 private:
  std::size_t coord(int time, int asset) const {
    return static_cast<std::size_t>(time - 1) * assets_ + (asset - 1);
  }

  MarketModel model_;
  int assets_ = 0;
  int periods_ = 0;
  std::vector<double> x0_;
  std::vector<std::vector<double>> grids_;  // per coordinate
  std::vector<long long> coord_stride_;     // per coordinate, digits from left
  std::vector<long long> suffix_stride_;    // per time 0..T
  std::vector<long long> node_counts_;      // per time 0..T
  long long num_paths_ = 0;
};

// Probability weight per path; nonnegative, total within tol::measure_sum.
struct LatticeMeasure {
  std::vector<double> weights;

  static LatticeMeasure make(const PathLattice& lattice,
                             std::vector<double> weights);
};

// Pushforward of q under coordinate (asset, time).
MarginalDistribution marginal_of(const PathLattice& lattice,
                                 const LatticeMeasure& q, int asset, int time);

// Mass-weighted one-step drift of every node at time t:
//   m(node) = sum over paths through node of q(path) * (x_{t+1} - x_t).
// Returns num_nodes(t) vectors of dimension d; 0 <= t <= periods-1.
std::vector<std::vector<double>> drift_mass(const PathLattice& lattice,
                                            const LatticeMeasure& q, int t);

// Independent product measure of the model marginals (every lattice carries
// at least this measure).
LatticeMeasure product_measure(const PathLattice& lattice);

}  // namespace superhedge
