#include "superhedge/lattice.hpp"

#include <cmath>

#include "doctest.h"

using namespace superhedge;

namespace {

// two-path model: mu_1 = (1:1/2, 2:1/2), mu_2 = dirac(2), x0 = 1
MarketModel two_path_model() {
  return MarketModel::make(
      1, 2, {1.0},
      {MarginalDistribution::make(1, 1, {{1.0, 0.5}, {2.0, 0.5}}),
       MarginalDistribution::make(1, 2, {{2.0, 1.0}})});
}

}  // namespace

TEST_CASE("support lattice of the two-path model") {
  auto lat = PathLattice::build(two_path_model());
  CHECK(lat.num_paths() == 2);
  CHECK(lat.num_nodes(0) == 1);
  CHECK(lat.num_nodes(1) == 2);
  CHECK(lat.num_nodes(2) == 2);
  CHECK(lat.path_coords(0) == std::vector<double>{1.0, 2.0});
  CHECK(lat.path_coords(1) == std::vector<double>{2.0, 2.0});
}

TEST_CASE("extra levels multiply the path count") {
  auto lat = PathLattice::build(two_path_model(), {{{1, 2}, {0.5}}});
  CHECK(lat.num_paths() == 4);
  CHECK(lat.grid(1, 2) == std::vector<double>{0.5, 2.0});
}

TEST_CASE("multi-asset one-period lattice is a plain product") {
  auto model = MarketModel::make(
      2, 1, {1.0, 1.0},
      {MarginalDistribution::make(1, 1, {{1.0, 0.25}, {2.0, 0.5}, {3.0, 0.25}}),
       MarginalDistribution::make(2, 1, {{0.5, 0.5}, {1.5, 0.5}})});
  auto lat = PathLattice::build(model);
  CHECK(lat.num_paths() == 6);
  CHECK(lat.num_nodes(1) == 6);
}

TEST_CASE("path cap is enforced with the offending count") {
  auto model = MarketModel::make(
      1, 2, {1.0},
      {MarginalDistribution::make(1, 1, {{1.0, 0.5}, {2.0, 0.5}}),
       MarginalDistribution::make(1, 2, {{1.0, 0.5}, {3.0, 0.5}})});
  CHECK_THROWS_WITH_AS(PathLattice::build(model, {}, 3),
                       doctest::Contains("exceeds the cap"), ValidationError);
}

TEST_CASE("pushforward marginals of the uniform two-path measure") {
  auto lat = PathLattice::build(two_path_model());
  auto q = LatticeMeasure::make(lat, {0.5, 0.5});
  auto m1 = marginal_of(lat, q, 1, 1);
  REQUIRE(m1.atoms.size() == 2);
  CHECK(m1.atoms[0].level == 1.0);
  CHECK(m1.atoms[0].weight == 0.5);
  auto m2 = marginal_of(lat, q, 1, 2);
  REQUIRE(m2.atoms.size() == 1);
  CHECK(m2.atoms[0].level == 2.0);
  CHECK(m2.atoms[0].weight == 1.0);
}

TEST_CASE("product measure reproduces every model marginal") {
  auto model = MarketModel::make(
      1, 2, {2.0},
      {MarginalDistribution::make(1, 1, {{1.0, 0.25}, {2.0, 0.35}, {3.0, 0.4}}),
       MarginalDistribution::make(1, 2, {{0.5, 0.3}, {2.0, 0.3}, {4.0, 0.4}})});
  auto lat = PathLattice::build(model);
  auto q = product_measure(lat);
  for (int t = 1; t <= 2; ++t) {
    auto m = marginal_of(lat, q, 1, t);
    const auto& want = model.marginal(1, t);
    REQUIRE(m.atoms.size() == want.atoms.size());
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
      CHECK(m.atoms[i].level == want.atoms[i].level);
      CHECK(m.atoms[i].weight ==
            doctest::Approx(want.atoms[i].weight).epsilon(1e-12));
    }
  }
}

TEST_CASE("drift mass on the two-path support lattice") {
  auto lat = PathLattice::build(two_path_model());
  auto q = LatticeMeasure::make(lat, {0.5, 0.5});

  auto root = drift_mass(lat, q, 0);
  REQUIRE(root.size() == 1);
  CHECK(root[0][0] == doctest::Approx(0.5));  // E[S1] - x0 = 1.5 - 1

  auto t1 = drift_mass(lat, q, 1);
  REQUIRE(t1.size() == 2);
  CHECK(t1[0][0] == doctest::Approx(0.5));  // node x1=1: 1/2 * (2 - 1)
  CHECK(t1[1][0] == doctest::Approx(0.0));  // node x1=2
}

TEST_CASE("martingale measures have zero drift at every node") {
  auto model = MarketModel::make(
      1, 2, {2.0},
      {MarginalDistribution::make(1, 1, {{1.0, 0.5}, {3.0, 0.5}}),
       MarginalDistribution::make(1, 2, {{0.0, 0.25}, {2.0, 0.5}, {4.0, 0.25}})});
  auto lat = PathLattice::build(model);
  // kernel: from 1 -> {0, 2} evenly, from 3 -> {2, 4} evenly
  std::vector<double> w(lat.num_paths(), 0.0);
  for (long long p = 0; p < lat.num_paths(); ++p) {
    auto c = lat.path_coords(p);
    if (c[0] == 1.0 && (c[1] == 0.0 || c[1] == 2.0)) w[p] = 0.25;
    if (c[0] == 3.0 && (c[1] == 2.0 || c[1] == 4.0)) w[p] = 0.25;
  }
  auto q = LatticeMeasure::make(lat, w);
  for (int t = 0; t < 2; ++t) {
    for (const auto& m : drift_mass(lat, q, t))
      CHECK(std::fabs(m[0]) <= 1e-12);
  }
}

TEST_CASE("zero-mass nodes have zero drift") {
  auto lat = PathLattice::build(two_path_model(), {{{1, 1}, {5.0}}});
  REQUIRE(lat.num_paths() == 3);
  // mass only on the original support
  std::vector<double> w(3, 0.0);
  for (long long p = 0; p < 3; ++p) {
    auto c = lat.path_coords(p);
    if (c[0] == 1.0) w[p] = 0.5;
    if (c[0] == 2.0) w[p] = 0.5;
  }
  auto q = LatticeMeasure::make(lat, w);
  auto t1 = drift_mass(lat, q, 1);
  REQUIRE(t1.size() == 3);
  CHECK(t1[2][0] == 0.0);  // the x1=5 node carries no paths with mass
}

TEST_CASE("node drift sums to the one-step change of expectations") {
  auto model = MarketModel::make(
      1, 2, {2.0},
      {MarginalDistribution::make(1, 1, {{1.0, 0.3}, {2.0, 0.7}}),
       MarginalDistribution::make(1, 2, {{0.5, 0.2}, {2.0, 0.5}, {3.0, 0.3}})});
  auto lat = PathLattice::build(model);
  auto q = product_measure(lat);
  const double e1 = model.marginal(1, 1).mean();
  const double e2 = model.marginal(1, 2).mean();
  double sum0 = 0.0;
  for (const auto& m : drift_mass(lat, q, 0)) sum0 += m[0];
  CHECK(sum0 == doctest::Approx(e1 - 2.0).epsilon(1e-12));
  double sum1 = 0.0;
  for (const auto& m : drift_mass(lat, q, 1)) sum1 += m[0];
  CHECK(sum1 == doctest::Approx(e2 - e1).epsilon(1e-12));
}

TEST_CASE("measure validation") {
  auto lat = PathLattice::build(two_path_model());
  CHECK_THROWS_AS(LatticeMeasure::make(lat, {0.5}), ValidationError);
  CHECK_THROWS_AS(LatticeMeasure::make(lat, {0.7, 0.7}), ValidationError);
  CHECK_THROWS_AS(LatticeMeasure::make(lat, {1.5, -0.5}), ValidationError);
}
