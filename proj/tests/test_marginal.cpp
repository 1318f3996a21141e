#include "superhedge/marginal.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

using namespace superhedge;

TEST_CASE("point-mass call curve implies a dirac marginal") {
  auto curve = CallCurve::make(
      1, 1, {{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}, {2.0, 0.0}});
  auto m = marginal_from_calls(curve, {0.0, 0.5, 1.0, 2.0});
  REQUIRE(m.atoms.size() == 1);
  CHECK(m.atoms[0].level == 1.0);
  CHECK(m.atoms[0].weight == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("two-call mixture recovers both atoms") {
  // C(K) = 0.5 (1-K)^+ + 0.5 (3-K)^+ on strikes {0,1,2,3}
  auto curve =
      CallCurve::make(1, 1, {{0.0, 2.0}, {1.0, 1.0}, {2.0, 0.5}, {3.0, 0.0}});
  auto m = marginal_from_calls(curve, {0.0, 1.0, 2.0, 3.0});
  REQUIRE(m.atoms.size() == 2);
  CHECK(m.atoms[0].level == 1.0);
  CHECK(m.atoms[0].weight == doctest::Approx(0.5));
  CHECK(m.atoms[1].level == 3.0);
  CHECK(m.atoms[1].weight == doctest::Approx(0.5));
  // direct expectations reproduce the quoted prices
  for (const auto& q : curve.samples)
    CHECK(m.call_price(q.strike) == doctest::Approx(q.price).epsilon(1e-12));
}

TEST_CASE("convexity violation names the offending strikes") {
  CHECK_THROWS_WITH_AS(
      CallCurve::make(1, 1, {{0.0, 2.0}, {1.0, 1.5}, {2.0, 1.4}, {3.0, 0.0}}),
      doctest::Contains("concave on strikes"), ValidationError);
  CHECK_THROWS_AS(CallCurve::make(1, 1, {{0.0, 1.0}, {1.0, 1.2}}),
                  ValidationError);
  // right-slope below -1
  CHECK_THROWS_AS(CallCurve::make(1, 1, {{0.0, 2.0}, {1.0, 0.5}, {2.0, 0.0}}),
                  ValidationError);
}

TEST_CASE("calls from a marginal") {
  auto dirac = MarginalDistribution::make(1, 1, {{1.0, 1.0}});
  auto c = calls_from_marginal(dirac, {0.0, 1.0});
  CHECK(c.samples[0].price == 1.0);
  CHECK(c.samples[1].price == 0.0);

  auto two = MarginalDistribution::make(1, 1, {{1.0, 0.5}, {3.0, 0.5}});
  CHECK(two.call_price(2.0) == doctest::Approx(0.5));
  CHECK(two.call_price(0.0) == doctest::Approx(2.0));  // the mean
}

TEST_CASE("round trip marginal -> calls -> marginal is the identity") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> lv(0.0, 5.0);
  for (int k = 0; k < 25; ++k) {
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<MarginalAtom> atoms;
    std::vector<double> w(n);
    double tot = 0.0;
    for (int i = 0; i < n; ++i) tot += w[i] = 0.1 + (rng() % 100) / 100.0;
    for (int i = 0; i < n; ++i)
      atoms.push_back({std::round(lv(rng) * 16) / 16 + i * 6.0, w[i] / tot});
    auto m = MarginalDistribution::make(1, 2, atoms);

    std::vector<double> strikes{0.0};
    for (const auto& a : m.atoms)
      if (a.level > 0.0) strikes.push_back(a.level);
    auto curve = calls_from_marginal(m, strikes);
    auto back = marginal_from_calls(curve, strikes);
    REQUIRE(back.atoms.size() == m.atoms.size());
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
      CHECK(back.atoms[i].level == m.atoms[i].level);
      CHECK(back.atoms[i].weight ==
            doctest::Approx(m.atoms[i].weight).epsilon(1e-11));
    }
  }
}

TEST_CASE("implied weights are a probability vector for any valid curve") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 25; ++k) {
    // random convex decreasing curve via random positive second differences
    const int n = 3 + static_cast<int>(rng() % 6);
    std::vector<double> strikes(n);
    for (int i = 0; i < n; ++i) strikes[i] = i == 0 ? 0.0 : strikes[i - 1] + 0.25 + (rng() % 8) / 8.0;
    // slopes from -s0 up to 0, convex
    std::vector<double> slopes(n - 1);
    double s = -(0.2 + (rng() % 70) / 100.0);
    for (int i = 0; i < n - 1; ++i) {
      slopes[i] = s;
      s *= (rng() % 100) / 130.0;  // shrink toward zero, stays nondecreasing
    }
    std::vector<CallQuote> q(n);
    q[n - 1] = {strikes[n - 1], 0.0};
    for (int i = n - 2; i >= 0; --i) {
      const double drop = slopes[i] * (strikes[i + 1] - strikes[i]);
      q[i] = {strikes[i], q[i + 1].price - drop};
    }
    auto curve = CallCurve::make(1, 1, q);
    auto m = marginal_from_calls(curve, strikes);
    double tot = 0.0;
    for (const auto& a : m.atoms) {
      CHECK(a.weight > 0.0);
      tot += a.weight;
    }
    CHECK(std::fabs(tot - 1.0) <= 1e-12);
  }
}

TEST_CASE("strike grid refinement inserts no spurious mass") {
  auto curve =
      CallCurve::make(1, 1, {{0.0, 2.0}, {1.0, 1.0}, {2.0, 0.5}, {3.0, 0.0}});
  auto m = marginal_from_calls(curve, {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
  REQUIRE(m.atoms.size() == 2);  // grid points inside segments get zero weight
  CHECK(m.atoms[0].level == 1.0);
  CHECK(m.atoms[1].level == 3.0);
}

TEST_CASE("convex order: dirac start spreads out") {
  auto m1 = MarginalDistribution::make(1, 1, {{2.0, 1.0}});
  auto m2 = MarginalDistribution::make(1, 2, {{1.0, 0.5}, {3.0, 0.5}});
  auto r = check_convex_order(m1, m2);
  REQUIRE(r.holds);
  REQUIRE(r.kernel.size() == 1);
  CHECK(r.kernel[0][0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.kernel[0][1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("convex order: a spread law cannot recombine to a dirac") {
  auto m1 = MarginalDistribution::make(1, 1, {{1.0, 0.5}, {3.0, 0.5}});
  auto m2 = MarginalDistribution::make(1, 2, {{2.0, 1.0}});
  auto r = check_convex_order(m1, m2);
  CHECK_FALSE(r.holds);
  CHECK(r.reason == "no martingale coupling");
}

TEST_CASE("convex order: mean mismatch short-circuits") {
  auto m1 = MarginalDistribution::make(1, 1, {{2.0, 1.0}});
  auto m2 = MarginalDistribution::make(1, 2, {{1.0, 0.5}, {3.5, 0.5}});
  auto r = check_convex_order(m1, m2);
  CHECK_FALSE(r.holds);
  CHECK(r.reason == "mean mismatch");
}

TEST_CASE("kernel property: rows are means-preserving and push m1 to m2") {
  auto m1 = discretize_density(DensityPreset::uniform(1.0, 3.0), 8, 1, 1);
  auto m2 = discretize_density(DensityPreset::tent(), 12, 1, 2);
  auto r = check_convex_order(m1, m2);
  REQUIRE(r.holds);
  // conditional mean property
  for (std::size_t j = 0; j < m1.atoms.size(); ++j) {
    double rowsum = 0.0, rowmean = 0.0;
    for (std::size_t k = 0; k < m2.atoms.size(); ++k) {
      rowsum += r.kernel[j][k];
      rowmean += r.kernel[j][k] * m2.atoms[k].level;
    }
    CHECK(rowsum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rowmean == doctest::Approx(m1.atoms[j].level).epsilon(1e-9));
  }
  // pushforward property
  for (std::size_t k = 0; k < m2.atoms.size(); ++k) {
    double mass = 0.0;
    for (std::size_t j = 0; j < m1.atoms.size(); ++j)
      mass += m1.atoms[j].weight * r.kernel[j][k];
    CHECK(mass == doctest::Approx(m2.atoms[k].weight).epsilon(1e-9));
  }
}

TEST_CASE("discretization presets") {
  auto d = discretize_density(DensityPreset::dirac(2.0), 7);
  REQUIRE(d.atoms.size() == 1);
  CHECK(d.atoms[0].level == 2.0);

  auto u = discretize_density(DensityPreset::uniform(1.0, 3.0), 2);
  REQUIRE(u.atoms.size() == 2);
  CHECK(u.atoms[0].level == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(u.atoms[1].level == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(u.atoms[0].weight == 0.5);

  auto t = discretize_density(DensityPreset::tent(), 40);
  CHECK(std::fabs(t.mean() - 2.0) <= 1e-12);
  CHECK(t.atoms.size() == 40);

  CHECK_THROWS_AS(discretize_density(DensityPreset::uniform(3.0, 1.0), 4),
                  ValidationError);
  CHECK_THROWS_AS(discretize_density(DensityPreset::dirac(1.0), 0),
                  ValidationError);
}

TEST_CASE("the discretized demo marginals are in convex order at 40 atoms") {
  auto m1 = discretize_density(DensityPreset::uniform(1.0, 3.0), 40, 1, 1);
  auto m2 = discretize_density(DensityPreset::tent(), 40, 1, 2);
  auto r = check_convex_order(m1, m2);
  CHECK(r.holds);
}

TEST_CASE("atom merge tolerance collapses near-duplicate levels") {
  auto m = MarginalDistribution::make(
      1, 1, {{1.0, 0.5}, {1.0 + 1e-12, 0.25}, {2.0, 0.25}});
  REQUIRE(m.atoms.size() == 2);
  CHECK(m.atoms[0].weight == doctest::Approx(0.75));
}

TEST_CASE("marginal weight-sum validation names the tolerance breach") {
  CHECK_THROWS_AS(MarginalDistribution::make(1, 1, {{1.0, 0.5}, {2.0, 0.4}}),
                  ValidationError);
}

TEST_CASE("csv ingestion groups, sorts and validates quotes") {
  std::istringstream csv(
      "asset,time,strike,price\n"
      "1, 1, 1.0, 1.0\n"
      "1, 1, 0.0, 2.0\n"
      "1, 1, 3.0, 0.0\n"
      "1, 1, 2.0, 0.5\n"
      "1, 2, 0.0, 2.0\n"
      "1, 2, 4.0, 0.0\n");
  auto curves = load_call_quotes_csv(csv);
  REQUIRE(curves.size() == 2);
  const auto& c11 = curves.at({1, 1});
  REQUIRE(c11.samples.size() == 4);
  CHECK(c11.samples[0].strike == 0.0);
  CHECK(c11.samples[3].strike == 3.0);

  std::istringstream bad("asset,time,strike\n");
  CHECK_THROWS_AS(load_call_quotes_csv(bad), IoError);
}
