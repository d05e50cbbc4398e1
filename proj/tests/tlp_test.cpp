// Copyright 2026 The otlaplace Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "otlaplace/tlp.hpp"
#include "test_util.hpp"

namespace otlaplace {
namespace {

using testing::random_measure;

std::vector<double> random_masses(CounterRng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& v : w) v = rng.uniform(0.1, 1.0);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= total;
  return w;
}

FunctionOverMeasure random_points(CounterRng& rng, std::size_t n, std::size_t dim,
                                  bool weighted) {
  std::vector<double> coords(n * dim), values(n);
  for (auto& c : coords) c = rng.uniform(-2, 2);
  for (auto& v : values) v = rng.uniform(-1, 1);
  return FunctionOverMeasure::on_points(dim, coords, values,
                                        weighted ? random_masses(rng, n) : std::vector<double>{});
}

// Lifted cost of a uniform, equal-size instance minimized over all permutations.
double brute_force(const FunctionOverMeasure& a, const FunctionOverMeasure& b, double p) {
  const auto& pa = std::get<EuclideanAtoms>(a.support);
  const auto& pb = std::get<EuclideanAtoms>(b.support);
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      const double d = std::sqrt(squared_distance(pa.point(i), pb.point(perm[i])));
      total += std::pow(d, p) + std::pow(std::abs(a.values[i] - b.values[perm[i]]), p);
    }
    best = std::min(best, total / static_cast<double>(perm.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::pow(best, 1.0 / p);
}

// Splits every atom into `copies` equal atoms.
FunctionOverMeasure replicate(const FunctionOverMeasure& f, std::size_t copies) {
  const auto& pts = std::get<EuclideanAtoms>(f.support);
  std::vector<double> coords, values;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t c = 0; c < copies; ++c) {
      coords.insert(coords.end(), pts.point(i).begin(), pts.point(i).end());
      values.push_back(f.values[i]);
    }
  }
  return FunctionOverMeasure::on_points(pts.dim, coords, values);
}

TEST(Tlp, IdenticalPairsAreAtDistanceZero) {
  CounterRng rng(1);
  const auto a = random_points(rng, 5, 2, true);
  EXPECT_EQ(tlp_distance(a, a, 2.0), 0.0);
  const auto m = FunctionOverMeasure::on_measures(
      {random_measure(rng, 4, 2), random_measure(rng, 4, 2)}, {0.5, -1});
  EXPECT_EQ(tlp_distance(m, m, 1.0), 0.0);
}

TEST(Tlp, SingleAtoms) {
  const auto a = FunctionOverMeasure::on_points(2, {0, 0}, {0});
  const auto b = FunctionOverMeasure::on_points(2, {3, 0}, {4});
  EXPECT_NEAR(tlp_distance(a, b, 2.0), 5.0, 1e-15);
  EXPECT_NEAR(tlp_distance(a, b, 1.0), 7.0, 1e-15);
}

TEST(Tlp, TwoAtomUniformMatchesBothCouplings) {
  CounterRng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_points(rng, 2, 2, false);
    const auto b = random_points(rng, 2, 2, false);
    for (double p : {1.0, 2.0, 3.5}) {
      EXPECT_NEAR(tlp_distance(a, b, p), brute_force(a, b, p), 1e-12);
    }
  }
}

TEST(Tlp, UnequalCountsMatchReplicatedBruteForce) {
  CounterRng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_points(rng, 2, 1, false);
    const auto b = random_points(rng, 3, 1, false);
    const double expect = brute_force(replicate(a, 3), replicate(b, 2), 2.0);
    EXPECT_NEAR(tlp_distance(a, b, 2.0), expect, 1e-12);
  }
}

TEST(Tlp, MeasureAtomsReduceToShifts) {
  // Translates of one cloud are at W2 distance |shift|.
  CounterRng rng(4);
  const auto base = random_measure(rng, 6, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pa = random_points(rng, 3, 2, true);
    const auto pb = random_points(rng, 3, 2, true);
    auto lift = [&](const FunctionOverMeasure& f) {
      const auto& pts = std::get<EuclideanAtoms>(f.support);
      MeasureAtoms atoms;
      for (std::size_t i = 0; i < f.size(); ++i) atoms.push_back(base.translated(pts.point(i)));
      return FunctionOverMeasure::on_measures(atoms, f.values, f.masses);
    };
    EXPECT_NEAR(tlp_distance(lift(pa), lift(pb), 2.0), tlp_distance(pa, pb, 2.0), 1e-9);
  }
}

TEST(Tlp, Errors) {
  const auto pts = FunctionOverMeasure::on_points(1, {0}, {0});
  const auto meas = FunctionOverMeasure::on_measures({empirical_from_points({{0.0}})}, {0});
  EXPECT_OTL_ERROR(tlp_distance(pts, meas, 2.0), Errc::kIncompatibleGround);
  const auto plane = FunctionOverMeasure::on_points(2, {0, 0}, {0});
  EXPECT_OTL_ERROR(tlp_distance(pts, plane, 2.0), Errc::kIncompatibleGround);
  EXPECT_OTL_ERROR(tlp_distance(pts, pts, 0.5), Errc::kInvalidExponent);
  CounterRng rng(5);
  TlpOptions small;
  small.max_entries = 20;
  const auto a = random_points(rng, 5, 1, false);
  EXPECT_OTL_ERROR(tlp_distance(a, a, 2.0, small), Errc::kSizeLimitExceeded);
  EXPECT_OTL_ERROR(FunctionOverMeasure::on_points(1, {0, 1}, {0, 1}, {0.5, 0.6}),
                   Errc::kInvalidSpec);
  EXPECT_OTL_ERROR(FunctionOverMeasure::on_points(1, {0, 1}, {0}), Errc::kShapeMismatch);
  EXPECT_OTL_ERROR(FunctionOverMeasure::on_points(1, {0}, {NAN}), Errc::kNonFiniteCoordinate);
  EXPECT_OTL_ERROR(FunctionOverMeasure::on_points(1, {}, {}), Errc::kEmptyInput);
}

TEST(TlpProperty, MetricAxioms) {
  CounterRng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + rng.below(3);
    const bool weighted = trial % 2 == 1;
    const auto a = random_points(rng, 1 + rng.below(5), dim, weighted);
    const auto b = random_points(rng, 1 + rng.below(5), dim, weighted);
    const auto c = random_points(rng, 1 + rng.below(5), dim, weighted);
    const double p = trial % 3 == 0 ? 1.0 : 2.0;
    const double ab = tlp_distance(a, b, p), ba = tlp_distance(b, a, p);
    const double bc = tlp_distance(b, c, p), ac = tlp_distance(a, c, p);
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ac, ab + bc + 1e-9);
    EXPECT_EQ(tlp_distance(a, a, p), 0.0);
  }
}

// Atoms 1000 apart with values in [-1, 1]: any mass leaving the diagonal
// costs more than the whole identity plan, so the optimum is the identity.
FunctionOverMeasure spread(const std::vector<double>& values, const std::vector<double>& masses) {
  std::vector<double> coords(values.size());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = 1000.0 * static_cast<double>(i);
  return FunctionOverMeasure::on_points(1, coords, values, masses);
}

TEST(TlpProperty, IdentityPlanGivesLpDistanceOfValues) {
  CounterRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    const auto w = random_masses(rng, n);
    std::vector<double> f(n), g(n);
    for (auto& v : f) v = rng.uniform(-1, 1);
    for (auto& v : g) v = rng.uniform(-1, 1);
    double lp = 0.0;
    for (std::size_t i = 0; i < n; ++i) lp += w[i] * std::pow(std::abs(f[i] - g[i]), 3.0);
    EXPECT_NEAR(tlp_distance(spread(f, w), spread(g, w), 3.0), std::cbrt(lp), 1e-12);
  }
}

TEST(TlpProperty, InflatingValueGapsNeverShrinksDistance) {
  CounterRng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    const auto w = random_masses(rng, n);
    std::vector<double> f(n), g(n);
    for (auto& v : f) v = rng.uniform(-0.4, 0.4);
    for (auto& v : g) v = rng.uniform(-0.4, 0.4);
    const double base = tlp_distance(spread(f, w), spread(g, w), 2.0);
    for (double lambda : {1.0, 1.5, 2.5}) {
      std::vector<double> inflated(n);
      for (std::size_t i = 0; i < n; ++i) inflated[i] = f[i] + lambda * (g[i] - f[i]);
      EXPECT_GE(tlp_distance(spread(f, w), spread(inflated, w), 2.0), base - 1e-15);
    }
  }
}

TEST(Tlp, PrecomputedGroundMatchesDirect) {
  CounterRng rng(9);
  const auto a = FunctionOverMeasure::on_measures(
      {random_measure(rng, 5, 2), random_measure(rng, 5, 2), random_measure(rng, 3, 2)},
      {0, 1, 0.5});
  const auto b = FunctionOverMeasure::on_measures(
      {random_measure(rng, 5, 2), random_measure(rng, 4, 2)}, {1, 0}, {0.25, 0.75});
  TlpOptions opts;
  opts.jobs = 2;
  const auto ground = ground_distances(a, b, opts);
  ASSERT_EQ(ground.size(), 6u);
  EXPECT_EQ(tlp_distance(ground, a, b, 2.0), tlp_distance(a, b, 2.0));
  EXPECT_OTL_ERROR(tlp_distance(std::vector<double>(5), a, b, 2.0), Errc::kShapeMismatch);
}

}  // namespace
}  // namespace otlaplace
