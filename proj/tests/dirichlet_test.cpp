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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "otlaplace/dirichlet.hpp"
#include "test_util.hpp"

namespace otlaplace {
namespace {

WeightedGraph random_graph(CounterRng& rng, std::size_t n) {
  std::vector<double> pts(2 * n);
  for (auto& p : pts) p = rng.uniform();
  const auto d = euclidean_distances(pts, 2);
  const double eps = rng.uniform(0.2, 0.6);
  return epsilon_graph(d, eps, rng.uniform() < 0.5 ? Kernel::triangular(1.0, 2)
                                                   : Kernel::indicator(1.5, 1.0, 2));
}

std::vector<double> random_function(CounterRng& rng, std::size_t n) {
  std::vector<double> f(n);
  for (auto& v : f) v = rng.normal();
  return f;
}

WeightedGraph path3() { return graph_from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }

TEST(DirichletEnergy, Examples) {
  const auto g = path3();
  EXPECT_EQ(graph_dirichlet_energy(g, std::vector<double>{2, 2, 2}, 2), 0.0);
  EXPECT_DOUBLE_EQ(graph_dirichlet_energy(g, std::vector<double>{0, 1, 2}, 2), 4.0 / 9.0);
  const double w = 0.7, eps = 0.5;
  const auto edge = graph_from_edges(2, {{0, 1, w}}, eps);
  EXPECT_DOUBLE_EQ(graph_dirichlet_energy(edge, std::vector<double>{0, 1}, 2),
                   w / (2 * eps * eps));
}

TEST(DirichletEnergy, Errors) {
  EXPECT_OTL_ERROR(graph_dirichlet_energy(path3(), std::vector<double>{0, 1}, 2),
                   Errc::kShapeMismatch);
  EXPECT_OTL_ERROR(graph_dirichlet_energy(path3(), std::vector<double>{0, 1, 2}, 0.5),
                   Errc::kInvalidExponent);
  EXPECT_OTL_ERROR(graph_p_laplacian(path3(), std::vector<double>{0, 1, 2}, 1.5),
                   Errc::kInvalidExponent);
}

TEST(DirichletEnergy, ZeroIffConstantOnComponents) {
  const auto g = graph_from_edges(4, {{0, 1, 1.0}, {2, 3, 2.0}});
  EXPECT_EQ(graph_dirichlet_energy(g, std::vector<double>{1, 1, -3, -3}, 3), 0.0);
  EXPECT_GT(graph_dirichlet_energy(g, std::vector<double>{1, 1, -3, -2}, 3), 0.0);
}

TEST(PLaplacian, Examples) {
  const double w = 3.0;
  const auto edge = graph_from_edges(2, {{0, 1, w}});
  const auto lf = graph_p_laplacian(edge, std::vector<double>{0, 1}, 2);
  EXPECT_DOUBLE_EQ(lf[0], -w / 2);
  EXPECT_DOUBLE_EQ(lf[1], w / 2);
  for (double v : graph_p_laplacian(path3(), std::vector<double>{5, 5, 5}, 3)) EXPECT_EQ(v, 0.0);
}

// Dense (D - W) f / (n eps^2) as an independent oracle.
TEST(PLaplacian, MatchesDenseMatrixForP2) {
  CounterRng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng.below(40);
    const auto g = random_graph(rng, n);
    const auto f = random_function(rng, n);
    const auto lf = graph_p_laplacian(g, f, 2);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += g.weight(i, j) * (f[i] - f[j]);
      const double expect = s / (static_cast<double>(n) * g.epsilon * g.epsilon);
      EXPECT_NEAR(lf[i], expect, 1e-12 * (1 + std::abs(expect)));
    }
  }
}

TEST(DirichletEnergy, OperatorProportionalityConstant) {
  CounterRng rng(2);
  for (double p : {2.0, 3.0, 4.0}) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 3 + rng.below(30);
      const auto g = random_graph(rng, n);
      const auto f = random_function(rng, n);
      const double inner = node_inner(graph_p_laplacian(g, f, p), f);
      if (inner == 0.0) continue;
      const double c = graph_dirichlet_energy(g, f, p) / inner;
      EXPECT_NEAR(c, energy_operator_constant(p), 1e-10 * energy_operator_constant(p));
    }
  }
}

TEST(DirichletEnergy, FirstVariation) {
  CounterRng rng(3);
  for (double p : {2.0, 3.0, 4.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 3 + rng.below(20);
      const auto g = random_graph(rng, n);
      const auto f = random_function(rng, n);
      const auto dir = random_function(rng, n);
      auto central = [&](double delta) {
        std::vector<double> plus(f), minus(f);
        for (std::size_t i = 0; i < n; ++i) {
          plus[i] += delta * dir[i];
          minus[i] -= delta * dir[i];
        }
        return (graph_dirichlet_energy(g, plus, p) - graph_dirichlet_energy(g, minus, p)) /
               (2 * delta);
      };
      const double extrapolated = (100.0 * central(1e-5) - central(1e-4)) / 99.0;
      const double expect = kFirstVariationConstant * node_inner(graph_p_laplacian(g, f, p), dir);
      EXPECT_NEAR(extrapolated, expect, 1e-6 * (1 + std::abs(expect)));
    }
  }
}

TEST(DirichletEnergy, HomogeneousOfDegreeP) {
  CounterRng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.below(30);
    const auto g = random_graph(rng, n);
    auto f = random_function(rng, n);
    const double p = rng.uniform(1, 5), alpha = rng.uniform(-3, 3);
    const double e = graph_dirichlet_energy(g, f, p);
    for (auto& v : f) v *= alpha;
    EXPECT_NEAR(graph_dirichlet_energy(g, f, p), std::pow(std::abs(alpha), p) * e,
                1e-12 * std::pow(std::abs(alpha), p) * e + 1e-300);
  }
}

ContinuumSpec unit_box(std::size_t d, QuadraticFunction f, Kernel kernel = Kernel::indicator()) {
  return {BoxDensity::uniform(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)),
          std::move(f), std::move(kernel), 2.0};
}

TEST(ContinuumEnergy, ConstantFunctionIsZero) {
  const auto spec = unit_box(2, QuadraticFunction::linear({0, 0}, 3.0));
  EXPECT_EQ(continuum_energy(spec, 8).value, 0.0);
}

TEST(ContinuumEnergy, LineWithIndicator) {
  const auto spec = unit_box(1, QuadraticFunction::linear({1.0}));
  const auto r = continuum_energy(spec, 16);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-12);
}

TEST(ContinuumEnergy, DiskWithIndicator) {
  const auto spec = unit_box(2, QuadraticFunction::linear({1.0, 0.0}));
  const auto r = continuum_energy(spec, 32);
  EXPECT_NEAR(r.value, std::numbers::pi / 4.0, 1e-10);
  EXPECT_LE(std::abs(r.value - std::numbers::pi / 4.0), r.error + 1e-14);
}

TEST(ContinuumEnergy, LinearClosedFormAcrossKernelsAndDimensions) {
  const std::vector<Kernel> kernels{Kernel::indicator(2.0, 0.5), Kernel::triangular(1.5),
                                    Kernel::table({0, 0.3, 1.0}, {2.0, 0.5})};
  for (std::size_t d = 1; d <= 3; ++d) {
    std::vector<double> a{0.3, -1.2, 0.7};
    a.resize(d);
    double a2 = 0.0;
    for (double v : a) a2 += v * v;
    for (const auto& k : kernels) {
      const auto spec = unit_box(d, QuadraticFunction::linear(a), k);
      const double closed = a2 * kernel_moment(k, static_cast<int>(d), 2.0) / d;
      EXPECT_NEAR(continuum_energy(spec, 24).value, closed, 1e-6 * closed) << d;
    }
  }
}

TEST(ContinuumEnergy, RefinementStaysWithinErrorEstimate) {
  const auto spec = ContinuumSpec{
      BoxDensity{{0.0, 0.0}, {2.0, 1.0}, {0.0, 0.5, 2.0}, {0.8, 0.4}},
      QuadraticFunction::quadratic({1.0, 0.2, 0.2, -0.5}, {0.3, 1.0}),
      Kernel::triangular(0.8), 3.0};
  for (std::size_t n : {8u, 16u}) {
    const auto coarse = continuum_energy(spec, n);
    const auto fine = continuum_energy(spec, 2 * n);
    EXPECT_LE(std::abs(fine.value - coarse.value), coarse.error + 1e-14 * coarse.value);
  }
}

TEST(ContinuumEnergy, Errors) {
  auto spec = unit_box(1, QuadraticFunction::linear({1.0}));
  EXPECT_OTL_ERROR(continuum_energy(spec, 4), Errc::kInvalidSpec);
  spec.density.values = {2.0};
  EXPECT_OTL_ERROR(continuum_energy(spec, 8), Errc::kInvalidSpec);
  auto spec4 = ContinuumSpec{BoxDensity::uniform({0, 0, 0, 0}, {1, 1, 1, 1}),
                             QuadraticFunction::linear({1, 0, 0, 0})};
  EXPECT_OTL_ERROR(continuum_energy(spec4, 8), Errc::kInvalidSpec);
}

TEST(LaplaceBeltrami, LinearFunctionGivesZero) {
  const auto spec = unit_box(2, QuadraticFunction::linear({1.0, -2.0}));
  EXPECT_EQ(laplace_beltrami_translation(spec, std::vector<double>{0.3, 0.6}, 8).value, 0.0);
  const auto constant = unit_box(1, QuadraticFunction::linear({0.0}, 5.0));
  EXPECT_EQ(laplace_beltrami_translation(constant, std::vector<double>{0.5}, 8).value, 0.0);
}

TEST(LaplaceBeltrami, HalfSquareOnTheLine) {
  const auto spec = unit_box(1, QuadraticFunction::quadratic({1.0}, {0.0}));
  for (double t : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(laplace_beltrami_translation(spec, std::vector<double>{t}, 16).value,
                -4.0 / 3.0, 1e-12);
  }
}

// For p = 2 the operator is -2 rho sigma_eta/d * trace(H), uniform density.
TEST(LaplaceBeltrami, TraceFormulaForP2) {
  for (std::size_t d = 1; d <= 3; ++d) {
    std::vector<double> h(d * d, 0.0);
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      h[i * d + i] = 0.5 + static_cast<double>(i);
      trace += h[i * d + i];
    }
    if (d > 1) h[1] = h[d] = 0.3;
    const auto k = Kernel::triangular(0.7);
    const auto spec = unit_box(d, QuadraticFunction::quadratic(h, std::vector<double>(d, 0.1)), k);
    const double expect = -2.0 * kernel_moment(k, static_cast<int>(d), 2.0) / d * trace;
    const auto r = laplace_beltrami_translation(spec, std::vector<double>(d, 0.4), 24);
    EXPECT_NEAR(r.value, expect, 1e-5 * std::abs(expect));
    EXPECT_LE(std::abs(r.value - expect), r.error);
  }
}

TEST(LaplaceBeltrami, Errors) {
  const auto spec = unit_box(1, QuadraticFunction::quadratic({1.0}, {0.0}));
  EXPECT_OTL_ERROR(laplace_beltrami_translation(spec, std::vector<double>{1.0}, 8),
                   Errc::kBoundaryPoint);
  EXPECT_OTL_ERROR(laplace_beltrami_translation(spec, std::vector<double>{-0.5}, 8),
                   Errc::kBoundaryPoint);
  const auto cut = ContinuumSpec{BoxDensity{{0.0}, {1.0}, {0.0, 0.5, 1.0}, {1.5, 0.5}},
                                 QuadraticFunction::quadratic({1.0}, {0.0})};
  EXPECT_OTL_ERROR(laplace_beltrami_translation(cut, std::vector<double>{0.5}, 8),
                   Errc::kBoundaryPoint);
}

TEST(KernelMoment, ClosedForms) {
  EXPECT_NEAR(kernel_moment(Kernel::indicator(), 1, 2.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(kernel_moment(Kernel::indicator(), 2, 2.0), std::numbers::pi / 2.0, 1e-15);
  EXPECT_NEAR(kernel_moment(Kernel::indicator(), 3, 0.0), 4.0 * std::numbers::pi / 3.0, 1e-14);
  EXPECT_NEAR(kernel_moment(Kernel::triangular(), 1, 0.0), 1.0, 1e-15);
}

}  // namespace
}  // namespace otlaplace
