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

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "otlaplace/measures.hpp"

namespace otlaplace {

inline constexpr double kInfinityExponent = std::numeric_limits<double>::infinity();

struct PlanEntry {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

// Coupling between two discrete measures, stored sparsely.
struct TransportPlan {
  std::size_t source_size = 0;
  std::size_t target_size = 0;
  std::vector<PlanEntry> entries;  // sorted by (source, target)
  double total_cost = 0.0;         // sum of mass * cost for the plan's exponent
  double p = 2.0;
  // Set when the plan is a permutation: matching[i] is the target of source i.
  std::optional<std::vector<std::size_t>> matching;

  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;
};

// T(x_i) for each source point, flat row-major.
struct TransportMap {
  std::size_t dim = 0;
  std::vector<double> images;

  std::size_t size() const noexcept { return dim == 0 ? 0 : images.size() / dim; }
  std::span<const double> image(std::size_t i) const noexcept {
    return {images.data() + i * dim, dim};
  }
};

struct TransportOptions {
  // Cap on source*target cost entries for the min-cost-flow path.
  std::size_t max_flow_entries = 1'000'000;
  // Cap on the assignment size for equal-size measures.
  std::size_t max_assignment_size = 4096;
};

struct W2Result {
  double distance = 0.0;
  TransportPlan plan;
};

// Exact 2-Wasserstein distance between uniform empirical measures.
//  * k = 1: monotone (sorted) coupling.
//  * equal sizes: linear assignment; the plan is a permutation.
//  * otherwise: min-cost flow on integerized masses.
// Errors: DimensionMismatch, SizeLimitExceeded.
W2Result w2_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                  const TransportOptions& options = {});

// Bottleneck (p = infinity) distance. Requires equal sizes unless k = 1.
// Errors: UnsupportedShape, DimensionMismatch.
double winf(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// T(x_i) = sum_j pi_ij y_j / sum_j pi_ij. Errors: ZeroRowMass, ShapeMismatch.
TransportMap barycentric_map(const TransportPlan& plan, const EmpiricalMeasure& nu);

// Enumerates all m! permutations (m <= 7). p >= 1 or kInfinityExponent.
// Errors: UnequalSizes, SizeLimitExceeded, DimensionMismatch.
double brute_force_ot(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                      double p);

// ---------------------------------------------------------------------------
// General discrete OT on an explicit cost matrix.
// ---------------------------------------------------------------------------

struct DiscreteOtResult {
  std::vector<PlanEntry> entries;
  double total_cost = 0.0;
  std::optional<std::vector<std::size_t>> matching;
};

// Minimizes sum pi_ij cost_ij over couplings of `source` and `target`
// weights (each summing to 1). `cost` is row-major source x target and must
// be nonnegative. Uniform equal-size weights use the assignment solver;
// everything else uses successive shortest paths, on integer masses when
// the weights are rationals with a common denominator below 2^40 and on
// doubles otherwise.
DiscreteOtResult solve_discrete_ot(std::span<const double> cost,
                                   std::span<const double> source,
                                   std::span<const double> target,
                                   const TransportOptions& options = {});

// Linear assignment: returns row -> column minimizing the summed cost of an
// n x n row-major matrix.
std::vector<std::size_t> solve_assignment(std::span<const double> cost,
                                          std::size_t n);

double squared_distance(std::span<const double> a, std::span<const double> b);

// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace otlaplace
