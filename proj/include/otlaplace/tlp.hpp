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
#include <span>
#include <variant>
#include <vector>

#include "otlaplace/measures.hpp"
#include "otlaplace/transport.hpp"

namespace otlaplace {

// Atoms that are points of R^dim, flat row-major.
struct EuclideanAtoms {
  std::size_t dim = 1;
  std::vector<double> coords;

  std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const noexcept {
    return {coords.data() + i * dim, dim};
  }
};

// Atoms that are themselves measures, compared under W2.
using MeasureAtoms = std::vector<EmpiricalMeasure>;

using GroundSupport = std::variant<EuclideanAtoms, MeasureAtoms>;

// A function sampled on a discrete probability measure.
struct FunctionOverMeasure {
  GroundSupport support;
  std::vector<double> masses;
  std::vector<double> values;

  // Empty masses mean uniform.
  static FunctionOverMeasure on_points(std::size_t dim, std::vector<double> coords,
                                       std::vector<double> values,
                                       std::vector<double> masses = {});
  static FunctionOverMeasure on_measures(MeasureAtoms atoms, std::vector<double> values,
                                         std::vector<double> masses = {});

  std::size_t size() const noexcept { return values.size(); }
  // ShapeMismatch, InvalidSpec (masses negative or not summing to 1 within
  // 1e-12), NonFiniteCoordinate, EmptyInput, DimensionMismatch.
  void validate() const;
};

struct TlpOptions {
  TransportOptions transport;
  std::size_t jobs = 1;
  // Cap on M_a * M_b.
  std::size_t max_entries = 1'000'000;
};

// Ground distances d(x_i, y_j), row-major M_a x M_b. Euclidean atoms use
// |x - y|, measure atoms use W2. Errors: IncompatibleGround, SizeLimitExceeded.
std::vector<double> ground_distances(const FunctionOverMeasure& a, const FunctionOverMeasure& b,
                                     const TlpOptions& options = {});

// (min over couplings of sum pi_ij (d_ij^p + |f_i - g_j|^p))^(1/p), p >= 1.
// Errors: InvalidExponent, IncompatibleGround, SizeLimitExceeded and those of
// validate().
double tlp_distance(const FunctionOverMeasure& a, const FunctionOverMeasure& b, double p,
                    const TlpOptions& options = {});

// Same, reusing precomputed ground distances.
double tlp_distance(std::span<const double> ground, const FunctionOverMeasure& a,
                    const FunctionOverMeasure& b, double p, const TlpOptions& options = {});

}  // namespace otlaplace
