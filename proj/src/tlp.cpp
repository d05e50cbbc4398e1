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

#include "otlaplace/tlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "otlaplace/error.hpp"
#include "otlaplace/parallel.hpp"

namespace otlaplace {
namespace {

std::vector<double> uniform_or(std::vector<double> masses, std::size_t n) {
  if (masses.empty()) masses.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  return masses;
}

void check_pair(const FunctionOverMeasure& a, const FunctionOverMeasure& b,
                const TlpOptions& options) {
  a.validate();
  b.validate();
  if (a.support.index() != b.support.index()) {
    fail(Errc::kIncompatibleGround, "point atoms cannot be compared with measure atoms");
  }
  if (const auto* pa = std::get_if<EuclideanAtoms>(&a.support)) {
    if (pa->dim != std::get<EuclideanAtoms>(b.support).dim) {
      fail(Errc::kIncompatibleGround, "point atoms live in different dimensions");
    }
  } else {
    const auto& ma = std::get<MeasureAtoms>(a.support);
    const auto& mb = std::get<MeasureAtoms>(b.support);
    if (ma.front().dim() != mb.front().dim()) {
      fail(Errc::kIncompatibleGround, "measure atoms live in different dimensions");
    }
  }
  if (a.size() > options.max_entries / b.size()) {
    fail(Errc::kSizeLimitExceeded, std::to_string(a.size()) + " x " + std::to_string(b.size()) +
                                       " lifted cost entries");
  }
}

const std::vector<double>& flat_support(const FunctionOverMeasure& f,
                                        std::vector<double>& scratch) {
  if (const auto* pts = std::get_if<EuclideanAtoms>(&f.support)) return pts->coords;
  scratch.clear();
  for (const auto& m : std::get<MeasureAtoms>(f.support)) {
    scratch.push_back(static_cast<double>(m.size()));
    scratch.insert(scratch.end(), m.coords().begin(), m.coords().end());
  }
  return scratch;
}

// Strict total order on instances, so that d(a, b) and d(b, a) run the exact
// same computation.
bool canonically_before(const FunctionOverMeasure& a, const FunctionOverMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.values != b.values) return a.values < b.values;
  if (a.masses != b.masses) return a.masses < b.masses;
  std::vector<double> sa, sb;
  return flat_support(a, sa) < flat_support(b, sb);
}

}  // namespace

FunctionOverMeasure FunctionOverMeasure::on_points(std::size_t dim, std::vector<double> coords,
                                                   std::vector<double> values,
                                                   std::vector<double> masses) {
  FunctionOverMeasure f;
  const std::size_t n = values.size();
  f.support = EuclideanAtoms{dim, std::move(coords)};
  f.masses = uniform_or(std::move(masses), n);
  f.values = std::move(values);
  f.validate();
  return f;
}

FunctionOverMeasure FunctionOverMeasure::on_measures(MeasureAtoms atoms,
                                                     std::vector<double> values,
                                                     std::vector<double> masses) {
  FunctionOverMeasure f;
  const std::size_t n = values.size();
  f.support = std::move(atoms);
  f.masses = uniform_or(std::move(masses), n);
  f.values = std::move(values);
  f.validate();
  return f;
}

void FunctionOverMeasure::validate() const {
  if (values.empty()) fail(Errc::kEmptyInput, "function has no atoms");
  std::size_t atoms = 0;
  if (const auto* pts = std::get_if<EuclideanAtoms>(&support)) {
    if (pts->dim == 0 || pts->coords.size() % pts->dim != 0) {
      fail(Errc::kDimensionMismatch, "point coordinates do not split into dimension " +
                                         std::to_string(pts->dim));
    }
    for (double c : pts->coords) {
      if (!std::isfinite(c)) fail(Errc::kNonFiniteCoordinate, "atom coordinate is not finite");
    }
    atoms = pts->size();
  } else {
    const auto& ms = std::get<MeasureAtoms>(support);
    for (const auto& m : ms) {
      if (m.dim() != ms.front().dim()) {
        fail(Errc::kDimensionMismatch, "measure atoms differ in dimension");
      }
    }
    atoms = ms.size();
  }
  if (atoms != values.size() || masses.size() != values.size()) {
    fail(Errc::kShapeMismatch, std::to_string(atoms) + " atoms, " +
                                   std::to_string(masses.size()) + " masses, " +
                                   std::to_string(values.size()) + " values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail(Errc::kNonFiniteCoordinate, "function value is not finite");
  }
  for (double w : masses) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(Errc::kInvalidSpec, "negative atom mass");
  }
  const double total = pairwise_sum(masses);
  if (std::abs(total - 1.0) > 1e-12) {
    fail(Errc::kInvalidSpec, "atom masses sum to " + std::to_string(total));
  }
}

std::vector<double> ground_distances(const FunctionOverMeasure& a, const FunctionOverMeasure& b,
                                     const TlpOptions& options) {
  check_pair(a, b, options);
  const std::size_t ma = a.size(), mb = b.size();
  std::vector<double> out(ma * mb);
  if (const auto* pa = std::get_if<EuclideanAtoms>(&a.support)) {
    const auto& pb = std::get<EuclideanAtoms>(b.support);
    for (std::size_t i = 0; i < ma; ++i) {
      for (std::size_t j = 0; j < mb; ++j) {
        out[i * mb + j] = std::sqrt(squared_distance(pa->point(i), pb.point(j)));
      }
    }
    return out;
  }
  const auto& xa = std::get<MeasureAtoms>(a.support);
  const auto& xb = std::get<MeasureAtoms>(b.support);
  parallel_for(ma * mb, options.jobs, [&](std::size_t e) {
    out[e] = w2_exact(xa[e / mb], xb[e % mb], options.transport).distance;
  });
  return out;
}

double tlp_distance(const FunctionOverMeasure& a, const FunctionOverMeasure& b, double p,
                    const TlpOptions& options) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(Errc::kInvalidExponent, "TLp needs finite p >= 1");
  check_pair(a, b, options);
  if (canonically_before(b, a)) return tlp_distance(ground_distances(b, a, options), b, a, p, options);
  return tlp_distance(ground_distances(a, b, options), a, b, p, options);
}

double tlp_distance(std::span<const double> ground, const FunctionOverMeasure& a,
                    const FunctionOverMeasure& b, double p, const TlpOptions& options) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(Errc::kInvalidExponent, "TLp needs finite p >= 1");
  check_pair(a, b, options);
  const std::size_t ma = a.size(), mb = b.size();
  if (ground.size() != ma * mb) fail(Errc::kShapeMismatch, "ground matrix is not M_a x M_b");
  if (canonically_before(b, a)) {
    std::vector<double> transposed(ma * mb);
    for (std::size_t i = 0; i < ma; ++i) {
      for (std::size_t j = 0; j < mb; ++j) transposed[j * ma + i] = ground[i * mb + j];
    }
    return tlp_distance(transposed, b, a, p, options);
  }
  std::vector<double> cost(ma * mb);
  for (std::size_t i = 0; i < ma; ++i) {
    for (std::size_t j = 0; j < mb; ++j) {
      cost[i * mb + j] =
          std::pow(ground[i * mb + j], p) + std::pow(std::abs(a.values[i] - b.values[j]), p);
    }
  }
  TransportOptions transport = options.transport;
  transport.max_flow_entries = std::max(transport.max_flow_entries, ma * mb);
  const auto plan = solve_discrete_ot(cost, a.masses, b.masses, transport);
  return std::pow(std::max(plan.total_cost, 0.0), 1.0 / p);
}

}  // namespace otlaplace
