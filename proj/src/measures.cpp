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

#include "otlaplace/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "otlaplace/error.hpp"
#include "otlaplace/rng.hpp"

namespace otlaplace {

EmpiricalMeasure EmpiricalMeasure::from_flat(std::size_t dim,
                                             std::vector<double> coords) {
  if (dim == 0) fail(Errc::kDimensionMismatch, "ambient dimension must be >= 1");
  if (coords.empty()) fail(Errc::kEmptyInput, "measure needs at least one point");
  if (coords.size() % dim != 0) {
    fail(Errc::kDimensionMismatch, "coordinate count " +
                                       std::to_string(coords.size()) +
                                       " is not a multiple of k=" +
                                       std::to_string(dim));
  }
  for (double c : coords) {
    if (!std::isfinite(c)) fail(Errc::kNonFiniteCoordinate, "non-finite coordinate");
  }
  return EmpiricalMeasure(dim, std::move(coords));
}

EmpiricalMeasure EmpiricalMeasure::translated(
    std::span<const double> offset) const {
  if (offset.size() != dim_) {
    fail(Errc::kDimensionMismatch, "offset dimension differs from measure");
  }
  std::vector<double> out(coords_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += offset[i % dim_];
  return from_flat(dim_, std::move(out));
}

EmpiricalMeasure empirical_from_points(
    const std::vector<std::vector<double>>& points) {
  if (points.empty()) fail(Errc::kEmptyInput, "measure needs at least one point");
  const std::size_t dim = points.front().size();
  std::vector<double> flat;
  flat.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim) {
      fail(Errc::kDimensionMismatch, "points have dimensions " +
                                         std::to_string(dim) + " and " +
                                         std::to_string(p.size()));
    }
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return EmpiricalMeasure::from_flat(dim, std::move(flat));
}

void LabeledDataset::validate() const {
  if (labels.size() != measures.size()) {
    fail(Errc::kInvalidSpec, "labels and measures differ in length");
  }
  if (n_labeled > measures.size()) {
    fail(Errc::kInvalidSpec, "n_labeled exceeds dataset size");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool known = labels[i].has_value();
    if (known != (i < n_labeled)) {
      fail(Errc::kInvalidSpec,
           "labels must occupy exactly indices 0..n_labeled-1 (index " +
               std::to_string(i) + ")");
    }
    if (known && (*labels[i] < 0 || *labels[i] >= n_classes)) {
      fail(Errc::kInvalidSpec, "label " + std::to_string(*labels[i]) +
                                   " outside 0.." +
                                   std::to_string(n_classes - 1));
    }
  }
  for (const auto& m : measures) {
    if (m.dim() != ambient_dim()) {
      fail(Errc::kDimensionMismatch, "measures have different ambient dimension");
    }
  }
}

LabeledDataset make_dataset(std::vector<EmpiricalMeasure> measures,
                            std::vector<std::optional<int>> labels,
                            std::optional<int> n_classes) {
  LabeledDataset ds;
  ds.measures = std::move(measures);
  ds.labels = std::move(labels);
  ds.n_labeled = static_cast<std::size_t>(
      std::count_if(ds.labels.begin(), ds.labels.end(),
                    [](const auto& l) { return l.has_value(); }));
  int max_label = -1;
  for (const auto& l : ds.labels) {
    if (l) max_label = std::max(max_label, *l);
  }
  ds.n_classes = n_classes.value_or(max_label + 1);
  ds.validate();
  return ds;
}

void GaussianFamilySpec::validate() const {
  if (n == 0 || m == 0) fail(Errc::kInvalidSpec, "n and m must be positive");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    fail(Errc::kInvalidSpec, "variance must be positive");
  }
  if (breakpoints.size() < 2 || densities.size() + 1 != breakpoints.size()) {
    fail(Errc::kInvalidSpec, "need one density per breakpoint interval");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    const double width = breakpoints[i + 1] - breakpoints[i];
    if (!(width > 0.0)) fail(Errc::kInvalidSpec, "breakpoints must increase");
    if (!(densities[i] >= 0.0)) fail(Errc::kInvalidSpec, "negative density");
    total += densities[i] * width;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(Errc::kInvalidSpec,
         "density integrates to " + std::to_string(total) + ", not 1");
  }
  if (!(second_range[1] > second_range[0])) {
    fail(Errc::kInvalidSpec, "empty range for the second coordinate");
  }
}

double GaussianFamilySpec::first_coordinate_quantile(double u) const {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    const double width = breakpoints[i + 1] - breakpoints[i];
    const double piece = densities[i] * width;
    if (densities[i] > 0.0 && (u < cumulative + piece || i + 1 == densities.size())) {
      const double x = breakpoints[i] + (u - cumulative) / densities[i];
      return std::clamp(x, breakpoints[i], breakpoints[i + 1]);
    }
    cumulative += piece;
  }
  return breakpoints.back();
}

LabeledDataset sample_gaussian_family(const GaussianFamilySpec& spec,
                                      std::uint64_t seed,
                                      std::vector<std::array<double, 2>>* means) {
  spec.validate();
  CounterRng rng(seed);
  const double sigma = std::sqrt(spec.variance);
  std::vector<EmpiricalMeasure> measures;
  std::vector<std::optional<int>> labels;
  measures.reserve(spec.n);
  labels.reserve(spec.n);
  if (means) means->clear();
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double c1 = spec.first_coordinate_quantile(rng.uniform());
    const double c2 = rng.uniform(spec.second_range[0], spec.second_range[1]);
    std::vector<double> coords(2 * spec.m);
    for (std::size_t j = 0; j < spec.m; ++j) {
      coords[2 * j] = c1 + sigma * rng.normal();
      coords[2 * j + 1] = c2 + sigma * rng.normal();
    }
    measures.push_back(EmpiricalMeasure::from_flat(2, std::move(coords)));
    labels.emplace_back(c1 < 0.0 ? 0 : 1);
    if (means) means->push_back({c1, c2});
  }
  return make_dataset(std::move(measures), std::move(labels), 2);
}

TranslationFamily sample_translation_family(
    const EmpiricalMeasure& base, const std::vector<std::vector<double>>& thetas,
    std::optional<std::size_t> resample_m, std::uint64_t seed) {
  const std::size_t k = base.dim();
  if (resample_m && *resample_m == 0) {
    fail(Errc::kInvalidSpec, "resample_m must be positive");
  }
  CounterRng rng(seed);
  std::vector<EmpiricalMeasure> measures;
  measures.reserve(thetas.size());
  std::vector<double> shift(k);
  for (const auto& theta : thetas) {
    if (theta.size() > k) {
      fail(Errc::kDimensionMismatch, "parameter dimension " +
                                         std::to_string(theta.size()) +
                                         " exceeds ambient dimension " +
                                         std::to_string(k));
    }
    std::fill(shift.begin(), shift.end(), 0.0);
    std::copy(theta.begin(), theta.end(), shift.begin());
    if (!resample_m) {
      measures.push_back(base.translated(shift));
      continue;
    }
    std::vector<double> coords;
    coords.reserve(*resample_m * k);
    for (std::size_t j = 0; j < *resample_m; ++j) {
      const auto p = base.point(rng.below(base.size()));
      for (std::size_t a = 0; a < k; ++a) coords.push_back(p[a] + shift[a]);
    }
    measures.push_back(EmpiricalMeasure::from_flat(k, std::move(coords)));
  }
  TranslationFamily out;
  out.dataset = make_dataset(std::move(measures),
                             std::vector<std::optional<int>>(thetas.size()), 0);
  out.thetas = thetas;
  return out;
}

}  // namespace otlaplace
