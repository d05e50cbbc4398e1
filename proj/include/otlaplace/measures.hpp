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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace otlaplace {

// Uniform empirical measure (1/m) sum_j delta_{x_j} on R^k. Points are stored
// row-major in one flat buffer.
class EmpiricalMeasure {
 public:
  // Validates: m >= 1, every point has dimension k >= 1, all finite.
  static EmpiricalMeasure from_flat(std::size_t dim, std::vector<double> coords);

  std::size_t size() const noexcept { return coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  double mass() const noexcept { return 1.0 / static_cast<double>(size()); }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  // Copy of this measure with every point shifted by `offset`.
  EmpiricalMeasure translated(std::span<const double> offset) const;

  friend bool operator==(const EmpiricalMeasure&,
                         const EmpiricalMeasure&) = default;

 private:
  EmpiricalMeasure(std::size_t dim, std::vector<double> coords)
      : dim_(dim), coords_(std::move(coords)) {}

  std::size_t dim_ = 1;
  std::vector<double> coords_;
};

// Errors: EmptyInput, DimensionMismatch, NonFiniteCoordinate.
EmpiricalMeasure empirical_from_points(
    const std::vector<std::vector<double>>& points);

// n measures; labels[i] is set exactly for i < n_labeled.
struct LabeledDataset {
  std::vector<EmpiricalMeasure> measures;
  std::vector<std::optional<int>> labels;
  std::size_t n_labeled = 0;
  int n_classes = 0;

  std::size_t size() const noexcept { return measures.size(); }
  std::size_t ambient_dim() const noexcept {
    return measures.empty() ? 0 : measures.front().dim();
  }
  // Throws InvalidSpec / DimensionMismatch when an invariant is broken.
  void validate() const;
};

// Builds and validates a dataset. n_classes defaults to max label + 1.
LabeledDataset make_dataset(std::vector<EmpiricalMeasure> measures,
                            std::vector<std::optional<int>> labels,
                            std::optional<int> n_classes = std::nullopt);

// Piecewise-constant density for the first mean coordinate, uniform second
// coordinate, isotropic Gaussian clouds. Defaults give the two-cluster family
// with heavy ends on [-10,-8] and [8,10].
struct GaussianFamilySpec {
  std::size_t n = 800;
  std::size_t m = 100;
  double variance = 1.0;
  std::vector<double> breakpoints{-10.0, -8.0, 8.0, 10.0};
  std::vector<double> densities{1.0 / 6.0, 1.0 / 48.0, 1.0 / 6.0};
  std::array<double, 2> second_range{-10.0, 10.0};

  void validate() const;
  // Inverse CDF of the first-coordinate density; u in [0,1).
  double first_coordinate_quantile(double u) const;
};

// Label of measure i is 0 iff its first mean coordinate is negative. All n
// labels are populated. When `means` is given it receives the sampled centers.
LabeledDataset sample_gaussian_family(
    const GaussianFamilySpec& spec, std::uint64_t seed,
    std::vector<std::array<double, 2>>* means = nullptr);

struct TranslationFamily {
  LabeledDataset dataset;  // unlabeled
  std::vector<std::vector<double>> thetas;
};

// Measure i is `base` shifted by thetas[i] (zero-padded to R^k). With
// resample_m, each measure instead holds resample_m points drawn uniformly
// with replacement from the shifted base cloud.
TranslationFamily sample_translation_family(
    const EmpiricalMeasure& base, const std::vector<std::vector<double>>& thetas,
    std::optional<std::size_t> resample_m, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dataset files.
//
// JSON:   {"k": int, "clouds": [{"label": int|null, "points": [[...], ...]}]}
// Binary: "OTLD", u32 n, u32 m, u32 k, n*m*k f64, n i32 labels (-1 = none),
//         all little-endian.
// ---------------------------------------------------------------------------

struct LoadOptions {
  // Reject datasets whose clouds have different point counts.
  bool strict = true;
};

// Detects the format from the leading bytes. Errors: IoError, ParseError,
// InconsistentPointCount.
LabeledDataset load_point_cloud_dataset(const std::filesystem::path& path,
                                        const LoadOptions& options = {});

void save_dataset_json(const LabeledDataset& dataset,
                       const std::filesystem::path& path);
// Requires a uniform point count.
void save_dataset_binary(const LabeledDataset& dataset,
                         const std::filesystem::path& path);
// One row per point: cloud,point,label,x0..x{k-1}.
void export_dataset_csv(const LabeledDataset& dataset,
                        const std::filesystem::path& path);

}  // namespace otlaplace
