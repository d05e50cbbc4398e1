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
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "otlaplace/measures.hpp"
#include "test_util.hpp"

namespace otlaplace {
namespace {

using testing::TempDir;

TEST(EmpiricalFromPoints, TwoPointsInThePlane) {
  const auto mu = empirical_from_points({{0, 0}, {1, 1}});
  EXPECT_EQ(mu.size(), 2u);
  EXPECT_EQ(mu.dim(), 2u);
  EXPECT_DOUBLE_EQ(mu.mass(), 0.5);
  EXPECT_EQ(mu.point(1)[0], 1.0);
}

TEST(EmpiricalFromPoints, SingleAtomIsDirac) {
  const auto mu = empirical_from_points({{3}});
  EXPECT_EQ(mu.size(), 1u);
  EXPECT_EQ(mu.dim(), 1u);
  EXPECT_DOUBLE_EQ(mu.mass(), 1.0);
}

TEST(EmpiricalFromPoints, RejectsMalformedInput) {
  EXPECT_OTL_ERROR(empirical_from_points({{0, 0}, {1}}), Errc::kDimensionMismatch);
  EXPECT_OTL_ERROR(empirical_from_points({}), Errc::kEmptyInput);
  EXPECT_OTL_ERROR(empirical_from_points({{0, std::nan("")}}), Errc::kNonFiniteCoordinate);
  EXPECT_OTL_ERROR(
      empirical_from_points({{std::numeric_limits<double>::infinity()}}),
      Errc::kNonFiniteCoordinate);
}

TEST(LabeledDataset, LabelsMustBeAPrefix) {
  auto a = empirical_from_points({{0.0}});
  EXPECT_OTL_ERROR(make_dataset({a, a}, {std::nullopt, 1}), Errc::kInvalidSpec);
  EXPECT_OTL_ERROR(make_dataset({a, a}, {0, 3}, 2), Errc::kInvalidSpec);
  const auto ds = make_dataset({a, a, a}, {1, 0, std::nullopt});
  EXPECT_EQ(ds.n_labeled, 2u);
  EXPECT_EQ(ds.n_classes, 2);
}

TEST(GaussianFamily, SmallSampleIsDeterministic) {
  GaussianFamilySpec spec;
  spec.n = 2;
  spec.m = 3;
  const auto a = sample_gaussian_family(spec, 99);
  const auto b = sample_gaussian_family(spec, 99);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.measures[i].size(), 3u);
    EXPECT_EQ(a.measures[i], b.measures[i]);
    EXPECT_EQ(a.labels[i], b.labels[i]);
  }
  const auto c = sample_gaussian_family(spec, 100);
  EXPECT_NE(a.measures[0], c.measures[0]);
}

TEST(GaussianFamily, LabelBalanceAndHeavyEndMass) {
  GaussianFamilySpec spec;
  spec.n = 10000;
  spec.m = 1;
  std::vector<std::array<double, 2>> means;
  const auto ds = sample_gaussian_family(spec, 2024, &means);
  std::size_t ones = 0, left_end = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ones += (*ds.labels[i] == 1);
    left_end += (means[i][0] >= -10.0 && means[i][0] <= -8.0);
    EXPECT_EQ(*ds.labels[i], means[i][0] < 0.0 ? 0 : 1);
    EXPECT_GE(means[i][1], -10.0);
    EXPECT_LT(means[i][1], 10.0);
  }
  // Symmetric density: P(label=1) = 1/2; 3-sigma binomial band is 0.015.
  EXPECT_NEAR(ones / 10000.0, 0.5, 0.02);
  // (1/6) * 2 = 1/3 of the mass sits on [-10, -8].
  EXPECT_NEAR(left_end / 10000.0, 1.0 / 3.0, 0.02);
}

TEST(GaussianFamily, QuantileMatchesPiecewiseCdf) {
  GaussianFamilySpec spec;
  EXPECT_DOUBLE_EQ(spec.first_coordinate_quantile(0.0), -10.0);
  EXPECT_NEAR(spec.first_coordinate_quantile(1.0 / 3.0), -8.0, 1e-12);
  EXPECT_NEAR(spec.first_coordinate_quantile(0.5), 0.0, 1e-12);
  EXPECT_NEAR(spec.first_coordinate_quantile(2.0 / 3.0), 8.0, 1e-12);
}

TEST(GaussianFamily, RejectsInvalidSpec) {
  GaussianFamilySpec spec;
  spec.densities = {0.1, 0.1, 0.1};
  EXPECT_OTL_ERROR(sample_gaussian_family(spec, 1), Errc::kInvalidSpec);
  GaussianFamilySpec bad_var;
  bad_var.variance = 0.0;
  EXPECT_OTL_ERROR(sample_gaussian_family(bad_var, 1), Errc::kInvalidSpec);
}

TEST(TranslationFamily, DiracTranslation) {
  const auto base = empirical_from_points({{0, 0}});
  const auto fam = sample_translation_family(base, {{0.0}, {1.0}}, std::nullopt, 0);
  ASSERT_EQ(fam.dataset.size(), 2u);
  EXPECT_EQ(fam.dataset.measures[0], empirical_from_points({{0, 0}}));
  EXPECT_EQ(fam.dataset.measures[1], empirical_from_points({{1, 0}}));
  EXPECT_EQ(fam.thetas[1][0], 1.0);
}

TEST(TranslationFamily, ZeroShiftIsIdentity) {
  CounterRng rng(5);
  const auto base = testing::random_measure(rng, 6, 3);
  const auto fam =
      sample_translation_family(base, {{0, 0}, {0, 0}, {0, 0}}, std::nullopt, 0);
  for (const auto& mu : fam.dataset.measures) EXPECT_EQ(mu, base);
}

TEST(TranslationFamily, ShiftsFirstCoordinate) {
  const auto base = empirical_from_points({{0, 0}, {1, 2}, {3, 4}, {5, 6}});
  const auto fam = sample_translation_family(base, {{0.5}}, std::nullopt, 0);
  const auto& mu = fam.dataset.measures[0];
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(mu.point(j)[0], base.point(j)[0] + 0.5);
    EXPECT_EQ(mu.point(j)[1], base.point(j)[1]);
  }
}

TEST(TranslationFamily, ResamplingDrawsShiftedBasePoints) {
  const auto base = empirical_from_points({{0, 0}, {1, 2}, {3, 4}});
  const auto fam = sample_translation_family(base, {{2.0, -1.0}}, 50, 17);
  const auto& mu = fam.dataset.measures[0];
  ASSERT_EQ(mu.size(), 50u);
  for (std::size_t j = 0; j < mu.size(); ++j) {
    bool found = false;
    for (std::size_t b = 0; b < base.size(); ++b) {
      found |= mu.point(j)[0] == base.point(b)[0] + 2.0 &&
               mu.point(j)[1] == base.point(b)[1] - 1.0;
    }
    EXPECT_TRUE(found);
  }
  EXPECT_OTL_ERROR(sample_translation_family(base, {{1, 2, 3}}, std::nullopt, 0),
                   Errc::kDimensionMismatch);
}

TEST(DatasetFiles, JsonExampleRoundTrip) {
  TempDir dir;
  const auto path = dir.path() / "two.json";
  {
    std::ofstream out(path);
    out << R"({"k": 3, "clouds": [
      {"label": 0, "points": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]]},
      {"label": 1, "points": [[1,1,1],[2,1,1],[1,2,1],[1,1,2]]}]})";
  }
  const auto ds = load_point_cloud_dataset(path);
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.measures[0].size(), 4u);
  EXPECT_EQ(ds.ambient_dim(), 3u);
  EXPECT_EQ(ds.labels[1], 1);
  EXPECT_EQ(ds.n_classes, 2);
}

TEST(DatasetFiles, ParseErrors) {
  TempDir dir;
  const auto empty = dir.path() / "empty.json";
  std::ofstream(empty).close();
  EXPECT_OTL_ERROR(load_point_cloud_dataset(empty), Errc::kParseError);

  const auto nan = dir.path() / "nan.json";
  std::ofstream(nan) << R"({"k": 1, "clouds": [{"label": 0, "points": [[NaN]]}]})";
  EXPECT_OTL_ERROR(load_point_cloud_dataset(nan), Errc::kParseError);

  const auto null_coord = dir.path() / "null.json";
  std::ofstream(null_coord) << R"({"k": 1, "clouds": [{"label": 0, "points": [[null]]}]})";
  EXPECT_OTL_ERROR(load_point_cloud_dataset(null_coord), Errc::kParseError);

  EXPECT_OTL_ERROR(load_point_cloud_dataset(dir.path() / "missing.json"), Errc::kIoError);

  const auto ragged = dir.path() / "ragged.json";
  std::ofstream(ragged) << R"({"k": 1, "clouds": [{"label": 0, "points": [[1]]},
                                                 {"label": 1, "points": [[1],[2]]}]})";
  EXPECT_OTL_ERROR(load_point_cloud_dataset(ragged), Errc::kInconsistentPointCount);
  EXPECT_EQ(load_point_cloud_dataset(ragged, {.strict = false}).size(), 2u);
}

TEST(DatasetFiles, BinaryRejectsNanAndTruncation) {
  TempDir dir;
  auto ds = make_dataset({empirical_from_points({{1.0}, {2.0}})}, {0});
  const auto path = dir.path() / "d.otld";
  save_dataset_binary(ds, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(16);
    const double nan = std::nan("");
    f.write(reinterpret_cast<const char*>(&nan), 8);
  }
  EXPECT_OTL_ERROR(load_point_cloud_dataset(path), Errc::kParseError);
  std::filesystem::resize_file(path, 20);
  EXPECT_OTL_ERROR(load_point_cloud_dataset(path), Errc::kParseError);
}

// Save-then-load reproduces coordinates bit-exactly, in both encodings.
TEST(DatasetFiles, RoundTripIsBitExact) {
  TempDir dir;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CounterRng rng(seed);
    std::vector<EmpiricalMeasure> measures;
    std::vector<std::optional<int>> labels;
    const std::size_t n = 1 + rng.below(6), m = 1 + rng.below(5), k = 1 + rng.below(4);
    const std::size_t labeled = rng.below(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> coords(m * k);
      for (auto& c : coords) c = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
      measures.push_back(EmpiricalMeasure::from_flat(k, std::move(coords)));
      labels.push_back(i < labeled ? std::optional<int>(int(rng.below(3))) : std::nullopt);
    }
    const auto ds = make_dataset(measures, labels, 3);
    const auto json_path = dir.path() / "rt.json";
    const auto bin_path = dir.path() / "rt.otld";
    save_dataset_json(ds, json_path);
    save_dataset_binary(ds, bin_path);
    for (const auto& path : {json_path, bin_path}) {
      const auto back = load_point_cloud_dataset(path);
      ASSERT_EQ(back.size(), ds.size());
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_EQ(back.measures[i], ds.measures[i]) << path;
        EXPECT_EQ(back.labels[i], ds.labels[i]);
      }
    }
  }
}

TEST(DatasetFiles, CsvExportHasHeaderAndRows) {
  TempDir dir;
  const auto ds = make_dataset({empirical_from_points({{1.5, 2}, {3, 4}})}, {1});
  export_dataset_csv(ds, dir.path() / "c.csv");
  std::ifstream in(dir.path() / "c.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "cloud,point,label,x0,x1");
  EXPECT_EQ(row, "0,0,1,1.5,2");
}

}  // namespace
}  // namespace otlaplace
