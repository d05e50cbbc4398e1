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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "otlaplace/measures.hpp"
#include "otlaplace/rates.hpp"

namespace otlaplace {

enum class ExperimentKind { kSynthetic2d, kPointcloud, kConsistency, kRates, kTlpDemo };
enum class MetricKind { kW2, kLot };

std::string_view experiment_kind_name(ExperimentKind kind) noexcept;
// Errors: ConfigError.
ExperimentKind parse_experiment_kind(std::string_view name);

// Exactly one of epsilon_factor, epsilon, k_neighbors is set.
struct GraphPolicy {
  std::optional<double> epsilon_factor;  // times connectivity_epsilon
  std::optional<double> epsilon;         // absolute
  std::optional<std::size_t> k_neighbors;
  // Scale weights by 1/eps^d (consistency runs). Accuracy runs use 0/1 weights.
  bool normalize = false;
};

// Four primitive surfaces (box, sphere shell, cylinder shell, square plate),
// classes 0..3 in that order, with random anisotropic scaling, a random
// rotation and Gaussian jitter.
struct PrimitiveSpec {
  std::size_t n = 400;
  std::size_t m = 256;
  double scale_jitter = 0.5;   // each axis scaled by U[1 - s, 1 + s]
  bool full_rotation = false;  // uniform on SO(3) instead of about z only
  double noise = 0.1;
};

// Nodes come out in random order with every label populated.
LabeledDataset sample_primitive_clouds(const PrimitiveSpec& spec, std::uint64_t seed);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSynthetic2d;
  std::vector<std::size_t> n_values{800};
  std::size_t m = 100;
  double p = 2.0;
  std::vector<double> label_rates{0.2};
  std::size_t trials = 1;
  GraphPolicy graph;
  MetricKind metric = MetricKind::kLot;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::filesystem::path out_dir = ".";
  bool majority_fallback = false;
  // p > 2 solver.
  std::size_t max_iter = 5000;
  double tol = 1e-10;
  // pointcloud: pre-sampled clouds instead of generated primitives.
  std::optional<std::filesystem::path> dataset;
  PrimitiveSpec primitives;
  // rates.
  int k = 1;
  std::vector<std::size_t> m_values{10, 40, 160, 640, 2560};
  std::size_t proxy_m = 0;
  // consistency / tlp_demo: points in the base cloud.
  std::size_t base_m = 16;

  // Errors: ConfigError.
  void validate() const;
};

// JSON text to config; kind_hint fills a missing "kind". Errors: ConfigError.
ExperimentConfig parse_config(std::string_view json_text,
                              std::optional<ExperimentKind> kind_hint = std::nullopt);
// Errors: IoError, ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<ExperimentKind> kind_hint = std::nullopt);
std::string config_to_json(const ExperimentConfig& config);

// ---------------------------------------------------------------------------

struct AccuracyRow {
  std::size_t n = 0;
  double label_rate = 0.0;
  std::size_t trial = 0;
  double accuracy = 0.0;
};

struct EpsilonRow {
  std::size_t n = 0;
  std::size_t trial = 0;
  double connectivity = 0.0;
  double epsilon = 0.0;  // 0 for kNN graphs
};

struct AccuracySummary {
  std::size_t n = 0;
  double label_rate = 0.0;
  std::size_t trials = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double ci_low = 0.0;   // mean -/+ 1.96 se
  double ci_high = 0.0;
  double mean_residual = 0.0;
  std::size_t nonconverged = 0;
};

struct AccuracyReport {
  std::vector<AccuracyRow> rows;        // ordered by n, trial, rate
  std::vector<EpsilonRow> epsilons;     // ordered by n, trial
  std::vector<AccuracySummary> summary; // ordered by n, rate
};

// synthetic2d and pointcloud.
AccuracyReport run_accuracy_experiment(const ExperimentConfig& config);

struct ConsistencyRow {
  std::size_t n = 0;
  double epsilon = 0.0;        // mean over trials
  double discrete = 0.0;       // mean energy over trials
  double discrete_se = 0.0;
  double continuum = 0.0;
  double relative_error = 0.0; // |discrete - continuum| / continuum
};

// Translation family in one parameter: theta ~ U[0, 1], f(theta) = theta,
// eps = epsilon_factor * connectivity_epsilon, normalized indicator kernel.
std::vector<ConsistencyRow> run_consistency_experiment(const ExperimentConfig& config);

RateReport run_rates_experiment(const ExperimentConfig& config);

struct TlpRow {
  std::size_t n = 0;
  std::size_t trial = 0;
  double distance = 0.0;  // TL2 to the largest-n solution of the same trial
};

// Laplace learning of the label 1{theta > 1/2} on nested translation
// families; each solution is compared with the largest one in TL2 over W2.
std::vector<TlpRow> run_tlp_demo(const ExperimentConfig& config);

// Runs `config` and writes its report files into config.out_dir.
// Returns the names of the files written.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

}  // namespace otlaplace
