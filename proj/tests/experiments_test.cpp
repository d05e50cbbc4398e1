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
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "otlaplace/experiments.hpp"
#include "test_util.hpp"

namespace otlaplace {
namespace {

using testing::TempDir;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Config, DefaultsPerKind) {
  const auto pc = parse_config("{}", ExperimentKind::kPointcloud);
  EXPECT_EQ(pc.graph.k_neighbors, 15u);
  EXPECT_EQ(pc.m, 256u);
  const auto syn = parse_config(R"({"kind": "synthetic2d"})");
  EXPECT_DOUBLE_EQ(*syn.graph.epsilon_factor, 1.1);
  EXPECT_FALSE(syn.graph.normalize);
  const auto cons = parse_config("{}", ExperimentKind::kConsistency);
  EXPECT_TRUE(cons.graph.normalize);
  EXPECT_EQ(cons.n_values, (std::vector<std::size_t>{500, 1000, 2000}));
}

TEST(Config, Overrides) {
  const auto c = parse_config(R"({
    "kind": "synthetic2d", "n_values": [100, 200], "m": 20, "p": 3,
    "label_rates": [0.1, 0.5], "trials": 4, "graph": {"k_neighbors": 7},
    "metric": "w2", "seed": 18446744073709551615, "jobs": 2, "max_iter": 50, "tol": 1e-6
  })");
  EXPECT_EQ(c.n_values, (std::vector<std::size_t>{100, 200}));
  EXPECT_EQ(c.p, 3.0);
  EXPECT_EQ(c.graph.k_neighbors, 7u);
  EXPECT_FALSE(c.graph.epsilon_factor.has_value());
  EXPECT_EQ(c.metric, MetricKind::kW2);
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  const auto round_trip = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(round_trip), config_to_json(c));
}

TEST(Config, Errors) {
  const char* bad[] = {
      "not json",
      "[]",
      R"({"kind": "nope"})",
      R"({"kind": "synthetic2d", "label_rates": [0]})",
      R"({"kind": "synthetic2d", "label_rates": [1.5]})",
      R"({"kind": "synthetic2d", "trials": 0})",
      R"({"kind": "synthetic2d", "graph": {"k_neighbors": 5, "epsilon_factor": 1}})",
      R"({"kind": "synthetic2d", "graph": {"epsilon": -1}})",
      R"({"kind": "synthetic2d", "mystery": 1})",
      R"({"kind": "synthetic2d", "m": -3})",
      R"({"kind": "synthetic2d", "metric": "l1"})",
      R"({"kind": "synthetic2d", "p": 1.5})",
      R"({"kind": "consistency", "graph": {"k_neighbors": 5}})",
      R"({"kind": "rates", "m_values": [10, 5]})",
      R"({"kind": "synthetic2d", "dataset": "x.json"})",
  };
  for (const char* text : bad) {
    SCOPED_TRACE(text);
    EXPECT_OTL_ERROR(parse_config(text), Errc::kConfigError);
  }
  EXPECT_OTL_ERROR(parse_config(R"({"kind": "rates"})", ExperimentKind::kPointcloud),
                   Errc::kConfigError);
  EXPECT_OTL_ERROR(parse_config("{}"), Errc::kConfigError);
  EXPECT_OTL_ERROR(load_config("/nonexistent/config.json"), Errc::kIoError);
}

TEST(Primitives, ShapeAndDeterminism) {
  PrimitiveSpec spec;
  spec.n = 12;
  spec.m = 30;
  const auto a = sample_primitive_clouds(spec, 5);
  const auto b = sample_primitive_clouds(spec, 5);
  ASSERT_EQ(a.size(), 12u);
  EXPECT_EQ(a.n_classes, 4);
  EXPECT_EQ(a.ambient_dim(), 3u);
  std::vector<int> counts(4, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.measures[i], b.measures[i]);
    ++counts[*a.labels[i]];
  }
  EXPECT_EQ(counts, (std::vector<int>{3, 3, 3, 3}));
  spec.noise = -1;
  EXPECT_OTL_ERROR(sample_primitive_clouds(spec, 1), Errc::kInvalidSpec);
}

TEST(Primitives, PlateIsFlatWithoutNoise) {
  PrimitiveSpec spec;
  spec.n = 8;
  spec.m = 50;
  spec.noise = 0.0;
  spec.full_rotation = false;
  const auto d = sample_primitive_clouds(spec, 3);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (*d.labels[i] != 3) continue;
    for (std::size_t j = 0; j < d.measures[i].size(); ++j) {
      EXPECT_EQ(d.measures[i].point(j)[2], 0.0);
    }
  }
}

ExperimentConfig small_synthetic() {
  auto c = parse_config(R"({"kind": "synthetic2d", "n_values": [120], "m": 20,
                            "label_rates": [0.05, 0.3, 0.9], "trials": 6, "seed": 17})");
  return c;
}

TEST(Accuracy, ReportShape) {
  const auto r = run_accuracy_experiment(small_synthetic());
  EXPECT_EQ(r.rows.size(), 18u);
  EXPECT_EQ(r.epsilons.size(), 6u);
  ASSERT_EQ(r.summary.size(), 3u);
  for (const auto& s : r.summary) {
    EXPECT_GE(s.mean, 0.0);
    EXPECT_LE(s.mean, 1.0);
    EXPECT_NEAR(s.ci_high - s.mean, 1.96 * s.se, 1e-12);
    EXPECT_LE(s.mean_residual, 1e-8);
  }
  for (const auto& e : r.epsilons) EXPECT_NEAR(e.epsilon, 1.1 * e.connectivity, 1e-12);
}

TEST(Accuracy, NondecreasingInLabelRate) {
  const auto r = run_accuracy_experiment(small_synthetic());
  for (std::size_t i = 1; i < r.summary.size(); ++i) {
    const auto& lo = r.summary[i - 1];
    const auto& hi = r.summary[i];
    EXPECT_GT(hi.mean, lo.mean - 2.0 * std::hypot(lo.se, hi.se));
  }
}

TEST(Accuracy, ParallelTrialsMatchSerial) {
  auto c = small_synthetic();
  const auto serial = run_accuracy_experiment(c);
  c.jobs = 3;
  const auto parallel = run_accuracy_experiment(c);
  ASSERT_EQ(serial.rows.size(), parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    EXPECT_EQ(serial.rows[i].accuracy, parallel.rows[i].accuracy);
  }
}

TEST(Accuracy, PGreaterThanTwoAndW2Metric) {
  auto c = parse_config(R"({"kind": "synthetic2d", "n_values": [40], "m": 8, "p": 3,
                            "label_rates": [0.5], "trials": 2, "metric": "w2"})");
  const auto r = run_accuracy_experiment(c);
  EXPECT_EQ(r.summary.front().nonconverged, 0u);
  EXPECT_GT(r.summary.front().mean, 0.5);
}

TEST(Accuracy, EpsilonShrinksWithN) {
  auto c = parse_config(R"({"kind": "synthetic2d", "n_values": [100, 200, 400, 800], "m": 30,
                            "trials": 3, "seed": 4})");
  const auto r = run_accuracy_experiment(c);
  std::vector<double> mean_eps;
  for (std::size_t n : c.n_values) {
    double s = 0;
    for (const auto& e : r.epsilons) {
      if (e.n == n) s += e.epsilon / 3.0;
    }
    mean_eps.push_back(s);
  }
  int violations = 0;
  for (std::size_t i = 1; i < mean_eps.size(); ++i) violations += mean_eps[i] > mean_eps[i - 1];
  EXPECT_LE(violations, 1);
}

TEST(Accuracy, LoadedPointCloudDataset) {
  TempDir dir;
  PrimitiveSpec spec;
  spec.n = 80;
  spec.m = 64;
  const auto data = sample_primitive_clouds(spec, 2);
  const auto path = dir.path() / "clouds.bin";
  save_dataset_binary(data, path);
  auto c = parse_config(R"({"kind": "pointcloud", "label_rates": [0.5], "trials": 2,
                            "graph": {"k_neighbors": 5}, "majority_fallback": true})");
  c.dataset = path;
  const auto r = run_accuracy_experiment(c);
  EXPECT_EQ(r.rows.front().n, 80u);
  EXPECT_GT(r.summary.front().mean, 0.5);

  std::vector<std::optional<int>> partial(data.labels);
  partial.back().reset();
  save_dataset_binary(make_dataset(data.measures, partial, 4), path);
  EXPECT_OTL_ERROR(run_accuracy_experiment(c), Errc::kConfigError);
}

TEST(Consistency, RelativeErrorSmall) {
  auto c = parse_config(R"({"kind": "consistency", "n_values": [300], "trials": 3})");
  const auto rows = run_consistency_experiment(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].continuum, 2.0 / 3.0, 1e-12);
  EXPECT_LT(rows[0].relative_error, 0.15);
  EXPECT_GT(rows[0].epsilon, 0.0);
}

TEST(TlpDemo, ReferenceRowIsZero) {
  auto c = parse_config(R"({"kind": "tlp_demo", "n_values": [30, 60], "trials": 2,
                            "base_m": 4})");
  const auto rows = run_tlp_demo(c);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2].distance, 0.0);
  EXPECT_EQ(rows[3].distance, 0.0);
  EXPECT_GT(rows[0].distance, 0.0);
}

TEST(RunExperiment, FilesAreByteIdenticalAcrossReruns) {
  TempDir a, b;
  for (const char* text :
       {R"({"kind": "synthetic2d", "n_values": [60], "m": 10, "trials": 2})",
        R"({"kind": "consistency", "n_values": [100], "trials": 2})",
        R"({"kind": "rates", "m_values": [4, 16], "trials": 3})",
        R"({"kind": "tlp_demo", "n_values": [20, 40], "trials": 1, "base_m": 3})"}) {
    auto c = parse_config(text);
    c.out_dir = a.path() / "run";
    const auto first = run_experiment(c);
    c.out_dir = b.path() / "run";
    c.jobs = 2;
    const auto second = run_experiment(c);
    ASSERT_EQ(first, second);
    for (const auto& name : first) {
      // The config echo carries out_dir and jobs; everything else must match.
      if (name == "summary.json") continue;
      EXPECT_EQ(slurp(a.path() / "run" / name), slurp(b.path() / "run" / name)) << name;
    }
  }
}

TEST(RunExperiment, CsvHeaders) {
  TempDir dir;
  auto c = parse_config(R"({"kind": "synthetic2d", "n_values": [50], "m": 10, "trials": 1})");
  c.out_dir = dir.path();
  run_experiment(c);
  std::ifstream in(dir.path() / "accuracy.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "n,label_rate,trial,accuracy");
  std::ifstream eps(dir.path() / "epsilons.csv");
  std::getline(eps, header);
  EXPECT_EQ(header, "n,trial,connectivity_epsilon,epsilon");
  EXPECT_EQ(slurp(dir.path() / "accuracy.csv").find('\r'), std::string::npos);
}

#ifdef OTLAPLACE_CLI
int run_cli(const std::string& args) {
  const int status = std::system((std::string(OTLAPLACE_CLI) + " " + args + " 2>/dev/null >/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const auto config = dir.path() / "c.json";
  std::ofstream(config) << R"({"n_values": [40], "m": 8, "trials": 1})";
  EXPECT_EQ(run_cli("synthetic2d --config " + config.string() + " --out " +
                    (dir.path() / "out").string()),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "out" / "summary.json"));
  EXPECT_EQ(run_cli("bogus"), exit_code(Errc::kConfigError));
  EXPECT_EQ(run_cli("synthetic2d --config /nonexistent.json"), exit_code(Errc::kIoError));
  std::ofstream(config) << R"({"trials": 0})";
  EXPECT_EQ(run_cli("synthetic2d --config " + config.string()), exit_code(Errc::kConfigError));
  EXPECT_EQ(run_cli("synthetic2d --jobs 0"), 105);  // CLI11 validation failure
}

TEST(Cli, ByteIdenticalReruns) {
  TempDir dir;
  const auto config = dir.path() / "c.json";
  std::ofstream(config) << R"({"n_values": [40], "m": 8, "trials": 2, "label_rates": [0.3, 0.6]})";
  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(run_cli("synthetic2d --seed 5 --config " + config.string() + " --out " +
                      (dir.path() / "x").string() + " && mv " + (dir.path() / "x").string() +
                      " " + (dir.path() / out).string()),
              0);
  }
  for (const char* name : {"accuracy.csv", "epsilons.csv", "summary.json"}) {
    EXPECT_EQ(slurp(dir.path() / "a" / name), slurp(dir.path() / "b" / name)) << name;
  }
}
#endif

}  // namespace
}  // namespace otlaplace
