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

#include "otlaplace/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "otlaplace/dirichlet.hpp"
#include "otlaplace/error.hpp"
#include "otlaplace/graph.hpp"
#include "otlaplace/laplace_learn.hpp"
#include "otlaplace/lot.hpp"
#include "otlaplace/parallel.hpp"
#include "otlaplace/rng.hpp"
#include "otlaplace/tlp.hpp"

namespace otlaplace {

using json = nlohmann::json;

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 5> kKindNames{{
    {ExperimentKind::kSynthetic2d, "synthetic2d"},
    {ExperimentKind::kPointcloud, "pointcloud"},
    {ExperimentKind::kConsistency, "consistency"},
    {ExperimentKind::kRates, "rates"},
    {ExperimentKind::kTlpDemo, "tlp_demo"},
}};

[[noreturn]] void config_error(const std::string& message) {
  fail(Errc::kConfigError, message);
}

// ---------------------------------------------------------------------------
// Primitive surfaces.

using Vec3 = std::array<double, 3>;

Vec3 sample_box(CounterRng& rng) {
  const auto face = rng.below(6);
  Vec3 x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  x[face / 2] = face % 2 == 0 ? -1.0 : 1.0;
  return x;
}

Vec3 sample_sphere(CounterRng& rng) {
  Vec3 x{rng.normal(), rng.normal(), rng.normal()};
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  for (auto& c : x) c /= r;
  return x;
}

Vec3 sample_cylinder(CounterRng& rng) {
  const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {std::cos(t), std::sin(t), rng.uniform(-1, 1)};
}

Vec3 sample_plate(CounterRng& rng) { return {rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0}; }

// Rotation matrix, row-major.
std::array<double, 9> random_rotation(CounterRng& rng, bool full) {
  if (!full) {
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double c = std::cos(t), s = std::sin(t);
    return {c, -s, 0, s, c, 0, 0, 0, 1};
  }
  double q[4];
  double norm = 0.0;
  for (auto& v : q) {
    v = rng.normal();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : q) v /= norm;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
          2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
          2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

// ---------------------------------------------------------------------------
// Config parsing.

ExperimentConfig defaults_for(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::kSynthetic2d:
      c.graph.epsilon_factor = 1.1;
      break;
    case ExperimentKind::kPointcloud:
      c.n_values = {400};
      c.m = 256;
      c.label_rates = {0.2, 0.8};
      c.graph.k_neighbors = 15;
      break;
    case ExperimentKind::kConsistency:
      c.n_values = {500, 1000, 2000};
      c.graph.epsilon_factor = 2.0;
      c.graph.normalize = true;
      break;
    case ExperimentKind::kRates:
      c.trials = 50;
      break;
    case ExperimentKind::kTlpDemo:
      c.n_values = {50, 100, 200, 400};
      c.label_rates = {0.1};
      c.graph.epsilon_factor = 2.0;
      break;
  }
  return c;
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    config_error(std::string("field '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    config_error(std::string("field '") + key + "' must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::vector<std::size_t> get_counts(const json& j, const char* key) {
  if (!j.is_array()) config_error(std::string("field '") + key + "' must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : j) out.push_back(get_count(v, key));
  return out;
}

double get_number(const json& j, const char* key) {
  if (!j.is_number()) config_error(std::string("field '") + key + "' must be a number");
  return j.get<double>();
}

void apply_graph(const json& j, GraphPolicy& g) {
  if (!j.is_object()) config_error("field 'graph' must be an object");
  GraphPolicy out;
  out.normalize = g.normalize;
  for (const auto& [key, value] : j.items()) {
    if (key == "epsilon_factor") {
      out.epsilon_factor = get_number(value, "epsilon_factor");
    } else if (key == "epsilon") {
      out.epsilon = get_number(value, "epsilon");
    } else if (key == "k_neighbors") {
      out.k_neighbors = get_count(value, "k_neighbors");
    } else if (key == "normalize") {
      out.normalize = get_as<bool>(value, "normalize");
    } else {
      config_error("unknown graph field '" + key + "'");
    }
  }
  // A graph object that only flips normalization keeps the default policy.
  if (!out.epsilon_factor && !out.epsilon && !out.k_neighbors) {
    out.epsilon_factor = g.epsilon_factor;
    out.epsilon = g.epsilon;
    out.k_neighbors = g.k_neighbors;
  }
  g = out;
}

void apply_primitives(const json& j, PrimitiveSpec& p) {
  if (!j.is_object()) config_error("field 'primitives' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "scale_jitter") {
      p.scale_jitter = get_number(value, "scale_jitter");
    } else if (key == "full_rotation") {
      p.full_rotation = get_as<bool>(value, "full_rotation");
    } else if (key == "noise") {
      p.noise = get_number(value, "noise");
    } else {
      config_error("unknown primitives field '" + key + "'");
    }
  }
}

json graph_to_json(const GraphPolicy& g) {
  json j;
  if (g.epsilon_factor) j["epsilon_factor"] = *g.epsilon_factor;
  if (g.epsilon) j["epsilon"] = *g.epsilon;
  if (g.k_neighbors) j["k_neighbors"] = *g.k_neighbors;
  j["normalize"] = g.normalize;
  return j;
}

// ---------------------------------------------------------------------------
// Shared experiment plumbing.

std::uint64_t trial_seed(const ExperimentConfig& c, std::size_t trial) {
  return c.seed ^ static_cast<std::uint64_t>(trial);
}

std::size_t inner_jobs(const ExperimentConfig& c) {
  return std::max<std::size_t>(1, c.jobs / std::max<std::size_t>(1, std::min(c.trials, c.jobs)));
}

DistanceMatrix distances_for(const LabeledDataset& data, MetricKind metric, std::size_t jobs) {
  if (metric == MetricKind::kW2) return pairwise_distances(data, W2Metric{}, jobs);
  LotOptions lot;
  lot.jobs = jobs;
  const auto embedding = lot_embed(data, 0, lot);
  return pairwise_distances(data, LotMetric{&embedding}, jobs);
}

struct BuiltGraph {
  WeightedGraph graph;
  double connectivity = 0.0;
  double epsilon = 0.0;
};

BuiltGraph build_graph(const DistanceMatrix& d, const GraphPolicy& policy, int intrinsic_dim) {
  BuiltGraph out;
  out.connectivity = connectivity_epsilon(d);
  if (policy.k_neighbors) {
    out.graph = knn_graph(d, *policy.k_neighbors);
    return out;
  }
  out.epsilon = policy.epsilon ? *policy.epsilon : *policy.epsilon_factor * out.connectivity;
  EpsilonGraphOptions options;
  options.normalize = policy.normalize;
  out.graph = epsilon_graph(d, out.epsilon, Kernel::indicator(1.0, 1.0, intrinsic_dim), options);
  return out;
}

double mean_of(std::span<const double> v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

double sd_of(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
}

// Base cloud shared by the translation-family runs: isotropic Gaussian in R^2.
EmpiricalMeasure base_cloud(std::size_t m, std::uint64_t seed) {
  CounterRng rng(derive_seed(seed, 0x62617365));
  std::vector<double> coords(2 * m);
  for (auto& c : coords) c = rng.normal();
  return EmpiricalMeasure::from_flat(2, std::move(coords));
}

std::vector<std::vector<double>> uniform_thetas(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::vector<double>> thetas(n);
  for (auto& t : thetas) t = {rng.uniform()};
  return thetas;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(Errc::kIoError, "cannot write " + path.string());
}

std::string fmt(double v) { return detail::format_double(v); }

}  // namespace

std::string_view experiment_kind_name(ExperimentKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  config_error("unknown experiment kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

LabeledDataset sample_primitive_clouds(const PrimitiveSpec& spec, std::uint64_t seed) {
  if (spec.n == 0 || spec.m == 0) fail(Errc::kInvalidSpec, "n and m must be positive");
  if (!(spec.scale_jitter >= 0.0 && spec.scale_jitter < 1.0) || !(spec.noise >= 0.0)) {
    fail(Errc::kInvalidSpec, "scale_jitter must lie in [0, 1) and noise must be >= 0");
  }
  CounterRng order_rng(derive_seed(seed, 0));
  std::vector<int> classes(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) classes[i] = static_cast<int>(i % 4);
  order_rng.shuffle(std::span<int>(classes));

  std::vector<EmpiricalMeasure> measures;
  std::vector<std::optional<int>> labels;
  measures.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    CounterRng rng(derive_seed(seed, i + 1));
    Vec3 scale;
    for (auto& s : scale) s = rng.uniform(1.0 - spec.scale_jitter, 1.0 + spec.scale_jitter);
    const auto rot = random_rotation(rng, spec.full_rotation);
    std::vector<double> coords;
    coords.reserve(3 * spec.m);
    for (std::size_t j = 0; j < spec.m; ++j) {
      Vec3 x;
      switch (classes[i]) {
        case 0: x = sample_box(rng); break;
        case 1: x = sample_sphere(rng); break;
        case 2: x = sample_cylinder(rng); break;
        default: x = sample_plate(rng); break;
      }
      for (int a = 0; a < 3; ++a) x[a] *= scale[a];
      for (int a = 0; a < 3; ++a) {
        coords.push_back(rot[3 * a] * x[0] + rot[3 * a + 1] * x[1] + rot[3 * a + 2] * x[2] +
                         spec.noise * rng.normal());
      }
    }
    measures.push_back(EmpiricalMeasure::from_flat(3, std::move(coords)));
    labels.push_back(classes[i]);
  }
  return make_dataset(std::move(measures), std::move(labels), 4);
}

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  const bool accuracy = kind == ExperimentKind::kSynthetic2d || kind == ExperimentKind::kPointcloud;
  if (n_values.empty()) config_error("n_values is empty");
  for (std::size_t n : n_values) {
    if (n < 2) config_error("every n must be at least 2");
  }
  if (m == 0) config_error("m must be positive");
  if (trials == 0) config_error("trials must be at least 1");
  if (jobs == 0) config_error("jobs must be at least 1");
  if (!std::isfinite(p) || p < (kind == ExperimentKind::kConsistency ? 1.0 : 2.0)) {
    config_error("p out of range");
  }
  if (accuracy || kind == ExperimentKind::kTlpDemo) {
    if (label_rates.empty()) config_error("label_rates is empty");
    for (double r : label_rates) {
      if (!(r > 0.0 && r <= 1.0)) config_error("label rates must lie in (0, 1]");
    }
  }
  const int policies = static_cast<int>(graph.epsilon_factor.has_value()) +
                       static_cast<int>(graph.epsilon.has_value()) +
                       static_cast<int>(graph.k_neighbors.has_value());
  if (kind != ExperimentKind::kRates && policies != 1) {
    config_error("exactly one graph policy must be set");
  }
  if (graph.epsilon_factor && !(*graph.epsilon_factor > 0.0)) {
    config_error("epsilon_factor must be positive");
  }
  if (graph.epsilon && !(*graph.epsilon > 0.0)) config_error("epsilon must be positive");
  if (graph.k_neighbors && *graph.k_neighbors == 0) config_error("k_neighbors must be positive");
  if ((kind == ExperimentKind::kConsistency || kind == ExperimentKind::kTlpDemo) &&
      graph.k_neighbors) {
    config_error("translation-family runs need an epsilon graph");
  }
  if (max_iter == 0 || !(tol >= 0.0)) config_error("max_iter must be positive and tol >= 0");
  if (k < 1) config_error("k must be at least 1");
  if (kind == ExperimentKind::kRates) {
    if (m_values.empty()) config_error("m_values is empty");
    for (std::size_t i = 0; i < m_values.size(); ++i) {
      if (m_values[i] < 2 || (i > 0 && m_values[i] <= m_values[i - 1])) {
        config_error("m_values must be strictly increasing and at least 2");
      }
    }
  }
  if (base_m == 0) config_error("base_m must be positive");
  if (dataset && kind != ExperimentKind::kPointcloud) {
    config_error("'dataset' only applies to pointcloud runs");
  }
}

ExperimentConfig parse_config(std::string_view json_text, std::optional<ExperimentKind> kind_hint) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  std::optional<ExperimentKind> kind = kind_hint;
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) config_error("field 'kind' must be a string");
    const auto named = parse_experiment_kind(j["kind"].get<std::string>());
    if (kind && *kind != named) config_error("config kind does not match the command");
    kind = named;
  }
  if (!kind) config_error("experiment kind missing");
  ExperimentConfig c = defaults_for(*kind);

  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      continue;
    } else if (key == "n") {
      c.n_values = {get_count(value, "n")};
    } else if (key == "n_values") {
      c.n_values = get_counts(value, "n_values");
    } else if (key == "m") {
      c.m = get_count(value, "m");
    } else if (key == "p") {
      c.p = get_number(value, "p");
    } else if (key == "label_rate") {
      c.label_rates = {get_number(value, "label_rate")};
    } else if (key == "label_rates") {
      if (!value.is_array()) config_error("field 'label_rates' must be an array");
      c.label_rates.clear();
      for (const auto& r : value) c.label_rates.push_back(get_number(r, "label_rates"));
    } else if (key == "trials") {
      c.trials = get_count(value, "trials");
    } else if (key == "graph") {
      apply_graph(value, c.graph);
    } else if (key == "metric") {
      const auto name = get_as<std::string>(value, "metric");
      if (name == "lot") {
        c.metric = MetricKind::kLot;
      } else if (name == "w2") {
        c.metric = MetricKind::kW2;
      } else {
        config_error("metric must be 'lot' or 'w2'");
      }
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) config_error("field 'seed' must be a nonnegative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "jobs") {
      c.jobs = get_count(value, "jobs");
    } else if (key == "out_dir") {
      c.out_dir = get_as<std::string>(value, "out_dir");
    } else if (key == "majority_fallback") {
      c.majority_fallback = get_as<bool>(value, "majority_fallback");
    } else if (key == "max_iter") {
      c.max_iter = get_count(value, "max_iter");
    } else if (key == "tol") {
      c.tol = get_number(value, "tol");
    } else if (key == "dataset") {
      c.dataset = get_as<std::string>(value, "dataset");
    } else if (key == "primitives") {
      apply_primitives(value, c.primitives);
    } else if (key == "k") {
      c.k = static_cast<int>(get_count(value, "k"));
    } else if (key == "m_values") {
      c.m_values = get_counts(value, "m_values");
    } else if (key == "proxy_m") {
      c.proxy_m = get_count(value, "proxy_m");
    } else if (key == "base_m") {
      c.base_m = get_count(value, "base_m");
    } else {
      config_error("unknown config field '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<ExperimentKind> kind_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIoError, "cannot read " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), kind_hint);
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = experiment_kind_name(c.kind);
  j["n_values"] = c.n_values;
  j["m"] = c.m;
  j["p"] = c.p;
  j["label_rates"] = c.label_rates;
  j["trials"] = c.trials;
  j["graph"] = graph_to_json(c.graph);
  j["metric"] = c.metric == MetricKind::kLot ? "lot" : "w2";
  j["seed"] = c.seed;
  j["majority_fallback"] = c.majority_fallback;
  j["max_iter"] = c.max_iter;
  j["tol"] = c.tol;
  if (c.dataset) j["dataset"] = c.dataset->string();
  j["primitives"] = {{"scale_jitter", c.primitives.scale_jitter},
                     {"full_rotation", c.primitives.full_rotation},
                     {"noise", c.primitives.noise}};
  j["k"] = c.k;
  j["m_values"] = c.m_values;
  j["proxy_m"] = c.proxy_m;
  j["base_m"] = c.base_m;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

AccuracyReport run_accuracy_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.kind != ExperimentKind::kSynthetic2d && config.kind != ExperimentKind::kPointcloud) {
    config_error("not an accuracy experiment");
  }
  const std::size_t jobs = inner_jobs(config);
  const std::size_t rates = config.label_rates.size();

  // A fixed input dataset shares one distance matrix across trials.
  std::optional<LabeledDataset> fixed;
  std::optional<DistanceMatrix> fixed_distances;
  std::vector<std::size_t> n_values = config.n_values;
  if (config.dataset) {
    fixed = load_point_cloud_dataset(*config.dataset);
    for (const auto& l : fixed->labels) {
      if (!l) config_error("pointcloud datasets need every label for scoring");
    }
    fixed_distances = distances_for(*fixed, config.metric, config.jobs);
    n_values = {fixed->size()};
  }

  struct TrialResult {
    std::vector<double> accuracy, residual;
    std::vector<char> converged;
    double connectivity = 0.0, epsilon = 0.0;
  };

  AccuracyReport report;
  for (std::size_t n : n_values) {
    std::vector<TrialResult> results(config.trials);
    parallel_for(config.trials, config.jobs, [&](std::size_t trial) {
      const std::uint64_t seed = trial_seed(config, trial);
      LabeledDataset generated;
      const LabeledDataset* data = fixed ? &*fixed : nullptr;
      if (!fixed) {
        if (config.kind == ExperimentKind::kSynthetic2d) {
          GaussianFamilySpec spec;
          spec.n = n;
          spec.m = config.m;
          generated = sample_gaussian_family(spec, derive_seed(seed, n));
        } else {
          PrimitiveSpec spec = config.primitives;
          spec.n = n;
          spec.m = config.m;
          generated = sample_primitive_clouds(spec, derive_seed(seed, n));
        }
        data = &generated;
      }
      std::optional<DistanceMatrix> own;
      if (!fixed) own = distances_for(*data, config.metric, jobs);
      const DistanceMatrix& d = fixed ? *fixed_distances : *own;
      const auto built = build_graph(d, config.graph, 0);

      std::vector<int> truth(n);
      for (std::size_t i = 0; i < n; ++i) truth[i] = *data->labels[i];
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      CounterRng mask_rng(derive_seed(seed, 0x6d61736b00000000ULL ^ n));
      mask_rng.shuffle(std::span<std::size_t>(order));

      auto& out = results[trial];
      out.connectivity = built.connectivity;
      out.epsilon = built.epsilon;
      for (double rate : config.label_rates) {
        const auto labeled_count = static_cast<std::size_t>(
            std::clamp<long long>(std::llround(rate * static_cast<double>(n)), 1,
                                  static_cast<long long>(n)));
        std::vector<std::optional<int>> labels(n);
        const std::span<const std::size_t> labeled(order.data(), labeled_count);
        for (std::size_t i : labeled) labels[i] = truth[i];
        LearnOptions learn;
        learn.majority_fallback = config.majority_fallback;
        LearnResult result;
        if (config.p == 2.0) {
          result = solve_p2(built.graph, labels, data->n_classes, learn);
        } else {
          PSolveOptions ps;
          ps.max_iter = config.max_iter;
          ps.tol = config.tol;
          ps.learn = learn;
          result = solve_p(built.graph, labels, data->n_classes, config.p, ps);
        }
        out.accuracy.push_back(predict_and_score(result, truth, labeled).accuracy);
        out.residual.push_back(result.residual);
        out.converged.push_back(result.converged ? 1 : 0);
      }
    });

    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      report.epsilons.push_back({n, trial, results[trial].connectivity, results[trial].epsilon});
      for (std::size_t r = 0; r < rates; ++r) {
        report.rows.push_back({n, config.label_rates[r], trial, results[trial].accuracy[r]});
      }
    }
    for (std::size_t r = 0; r < rates; ++r) {
      std::vector<double> acc, res;
      AccuracySummary s;
      for (const auto& t : results) {
        acc.push_back(t.accuracy[r]);
        res.push_back(t.residual[r]);
        s.nonconverged += t.converged[r] ? 0 : 1;
      }
      s.n = n;
      s.label_rate = config.label_rates[r];
      s.trials = config.trials;
      s.mean = mean_of(acc);
      s.sd = sd_of(acc, s.mean);
      s.se = s.sd / std::sqrt(static_cast<double>(config.trials));
      s.ci_low = s.mean - 1.96 * s.se;
      s.ci_high = s.mean + 1.96 * s.se;
      s.mean_residual = mean_of(res);
      report.summary.push_back(s);
    }
  }
  return report;
}

std::vector<ConsistencyRow> run_consistency_experiment(const ExperimentConfig& config) {
  config.validate();
  ContinuumSpec spec;
  spec.density = BoxDensity::uniform({0.0}, {1.0});
  spec.f = QuadraticFunction::linear({1.0});
  spec.kernel = Kernel::indicator(1.0, 1.0, 1);
  spec.p = config.p;
  const double continuum = continuum_energy(spec, 64).value;
  const std::size_t jobs = inner_jobs(config);

  std::vector<ConsistencyRow> rows;
  for (std::size_t n : config.n_values) {
    std::vector<double> energy(config.trials), eps(config.trials);
    parallel_for(config.trials, config.jobs, [&](std::size_t trial) {
      const std::uint64_t seed = derive_seed(trial_seed(config, trial), n);
      const auto base = base_cloud(config.base_m, trial_seed(config, trial));
      auto family = sample_translation_family(base, uniform_thetas(n, seed), std::nullopt, seed);
      const auto d = distances_for(family.dataset, config.metric, jobs);
      const auto built = build_graph(d, config.graph, 1);
      std::vector<double> f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = family.thetas[i][0];
      energy[trial] = graph_dirichlet_energy(built.graph, f, config.p);
      eps[trial] = built.epsilon;
    });
    ConsistencyRow row;
    row.n = n;
    row.epsilon = mean_of(eps);
    row.discrete = mean_of(energy);
    row.discrete_se =
        sd_of(energy, row.discrete) / std::sqrt(static_cast<double>(config.trials));
    row.continuum = continuum;
    row.relative_error = std::abs(row.discrete - continuum) / continuum;
    rows.push_back(row);
  }
  return rows;
}

RateReport run_rates_experiment(const ExperimentConfig& config) {
  config.validate();
  RateOptions options;
  options.k = config.k;
  options.m_values = config.m_values;
  options.trials = config.trials;
  options.proxy_m = config.proxy_m;
  options.seed = config.seed;
  options.jobs = config.jobs;
  return empirical_w2_rate(options);
}

std::vector<TlpRow> run_tlp_demo(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::size_t> ns = config.n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  const std::size_t n_ref = ns.back();
  const std::size_t jobs = inner_jobs(config);

  std::vector<std::vector<TlpRow>> per_trial(config.trials);
  parallel_for(config.trials, config.jobs, [&](std::size_t trial) {
    const std::uint64_t seed = trial_seed(config, trial);
    const auto base = base_cloud(config.base_m, seed);
    const auto thetas = uniform_thetas(n_ref, derive_seed(seed, 1));

    // Solution on the first n nodes of the trial's sample.
    auto solve_prefix = [&](std::size_t n) {
      std::vector<std::vector<double>> prefix(thetas.begin(), thetas.begin() + n);
      auto family = sample_translation_family(base, prefix, std::nullopt, seed);
      const auto d = distances_for(family.dataset, config.metric, jobs);
      const auto built = build_graph(d, config.graph, 1);
      const auto labeled = static_cast<std::size_t>(std::clamp<long long>(
          std::llround(config.label_rates.front() * static_cast<double>(n)), 2,
          static_cast<long long>(n)));
      std::vector<std::optional<int>> labels(n);
      for (std::size_t i = 0; i < labeled; ++i) labels[i] = prefix[i][0] > 0.5 ? 1 : 0;
      LearnOptions learn;
      learn.majority_fallback = true;
      const auto result = solve_p2(built.graph, labels, 2, learn);
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i) values[i] = result.value(i, 1);
      return FunctionOverMeasure::on_measures(std::move(family.dataset.measures),
                                              std::move(values));
    };

    const auto reference = solve_prefix(n_ref);
    TlpOptions tlp;
    tlp.jobs = jobs;
    for (std::size_t n : ns) {
      const double dist = n == n_ref ? 0.0 : tlp_distance(solve_prefix(n), reference, 2.0, tlp);
      per_trial[trial].push_back({n, trial, dist});
    }
  });
  std::vector<TlpRow> rows;
  for (std::size_t n_index = 0; n_index < ns.size(); ++n_index) {
    for (const auto& t : per_trial) rows.push_back(t[n_index]);
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::vector<std::string> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) fail(Errc::kIoError, "cannot create " + config.out_dir.string());
  const auto& dir = config.out_dir;
  json summary;
  summary["config"] = json::parse(config_to_json(config));
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    written.push_back(name);
  };

  switch (config.kind) {
    case ExperimentKind::kSynthetic2d:
    case ExperimentKind::kPointcloud: {
      const auto report = run_accuracy_experiment(config);
      std::string acc = "n,label_rate,trial,accuracy\n";
      for (const auto& r : report.rows) {
        acc += std::to_string(r.n) + "," + fmt(r.label_rate) + "," + std::to_string(r.trial) +
               "," + fmt(r.accuracy) + "\n";
      }
      emit("accuracy.csv", acc);
      std::string eps = "n,trial,connectivity_epsilon,epsilon\n";
      for (const auto& e : report.epsilons) {
        eps += std::to_string(e.n) + "," + std::to_string(e.trial) + "," + fmt(e.connectivity) +
               "," + fmt(e.epsilon) + "\n";
      }
      emit("epsilons.csv", eps);
      json results = json::array();
      for (const auto& s : report.summary) {
        results.push_back({{"n", s.n},
                           {"label_rate", s.label_rate},
                           {"trials", s.trials},
                           {"mean", s.mean},
                           {"sd", s.sd},
                           {"se", s.se},
                           {"ci95", {s.ci_low, s.ci_high}},
                           {"mean_residual", s.mean_residual},
                           {"nonconverged", s.nonconverged}});
      }
      summary["results"] = results;
      break;
    }
    case ExperimentKind::kConsistency: {
      const auto rows = run_consistency_experiment(config);
      std::string csv = "n,epsilon,discrete_energy,discrete_se,continuum_energy,relative_error\n";
      json results = json::array();
      for (const auto& r : rows) {
        csv += std::to_string(r.n) + "," + fmt(r.epsilon) + "," + fmt(r.discrete) + "," +
               fmt(r.discrete_se) + "," + fmt(r.continuum) + "," + fmt(r.relative_error) + "\n";
        results.push_back({{"n", r.n},
                           {"epsilon", r.epsilon},
                           {"discrete_energy", r.discrete},
                           {"discrete_se", r.discrete_se},
                           {"continuum_energy", r.continuum},
                           {"relative_error", r.relative_error}});
      }
      emit("consistency.csv", csv);
      summary["results"] = results;
      break;
    }
    case ExperimentKind::kRates: {
      const auto report = run_rates_experiment(config);
      write_rates_csv((dir / "rates.csv").string(), report);
      written.push_back("rates.csv");
      summary["results"] = {{"k", report.k},
                            {"exact", report.exact},
                            {"fitted_slope", report.fitted_slope},
                            {"fitted_intercept", report.fitted_intercept},
                            {"c_hat", report.c_hat},
                            {"all_dominated", report.all_dominated}};
      break;
    }
    case ExperimentKind::kTlpDemo: {
      const auto rows = run_tlp_demo(config);
      std::string csv = "n,trial,tlp_distance\n";
      for (const auto& r : rows) {
        csv += std::to_string(r.n) + "," + std::to_string(r.trial) + "," + fmt(r.distance) + "\n";
      }
      emit("tlp.csv", csv);
      json results = json::array();
      for (std::size_t start = 0; start < rows.size(); start += config.trials) {
        std::vector<double> d;
        for (std::size_t t = 0; t < config.trials; ++t) d.push_back(rows[start + t].distance);
        results.push_back({{"n", rows[start].n}, {"mean_tlp_distance", mean_of(d)}});
      }
      summary["results"] = results;
      break;
    }
  }
  emit("summary.json", summary.dump(2) + "\n");
  return written;
}

}  // namespace otlaplace
