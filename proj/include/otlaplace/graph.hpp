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
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "otlaplace/lot.hpp"
#include "otlaplace/measures.hpp"
#include "otlaplace/transport.hpp"

namespace otlaplace {

// Radial profile eta: [0, inf) -> [0, inf). Non-increasing, positive at zero,
// zero beyond support_radius(). Checked when constructed.
class Kernel {
 public:
  enum class Kind { kIndicator, kTriangular, kTable };

  // a on [0, r), 0 from r on.
  static Kernel indicator(double a = 1.0, double r = 1.0, int intrinsic_dim = 0);
  // (1 - t/R)_+.
  static Kernel triangular(double radius = 1.0, int intrinsic_dim = 0);
  // values[i] on [breakpoints[i], breakpoints[i+1]); breakpoints[0] = 0 and
  // the last breakpoint is the support radius.
  static Kernel table(std::vector<double> breakpoints, std::vector<double> values,
                      int intrinsic_dim = 0);

  double operator()(double t) const noexcept;
  double support_radius() const noexcept { return knots_.back(); }
  Kind kind() const noexcept { return kind_; }
  int intrinsic_dim() const noexcept { return intrinsic_dim_; }
  // Points where eta or its derivative may jump, ascending, starting at 0.
  const std::vector<double>& knots() const noexcept { return knots_; }

  Kernel with_intrinsic_dim(int d) const;

 private:
  Kernel(Kind kind, std::vector<double> knots, std::vector<double> values, int d);
  void check_admissible() const;

  Kind kind_;
  std::vector<double> knots_;
  std::vector<double> values_;
  int intrinsic_dim_ = 0;
};

// Dense symmetric n x n matrix with zero diagonal.
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return values[i * n + j];
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {values.data() + i * n, n};
  }
};

struct W2Metric {
  TransportOptions transport;
};
struct LotMetric {
  const LotEmbedding* embedding = nullptr;
};
using Metric = std::variant<W2Metric, LotMetric>;

// Errors: ShapeMismatch (embedding does not match the dataset) and transport
// errors.
DistanceMatrix pairwise_distances(const LabeledDataset& dataset, const Metric& metric,
                                  std::size_t jobs = 1);
// Rows of a flat n x dim array.
DistanceMatrix euclidean_distances(std::span<const double> points, std::size_t dim,
                                   std::size_t jobs = 1);

enum class GraphKind { kEpsilon, kKnn };

// Symmetric sparse weights in CSR form; each undirected edge is stored in
// both rows and no diagonal entries are kept.
struct WeightedGraph {
  std::size_t n = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> targets;
  std::vector<double> weights;
  double epsilon = 1.0;
  Kernel kernel = Kernel::indicator();
  GraphKind kind = GraphKind::kEpsilon;

  std::size_t num_edges() const noexcept { return targets.size() / 2; }
  std::span<const std::size_t> neighbors(std::size_t i) const noexcept {
    return {targets.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  std::span<const double> neighbor_weights(std::size_t i) const noexcept {
    return {weights.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  double degree(std::size_t i) const noexcept;
  // 0 when there is no edge.
  double weight(std::size_t i, std::size_t j) const noexcept;
};

struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double w = 0.0;
};

// Builds a graph from undirected edges (any orientation, no duplicates).
// Errors: IndexOutOfRange, InvalidSpec (self-loop, non-positive weight).
WeightedGraph graph_from_edges(std::size_t n, const std::vector<Edge>& edges,
                               double epsilon = 1.0, Kernel kernel = Kernel::indicator(),
                               GraphKind kind = GraphKind::kEpsilon);

struct EpsilonGraphOptions {
  // Multiply weights by 1/epsilon^d with d = kernel.intrinsic_dim().
  bool normalize = true;
};

// w_ij = eta(d_ij / epsilon) [/ epsilon^d], edges with w_ij > 0 only.
// Errors: InvalidEpsilon.
WeightedGraph epsilon_graph(const DistanceMatrix& distances, double epsilon,
                            const Kernel& kernel, const EpsilonGraphOptions& options = {});

// Unit weights; i~j iff either is among the other's k nearest (ties by index).
// Errors: InvalidK.
WeightedGraph knn_graph(const DistanceMatrix& distances, std::size_t k);

// Largest edge of a minimum spanning tree. Errors: DegenerateInput.
double connectivity_epsilon(const DistanceMatrix& distances);

bool is_connected(const WeightedGraph& graph);

// Component id per node, numbered in order of first appearance.
std::vector<std::size_t> connected_components(const WeightedGraph& graph);

// "i,j,w" with i < j.
void write_edge_list_csv(const WeightedGraph& graph, const std::filesystem::path& path);
void write_distance_csv(const DistanceMatrix& distances, const std::filesystem::path& path);

}  // namespace otlaplace
