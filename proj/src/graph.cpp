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

#include "otlaplace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "otlaplace/error.hpp"
#include "otlaplace/parallel.hpp"

namespace otlaplace {

// ---------------------------------------------------------------------------
// Kernel

Kernel::Kernel(Kind kind, std::vector<double> knots, std::vector<double> values, int d)
    : kind_(kind), knots_(std::move(knots)), values_(std::move(values)), intrinsic_dim_(d) {
  check_admissible();
}

Kernel Kernel::indicator(double a, double r, int intrinsic_dim) {
  if (!(a > 0.0) || !(r > 0.0) || !std::isfinite(a) || !std::isfinite(r)) {
    fail(Errc::kInvalidKernel, "indicator kernel needs a > 0 and r > 0");
  }
  return Kernel(Kind::kIndicator, {0.0, r}, {a}, intrinsic_dim);
}

Kernel Kernel::triangular(double radius, int intrinsic_dim) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    fail(Errc::kInvalidKernel, "triangular kernel needs R > 0");
  }
  return Kernel(Kind::kTriangular, {0.0, radius}, {}, intrinsic_dim);
}

Kernel Kernel::table(std::vector<double> breakpoints, std::vector<double> values,
                     int intrinsic_dim) {
  if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size()) {
    fail(Errc::kInvalidKernel, "table kernel needs one value per interval");
  }
  return Kernel(Kind::kTable, std::move(breakpoints), std::move(values), intrinsic_dim);
}

Kernel Kernel::with_intrinsic_dim(int d) const {
  Kernel k = *this;
  if (d < 0) fail(Errc::kInvalidKernel, "intrinsic dimension must be >= 0");
  k.intrinsic_dim_ = d;
  return k;
}

double Kernel::operator()(double t) const noexcept {
  t = std::abs(t);
  if (!(t < knots_.back())) return 0.0;
  if (kind_ == Kind::kTriangular) return 1.0 - t / knots_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

void Kernel::check_admissible() const {
  if (intrinsic_dim_ < 0) fail(Errc::kInvalidKernel, "intrinsic dimension must be >= 0");
  if (knots_.front() != 0.0) fail(Errc::kInvalidKernel, "first breakpoint must be 0");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1]) || !std::isfinite(knots_[i])) {
      fail(Errc::kInvalidKernel, "breakpoints must be finite and increasing");
    }
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(Errc::kInvalidKernel, "negative kernel value");
  }
  if (!((*this)(0.0) > 0.0)) fail(Errc::kInvalidKernel, "kernel must be positive at 0");
  constexpr int kGrid = 1024;
  const double radius = support_radius();
  double prev = (*this)(0.0);
  for (int g = 1; g <= kGrid; ++g) {
    const double cur = (*this)(1.01 * radius * g / kGrid);
    if (cur > prev) fail(Errc::kInvalidKernel, "kernel must be non-increasing");
    prev = cur;
  }
  if ((*this)(radius) != 0.0) fail(Errc::kInvalidKernel, "kernel must vanish at its radius");
}

// ---------------------------------------------------------------------------
// Distances

namespace {

template <typename PairDistance>
DistanceMatrix symmetric_matrix(std::size_t n, std::size_t jobs, PairDistance&& dist) {
  DistanceMatrix out{n, std::vector<double>(n * n, 0.0)};
  // Row i computes j > i; interleave rows so work per thread is balanced.
  parallel_for(n, jobs, [&](std::size_t r) {
    const std::size_t i = (r % 2 == 0) ? r / 2 : n - 1 - r / 2;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist(i, j);
      out.values[i * n + j] = d;
      out.values[j * n + i] = d;
    }
  });
  return out;
}

}  // namespace

DistanceMatrix pairwise_distances(const LabeledDataset& dataset, const Metric& metric,
                                  std::size_t jobs) {
  const std::size_t n = dataset.size();
  if (const auto* lot = std::get_if<LotMetric>(&metric)) {
    if (lot->embedding == nullptr || lot->embedding->n != n) {
      fail(Errc::kShapeMismatch, "embedding does not match the dataset");
    }
    const auto& emb = *lot->embedding;
    return symmetric_matrix(n, jobs, [&](std::size_t i, std::size_t j) {
      return lot_distance(emb, i, j);
    });
  }
  const auto& w2 = std::get<W2Metric>(metric);
  return symmetric_matrix(n, jobs, [&](std::size_t i, std::size_t j) {
    return w2_exact(dataset.measures[i], dataset.measures[j], w2.transport).distance;
  });
}

DistanceMatrix euclidean_distances(std::span<const double> points, std::size_t dim,
                                   std::size_t jobs) {
  if (dim == 0 || points.size() % dim != 0) {
    fail(Errc::kShapeMismatch, "point array is not a multiple of the dimension");
  }
  const std::size_t n = points.size() / dim;
  return symmetric_matrix(n, jobs, [&](std::size_t i, std::size_t j) {
    return std::sqrt(squared_distance(points.subspan(i * dim, dim), points.subspan(j * dim, dim)));
  });
}

// ---------------------------------------------------------------------------
// Graphs

double WeightedGraph::degree(std::size_t i) const noexcept {
  double s = 0.0;
  for (double w : neighbor_weights(i)) s += w;
  return s;
}

double WeightedGraph::weight(std::size_t i, std::size_t j) const noexcept {
  const auto nb = neighbors(i);
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return 0.0;
  return weights[offsets[i] + static_cast<std::size_t>(it - nb.begin())];
}

WeightedGraph graph_from_edges(std::size_t n, const std::vector<Edge>& edges, double epsilon,
                               Kernel kernel, GraphKind kind) {
  WeightedGraph g;
  g.n = n;
  g.epsilon = epsilon;
  g.kernel = std::move(kernel);
  g.kind = kind;
  std::vector<std::size_t> count(n + 1, 0);
  for (const auto& e : edges) {
    if (e.i >= n || e.j >= n) fail(Errc::kIndexOutOfRange, "edge endpoint out of range");
    if (e.i == e.j) fail(Errc::kInvalidSpec, "self-loops are not stored");
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      fail(Errc::kInvalidSpec, "edge weights must be finite and positive");
    }
    ++count[e.i + 1];
    ++count[e.j + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  g.offsets = count;
  g.targets.resize(2 * edges.size());
  g.weights.resize(2 * edges.size());
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (const auto& e : edges) {
    g.targets[fill[e.i]] = e.j;
    g.weights[fill[e.i]++] = e.w;
    g.targets[fill[e.j]] = e.i;
    g.weights[fill[e.j]++] = e.w;
  }
  // Sort each row by target.
  std::vector<std::pair<std::size_t, double>> buf;
  for (std::size_t i = 0; i < n; ++i) {
    buf.clear();
    for (std::size_t p = g.offsets[i]; p < g.offsets[i + 1]; ++p) {
      buf.emplace_back(g.targets[p], g.weights[p]);
    }
    std::sort(buf.begin(), buf.end());
    for (std::size_t p = 0; p < buf.size(); ++p) {
      if (p > 0 && buf[p].first == buf[p - 1].first) {
        fail(Errc::kInvalidSpec, "duplicate edge");
      }
      g.targets[g.offsets[i] + p] = buf[p].first;
      g.weights[g.offsets[i] + p] = buf[p].second;
    }
  }
  return g;
}

WeightedGraph epsilon_graph(const DistanceMatrix& distances, double epsilon,
                            const Kernel& kernel, const EpsilonGraphOptions& options) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    fail(Errc::kInvalidEpsilon, "epsilon must be positive and finite");
  }
  const double scale =
      options.normalize ? std::pow(epsilon, -static_cast<double>(kernel.intrinsic_dim())) : 1.0;
  const std::size_t n = distances.n;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = kernel(distances(i, j) / epsilon) * scale;
      if (w > 0.0) edges.push_back({i, j, w});
    }
  }
  return graph_from_edges(n, edges, epsilon, kernel, GraphKind::kEpsilon);
}

WeightedGraph knn_graph(const DistanceMatrix& distances, std::size_t k) {
  const std::size_t n = distances.n;
  if (k < 1 || k >= n) {
    fail(Errc::kInvalidK, "k = " + std::to_string(k) + " must lie in [1, n-1] for n = " +
                              std::to_string(n));
  }
  std::vector<char> adjacent(n * n, 0);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                      order.end(), [&](std::size_t a, std::size_t b) {
                        const double da = distances(i, a), db = distances(i, b);
                        return da < db || (da == db && a < b);
                      });
    for (std::size_t r = 0; r < k; ++r) {
      adjacent[i * n + order[r]] = 1;
      adjacent[order[r] * n + i] = 1;
    }
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (adjacent[i * n + j]) edges.push_back({i, j, 1.0});
    }
  }
  return graph_from_edges(n, edges, 1.0, Kernel::indicator(), GraphKind::kKnn);
}

double connectivity_epsilon(const DistanceMatrix& distances) {
  const std::size_t n = distances.n;
  if (n < 2) fail(Errc::kDegenerateInput, "connectivity radius needs n >= 2");
  // Dense Prim.
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<char> in_tree(n, 0);
  best[0] = 0.0;
  double bottleneck = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!in_tree[v] && (u == n || best[v] < best[u])) u = v;
    }
    in_tree[u] = 1;
    bottleneck = std::max(bottleneck, best[u]);
    const auto row = distances.row(u);
    for (std::size_t v = 0; v < n; ++v) {
      if (!in_tree[v] && row[v] < best[v]) best[v] = row[v];
    }
  }
  return bottleneck;
}

std::vector<std::size_t> connected_components(const WeightedGraph& graph) {
  std::vector<std::size_t> parent(graph.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < graph.n; ++i) {
    const auto nb = graph.neighbors(i);
    const auto w = graph.neighbor_weights(i);
    for (std::size_t p = 0; p < nb.size(); ++p) {
      if (w[p] <= 0.0) continue;
      const std::size_t a = find(i), b = find(nb[p]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::size_t> id(graph.n);
  std::vector<std::size_t> label_of_root(graph.n, graph.n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < graph.n; ++i) {
    const std::size_t r = find(i);
    if (label_of_root[r] == graph.n) label_of_root[r] = next++;
    id[i] = label_of_root[r];
  }
  return id;
}

bool is_connected(const WeightedGraph& graph) {
  const auto id = connected_components(graph);
  return std::all_of(id.begin(), id.end(), [](std::size_t c) { return c == 0; });
}

void write_edge_list_csv(const WeightedGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIoError, "cannot write " + path.string());
  out << "i,j,w\n";
  for (std::size_t i = 0; i < graph.n; ++i) {
    const auto nb = graph.neighbors(i);
    const auto w = graph.neighbor_weights(i);
    for (std::size_t p = 0; p < nb.size(); ++p) {
      if (nb[p] > i) out << i << ',' << nb[p] << ',' << detail::format_double(w[p]) << '\n';
    }
  }
  if (!out) fail(Errc::kIoError, "write failed for " + path.string());
}

void write_distance_csv(const DistanceMatrix& distances, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIoError, "cannot write " + path.string());
  for (std::size_t i = 0; i < distances.n; ++i) {
    for (std::size_t j = 0; j < distances.n; ++j) {
      if (j > 0) out << ',';
      out << detail::format_double(distances(i, j));
    }
    out << '\n';
  }
  if (!out) fail(Errc::kIoError, "write failed for " + path.string());
}

}  // namespace otlaplace
