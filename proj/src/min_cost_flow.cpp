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

#include "min_cost_flow.hpp"

#include <algorithm>
#include <limits>

#include "otlaplace/error.hpp"

namespace otlaplace::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Amount>
bool positive(Amount a, double tol) {
  if constexpr (std::is_integral_v<Amount>) {
    return a > 0;
  } else {
    return a > tol;
  }
}

}  // namespace

// Node layout: sources [0, m), sinks [m, m + n), super sink T = m + n. The
// super source S is implicit: the initial label of source i is the reduced
// cost of S -> i when i still has supply.
template <typename Amount>
TransportFlow<Amount> min_cost_transport(std::span<const double> cost,
                                         std::span<const Amount> supply,
                                         std::span<const Amount> demand,
                                         double zero_tol) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  if (cost.size() != m * n) fail(Errc::kShapeMismatch, "cost matrix shape");
  for (double c : cost) {
    if (!(c >= 0.0)) fail(Errc::kInvalidSpec, "transport costs must be >= 0");
  }

  TransportFlow<Amount> out{m, n, std::vector<Amount>(m * n, Amount{})};
  std::vector<Amount> rem_supply(supply.begin(), supply.end());
  std::vector<Amount> rem_demand(demand.begin(), demand.end());

  const std::size_t num_nodes = m + n + 1;
  const std::size_t sink_node = m + n;
  std::vector<double> potential(num_nodes, 0.0);
  std::vector<double> dist(num_nodes);
  std::vector<std::size_t> pred(num_nodes);
  std::vector<char> done(num_nodes);

  auto any_supply = [&] {
    return std::any_of(rem_supply.begin(), rem_supply.end(),
                       [&](Amount a) { return positive(a, zero_tol); });
  };

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  while (any_supply()) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(pred.begin(), pred.end(), kNone);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      if (positive(rem_supply[i], zero_tol)) dist[i] = std::max(0.0, -potential[i]);
    }

    while (true) {
      std::size_t u = kNone;
      double best = kInf;
      for (std::size_t v = 0; v < num_nodes; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == kNone) break;
      done[u] = 1;
      if (u == sink_node) break;
      if (u < m) {
        const double* crow = cost.data() + u * n;
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t v = m + j;
          if (done[v]) continue;
          const double rc = std::max(0.0, crow[j] + potential[u] - potential[v]);
          if (best + rc < dist[v]) {
            dist[v] = best + rc;
            pred[v] = u;
          }
        }
      } else {
        const std::size_t j = u - m;
        if (positive(rem_demand[j], zero_tol) && !done[sink_node]) {
          const double rc = std::max(0.0, potential[u] - potential[sink_node]);
          if (best + rc < dist[sink_node]) {
            dist[sink_node] = best + rc;
            pred[sink_node] = u;
          }
        }
        for (std::size_t i = 0; i < m; ++i) {
          if (done[i] || !positive(out.flow[i * n + j], zero_tol)) continue;
          const double rc =
              std::max(0.0, -cost[i * n + j] + potential[u] - potential[i]);
          if (best + rc < dist[i]) {
            dist[i] = best + rc;
            pred[i] = u;
          }
        }
      }
    }
    if (!done[sink_node]) fail(Errc::kSingularSystem, "supplies exceed demands");

    const double reach = dist[sink_node];
    for (std::size_t v = 0; v < num_nodes; ++v) {
      potential[v] += std::min(dist[v], reach);
    }

    // Bottleneck along T <- sink ... <- root source.
    const std::size_t last_sink = pred[sink_node];
    Amount delta = rem_demand[last_sink - m];
    std::size_t v = last_sink;
    while (pred[v] != kNone) {
      const std::size_t u = pred[v];
      if (u >= m) {  // reverse arc sink u -> source v
        delta = std::min(delta, out.flow[v * n + (u - m)]);
      }
      v = u;
    }
    delta = std::min(delta, rem_supply[v]);

    rem_supply[v] -= delta;
    rem_demand[last_sink - m] -= delta;
    v = last_sink;
    while (pred[v] != kNone) {
      const std::size_t u = pred[v];
      if (u < m) {
        out.flow[u * n + (v - m)] += delta;
      } else {
        Amount& f = out.flow[v * n + (u - m)];
        f -= delta;
        if constexpr (!std::is_integral_v<Amount>) {
          if (f <= zero_tol) f = 0.0;
        }
      }
      v = u;
    }
    if constexpr (!std::is_integral_v<Amount>) {
      for (auto& s : rem_supply) if (s <= zero_tol) s = 0.0;
      for (auto& d : rem_demand) if (d <= zero_tol) d = 0.0;
    }
  }
  return out;
}

template TransportFlow<std::int64_t> min_cost_transport(
    std::span<const double>, std::span<const std::int64_t>,
    std::span<const std::int64_t>, double);
template TransportFlow<double> min_cost_transport(std::span<const double>,
                                                  std::span<const double>,
                                                  std::span<const double>,
                                                  double);

}  // namespace otlaplace::detail
