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

// Dense linear assignment by shortest augmenting paths.
//
// The Dijkstra phase follows Crouse, "On implementing 2D rectangular
// assignment algorithms" (IEEE TAES 2016). Before it runs, a column-reduction
// pass (as in Jonker-Volgenant) seeds a partial matching and dual prices so
// that most rows start assigned.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include "otlaplace/error.hpp"
#include "otlaplace/transport.hpp"

namespace otlaplace {
namespace {

constexpr std::int64_t kFree = -1;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Workspace {
  explicit Workspace(std::size_t n)
      : u(n, 0.0),
        v(n, 0.0),
        shortest(n, kInf),
        path(n, kFree),
        col_for_row(n, kFree),
        row_for_col(n, kFree),
        remaining(n),
        scanned_row(n, 0),
        scanned_col(n, 0) {}

  std::vector<double> u, v, shortest;
  std::vector<std::int64_t> path, col_for_row, row_for_col;
  std::vector<std::size_t> remaining;
  std::vector<char> scanned_row, scanned_col;
};

// Returns the free column reached from `row` and writes the path length.
std::int64_t augmenting_path(const double* cost, std::size_t n, Workspace& w,
                             std::size_t row, double& min_val) {
  min_val = 0.0;
  std::size_t num_remaining = n;
  for (std::size_t it = 0; it < n; ++it) w.remaining[it] = n - it - 1;
  std::fill(w.scanned_row.begin(), w.scanned_row.end(), 0);
  std::fill(w.scanned_col.begin(), w.scanned_col.end(), 0);
  std::fill(w.shortest.begin(), w.shortest.end(), kInf);

  std::size_t i = row;
  std::int64_t sink = kFree;
  while (sink == kFree) {
    std::size_t index = n;
    double lowest = kInf;
    w.scanned_row[i] = 1;
    const double* crow = cost + i * n;
    const double ui = w.u[i];
    for (std::size_t it = 0; it < num_remaining; ++it) {
      const std::size_t j = w.remaining[it];
      const double r = min_val + crow[j] - ui - w.v[j];
      if (r < w.shortest[j]) {
        w.path[j] = static_cast<std::int64_t>(i);
        w.shortest[j] = r;
      }
      if (w.shortest[j] < lowest ||
          (w.shortest[j] == lowest && w.row_for_col[j] == kFree)) {
        lowest = w.shortest[j];
        index = it;
      }
    }
    min_val = lowest;
    if (index == n || min_val == kInf) {
      fail(Errc::kSingularSystem, "assignment problem is infeasible");
    }
    const std::size_t j = w.remaining[index];
    if (w.row_for_col[j] == kFree) {
      sink = static_cast<std::int64_t>(j);
    } else {
      i = static_cast<std::size_t>(w.row_for_col[j]);
    }
    w.scanned_col[j] = 1;
    w.remaining[index] = w.remaining[--num_remaining];
  }
  return sink;
}

}  // namespace

std::vector<std::size_t> solve_assignment(std::span<const double> cost,
                                          std::size_t n) {
  if (cost.size() != n * n) {
    fail(Errc::kShapeMismatch, "assignment cost is not " + std::to_string(n) +
                                   "x" + std::to_string(n));
  }
  if (n == 0) return {};
  const double* c = cost.data();
  Workspace w(n);

  // Column reduction: v_j = min_i c_ij, tentatively match j to its argmin row.
  for (std::size_t jj = n; jj-- > 0;) {
    std::size_t imin = 0;
    double best = c[jj];
    for (std::size_t i = 1; i < n; ++i) {
      if (c[i * n + jj] < best) {
        best = c[i * n + jj];
        imin = i;
      }
    }
    w.v[jj] = best;
    if (w.col_for_row[imin] == kFree) {
      w.col_for_row[imin] = static_cast<std::int64_t>(jj);
      w.row_for_col[jj] = static_cast<std::int64_t>(imin);
    }
  }
  // Row reduction for the rows left free; grab a tight free column if any.
  for (std::size_t i = 0; i < n; ++i) {
    if (w.col_for_row[i] != kFree) continue;
    double best = kInf;
    std::size_t jbest = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = c[i * n + j] - w.v[j];
      if (r < best) {
        best = r;
        jbest = j;
      }
    }
    w.u[i] = best;
    if (w.row_for_col[jbest] == kFree) {
      w.col_for_row[i] = static_cast<std::int64_t>(jbest);
      w.row_for_col[jbest] = static_cast<std::int64_t>(i);
    }
  }

  for (std::size_t cur = 0; cur < n; ++cur) {
    if (w.col_for_row[cur] != kFree) continue;
    double min_val = 0.0;
    std::int64_t sink = augmenting_path(c, n, w, cur, min_val);

    w.u[cur] += min_val;
    for (std::size_t i = 0; i < n; ++i) {
      if (w.scanned_row[i] && i != cur) {
        w.u[i] += min_val - w.shortest[static_cast<std::size_t>(w.col_for_row[i])];
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (w.scanned_col[j]) w.v[j] -= min_val - w.shortest[j];
    }

    std::int64_t j = sink;
    while (true) {
      const auto i = static_cast<std::size_t>(w.path[static_cast<std::size_t>(j)]);
      w.row_for_col[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(i);
      std::swap(w.col_for_row[i], j);
      if (i == cur) break;
    }
  }

  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::size_t>(w.col_for_row[i]);
  return out;
}

}  // namespace otlaplace
