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

#include "otlaplace/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "min_cost_flow.hpp"
#include "otlaplace/error.hpp"

namespace otlaplace {
namespace {

constexpr std::int64_t kMaxCommonDenominator = std::int64_t{1} << 40;

void require_same_dim(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) {
    fail(Errc::kDimensionMismatch, "measures live in R^" + std::to_string(mu.dim()) +
                                       " and R^" + std::to_string(nu.dim()));
  }
}

std::vector<double> squared_cost_matrix(const EmpiricalMeasure& mu,
                                        const EmpiricalMeasure& nu) {
  const std::size_t m = mu.size(), n = nu.size();
  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto x = mu.point(i);
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = squared_distance(x, nu.point(j));
  }
  return cost;
}

// |x - y|^2 after centering both clouds at their means. Under fixed uniform
// marginals this changes every coupling's cost by the same constant, so the
// optimal plans agree, but the reduced matrix starts far closer to
// assignment-ready (many column minima in distinct rows).
std::vector<double> centered_cost_matrix(const EmpiricalMeasure& mu,
                                         const EmpiricalMeasure& nu) {
  const std::size_t k = mu.dim();
  auto centered = [k](const EmpiricalMeasure& a) {
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t d = 0; d < k; ++d) mean[d] += a.point(i)[d];
    for (auto& v : mean) v /= static_cast<double>(a.size());
    std::vector<double> out(a.coords().begin(), a.coords().end());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t d = 0; d < k; ++d) out[i * k + d] -= mean[d];
    return EmpiricalMeasure::from_flat(k, std::move(out));
  };
  return squared_cost_matrix(centered(mu), centered(nu));
}

double plan_cost(const std::vector<PlanEntry>& entries,
                 std::span<const double> cost, std::size_t cols) {
  std::vector<double> terms;
  terms.reserve(entries.size());
  for (const auto& e : entries) terms.push_back(e.mass * cost[e.source * cols + e.target]);
  return pairwise_sum(terms);
}

std::vector<PlanEntry> permutation_entries(const std::vector<std::size_t>& matching) {
  const double mass = 1.0 / static_cast<double>(matching.size());
  std::vector<PlanEntry> entries;
  entries.reserve(matching.size());
  for (std::size_t i = 0; i < matching.size(); ++i) entries.push_back({i, matching[i], mass});
  return entries;
}

template <typename Amount>
std::vector<PlanEntry> flow_entries(const detail::TransportFlow<Amount>& flow,
                                    double scale) {
  std::vector<PlanEntry> entries;
  for (std::size_t i = 0; i < flow.rows; ++i) {
    for (std::size_t j = 0; j < flow.cols; ++j) {
      const Amount f = flow.flow[i * flow.cols + j];
      if (f > Amount{}) entries.push_back({i, j, static_cast<double>(f) / scale});
    }
  }
  return entries;
}

// Best rational approximation with denominator <= max_den via continued
// fractions; nullopt unless it reproduces w to ~1e-14 relative.
std::optional<std::int64_t> rational_denominator(double w, std::int64_t max_den) {
  if (w == 0.0) return 1;
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = w;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(x);
    if (a_real > 1e12) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (std::abs(w - static_cast<double>(p1) / static_cast<double>(q1)) <= 1e-14 * w) {
      return q1;
    }
    const double frac = x - a_real;
    if (frac <= 0.0) break;
    x = 1.0 / frac;
  }
  return std::nullopt;
}

// Integer masses with common denominator L, or nullopt.
std::optional<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>>
integerize(std::span<const double> a, std::span<const double> b) {
  std::int64_t common = 1;
  for (auto weights : {a, b}) {
    for (double w : weights) {
      const auto q = rational_denominator(w, 1'000'000);
      if (!q) return std::nullopt;
      common = std::lcm(common, *q);
      if (common > kMaxCommonDenominator) return std::nullopt;
    }
  }
  auto scale = [&](std::span<const double> ws) {
    std::vector<std::int64_t> out;
    out.reserve(ws.size());
    for (double w : ws) out.push_back(std::llround(w * static_cast<double>(common)));
    return out;
  };
  auto ia = scale(a);
  auto ib = scale(b);
  const auto sa = std::accumulate(ia.begin(), ia.end(), std::int64_t{0});
  const auto sb = std::accumulate(ib.begin(), ib.end(), std::int64_t{0});
  if (sa != common || sb != common) return std::nullopt;
  return std::make_pair(std::move(ia), std::move(ib));
}

bool uniform_weights(std::span<const double> w) {
  const double target = 1.0 / static_cast<double>(w.size());
  return std::all_of(w.begin(), w.end(),
                     [&](double x) { return std::abs(x - target) <= 1e-15; });
}

// Monotone coupling of two 1-D uniform measures in integer units of 1/L.
struct SortedCoupling {
  std::vector<PlanEntry> entries;
  double max_gap = 0.0;
};

SortedCoupling sorted_coupling(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  const std::size_t m = mu.size(), n = nu.size();
  auto order = [](const EmpiricalMeasure& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return x.point(a)[0] < x.point(b)[0];
    });
    return idx;
  };
  const auto oi = order(mu);
  const auto oj = order(nu);
  const auto common = static_cast<std::int64_t>(std::lcm(m, n));
  const std::int64_t unit_i = common / static_cast<std::int64_t>(m);
  const std::int64_t unit_j = common / static_cast<std::int64_t>(n);
  SortedCoupling out;
  std::size_t a = 0, b = 0;
  std::int64_t left_i = unit_i, left_j = unit_j;
  while (a < m && b < n) {
    const std::int64_t amount = std::min(left_i, left_j);
    const std::size_t i = oi[a], j = oj[b];
    out.entries.push_back({i, j, static_cast<double>(amount) / static_cast<double>(common)});
    out.max_gap = std::max(out.max_gap, std::abs(mu.point(i)[0] - nu.point(j)[0]));
    left_i -= amount;
    left_j -= amount;
    if (left_i == 0) { ++a; left_i = unit_i; }
    if (left_j == 0) { ++b; left_j = unit_j; }
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const PlanEntry& x, const PlanEntry& y) {
    return x.source != y.source ? x.source < y.source : x.target < y.target;
  });
  return out;
}

// Feasibility of a bottleneck threshold: Kuhn's augmenting paths on the
// bipartite graph {(i,j) : cost_ij <= limit}.
class ThresholdMatcher {
 public:
  ThresholdMatcher(const std::vector<double>& cost, std::size_t n, double limit)
      : cost_(cost), n_(n), limit_(limit), match_col_(n, -1), seen_(n) {}

  bool perfect() {
    for (std::size_t row = 0; row < n_; ++row) {
      std::fill(seen_.begin(), seen_.end(), 0);
      if (!augment(row)) return false;
    }
    return true;
  }

 private:
  bool augment(std::size_t row) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (seen_[j] || cost_[row * n_ + j] > limit_) continue;
      seen_[j] = 1;
      if (match_col_[j] < 0 || augment(static_cast<std::size_t>(match_col_[j]))) {
        match_col_[j] = static_cast<std::int64_t>(row);
        return true;
      }
    }
    return false;
  }

  const std::vector<double>& cost_;
  std::size_t n_;
  double limit_;
  std::vector<std::int64_t> match_col_;
  std::vector<char> seen_;
};

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> out(source_size, 0.0);
  for (const auto& e : entries) out[e.source] += e.mass;
  return out;
}

std::vector<double> TransportPlan::column_sums() const {
  std::vector<double> out(target_size, 0.0);
  for (const auto& e : entries) out[e.target] += e.mass;
  return out;
}

DiscreteOtResult solve_discrete_ot(std::span<const double> cost,
                                   std::span<const double> source,
                                   std::span<const double> target,
                                   const TransportOptions& options) {
  const std::size_t m = source.size(), n = target.size();
  if (m == 0 || n == 0) fail(Errc::kEmptyInput, "transport between empty measures");
  if (cost.size() != m * n) fail(Errc::kShapeMismatch, "cost matrix shape");
  for (auto weights : {source, target}) {
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) fail(Errc::kInvalidSpec, "bad mass");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      fail(Errc::kInvalidSpec, "masses sum to " + std::to_string(total));
    }
  }

  DiscreteOtResult out;
  if (m == n && uniform_weights(source) && uniform_weights(target)) {
    if (m > options.max_assignment_size) {
      fail(Errc::kSizeLimitExceeded, "assignment of size " + std::to_string(m));
    }
    auto matching = solve_assignment(cost, m);
    out.entries = permutation_entries(matching);
    out.matching = std::move(matching);
  } else {
    if (m * n > options.max_flow_entries) {
      fail(Errc::kSizeLimitExceeded, std::to_string(m) + "x" + std::to_string(n) +
                                         " cost entries exceed the flow limit");
    }
    if (auto ints = integerize(source, target)) {
      const double scale = static_cast<double>(
          std::accumulate(ints->first.begin(), ints->first.end(), std::int64_t{0}));
      const auto flow = detail::min_cost_transport<std::int64_t>(cost, ints->first,
                                                                 ints->second);
      out.entries = flow_entries(flow, scale);
    } else {
      const auto flow = detail::min_cost_transport<double>(cost, source, target, 1e-13);
      out.entries = flow_entries(flow, 1.0);
    }
  }
  out.total_cost = plan_cost(out.entries, cost, n);
  return out;
}

W2Result w2_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                  const TransportOptions& options) {
  require_same_dim(mu, nu);
  const std::size_t m = mu.size(), n = nu.size();
  W2Result out;
  out.plan.source_size = m;
  out.plan.target_size = n;
  out.plan.p = 2.0;

  if (mu.dim() == 1) {
    auto coupling = sorted_coupling(mu, nu);
    std::vector<double> terms;
    terms.reserve(coupling.entries.size());
    for (const auto& e : coupling.entries) {
      terms.push_back(e.mass * squared_distance(mu.point(e.source), nu.point(e.target)));
    }
    out.plan.total_cost = pairwise_sum(terms);
    if (m == n) {
      std::vector<std::size_t> matching(m);
      for (const auto& e : coupling.entries) matching[e.source] = e.target;
      out.plan.matching = std::move(matching);
    }
    out.plan.entries = std::move(coupling.entries);
  } else if (m == n) {
    if (m > options.max_assignment_size) {
      fail(Errc::kSizeLimitExceeded, "assignment of size " + std::to_string(m));
    }
    const auto cost = squared_cost_matrix(mu, nu);
    auto matching = solve_assignment(centered_cost_matrix(mu, nu), m);
    out.plan.entries = permutation_entries(matching);
    out.plan.total_cost = plan_cost(out.plan.entries, cost, n);
    out.plan.matching = std::move(matching);
  } else {
    if (m * n > options.max_flow_entries) {
      fail(Errc::kSizeLimitExceeded, std::to_string(m) + "x" + std::to_string(n) +
                                         " cost entries exceed the flow limit");
    }
    const auto cost = squared_cost_matrix(mu, nu);
    const auto common = static_cast<std::int64_t>(std::lcm(m, n));
    const std::vector<std::int64_t> supply(m, common / static_cast<std::int64_t>(m));
    const std::vector<std::int64_t> demand(n, common / static_cast<std::int64_t>(n));
    const auto flow = detail::min_cost_transport<std::int64_t>(
        centered_cost_matrix(mu, nu), supply, demand);
    out.plan.entries = flow_entries(flow, static_cast<double>(common));
    out.plan.total_cost = plan_cost(out.plan.entries, cost, n);
  }
  out.distance = std::sqrt(std::max(0.0, out.plan.total_cost));
  return out;
}

double winf(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  require_same_dim(mu, nu);
  if (mu.dim() == 1) return sorted_coupling(mu, nu).max_gap;
  const std::size_t n = mu.size();
  if (nu.size() != n) {
    fail(Errc::kUnsupportedShape,
         "bottleneck distance needs equal sizes when k > 1");
  }
  const auto cost = squared_cost_matrix(mu, nu);
  std::vector<double> candidates(cost);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t lo = 0, hi = candidates.size() - 1;  // hi is always feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (ThresholdMatcher(cost, n, candidates[mid]).perfect()) hi = mid;
    else lo = mid + 1;
  }
  return std::sqrt(candidates[lo]);
}

TransportMap barycentric_map(const TransportPlan& plan, const EmpiricalMeasure& nu) {
  if (plan.target_size != nu.size()) {
    fail(Errc::kShapeMismatch, "plan target size " + std::to_string(plan.target_size) +
                                   " differs from measure size " +
                                   std::to_string(nu.size()));
  }
  const std::size_t k = nu.dim();
  TransportMap map{k, std::vector<double>(plan.source_size * k, 0.0)};
  if (plan.matching) {
    for (std::size_t i = 0; i < plan.source_size; ++i) {
      const auto y = nu.point((*plan.matching)[i]);
      std::copy(y.begin(), y.end(), map.images.begin() + static_cast<std::ptrdiff_t>(i * k));
    }
    return map;
  }
  std::vector<double> row_mass(plan.source_size, 0.0);
  for (const auto& e : plan.entries) {
    row_mass[e.source] += e.mass;
    const auto y = nu.point(e.target);
    for (std::size_t a = 0; a < k; ++a) map.images[e.source * k + a] += e.mass * y[a];
  }
  for (std::size_t i = 0; i < plan.source_size; ++i) {
    if (!(row_mass[i] > 0.0)) {
      fail(Errc::kZeroRowMass, "source point " + std::to_string(i) + " carries no mass");
    }
    for (std::size_t a = 0; a < k; ++a) map.images[i * k + a] /= row_mass[i];
  }
  return map;
}

double brute_force_ot(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  require_same_dim(mu, nu);
  if (mu.size() != nu.size()) fail(Errc::kUnequalSizes, "brute force needs equal sizes");
  const std::size_t m = mu.size();
  if (m > 7) fail(Errc::kSizeLimitExceeded, "brute force limited to m <= 7");
  if (!(p >= 1.0)) fail(Errc::kInvalidExponent, "exponent must be >= 1");
  const bool bottleneck = std::isinf(p);

  std::vector<double> dist(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      dist[i * m + j] = std::sqrt(squared_distance(mu.point(i), nu.point(j)));
    }
  }
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double value = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = dist[i * m + perm[i]];
      value = bottleneck ? std::max(value, d) : value + std::pow(d, p);
    }
    best = std::min(best, value);
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (bottleneck) return best;
  return std::pow(best / static_cast<double>(m), 1.0 / p);
}

}  // namespace otlaplace
