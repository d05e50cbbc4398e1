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
#include <span>
#include <vector>

namespace otlaplace::detail {

// Flow on the complete bipartite transportation network, dense row-major.
template <typename Amount>
struct TransportFlow {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Amount> flow;
};

// Successive shortest augmenting paths with Johnson potentials on the
// complete bipartite graph source -> target. Supplies and demands must have
// equal totals; costs must be nonnegative. For Amount = double, residuals
// below `zero_tol` are treated as exhausted.
template <typename Amount>
TransportFlow<Amount> min_cost_transport(std::span<const double> cost,
                                         std::span<const Amount> supply,
                                         std::span<const Amount> demand,
                                         double zero_tol = 0.0);

extern template TransportFlow<std::int64_t> min_cost_transport(
    std::span<const double>, std::span<const std::int64_t>,
    std::span<const std::int64_t>, double);
extern template TransportFlow<double> min_cost_transport(
    std::span<const double>, std::span<const double>, std::span<const double>,
    double);

}  // namespace otlaplace::detail
