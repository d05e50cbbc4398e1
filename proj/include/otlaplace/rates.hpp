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
#include <string>
#include <vector>

#include "otlaplace/transport.hpp"

namespace otlaplace {

// Sampling rates for W_inf (q) and W_2 (q_tilde) between a measure with
// bounded density on a k-dimensional domain and its m-point empirical measure.
// Errors: DomainError (k < 1, m < 2, or m < 3 where log log m is needed).
double rate_q(int k, double m);
double rate_q_tilde(int k, double m);

// Exact W2 between U[0,1] and the uniform measure on `samples`.
double w2_to_uniform_interval(std::vector<double> samples);

struct RateOptions {
  int k = 1;
  std::vector<std::size_t> m_values{10, 40, 160, 640, 2560};
  std::size_t trials = 50;
  // Size of the stand-in for the continuous measure when k >= 2. 0 means
  // 50 * max(m_values). Rounded up per m to a multiple of m.
  std::size_t proxy_m = 0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  // Largest proxy sample the k >= 2 path may match.
  std::size_t max_proxy = 4096;
};

struct RateRow {
  std::size_t m = 0;
  double measured_mean = 0.0;
  double measured_se = 0.0;
  double predicted = 0.0;  // rate_q_tilde(k, m)
  std::size_t proxy_size = 0;  // 0 on the exact path
  bool dominated = true;   // measured_mean <= c_hat * predicted
};

struct RateReport {
  int k = 1;
  std::size_t trials = 0;
  bool exact = true;
  std::vector<RateRow> rows;
  double fitted_slope = 0.0;      // least squares of log(mean) on log(m)
  double fitted_intercept = 0.0;
  double c_hat = 0.0;             // mean / predicted at the smallest m
  bool all_dominated = true;      // over every m but the smallest
};

// The distance from U[0,1]^k to its empirical measure, averaged over trials.
// k = 1 is exact; k >= 2 measures W2 to a fresh sample of the proxy size,
// which overstates the true distance. Errors: InvalidSpec (m_values not
// strictly increasing or below 2, trials = 0, k < 1), BudgetExceeded.
RateReport empirical_w2_rate(const RateOptions& options);

// CSV "m,measured_mean,measured_se,predicted". Errors: IoError.
void write_rates_csv(const std::string& path, const RateReport& report);

}  // namespace otlaplace
