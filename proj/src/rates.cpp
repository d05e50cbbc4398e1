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

#include "otlaplace/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "binary_io.hpp"
#include "otlaplace/error.hpp"
#include "otlaplace/parallel.hpp"
#include "otlaplace/rng.hpp"

namespace otlaplace {
namespace {

void check_domain(int k, double m, double least) {
  if (k < 1) fail(Errc::kDomainError, "rate needs k >= 1, got " + std::to_string(k));
  if (!(m >= least) || !std::isfinite(m)) {
    fail(Errc::kDomainError, "rate needs m >= " + detail::format_double(least) + ", got " +
                                 detail::format_double(m));
  }
}

EmpiricalMeasure uniform_cube(CounterRng& rng, std::size_t m, int k) {
  std::vector<double> coords(m * static_cast<std::size_t>(k));
  for (auto& c : coords) c = rng.uniform();
  return EmpiricalMeasure::from_flat(static_cast<std::size_t>(k), std::move(coords));
}

// Each atom split into `copies` equal atoms; W2 is unchanged.
EmpiricalMeasure replicate(const EmpiricalMeasure& mu, std::size_t copies) {
  std::vector<double> coords;
  coords.reserve(mu.coords().size() * copies);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t c = 0; c < copies; ++c) {
      coords.insert(coords.end(), mu.point(i).begin(), mu.point(i).end());
    }
  }
  return EmpiricalMeasure::from_flat(mu.dim(), std::move(coords));
}

}  // namespace

double rate_q(int k, double m) {
  if (k == 1) {
    check_domain(k, m, 3.0);
    return std::sqrt(std::log(std::log(m)) / m);
  }
  check_domain(k, m, 2.0);
  if (k == 2) return std::pow(std::log(m), 0.75) / std::sqrt(m);
  return std::pow(std::log(m) / m, 1.0 / k);
}

double rate_q_tilde(int k, double m) {
  check_domain(k, m, 2.0);
  switch (k) {
    case 1:
      return std::sqrt(std::log(m) / m);
    case 2:
      return std::pow(std::log(m), 0.75) / std::sqrt(m);
    case 3:
      return std::cbrt(std::log(m) / m);
    case 4:
      return std::sqrt(std::log(m)) / std::pow(m, 0.25);
    default:
      return std::pow(m, -1.0 / k);
  }
}

double w2_to_uniform_interval(std::vector<double> samples) {
  if (samples.empty()) fail(Errc::kEmptyInput, "no samples");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  // Atom i takes the quantile interval [i/m, (i+1)/m]; integrate (t - x)^2.
  std::vector<double> terms(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double mid = (static_cast<double>(i) + 0.5) / m;
    const double gap = samples[i] - mid;
    terms[i] = gap * gap + 1.0 / (12.0 * m * m);
  }
  return std::sqrt(pairwise_sum(terms) / m);
}

RateReport empirical_w2_rate(const RateOptions& options) {
  if (options.k < 1) fail(Errc::kInvalidSpec, "k must be at least 1");
  if (options.trials == 0) fail(Errc::kInvalidSpec, "trials must be at least 1");
  const auto& ms = options.m_values;
  if (ms.empty()) fail(Errc::kInvalidSpec, "m_values is empty");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i] < 2 || (i > 0 && ms[i] <= ms[i - 1])) {
      fail(Errc::kInvalidSpec, "m_values must be strictly increasing and at least 2");
    }
  }

  RateReport report;
  report.k = options.k;
  report.trials = options.trials;
  report.exact = options.k == 1;
  const std::size_t proxy_target =
      options.proxy_m > 0 ? options.proxy_m : 50 * ms.back();
  for (std::size_t m : ms) {
    RateRow row;
    row.m = m;
    row.predicted = rate_q_tilde(options.k, static_cast<double>(m));
    if (!report.exact) {
      row.proxy_size = m * ((proxy_target + m - 1) / m);
      if (row.proxy_size > options.max_proxy) {
        fail(Errc::kBudgetExceeded, "proxy sample of " + std::to_string(row.proxy_size) +
                                        " points exceeds the limit of " +
                                        std::to_string(options.max_proxy));
      }
    }
    report.rows.push_back(row);
  }

  // Samples per (m, trial); each cell has its own stream.
  const std::size_t cells = ms.size() * options.trials;
  std::vector<double> distance(cells);
  TransportOptions transport;
  transport.max_assignment_size = std::max(transport.max_assignment_size, options.max_proxy);
  parallel_for(cells, options.jobs, [&](std::size_t cell) {
    const std::size_t mi = cell / options.trials, trial = cell % options.trials;
    const std::size_t m = ms[mi];
    CounterRng rng(derive_seed(derive_seed(options.seed, trial), m));
    if (report.exact) {
      std::vector<double> xs(m);
      for (auto& x : xs) x = rng.uniform();
      distance[cell] = w2_to_uniform_interval(std::move(xs));
      return;
    }
    const auto sample = uniform_cube(rng, m, options.k);
    const std::size_t big = report.rows[mi].proxy_size;
    const auto proxy = uniform_cube(rng, big, options.k);
    distance[cell] = w2_exact(replicate(sample, big / m), proxy, transport).distance;
  });

  std::vector<double> xs, ys;
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    auto& row = report.rows[mi];
    const std::span<const double> d(distance.data() + mi * options.trials, options.trials);
    row.measured_mean = pairwise_sum(d) / static_cast<double>(options.trials);
    if (options.trials > 1) {
      std::vector<double> sq(d.size());
      for (std::size_t t = 0; t < d.size(); ++t) {
        sq[t] = (d[t] - row.measured_mean) * (d[t] - row.measured_mean);
      }
      const double var = pairwise_sum(sq) / static_cast<double>(options.trials - 1);
      row.measured_se = std::sqrt(var / static_cast<double>(options.trials));
    }
    xs.push_back(std::log(static_cast<double>(row.m)));
    ys.push_back(std::log(row.measured_mean));
  }
  if (ms.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= n, my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    report.fitted_slope = sxy / sxx;
    report.fitted_intercept = my - report.fitted_slope * mx;
  } else {
    report.fitted_intercept = ys.front();
  }
  report.c_hat = report.rows.front().measured_mean / report.rows.front().predicted;
  for (std::size_t mi = 1; mi < report.rows.size(); ++mi) {
    auto& row = report.rows[mi];
    row.dominated = row.measured_mean <= report.c_hat * row.predicted;
    report.all_dominated = report.all_dominated && row.dominated;
  }
  return report;
}

void write_rates_csv(const std::string& path, const RateReport& report) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) fail(Errc::kIoError, "cannot write " + path);
  std::fprintf(out, "m,measured_mean,measured_se,predicted\n");
  for (const auto& row : report.rows) {
    std::fprintf(out, "%zu,%s,%s,%s\n", row.m, detail::format_double(row.measured_mean).c_str(),
                 detail::format_double(row.measured_se).c_str(),
                 detail::format_double(row.predicted).c_str());
  }
  if (std::fclose(out) != 0) fail(Errc::kIoError, "cannot write " + path);
}

}  // namespace otlaplace
