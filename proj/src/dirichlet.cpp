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

#include "otlaplace/dirichlet.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "otlaplace/error.hpp"

namespace otlaplace {
namespace {

void check_shape(const WeightedGraph& graph, std::span<const double> f) {
  if (f.size() != graph.n) {
    fail(Errc::kShapeMismatch, "function has " + std::to_string(f.size()) +
                                   " values for a graph with " + std::to_string(graph.n) +
                                   " nodes");
  }
}

double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (p == 0.0) return 1.0;
  return std::pow(a, p);
}

}  // namespace

double graph_dirichlet_energy(const WeightedGraph& graph, std::span<const double> f,
                              double p) {
  check_shape(graph, f);
  if (!(p >= 1.0)) fail(Errc::kInvalidExponent, "energy needs p >= 1");
  if (graph.n == 0) return 0.0;
  std::vector<double> rows(graph.n);
  for (std::size_t i = 0; i < graph.n; ++i) {
    const auto nb = graph.neighbors(i);
    const auto w = graph.neighbor_weights(i);
    double s = 0.0;
    for (std::size_t q = 0; q < nb.size(); ++q) s += w[q] * abs_pow(f[i] - f[nb[q]], p);
    rows[i] = s;
  }
  const double n = static_cast<double>(graph.n);
  return pairwise_sum(rows) / (n * n * std::pow(graph.epsilon, p));
}

std::vector<double> graph_p_laplacian(const WeightedGraph& graph, std::span<const double> f,
                                      double p) {
  check_shape(graph, f);
  if (!(p >= 2.0)) fail(Errc::kInvalidExponent, "p-Laplacian needs p >= 2");
  std::vector<double> out(graph.n, 0.0);
  if (graph.n == 0) return out;
  const double scale =
      p / (2.0 * static_cast<double>(graph.n) * std::pow(graph.epsilon, p));
  for (std::size_t i = 0; i < graph.n; ++i) {
    const auto nb = graph.neighbors(i);
    const auto w = graph.neighbor_weights(i);
    double s = 0.0;
    for (std::size_t q = 0; q < nb.size(); ++q) {
      const double diff = f[i] - f[nb[q]];
      s += w[q] * abs_pow(diff, p - 2.0) * diff;
    }
    out[i] = scale * s;
  }
  return out;
}

double node_inner(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(Errc::kShapeMismatch, "inner product of unequal lengths");
  if (a.empty()) return 0.0;
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) terms[i] = a[i] * b[i];
  return pairwise_sum(terms) / static_cast<double>(a.size());
}

// ---------------------------------------------------------------------------

BoxDensity BoxDensity::uniform(std::vector<double> lower, std::vector<double> upper) {
  if (lower.empty() || lower.size() != upper.size()) {
    fail(Errc::kInvalidSpec, "box corners must have the same positive dimension");
  }
  double volume = 1.0;
  for (std::size_t a = 0; a < lower.size(); ++a) volume *= upper[a] - lower[a];
  BoxDensity d{lower, upper, {lower[0], upper[0]}, {1.0 / volume}};
  d.validate();
  return d;
}

double BoxDensity::operator()(std::span<const double> theta) const noexcept {
  for (std::size_t a = 0; a < dim(); ++a) {
    if (theta[a] < lower[a] || theta[a] > upper[a]) return 0.0;
  }
  for (std::size_t piece = 0; piece + 1 < breakpoints.size(); ++piece) {
    if (theta[0] < breakpoints[piece + 1]) return values[piece];
  }
  return values.back();
}

void BoxDensity::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    fail(Errc::kInvalidSpec, "box corners must have the same positive dimension");
  }
  double cross_section = 1.0;
  for (std::size_t a = 0; a < dim(); ++a) {
    if (!(upper[a] > lower[a]) || !std::isfinite(lower[a]) || !std::isfinite(upper[a])) {
      fail(Errc::kInvalidSpec, "box must have positive finite extent");
    }
    if (a > 0) cross_section *= upper[a] - lower[a];
  }
  if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size() ||
      breakpoints.front() != lower[0] || breakpoints.back() != upper[0]) {
    fail(Errc::kInvalidSpec, "density breakpoints must span axis 0 with one value each");
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) {
      fail(Errc::kInvalidSpec, "density breakpoints must increase");
    }
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      fail(Errc::kInvalidSpec, "density must be bounded away from 0 on its box");
    }
    mass += values[i] * (breakpoints[i + 1] - breakpoints[i]);
  }
  mass *= cross_section;
  if (std::abs(mass - 1.0) > 1e-9) {
    fail(Errc::kInvalidSpec, "density integrates to " + std::to_string(mass));
  }
}

QuadraticFunction QuadraticFunction::linear(std::vector<double> a, double b) {
  return {{}, std::move(a), b};
}

QuadraticFunction QuadraticFunction::quadratic(std::vector<double> h, std::vector<double> a,
                                               double b) {
  if (h.size() != a.size() * a.size()) fail(Errc::kInvalidSpec, "Hessian must be d x d");
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (h[i * a.size() + j] != h[j * a.size() + i]) {
        fail(Errc::kInvalidSpec, "Hessian must be symmetric");
      }
  return {std::move(h), std::move(a), b};
}

double QuadraticFunction::value(std::span<const double> theta) const {
  double v = offset;
  for (std::size_t i = 0; i < dim(); ++i) v += gradient[i] * theta[i];
  return v + 0.5 * hessian_form(theta);
}

std::vector<double> QuadraticFunction::grad(std::span<const double> theta) const {
  std::vector<double> g = gradient;
  if (!hessian.empty()) {
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) g[i] += hessian[i * dim() + j] * theta[j];
  }
  return g;
}

double QuadraticFunction::hessian_form(std::span<const double> u) const {
  if (hessian.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) s += u[i] * hessian[i * dim() + j] * u[j];
  return s;
}

void ContinuumSpec::validate() const {
  density.validate();
  if (dim() < 1 || dim() > 3) {
    fail(Errc::kInvalidSpec, "continuum quadrature supports d = 1, 2, 3");
  }
  if (f.dim() != dim()) fail(Errc::kInvalidSpec, "test function dimension differs from density");
  if (!f.hessian.empty() && f.hessian.size() != dim() * dim()) {
    fail(Errc::kInvalidSpec, "Hessian must be d x d");
  }
  if (!(p >= 1.0) || !std::isfinite(p)) fail(Errc::kInvalidExponent, "p must be >= 1");
}

namespace {

// Unit-sphere nodes in R^d with surface weights; midpoint in (z, phi) for d=3.
struct SphereRule {
  std::vector<double> nodes;  // flat, d per node
  std::vector<double> weights;
};

SphereRule sphere_rule(std::size_t d, std::size_t points) {
  SphereRule rule;
  const double two_pi = 2.0 * std::numbers::pi;
  if (d == 1) {
    rule.nodes = {1.0, -1.0};
    rule.weights = {1.0, 1.0};
  } else if (d == 2) {
    for (std::size_t k = 0; k < points; ++k) {
      const double phi = two_pi * (static_cast<double>(k) + 0.5) / static_cast<double>(points);
      rule.nodes.insert(rule.nodes.end(), {std::cos(phi), std::sin(phi)});
      rule.weights.push_back(two_pi / static_cast<double>(points));
    }
  } else {
    const double w = (2.0 / static_cast<double>(points)) * (two_pi / static_cast<double>(points));
    for (std::size_t a = 0; a < points; ++a) {
      const double z = -1.0 + 2.0 * (static_cast<double>(a) + 0.5) / static_cast<double>(points);
      const double s = std::sqrt(1.0 - z * z);
      for (std::size_t k = 0; k < points; ++k) {
        const double phi =
            two_pi * (static_cast<double>(k) + 0.5) / static_cast<double>(points);
        rule.nodes.insert(rule.nodes.end(), {s * std::cos(phi), s * std::sin(phi), z});
        rule.weights.push_back(w);
      }
    }
  }
  return rule;
}

// Midpoint rule for int_0^inf eta(r) r^q dr, `points` nodes per kernel piece.
double radial_integral(const Kernel& kernel, double q, std::size_t points) {
  const auto& knots = kernel.knots();
  double total = 0.0;
  for (std::size_t piece = 0; piece + 1 < knots.size(); ++piece) {
    const double a = knots[piece], b = knots[piece + 1];
    const double h = (b - a) / static_cast<double>(points);
    double s = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
      const double r = a + (static_cast<double>(k) + 0.5) * h;
      s += kernel(r) * std::pow(r, q);
    }
    total += s * h;
  }
  return total;
}

// Midpoint tensor grid over the density's box; axis 0 is split at the cuts.
double box_integral(const BoxDensity& density, std::size_t points,
                    const std::function<double(std::span<const double>)>& fn) {
  const std::size_t d = density.dim();
  std::vector<std::vector<double>> nodes(d), weights(d);
  for (std::size_t piece = 0; piece + 1 < density.breakpoints.size(); ++piece) {
    const double a = density.breakpoints[piece], b = density.breakpoints[piece + 1];
    const double h = (b - a) / static_cast<double>(points);
    for (std::size_t k = 0; k < points; ++k) {
      nodes[0].push_back(a + (static_cast<double>(k) + 0.5) * h);
      weights[0].push_back(h);
    }
  }
  for (std::size_t axis = 1; axis < d; ++axis) {
    const double a = density.lower[axis], b = density.upper[axis];
    const double h = (b - a) / static_cast<double>(points);
    for (std::size_t k = 0; k < points; ++k) {
      nodes[axis].push_back(a + (static_cast<double>(k) + 0.5) * h);
      weights[axis].push_back(h);
    }
  }
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> theta(d);
  std::vector<double> terms;
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      theta[a] = nodes[a][idx[a]];
      w *= weights[a][idx[a]];
    }
    terms.push_back(w * fn(theta));
    std::size_t a = 0;
    while (a < d && ++idx[a] == nodes[a].size()) idx[a++] = 0;
    if (a == d) break;
  }
  return pairwise_sum(terms);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

QuadratureResult richardson(const std::function<double(std::size_t)>& rule,
                            std::size_t points) {
  if (points < 8) fail(Errc::kInvalidSpec, "quadrature needs at least 8 points per axis");
  const double coarse = rule(points);
  const double fine = rule(2 * points);
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
}

double energy_rule(const ContinuumSpec& spec, std::size_t points) {
  const std::size_t d = spec.dim();
  const auto sphere = sphere_rule(d, points);
  const double radial = radial_integral(spec.kernel, spec.p + static_cast<double>(d) - 1.0, points);
  return radial * box_integral(spec.density, points, [&](std::span<const double> theta) {
    const double rho = spec.density(theta);
    const auto g = spec.f.grad(theta);
    double angular = 0.0;
    for (std::size_t k = 0; k < sphere.weights.size(); ++k) {
      const std::span<const double> omega(sphere.nodes.data() + k * d, d);
      angular += sphere.weights[k] * abs_pow(dot(g, omega), spec.p);
    }
    return rho * rho * angular;
  });
}

}  // namespace

QuadratureResult continuum_energy(const ContinuumSpec& spec, std::size_t points) {
  spec.validate();
  return richardson([&](std::size_t n) { return energy_rule(spec, n); }, points);
}

QuadratureResult laplace_beltrami_translation(const ContinuumSpec& spec,
                                              std::span<const double> theta,
                                              std::size_t points) {
  spec.validate();
  if (!(spec.p >= 2.0)) fail(Errc::kInvalidExponent, "Laplace-Beltrami needs p >= 2");
  const std::size_t d = spec.dim();
  if (theta.size() != d) fail(Errc::kInvalidSpec, "theta has the wrong dimension");
  const auto& box = spec.density;
  for (std::size_t a = 0; a < d; ++a) {
    if (!(theta[a] > box.lower[a] && theta[a] < box.upper[a])) {
      fail(Errc::kBoundaryPoint, "theta is not interior to the density's box");
    }
  }
  for (double cut : box.breakpoints) {
    if (theta[0] == cut) fail(Errc::kBoundaryPoint, "density is not differentiable at theta");
  }
  const double rho = box(theta);
  const auto g = spec.f.grad(theta);
  const double p = spec.p;
  auto rule = [&](std::size_t n) {
    const auto sphere = sphere_rule(d, n);
    const double radial = radial_integral(spec.kernel, p + static_cast<double>(d) - 1.0, n);
    double angular = 0.0;
    for (std::size_t k = 0; k < sphere.weights.size(); ++k) {
      const std::span<const double> omega(sphere.nodes.data() + k * d, d);
      angular += sphere.weights[k] * (p - 1.0) * abs_pow(dot(g, omega), p - 2.0) *
                 spec.f.hessian_form(omega);
    }
    return -(p / rho) * rho * rho * angular * radial;
  };
  return richardson(rule, points);
}

double kernel_moment(const Kernel& kernel, int d, double q) {
  if (d < 1) fail(Errc::kInvalidSpec, "moment needs d >= 1");
  const double dd = static_cast<double>(d);
  const double sphere_area = 2.0 * std::pow(std::numbers::pi, dd / 2.0) / std::tgamma(dd / 2.0);
  const double s = q + dd;
  const auto& knots = kernel.knots();
  double radial = 0.0;
  if (kernel.kind() == Kernel::Kind::kTriangular) {
    radial = std::pow(knots.back(), s) / (s * (s + 1.0));
  } else {
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double mid = 0.5 * (knots[i] + knots[i + 1]);
      radial += kernel(mid) * (std::pow(knots[i + 1], s) - std::pow(knots[i], s)) / s;
    }
  }
  return sphere_area * radial;
}

}  // namespace otlaplace
