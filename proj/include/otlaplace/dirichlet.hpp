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
#include <span>
#include <vector>

#include "otlaplace/graph.hpp"

namespace otlaplace {

// E(f) = 1/(n^2 eps^p) * sum_{i,j} W_ij |f_i - f_j|^p over ordered pairs.
// Errors: ShapeMismatch, InvalidExponent (p < 1).
double graph_dirichlet_energy(const WeightedGraph& graph, std::span<const double> f,
                              double p);

// (Lf)_i = p/(2 n eps^p) * sum_j W_ij |f_i - f_j|^{p-2} (f_i - f_j).
// Errors: ShapeMismatch, InvalidExponent (p < 2).
std::vector<double> graph_p_laplacian(const WeightedGraph& graph, std::span<const double> f,
                                      double p);

// <a, b> in L2 of the uniform measure on the nodes: (1/n) sum a_i b_i.
double node_inner(std::span<const double> a, std::span<const double> b);

// Expanding the two definitions gives E(f) = (4/p) <Lf, f> and
// d/dt E(f + t g)|_{t=0} = 4 <Lf, g>.
inline constexpr double kFirstVariationConstant = 4.0;
inline double energy_operator_constant(double p) { return 4.0 / p; }

// ---------------------------------------------------------------------------
// Continuum side, translation family: ||B_theta(h)|| = |h|.

// Density on an axis-aligned box in R^d, piecewise constant along axis 0.
struct BoxDensity {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> breakpoints;  // axis-0 cuts, from lower[0] to upper[0]
  std::vector<double> values;       // one per axis-0 interval

  static BoxDensity uniform(std::vector<double> lower, std::vector<double> upper);
  std::size_t dim() const noexcept { return lower.size(); }
  // 0 outside the box.
  double operator()(std::span<const double> theta) const noexcept;
  // Throws InvalidSpec unless values are positive and integrate to 1.
  void validate() const;
};

// f(theta) = 0.5 theta^T H theta + a . theta + b; empty H means zero.
struct QuadraticFunction {
  std::vector<double> hessian;
  std::vector<double> gradient;
  double offset = 0.0;

  static QuadraticFunction linear(std::vector<double> a, double b = 0.0);
  static QuadraticFunction quadratic(std::vector<double> h, std::vector<double> a,
                                     double b = 0.0);
  std::size_t dim() const noexcept { return gradient.size(); }
  double value(std::span<const double> theta) const;
  std::vector<double> grad(std::span<const double> theta) const;
  double hessian_form(std::span<const double> u) const;
};

struct ContinuumSpec {
  BoxDensity density;
  QuadraticFunction f;
  Kernel kernel = Kernel::indicator();
  double p = 2.0;

  std::size_t dim() const noexcept { return density.dim(); }
  // InvalidSpec for inconsistent dimensions, d outside 1..3, bad density;
  // InvalidExponent for p < 1.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // Richardson estimate
};

// int_S int_{R^d} |grad f(theta) . h|^p eta(|h|) rho(theta)^2 dh dtheta.
// Midpoint tensor grids with `points` nodes per axis and per kernel piece,
// extrapolated from `points` and 2*`points`. Errors: InvalidSpec (points < 8).
QuadratureResult continuum_energy(const ContinuumSpec& spec, std::size_t points);

// Laplace-Beltrami operator of the continuum energy at an interior theta:
//   -(p/rho) int h . grad_theta[eta(|h|) rho^2 |G.h|^{p-2} G.h] dh,  G = grad f.
// The density is piecewise constant, so grad rho vanishes away from cuts.
// Errors: BoundaryPoint, InvalidExponent (p < 2), InvalidSpec.
QuadratureResult laplace_beltrami_translation(const ContinuumSpec& spec,
                                              std::span<const double> theta,
                                              std::size_t points);

// int_{R^d} |h|^q eta(|h|) dh in closed form.
double kernel_moment(const Kernel& kernel, int d, double q);

}  // namespace otlaplace
