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

#include "otlaplace/laplace_learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "otlaplace/dirichlet.hpp"
#include "otlaplace/error.hpp"
#include "otlaplace/parallel.hpp"
#include "binary_io.hpp"

namespace otlaplace {
namespace {

constexpr std::size_t kNotFree = std::numeric_limits<std::size_t>::max();

// Which nodes are solved for, and where they sit in the reduced system.
struct Layout {
  std::vector<std::size_t> free_nodes;
  std::vector<std::size_t> position;  // node -> index in free_nodes or kNotFree
};

LearnResult prepare(const WeightedGraph& graph, std::span<const std::optional<int>> labels,
                    int n_classes, const LearnOptions& options, Layout& layout) {
  if (labels.size() != graph.n) {
    fail(Errc::kShapeMismatch, std::to_string(labels.size()) + " labels for " +
                                   std::to_string(graph.n) + " nodes");
  }
  if (n_classes < 1) fail(Errc::kInvalidSpec, "need at least one class");
  LearnResult r;
  r.n = graph.n;
  r.n_classes = n_classes;
  const auto c = static_cast<std::size_t>(n_classes);
  r.values.assign(graph.n * c, 0.0);

  std::vector<std::size_t> votes(c, 0);
  for (const auto& l : labels) {
    if (!l) continue;
    if (*l < 0 || *l >= n_classes) {
      fail(Errc::kInvalidSpec, "label " + std::to_string(*l) + " outside [0, " +
                                   std::to_string(n_classes) + ")");
    }
    ++votes[static_cast<std::size_t>(*l)];
  }

  const auto component = connected_components(graph);
  const std::size_t num_components =
      component.empty() ? 0 : *std::max_element(component.begin(), component.end()) + 1;
  std::vector<char> has_label(num_components, 0);
  for (std::size_t i = 0; i < graph.n; ++i) {
    if (labels[i]) has_label[component[i]] = 1;
  }
  for (std::size_t k = 0; k < num_components; ++k) {
    if (!has_label[k]) r.unlabeled_components.push_back(k);
  }
  if (!r.unlabeled_components.empty()) {
    const bool any_label = std::any_of(votes.begin(), votes.end(), [](auto v) { return v > 0; });
    if (!options.majority_fallback || !any_label) {
      std::string ids;
      for (std::size_t k : r.unlabeled_components) {
        if (!ids.empty()) ids += ",";
        ids += std::to_string(k);
      }
      fail(Errc::kUnlabeledComponent, "components without labels: " + ids);
    }
    r.used_fallback = true;
  }
  const std::size_t majority = static_cast<std::size_t>(
      std::max_element(votes.begin(), votes.end()) - votes.begin());

  layout.position.assign(graph.n, kNotFree);
  for (std::size_t i = 0; i < graph.n; ++i) {
    if (labels[i]) {
      r.values[i * c + static_cast<std::size_t>(*labels[i])] = 1.0;
    } else if (!has_label[component[i]]) {
      r.values[i * c + majority] = 1.0;
    } else {
      layout.position[i] = layout.free_nodes.size();
      layout.free_nodes.push_back(i);
    }
  }
  return r;
}

// sup over free nodes and classes of |((D - W) f)_i|.
double harmonic_residual(const WeightedGraph& graph, const LearnResult& r,
                         const Layout& layout) {
  const auto c = static_cast<std::size_t>(r.n_classes);
  double worst = 0.0;
  for (std::size_t i : layout.free_nodes) {
    const auto nb = graph.neighbors(i);
    const auto w = graph.neighbor_weights(i);
    for (std::size_t l = 0; l < c; ++l) {
      double s = 0.0;
      for (std::size_t q = 0; q < nb.size(); ++q) {
        s += w[q] * (r.values[i * c + l] - r.values[nb[q] * c + l]);
      }
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

void finish(const WeightedGraph& graph, double p, LearnResult& r) {
  r.predictions = argmax_rows(r.values, r.n, r.n_classes);
  const auto c = static_cast<std::size_t>(r.n_classes);
  std::vector<double> column(r.n);
  r.objective = 0.0;
  for (std::size_t l = 0; l < c; ++l) {
    for (std::size_t i = 0; i < r.n; ++i) column[i] = r.values[i * c + l];
    r.objective += graph_dirichlet_energy(graph, column, p);
  }
}

}  // namespace

std::vector<int> argmax_rows(std::span<const double> values, std::size_t n, int n_classes) {
  const auto c = static_cast<std::size_t>(n_classes);
  if (values.size() != n * c) fail(Errc::kShapeMismatch, "values are not n x c");
  std::vector<int> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t l = 1; l < c; ++l) {
      if (values[i * c + l] > values[i * c + best]) best = l;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

LearnResult solve_p2(const WeightedGraph& graph, std::span<const std::optional<int>> labels,
                     int n_classes, const LearnOptions& options) {
  Layout layout;
  LearnResult r = prepare(graph, labels, n_classes, options, layout);
  const std::size_t u = layout.free_nodes.size();
  const auto c = static_cast<std::size_t>(n_classes);
  if (u == 0) {
    finish(graph, 2.0, r);
    return r;
  }

  // L_uu f_u = W_ul y_l, with y_l including fallback rows (isolated from u).
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(u),
                                              static_cast<Eigen::Index>(c));
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t a = 0; a < u; ++a) {
    const std::size_t i = layout.free_nodes[a];
    const auto nb = graph.neighbors(i);
    const auto w = graph.neighbor_weights(i);
    double deg = 0.0;
    for (std::size_t q = 0; q < nb.size(); ++q) {
      deg += w[q];
      const std::size_t j = nb[q];
      if (layout.position[j] != kNotFree) {
        triplets.emplace_back(static_cast<int>(a), static_cast<int>(layout.position[j]), -w[q]);
      } else {
        for (std::size_t l = 0; l < c; ++l) {
          rhs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(l)) +=
              w[q] * r.values[j * c + l];
        }
      }
    }
    triplets.emplace_back(static_cast<int>(a), static_cast<int>(a), deg);
  }

  Eigen::MatrixXd solution(rhs.rows(), rhs.cols());
  if (u < options.dense_threshold) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(rhs.rows(), rhs.rows());
    for (const auto& t : triplets) dense(t.row(), t.col()) += t.value();
    Eigen::LLT<Eigen::MatrixXd> llt(dense);
    if (llt.info() != Eigen::Success) {
      fail(Errc::kSingularSystem, "unlabeled block is not positive definite");
    }
    solution = llt.solve(rhs);
  } else {
    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(u));
    a.setFromTriplets(triplets.begin(), triplets.end());
    std::vector<std::size_t> iterations(c, 0);
    parallel_for(c, options.jobs, [&](std::size_t l) {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                               Eigen::DiagonalPreconditioner<double>>
          cg;
      cg.setMaxIterations(static_cast<Eigen::Index>(options.max_cg_iterations));
      cg.setTolerance(1e-14);
      cg.compute(a);
      const Eigen::VectorXd b = rhs.col(static_cast<Eigen::Index>(l));
      Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
      // A couple of restarts mop up the drift in the recursive residual.
      for (int pass = 0; pass < 3; ++pass) {
        x = cg.solveWithGuess(b, x);
        iterations[l] += static_cast<std::size_t>(cg.iterations());
        if ((b - a * x).lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, b.lpNorm<Eigen::Infinity>())) {
          break;
        }
      }
      solution.col(static_cast<Eigen::Index>(l)) = x;
    });
    r.iterations = *std::max_element(iterations.begin(), iterations.end());
  }
  for (std::size_t a = 0; a < u; ++a) {
    for (std::size_t l = 0; l < c; ++l) {
      r.values[layout.free_nodes[a] * c + l] =
          solution(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(l));
    }
  }
  r.residual = harmonic_residual(graph, r, layout);
  finish(graph, 2.0, r);
  return r;
}

LearnResult solve_p2(const WeightedGraph& graph, const LabeledDataset& dataset,
                     const LearnOptions& options) {
  return solve_p2(graph, dataset.labels, dataset.n_classes, options);
}

LearnResult solve_p(const WeightedGraph& graph, std::span<const std::optional<int>> labels,
                    int n_classes, double p, const PSolveOptions& options) {
  if (!(p > 2.0) || !std::isfinite(p)) fail(Errc::kInvalidExponent, "solve_p needs p > 2");
  LearnResult r = solve_p2(graph, labels, n_classes, options.learn);
  Layout layout;
  prepare(graph, labels, n_classes, options.learn, layout);
  const auto c = static_cast<std::size_t>(n_classes);
  const double grad_scale = kFirstVariationConstant / static_cast<double>(graph.n);

  std::vector<std::vector<double>> traces(c);
  std::vector<std::size_t> iterations(c, 0);
  std::vector<char> converged(c, 1);
  std::vector<double> residuals(c, 0.0);

  parallel_for(c, options.learn.jobs, [&](std::size_t l) {
    std::vector<double> x(graph.n);
    for (std::size_t i = 0; i < graph.n; ++i) x[i] = r.values[i * c + l];
    auto free_gradient = [&](const std::vector<double>& f) {
      const auto lap = graph_p_laplacian(graph, f, p);
      std::vector<double> g(layout.free_nodes.size());
      for (std::size_t a = 0; a < g.size(); ++a) g[a] = grad_scale * lap[layout.free_nodes[a]];
      return g;
    };
    auto sup = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double e : v) m = std::max(m, std::abs(e));
      return m;
    };

    double energy = graph_dirichlet_energy(graph, x, p);
    auto& trace = traces[l];
    trace.push_back(energy);
    std::vector<double> g = free_gradient(x);
    if (layout.free_nodes.empty() || sup(g) < options.tol) {
      residuals[l] = sup(g) / grad_scale;
      return;
    }
    double alpha = 0.1 / sup(g);
    std::vector<double> x_new(x);
    std::size_t it = 0;
    bool done = false;
    while (!done && it < options.max_iter) {
      ++it;
      double gg = 0.0;
      for (double e : g) gg += e * e;
      double e_new = energy;
      bool accepted = false;
      while (alpha > 1e-300) {
        for (std::size_t a = 0; a < g.size(); ++a) {
          const std::size_t i = layout.free_nodes[a];
          x_new[i] = x[i] - alpha * g[a];
        }
        e_new = graph_dirichlet_energy(graph, x_new, p);
        if (e_new <= energy - 1e-4 * alpha * gg) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // no representable decrease left
      const auto g_new = free_gradient(x_new);
      double ss = 0.0, sy = 0.0;
      for (std::size_t a = 0; a < g.size(); ++a) {
        const std::size_t i = layout.free_nodes[a];
        const double s = x_new[i] - x[i];
        ss += s * s;
        sy += s * (g_new[a] - g[a]);
      }
      const double decrease = (energy - e_new) / std::max(energy, 1e-300);
      x = x_new;
      energy = e_new;
      g = g_new;
      trace.push_back(energy);
      done = decrease < options.tol || sup(g) < options.tol;
      alpha = sy > 0.0 ? ss / sy : 2.0 * alpha;
    }
    iterations[l] = it;
    converged[l] = done || it < options.max_iter;
    residuals[l] = sup(g) / grad_scale;
    for (std::size_t i = 0; i < graph.n; ++i) r.values[i * c + l] = x[i];
  });

  r.iterations = *std::max_element(iterations.begin(), iterations.end());
  r.converged = std::all_of(converged.begin(), converged.end(), [](char v) { return v != 0; });
  r.residual = *std::max_element(residuals.begin(), residuals.end());
  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.size());
  r.objective_trace.assign(longest, 0.0);
  for (const auto& t : traces) {
    for (std::size_t k = 0; k < longest; ++k) r.objective_trace[k] += t[std::min(k, t.size() - 1)];
  }
  finish(graph, p, r);
  return r;
}

Score predict_and_score(const LearnResult& result, std::span<const int> truth,
                        std::span<const std::size_t> labeled_indices) {
  if (truth.size() != result.n || result.predictions.size() != result.n) {
    fail(Errc::kShapeMismatch, "truth and predictions must cover every node");
  }
  std::vector<char> labeled(result.n, 0);
  for (std::size_t i : labeled_indices) {
    if (i >= result.n) fail(Errc::kIndexOutOfRange, "labeled index " + std::to_string(i));
    labeled[i] = 1;
  }
  Score s;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < result.n; ++i) {
    if (labeled[i]) continue;
    ++s.evaluated;
    correct += (result.predictions[i] == truth[i]);
  }
  if (s.evaluated == 0) {
    s.vacuous = true;
    s.accuracy = 1.0;
  } else {
    s.accuracy = static_cast<double>(correct) / static_cast<double>(s.evaluated);
  }
  return s;
}

void write_predictions_csv(const std::string& path, const LearnResult& result,
                           std::span<const int> truth) {
  if (truth.size() != result.n || result.predictions.size() != result.n) {
    fail(Errc::kShapeMismatch, "truth and predictions must cover every node");
  }
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) fail(Errc::kIoError, "cannot write " + path);
  std::string line = "node,pred,truth";
  for (int l = 0; l < result.n_classes; ++l) line += ",value_" + std::to_string(l);
  std::fprintf(out, "%s\n", line.c_str());
  for (std::size_t i = 0; i < result.n; ++i) {
    line = std::to_string(i) + "," + std::to_string(result.predictions[i]) + "," +
           std::to_string(truth[i]);
    for (int l = 0; l < result.n_classes; ++l) line += "," + detail::format_double(result.value(i, l));
    std::fprintf(out, "%s\n", line.c_str());
  }
  if (std::fclose(out) != 0) fail(Errc::kIoError, "cannot write " + path);
}

}  // namespace otlaplace
