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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otlaplace/graph.hpp"
#include "otlaplace/measures.hpp"

namespace otlaplace {

struct LearnOptions {
  // Give nodes in label-free components the majority label instead of failing.
  bool majority_fallback = false;
  // Class columns solved concurrently.
  std::size_t jobs = 1;
  // Unlabeled blocks smaller than this use a dense factorization.
  std::size_t dense_threshold = 500;
  std::size_t max_cg_iterations = 20000;
};

struct LearnResult {
  std::size_t n = 0;
  int n_classes = 0;
  std::vector<double> values;    // n x c, row-major
  std::vector<int> predictions;  // argmax per row, lowest index on ties
  double residual = 0.0;         // stationarity sup-norm on unlabeled nodes
  std::size_t iterations = 0;
  double objective = 0.0;        // energy summed over class columns
  bool converged = true;
  // Components (ids from connected_components) holding no labeled node.
  std::vector<std::size_t> unlabeled_components;
  bool used_fallback = false;
  // p > 2 only: objective after every accepted step, starting point first.
  std::vector<double> objective_trace;

  double value(std::size_t i, int l) const noexcept {
    return values[i * static_cast<std::size_t>(n_classes) + static_cast<std::size_t>(l)];
  }
};

// Harmonic extension of one-hot labels: on unlabeled nodes (D - W) f = 0.
// `labels[i]` set means node i is pinned. Errors: ShapeMismatch, InvalidSpec
// (label out of range), UnlabeledComponent, SingularSystem.
LearnResult solve_p2(const WeightedGraph& graph, std::span<const std::optional<int>> labels,
                     int n_classes, const LearnOptions& options = {});
LearnResult solve_p2(const WeightedGraph& graph, const LabeledDataset& dataset,
                     const LearnOptions& options = {});

struct PSolveOptions {
  std::size_t max_iter = 5000;
  // Stop when the relative objective decrease or the gradient sup-norm on
  // unlabeled nodes falls below tol.
  double tol = 1e-10;
  LearnOptions learn;
};

// Minimizes the p-Dirichlet energy of each class column with labeled nodes
// pinned: Barzilai-Borwein gradient steps with Armijo backtracking, started
// from the p = 2 solution. Hitting max_iter returns the last (best) iterate
// with converged = false. Errors: InvalidExponent (p <= 2) and those of solve_p2.
LearnResult solve_p(const WeightedGraph& graph, std::span<const std::optional<int>> labels,
                    int n_classes, double p, const PSolveOptions& options = {});

struct Score {
  double accuracy = 1.0;
  std::size_t evaluated = 0;
  // No unlabeled node to score; accuracy is reported as 1.
  bool vacuous = false;
};

// Accuracy over nodes outside `labeled_indices`. Errors: ShapeMismatch,
// IndexOutOfRange.
Score predict_and_score(const LearnResult& result, std::span<const int> truth,
                        std::span<const std::size_t> labeled_indices);

// Argmax of each row, ties to the lowest class.
std::vector<int> argmax_rows(std::span<const double> values, std::size_t n, int n_classes);

// CSV "node,pred,truth,value_0..value_{c-1}". Errors: ShapeMismatch, IoError.
void write_predictions_csv(const std::string& path, const LearnResult& result,
                           std::span<const int> truth);

}  // namespace otlaplace
