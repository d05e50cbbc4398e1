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
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "otlaplace/measures.hpp"
#include "otlaplace/transport.hpp"

namespace otlaplace {

// Linear optimal transport embedding: measure i is represented by the images
// T_i(r) of the reference points under the optimal map reference -> mu_i.
// Row i of `data` holds those images flattened (m_ref * k values).
struct LotEmbedding {
  EmpiricalMeasure reference;
  std::size_t n = 0;
  std::vector<double> data;
  std::optional<std::size_t> source_index_of_reference;

  std::size_t reference_size() const noexcept { return reference.size(); }
  std::size_t dim() const noexcept { return reference.dim(); }
  std::size_t row_length() const noexcept { return reference.size() * reference.dim(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data.data() + i * row_length(), row_length()};
  }
  TransportMap map(std::size_t i) const;
};

struct LotOptions {
  std::size_t jobs = 1;
  TransportOptions transport;
};

// Measures equal to the reference get the identity map without a solve.
// Errors: DimensionMismatch and anything raised by w2_exact.
LotEmbedding lot_embed(const EmpiricalMeasure& reference,
                       const LabeledDataset& dataset,
                       const LotOptions& options = {});

// Uses dataset.measures[reference_index] as the reference.
// Errors: IndexOutOfRange.
LotEmbedding lot_embed(const LabeledDataset& dataset, std::size_t reference_index,
                       const LotOptions& options = {});

// ||T_i - T_j|| in L2(reference). Errors: IndexOutOfRange.
double lot_distance(const LotEmbedding& emb, std::size_t i, std::size_t j);

// "OTLE", u32 n, u32 m_ref, u32 k, then n * m_ref * k f64 row-major.
void save_lot_embedding(const LotEmbedding& emb, const std::filesystem::path& path);

}  // namespace otlaplace
