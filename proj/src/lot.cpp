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

#include "otlaplace/lot.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "otlaplace/error.hpp"
#include "otlaplace/parallel.hpp"

namespace otlaplace {

TransportMap LotEmbedding::map(std::size_t i) const {
  if (i >= n) fail(Errc::kIndexOutOfRange, "embedding index " + std::to_string(i));
  const auto r = row(i);
  return {dim(), std::vector<double>(r.begin(), r.end())};
}

LotEmbedding lot_embed(const EmpiricalMeasure& reference, const LabeledDataset& dataset,
                       const LotOptions& options) {
  for (const auto& mu : dataset.measures) {
    if (mu.dim() != reference.dim()) {
      fail(Errc::kDimensionMismatch, "measure dimension " + std::to_string(mu.dim()) +
                                         " differs from reference " +
                                         std::to_string(reference.dim()));
    }
  }
  LotEmbedding emb{reference, dataset.size(), {}, std::nullopt};
  const std::size_t len = emb.row_length();
  emb.data.assign(emb.n * len, 0.0);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.measures[i] == reference) {
      emb.source_index_of_reference = i;
      break;
    }
  }
  parallel_for(dataset.size(), options.jobs, [&](std::size_t i) {
    const auto& mu = dataset.measures[i];
    double* dst = emb.data.data() + i * len;
    if (mu == reference) {
      std::copy(reference.coords().begin(), reference.coords().end(), dst);
      return;
    }
    const auto w2 = w2_exact(reference, mu, options.transport);
    const auto images = barycentric_map(w2.plan, mu).images;
    std::copy(images.begin(), images.end(), dst);
  });
  return emb;
}

LotEmbedding lot_embed(const LabeledDataset& dataset, std::size_t reference_index,
                       const LotOptions& options) {
  if (reference_index >= dataset.size()) {
    fail(Errc::kIndexOutOfRange, "reference index " + std::to_string(reference_index) +
                                     " outside dataset of size " +
                                     std::to_string(dataset.size()));
  }
  return lot_embed(dataset.measures[reference_index], dataset, options);
}

double lot_distance(const LotEmbedding& emb, std::size_t i, std::size_t j) {
  if (i >= emb.n || j >= emb.n) {
    fail(Errc::kIndexOutOfRange, "embedding index out of range");
  }
  if (i == j) return 0.0;
  const auto a = emb.row(i), b = emb.row(j);
  return std::sqrt(squared_distance(a, b) / static_cast<double>(emb.reference_size()));
}

void save_lot_embedding(const LotEmbedding& emb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIoError, "cannot write " + path.string());
  out.write("OTLE", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(emb.n));
  detail::put_u32(out, static_cast<std::uint32_t>(emb.reference_size()));
  detail::put_u32(out, static_cast<std::uint32_t>(emb.dim()));
  for (double d : emb.data) detail::put_f64(out, d);
  if (!out) fail(Errc::kIoError, "write failed for " + path.string());
}

}  // namespace otlaplace
