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

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "otlaplace/error.hpp"
#include "otlaplace/measures.hpp"

namespace otlaplace {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'O', 'T', 'L', 'D'};

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class ByteReader {
 public:
  explicit ByteReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_++]} << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return std::bit_cast<double>(v);
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(Errc::kParseError, "truncated binary dataset");
  }
  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

using detail::put_f64;
using detail::put_u32;

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) fail(Errc::kInvalidSpec, std::string(what) + " exceeds u32");
  return static_cast<std::uint32_t>(v);
}

// Reorders nothing: labeled clouds must already precede unlabeled ones.
LabeledDataset finish(std::vector<EmpiricalMeasure> measures,
                      std::vector<std::optional<int>> labels,
                      const LoadOptions& options) {
  if (measures.empty()) fail(Errc::kParseError, "dataset has no clouds");
  if (options.strict) {
    for (const auto& m : measures) {
      if (m.size() != measures.front().size()) {
        fail(Errc::kInconsistentPointCount,
             "clouds have " + std::to_string(measures.front().size()) +
                 " and " + std::to_string(m.size()) + " points");
      }
    }
  }
  try {
    return make_dataset(std::move(measures), std::move(labels));
  } catch (const Error& e) {
    fail(Errc::kParseError, e.what());
  }
}

LabeledDataset parse_binary(const std::vector<unsigned char>& bytes,
                            const LoadOptions& options) {
  ByteReader r(bytes);
  r.skip(4);
  const std::uint32_t n = r.u32();
  const std::uint32_t m = r.u32();
  const std::uint32_t k = r.u32();
  if (n == 0 || m == 0 || k == 0) fail(Errc::kParseError, "zero-sized header");
  const std::uint64_t expected =
      16 + std::uint64_t{n} * m * k * 8 + std::uint64_t{n} * 4;
  if (bytes.size() != expected) {
    fail(Errc::kParseError, "binary dataset has " + std::to_string(bytes.size()) +
                                " bytes, header implies " +
                                std::to_string(expected));
  }
  std::vector<EmpiricalMeasure> measures;
  measures.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<double> coords(std::size_t{m} * k);
    for (auto& c : coords) {
      c = r.f64();
      if (!std::isfinite(c)) fail(Errc::kParseError, "non-finite coordinate");
    }
    measures.push_back(EmpiricalMeasure::from_flat(k, std::move(coords)));
  }
  std::vector<std::optional<int>> labels(n);
  for (auto& l : labels) {
    const std::int32_t v = r.i32();
    if (v >= 0) l = v;
    else if (v != -1) fail(Errc::kParseError, "label below -1");
  }
  return finish(std::move(measures), std::move(labels), options);
}

LabeledDataset parse_json(const std::vector<unsigned char>& bytes,
                          const LoadOptions& options) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    fail(Errc::kParseError, e.what());
  }
  try {
    const auto k = doc.at("k").get<std::size_t>();
    if (k == 0) fail(Errc::kParseError, "k must be positive");
    std::vector<EmpiricalMeasure> measures;
    std::vector<std::optional<int>> labels;
    for (const auto& cloud : doc.at("clouds")) {
      const auto& label = cloud.at("label");
      if (label.is_null()) labels.emplace_back();
      else labels.emplace_back(label.get<int>());
      std::vector<double> coords;
      for (const auto& p : cloud.at("points")) {
        if (p.size() != k) fail(Errc::kParseError, "point dimension differs from k");
        for (const auto& c : p) {
          // NaN and infinities are serialized as null by JSON writers.
          if (!c.is_number()) fail(Errc::kParseError, "non-numeric coordinate");
          const double v = c.get<double>();
          if (!std::isfinite(v)) fail(Errc::kParseError, "non-finite coordinate");
          coords.push_back(v);
        }
      }
      if (coords.empty()) fail(Errc::kParseError, "cloud without points");
      measures.push_back(EmpiricalMeasure::from_flat(k, std::move(coords)));
    }
    return finish(std::move(measures), std::move(labels), options);
  } catch (const json::exception& e) {
    fail(Errc::kParseError, e.what());
  }
}

}  // namespace

LabeledDataset load_point_cloud_dataset(const std::filesystem::path& path,
                                        const LoadOptions& options) {
  const auto bytes = read_all(path);
  if (bytes.empty()) fail(Errc::kParseError, "empty dataset file " + path.string());
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
    return parse_binary(bytes, options);
  }
  return parse_json(bytes, options);
}

void save_dataset_json(const LabeledDataset& dataset,
                       const std::filesystem::path& path) {
  json doc;
  doc["k"] = dataset.ambient_dim();
  json clouds = json::array();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& mu = dataset.measures[i];
    json points = json::array();
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const auto p = mu.point(j);
      points.push_back(std::vector<double>(p.begin(), p.end()));
    }
    json cloud;
    cloud["label"] = dataset.labels[i] ? json(*dataset.labels[i]) : json(nullptr);
    cloud["points"] = std::move(points);
    clouds.push_back(std::move(cloud));
  }
  doc["clouds"] = std::move(clouds);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIoError, "cannot write " + path.string());
  out << doc.dump() << '\n';
  if (!out) fail(Errc::kIoError, "write failed for " + path.string());
}

void save_dataset_binary(const LabeledDataset& dataset,
                         const std::filesystem::path& path) {
  if (dataset.size() == 0) fail(Errc::kEmptyInput, "empty dataset");
  const std::size_t m = dataset.measures.front().size();
  for (const auto& mu : dataset.measures) {
    if (mu.size() != m) {
      fail(Errc::kInconsistentPointCount, "binary format needs uniform m");
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIoError, "cannot write " + path.string());
  out.write(kMagic, 4);
  put_u32(out, checked_u32(dataset.size(), "n"));
  put_u32(out, checked_u32(m, "m"));
  put_u32(out, checked_u32(dataset.ambient_dim(), "k"));
  for (const auto& mu : dataset.measures) {
    for (double c : mu.coords()) put_f64(out, c);
  }
  for (const auto& l : dataset.labels) {
    put_u32(out, static_cast<std::uint32_t>(l ? *l : -1));
  }
  if (!out) fail(Errc::kIoError, "write failed for " + path.string());
}

void export_dataset_csv(const LabeledDataset& dataset,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIoError, "cannot write " + path.string());
  out << "cloud,point,label";
  for (std::size_t a = 0; a < dataset.ambient_dim(); ++a) out << ",x" << a;
  out << '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& mu = dataset.measures[i];
    for (std::size_t j = 0; j < mu.size(); ++j) {
      out << i << ',' << j << ',';
      if (dataset.labels[i]) out << *dataset.labels[i];
      for (double c : mu.point(j)) out << ',' << detail::format_double(c);
      out << '\n';
    }
  }
  if (!out) fail(Errc::kIoError, "write failed for " + path.string());
}

}  // namespace otlaplace
