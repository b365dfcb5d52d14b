// Copyright 2026 The featgrind Authors.
//
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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace featgrind {

/// Dense row-major n x d node-feature matrix. `elem_bits` is the declared
/// width of one raw element and is what compression ratios are measured
/// against; in memory the values are always float.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(uint64_t n, uint64_t d, uint32_t elem_bits = 32);
  FeatureMatrix(uint64_t n, uint64_t d, std::vector<float> values, uint32_t elem_bits = 32);

  uint64_t rows() const { return n_; }
  uint64_t cols() const { return d_; }
  uint32_t elem_bits() const { return elem_bits_; }

  std::span<float> row(uint64_t i) { return {values_.data() + i * d_, d_}; }
  std::span<const float> row(uint64_t i) const { return {values_.data() + i * d_, d_}; }
  float& at(uint64_t i, uint64_t j) { return values_[i * d_ + j]; }
  float at(uint64_t i, uint64_t j) const { return values_[i * d_ + j]; }

  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }

  /// Throws DataError naming the first non-finite (row, col).
  void check_finite() const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  uint64_t n_ = 0;
  uint64_t d_ = 0;
  uint32_t elem_bits_ = 32;
  std::vector<float> values_;
};

/// FMAT1: 32-byte header (magic "FMAT1\0\0\0", version u32 = 1,
/// elem_bits u32, n u64, d u64) followed by the row-major payload.
/// Only elem_bits = 32 (IEEE float) payloads are supported.
std::vector<uint8_t> encode_fmat(const FeatureMatrix& f);
FeatureMatrix decode_fmat(std::span<const uint8_t> bytes);

FeatureMatrix load_features(const std::filesystem::path& path);
void save_features(const FeatureMatrix& f, const std::filesystem::path& path);

/// Reads only the header (n, d, elem_bits) without touching the payload.
/// Synthetic rows: one shared random unit direction plus noise * N(0, I/d).
FeatureMatrix synthetic_features(uint64_t n, uint64_t d, double noise, uint64_t seed);

struct FeatureShape {
  uint64_t n = 0;
  uint64_t d = 0;
  uint32_t elem_bits = 32;
};
FeatureShape peek_features(const std::filesystem::path& path);

}  // namespace featgrind
