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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "featgrind/features.hpp"
#include "featgrind/kmeans.hpp"

namespace featgrind {

inline constexpr uint32_t kMaxCodebookLength = 16384;

enum class CodeLayout : uint8_t { kPacked = 0, kByteAligned = 1 };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric m);
CodeLayout parse_layout(std::string_view name);
std::string_view to_string(CodeLayout l);

struct VqParams {
  uint32_t width = 16;
  uint32_t length = 256;
  Metric metric = Metric::kCosine;
  CodeLayout layout = CodeLayout::kPacked;
  /// Unset means min(1, 1e6 / n).
  std::optional<double> fit_sample_fraction;
  uint32_t kmeans_max_iters = 50;
  double kmeans_tol = 1e-4;
  uint32_t restarts = 4;
  uint64_t seed = 0;

  void validate() const;
};

/// Bits per code: ceil(log2 length), at least 1.
unsigned vq_code_bits(uint32_t length);
/// Bits a code actually occupies under the layout.
unsigned vq_code_storage_bits(uint32_t length, CodeLayout layout);

/// One codebook per part of `width` consecutive dimensions; the last part
/// is narrower when width does not divide d.
struct VqCodec {
  VqParams params;
  uint64_t n = 0;
  uint64_t d = 0;
  uint32_t num_parts = 0;
  /// codebooks[p] is length x part_width(p) floats.
  std::vector<std::vector<float>> codebooks;
  /// Distinct entries actually fit per part (< length when a part has fewer
  /// distinct sub-vectors; the tail is padded with copies of the last entry).
  std::vector<uint32_t> part_entries;
  /// Fit objective per part and its per-iteration history (not serialized).
  std::vector<double> part_objective;
  std::vector<std::vector<double>> part_history;
  /// n x num_parts, row-major. Empty until encode.
  std::vector<uint32_t> codes;
  bool has_codes = false;
  uint32_t source_elem_bits = 32;

  uint32_t part_offset(uint32_t p) const { return p * params.width; }
  uint32_t part_width(uint32_t p) const;
  std::span<const float> entry(uint32_t p, uint32_t idx) const {
    const uint32_t w = part_width(p);
    return {codebooks[p].data() + static_cast<uint64_t>(idx) * w, w};
  }
};

/// Fits codebooks on a uniform row sample. Codes are left empty.
VqCodec fit_vq(const FeatureMatrix& f, const VqParams& p);

/// Nearest entry per part (max cosine for kCosine); ties to the lowest index.
/// Zero sub-vectors under kCosine map to entry 0.
VqCodec encode_vq(const FeatureMatrix& f, VqCodec c);

/// Rows in the given order, or all rows when `rows` is empty.
FeatureMatrix decode_vq(const VqCodec& c, std::span<const uint64_t> rows = {});

/// Total fit-style objective of encoded rows against the codebooks: squared
/// L2 for kEuclidean, sum of (1 - cos) over nonzero sub-vectors for kCosine.
double vq_objective(const FeatureMatrix& f, const VqCodec& c);

struct VqCompressionRatio {
  double theoretical = 0.0;  // width * b / log2(length)
  double realized = 0.0;     // width * b / storage bits per code
  uint64_t codebook_bytes = 0;
};
VqCompressionRatio vq_compression_ratio(const VqCodec& c);
VqCompressionRatio vq_compression_ratio(uint32_t width, uint32_t length, CodeLayout layout,
                                        uint32_t elem_bits = 32);

/// VQF1: magic "VQF1\0\0\0\0", version u32 = 1, metric u8, code_layout u8,
/// pad u16, width u32, length u32, num_parts u32, n u64, d u64, codebooks
/// (f32, part-major), codes. n = 0 marks a codebook-only file.
inline constexpr uint64_t kVqHeaderBytes = 44;
std::vector<uint8_t> encode_vqf(const VqCodec& c);
VqCodec decode_vqf(std::span<const uint8_t> bytes);
VqCodec load_vq(const std::filesystem::path& path);
void save_vq(const VqCodec& c, const std::filesystem::path& path);

}  // namespace featgrind
