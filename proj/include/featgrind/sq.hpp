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
#include <vector>

#include "featgrind/features.hpp"

namespace featgrind {

inline constexpr double kDefaultClipTailFraction = 0.005;
/// Above this many nonzero elements, range fitting sorts a uniform sample.
inline constexpr uint64_t kSqFitSampleCap = 10'000'000;

/// Log-domain scalar quantizer parameters. Codes are k bits wide; the
/// clipped log2 magnitude range [e_min, e_max] is split into 2^(k-1)
/// equal buckets per sign.
struct SqParams {
  int k = 8;
  double e_min = 0.0;
  double e_max = 0.0;
  double clip_tail_fraction = kDefaultClipTailFraction;

  /// k in [1, 8], clip fraction in [0, 0.2], finite range, and e_min < e_max
  /// when k >= 2.
  void validate() const;
  bool operator==(const SqParams&) const = default;
};

/// Linear-interpolated quantile (sorted[q * (N-1)]) of `sorted`.
double sorted_quantile(std::span<const double> sorted, double q);

/// e_min / e_max are the clip and (1 - clip) quantiles of log2|x| over
/// nonzero x. Throws InvalidArgument for k >= 2 when there are no nonzero
/// elements or the fitted range is empty.
SqParams fit_sq(const FeatureMatrix& f, int k, double clip_tail_fraction = kDefaultClipTailFraction);

/// Scalar codec for one value. For k = 1 the code is the sign bit.
uint32_t sq_quantize_value(double x, const SqParams& p);
/// Bucket-midpoint reconstruction in the log domain.
double sq_dequantize_value(uint32_t code, const SqParams& p);

/// Quantized matrix: n*d codes of k bits, row-major, MSB-first packed.
struct SqCodec {
  SqParams params;
  uint64_t n = 0;
  uint64_t d = 0;
  /// Raw element width of the source features (not serialized; 32 on load).
  uint32_t source_elem_bits = 32;
  std::vector<uint8_t> payload;

  uint32_t code(uint64_t row, uint64_t col) const;
  bool operator==(const SqCodec&) const = default;
};

SqCodec quantize_sq(const FeatureMatrix& f, const SqParams& p);

/// Decodes the given rows (in the given order), or all rows when `rows` is
/// empty. Throws DataError for an out-of-range row id.
FeatureMatrix dequantize_sq(const SqCodec& c, std::span<const uint64_t> rows = {});

struct CompressionRatio {
  double payload = 0.0;      // raw bits / code bits
  double with_header = 0.0;  // raw bytes / (header + payload bytes)
};
CompressionRatio sq_compression_ratio(const SqCodec& c);

/// SQF1: magic "SQF1\0\0\0\0", version u32 = 1, k u32, n u64, d u64,
/// e_min f64, e_max f64, clip_tail_fraction f64, packed payload.
inline constexpr uint64_t kSqHeaderBytes = 56;
std::vector<uint8_t> encode_sqf(const SqCodec& c);
SqCodec decode_sqf(std::span<const uint8_t> bytes);
SqCodec load_sq(const std::filesystem::path& path);
void save_sq(const SqCodec& c, const std::filesystem::path& path);

}  // namespace featgrind
