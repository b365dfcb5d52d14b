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

#include "featgrind/sq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "featgrind/binio.hpp"
#include "featgrind/bitpack.hpp"
#include "featgrind/error.hpp"
#include "featgrind/kernels.hpp"
#include "featgrind/rng.hpp"

namespace featgrind {

void SqParams::validate() const {
  if (k < 1 || k > 8) throw InvalidArgument("SQ bit width k must be in [1, 8], got " + std::to_string(k));
  if (!(clip_tail_fraction >= 0.0 && clip_tail_fraction <= 0.2))
    throw InvalidArgument("clip tail fraction must be in [0, 0.2]");
  if (!std::isfinite(e_min) || !std::isfinite(e_max)) throw InvalidArgument("SQ range must be finite");
  if (k >= 2 && !(e_min < e_max))
    throw InvalidArgument("SQ range is empty (e_min >= e_max); constant-magnitude features cannot be quantized with k >= 2");
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty set");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SqParams fit_sq(const FeatureMatrix& f, int k, double clip_tail_fraction) {
  SqParams p;
  p.k = k;
  p.clip_tail_fraction = clip_tail_fraction;
  if (k < 1 || k > 8) throw InvalidArgument("SQ bit width k must be in [1, 8], got " + std::to_string(k));
  if (!(clip_tail_fraction >= 0.0 && clip_tail_fraction <= 0.2))
    throw InvalidArgument("clip tail fraction must be in [0, 0.2]");

  std::vector<double> logs;
  for (float x : f.values())
    if (x != 0.0f) logs.push_back(std::log2(std::abs(static_cast<double>(x))));

  if (logs.empty()) {
    if (k >= 2) throw InvalidArgument("cannot fit SQ range: every feature value is zero");
    p.e_min = 0.0;
    p.e_max = 0.0;
    return p;
  }
  if (logs.size() > kSqFitSampleCap) {
    // Fixed-seed partial shuffle keeps the fit reproducible.
    Rng rng(0x5153u);
    for (uint64_t i = 0; i < kSqFitSampleCap; ++i)
      std::swap(logs[i], logs[i + rng.below(logs.size() - i)]);
    logs.resize(kSqFitSampleCap);
  }
  std::sort(logs.begin(), logs.end());
  p.e_min = sorted_quantile(logs, clip_tail_fraction);
  p.e_max = sorted_quantile(logs, 1.0 - clip_tail_fraction);
  if (k >= 2) p.validate();
  return p;
}

uint32_t sq_quantize_value(double x, const SqParams& p) {
  if (p.k == 1) return x >= 0.0 ? 1u : 0u;
  const int64_t half = int64_t{1} << (p.k - 1);
  const double lg = x == 0.0 ? p.e_min : std::clamp(std::log2(std::abs(x)), p.e_min, p.e_max);
  auto t = static_cast<int64_t>(std::floor((lg - p.e_min) / (p.e_max - p.e_min) * static_cast<double>(half)));
  t = std::clamp<int64_t>(t, 0, half - 1);
  return static_cast<uint32_t>(x >= 0.0 ? half + t : half - 1 - t);
}

double sq_dequantize_value(uint32_t code, const SqParams& p) {
  const int64_t half = int64_t{1} << (p.k - 1);
  const auto q = static_cast<int64_t>(code);
  const double range = p.e_max - p.e_min;
  if (q < half) return -std::exp2((static_cast<double>(half - q) - 0.5) * range / static_cast<double>(half) + p.e_min);
  return std::exp2((static_cast<double>(q - half) + 0.5) * range / static_cast<double>(half) + p.e_min);
}

uint32_t SqCodec::code(uint64_t row, uint64_t col) const {
  return read_code(payload, row * d + col, static_cast<unsigned>(params.k));
}

SqCodec quantize_sq(const FeatureMatrix& f, const SqParams& p) {
  p.validate();
  SqCodec c;
  c.params = p;
  c.n = f.rows();
  c.d = f.cols();
  c.source_elem_bits = f.elem_bits();
  std::vector<uint32_t> codes(f.values().size());
  kernels::omp::sq_quantize(f.values(), p, codes);
  c.payload.assign(packed_size(codes.size(), static_cast<unsigned>(p.k)), 0);
  kernels::omp::pack(codes, static_cast<unsigned>(p.k), c.payload);
  return c;
}

FeatureMatrix dequantize_sq(const SqCodec& c, std::span<const uint64_t> rows) {
  std::vector<uint64_t> all;
  if (rows.empty()) {
    all.resize(c.n);
    for (uint64_t i = 0; i < c.n; ++i) all[i] = i;
    rows = all;
  }
  for (uint64_t r : rows)
    if (r >= c.n) throw DataError("row id " + std::to_string(r) + " out of range (n = " + std::to_string(c.n) + ")");
  FeatureMatrix out(rows.size(), c.d, c.source_elem_bits);
  kernels::omp::sq_gather_decode(c.payload, c.params, c.d, rows, out.values());
  return out;
}

CompressionRatio sq_compression_ratio(const SqCodec& c) {
  CompressionRatio cr;
  cr.payload = static_cast<double>(c.source_elem_bits) / static_cast<double>(c.params.k);
  const double raw_bytes = static_cast<double>(c.n * c.d) * c.source_elem_bits / 8.0;
  const double stored = static_cast<double>(kSqHeaderBytes + packed_size(c.n * c.d, static_cast<unsigned>(c.params.k)));
  cr.with_header = raw_bytes / stored;
  return cr;
}

// ---------------------------------------------------------------------------

namespace {
constexpr binio::Magic kMagic = binio::make_magic("SQF1");
constexpr uint32_t kVersion = 1;
}  // namespace

std::vector<uint8_t> encode_sqf(const SqCodec& c) {
  binio::Writer w;
  w.magic(kMagic);
  w.put<uint32_t>(kVersion);
  w.put<uint32_t>(static_cast<uint32_t>(c.params.k));
  w.put<uint64_t>(c.n);
  w.put<uint64_t>(c.d);
  w.put<double>(c.params.e_min);
  w.put<double>(c.params.e_max);
  w.put<double>(c.params.clip_tail_fraction);
  w.array<uint8_t>(c.payload);
  return w.take();
}

SqCodec decode_sqf(std::span<const uint8_t> bytes) {
  binio::Reader r(bytes, "SQF1");
  r.expect_magic(kMagic);
  const auto version = r.get<uint32_t>();
  if (version != kVersion) throw DataError("SQF1: unsupported version " + std::to_string(version));
  SqCodec c;
  c.params.k = static_cast<int>(r.get<uint32_t>());
  c.n = r.get<uint64_t>();
  c.d = r.get<uint64_t>();
  c.params.e_min = r.get<double>();
  c.params.e_max = r.get<double>();
  c.params.clip_tail_fraction = r.get<double>();
  try {
    c.params.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("SQF1: ") + e.what());
  }
  if (c.d != 0 && c.n > (uint64_t{1} << 60) / c.d) throw DataError("SQF1: corrupt header dimensions");
  c.payload = r.array<uint8_t>(packed_size(c.n * c.d, static_cast<unsigned>(c.params.k)));
  r.expect_end();
  return c;
}

SqCodec load_sq(const std::filesystem::path& path) { return decode_sqf(binio::read_file(path)); }

void save_sq(const SqCodec& c, const std::filesystem::path& path) { binio::write_file(path, encode_sqf(c)); }

}  // namespace featgrind
