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

// Data-parallel inner loops. Each kernel has a plain serial reference and
// an OpenMP version; both produce bit-identical output for any thread
// count, which the kernel tests check directly.

#include <cstdint>
#include <span>

#include "featgrind/graph.hpp"
#include "featgrind/kmeans.hpp"
#include "featgrind/sq.hpp"

namespace featgrind::kernels {

/// Row-major dense block of doubles, `width` columns per node.
struct Block {
  std::span<const double> in;
  std::span<double> out;
  uint64_t width = 0;
};

namespace serial {
/// codes[i] = sq_quantize_value(values[i], p)
void sq_quantize(std::span<const float> values, const SqParams& p, std::span<uint32_t> codes);
/// Packs codes MSB-first into `out` (packed_size(codes.size(), bits) bytes).
void pack(std::span<const uint32_t> codes, unsigned bits, std::span<uint8_t> out);
/// out[r * d + j] = sq_dequantize_value(code of (rows[r], j), p)
void sq_gather_decode(std::span<const uint8_t> payload, const SqParams& p, uint64_t d,
                      std::span<const uint64_t> rows, std::span<float> out);
/// Best centroid per row of x (n x dim); ties go to the lowest index.
void nearest_centroid(std::span<const double> x, uint64_t dim, std::span<const double> centroids,
                      Metric metric, std::span<uint32_t> assign, std::span<double> cost);
/// out_i = mean of in_j over the stored row of node i.
void mean_aggregate(const CsrGraph& g, Block block);
/// acc[i] += sum over c of block[i * width + c]^2
void accumulate_row_sumsq(std::span<const double> block, uint64_t width, std::span<double> acc);
}  // namespace serial

namespace omp {
/// codes[i] = sq_quantize_value(values[i], p)
void sq_quantize(std::span<const float> values, const SqParams& p, std::span<uint32_t> codes);
/// Packs codes MSB-first into `out` (packed_size(codes.size(), bits) bytes).
void pack(std::span<const uint32_t> codes, unsigned bits, std::span<uint8_t> out);
/// out[r * d + j] = sq_dequantize_value(code of (rows[r], j), p)
void sq_gather_decode(std::span<const uint8_t> payload, const SqParams& p, uint64_t d,
                      std::span<const uint64_t> rows, std::span<float> out);
/// Best centroid per row of x (n x dim); ties go to the lowest index.
void nearest_centroid(std::span<const double> x, uint64_t dim, std::span<const double> centroids,
                      Metric metric, std::span<uint32_t> assign, std::span<double> cost);
/// out_i = mean of in_j over the stored row of node i.
void mean_aggregate(const CsrGraph& g, Block block);
/// acc[i] += sum over c of block[i * width + c]^2
void accumulate_row_sumsq(std::span<const double> block, uint64_t width, std::span<double> acc);
}  // namespace omp

/// Thread count used by the omp kernels (0 = runtime default).
void set_num_threads(int threads);
int max_threads();

}  // namespace featgrind::kernels
