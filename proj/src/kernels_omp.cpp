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

#include <algorithm>
#include <array>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "featgrind/bitpack.hpp"
#include "featgrind/kernels.hpp"

namespace featgrind::kernels {

void set_num_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace omp {

void sq_quantize(std::span<const float> values, const SqParams& p, std::span<uint32_t> codes) {
  const auto n = static_cast<int64_t>(values.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) codes[i] = sq_quantize_value(values[i], p);
}

void pack(std::span<const uint32_t> codes, unsigned bits, std::span<uint8_t> out) {
  // Eight codes of `bits` bits span exactly `bits` bytes, so groups of
  // eight never share an output byte.
  const auto groups = static_cast<int64_t>((codes.size() + 7) / 8);
#pragma omp parallel for schedule(static)
  for (int64_t g = 0; g < groups; ++g) {
    const size_t first = static_cast<size_t>(g) * 8;
    const size_t last = std::min(first + 8, codes.size());
    for (size_t i = first; i < last; ++i) write_code(out, i, bits, codes[i]);
  }
}

void sq_gather_decode(std::span<const uint8_t> payload, const SqParams& p, uint64_t d,
                      std::span<const uint64_t> rows, std::span<float> out) {
  const auto bits = static_cast<unsigned>(p.k);
  std::array<float, 256> table{};
  for (uint32_t q = 0; q < (1u << bits); ++q) table[q] = static_cast<float>(sq_dequantize_value(q, p));
  const auto nrows = static_cast<int64_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (int64_t r = 0; r < nrows; ++r) {
    const uint64_t base = rows[r] * d;
    float* dst = out.data() + static_cast<uint64_t>(r) * d;
    if (bits == 8) {
      for (uint64_t j = 0; j < d; ++j) dst[j] = table[payload[base + j]];
    } else {
      for (uint64_t j = 0; j < d; ++j) dst[j] = table[read_code(payload, base + j, bits)];
    }
  }
}

void nearest_centroid(std::span<const double> x, uint64_t dim, std::span<const double> centroids, Metric metric,
                      std::span<uint32_t> assign, std::span<double> cost) {
  const auto n = static_cast<int64_t>(x.size() / dim);
  const uint64_t k = centroids.size() / dim;
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    const auto row = x.subspan(static_cast<uint64_t>(i) * dim, dim);
    uint32_t best = 0;
    double best_cost = point_cost(row, centroids.subspan(0, dim), metric);
    for (uint64_t c = 1; c < k; ++c) {
      const double v = point_cost(row, centroids.subspan(c * dim, dim), metric);
      if (v < best_cost) {
        best_cost = v;
        best = static_cast<uint32_t>(c);
      }
    }
    assign[i] = best;
    cost[i] = best_cost;
  }
}

void mean_aggregate(const CsrGraph& g, Block block) {
  const uint64_t w = block.width;
  const auto n = static_cast<int64_t>(g.num_nodes());
#pragma omp parallel
  {
    std::vector<double> sum(w);
#pragma omp for schedule(dynamic, 64)
    for (int64_t i = 0; i < n; ++i) {
      const auto row = g.neighbors(static_cast<uint64_t>(i));
      double* dst = block.out.data() + static_cast<uint64_t>(i) * w;
      if (row.empty()) {
        std::fill(dst, dst + w, 0.0);
        continue;
      }
      // Same per-element summation order as the serial kernel (neighbor
      // order), just with the column loop innermost.
      std::fill(sum.begin(), sum.end(), 0.0);
      for (NodeId j : row) {
        const double* src = block.in.data() + static_cast<uint64_t>(j) * w;
        for (uint64_t c = 0; c < w; ++c) sum[c] += src[c];
      }
      const auto deg = static_cast<double>(row.size());
      for (uint64_t c = 0; c < w; ++c) dst[c] = sum[c] / deg;
    }
  }
}

void accumulate_row_sumsq(std::span<const double> block, uint64_t width, std::span<double> acc) {
  const auto n = static_cast<int64_t>(acc.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* src = block.data() + static_cast<uint64_t>(i) * width;
    for (uint64_t c = 0; c < width; ++c) s += src[c] * src[c];
    acc[i] += s;
  }
}

}  // namespace omp
}  // namespace featgrind::kernels
