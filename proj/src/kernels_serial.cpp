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

// Reference kernels: straightforward loops, kept as the oracle for the
// OpenMP versions in kernels_omp.cpp.

#include "featgrind/bitpack.hpp"
#include "featgrind/kernels.hpp"

namespace featgrind::kernels::serial {

void sq_quantize(std::span<const float> values, const SqParams& p, std::span<uint32_t> codes) {
  for (size_t i = 0; i < values.size(); ++i) codes[i] = sq_quantize_value(values[i], p);
}

void pack(std::span<const uint32_t> codes, unsigned bits, std::span<uint8_t> out) {
  for (size_t i = 0; i < codes.size(); ++i) write_code(out, i, bits, codes[i]);
}

void sq_gather_decode(std::span<const uint8_t> payload, const SqParams& p, uint64_t d,
                      std::span<const uint64_t> rows, std::span<float> out) {
  const auto bits = static_cast<unsigned>(p.k);
  for (size_t r = 0; r < rows.size(); ++r)
    for (uint64_t j = 0; j < d; ++j)
      out[r * d + j] = static_cast<float>(sq_dequantize_value(read_code(payload, rows[r] * d + j, bits), p));
}

void nearest_centroid(std::span<const double> x, uint64_t dim, std::span<const double> centroids, Metric metric,
                      std::span<uint32_t> assign, std::span<double> cost) {
  const uint64_t n = x.size() / dim;
  const uint64_t k = centroids.size() / dim;
  for (uint64_t i = 0; i < n; ++i) {
    const auto row = x.subspan(i * dim, dim);
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
  for (uint64_t i = 0; i < g.num_nodes(); ++i) {
    const auto row = g.neighbors(i);
    for (uint64_t c = 0; c < w; ++c) {
      double sum = 0.0;
      for (NodeId j : row) sum += block.in[j * w + c];
      block.out[i * w + c] = row.empty() ? 0.0 : sum / static_cast<double>(row.size());
    }
  }
}

void accumulate_row_sumsq(std::span<const double> block, uint64_t width, std::span<double> acc) {
  for (size_t i = 0; i < acc.size(); ++i) {
    double s = 0.0;
    for (uint64_t c = 0; c < width; ++c) s += block[i * width + c] * block[i * width + c];
    acc[i] += s;
  }
}

}  // namespace featgrind::kernels::serial
