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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "featgrind/graph.hpp"
#include "featgrind/vq.hpp"

namespace featgrind {

struct SamplerConfig {
  std::vector<uint32_t> fanouts{5, 10, 15};
  uint64_t batch_size = 1024;
  uint64_t seed = 0;

  void validate() const;
};

struct MiniBatchSample {
  std::vector<NodeId> seeds;
  /// Sorted, deduplicated union of the seeds and every sampled layer.
  std::vector<NodeId> frontier;
  /// Sampled (node, neighbor) pairs over all layers.
  uint64_t edges_touched = 0;
};

/// Shuffles the training ids into batches, then expands each batch layer
/// by layer: every node of the previous layer draws min(fanout, degree)
/// distinct neighbors (self-loops excluded) uniformly without replacement.
std::vector<MiniBatchSample> sample_batches(const CsrGraph& g, std::span<const NodeId> train_ids,
                                            const SamplerConfig& cfg);

/// Fingerprint of a batch sequence, used to refuse comparisons across
/// different workloads.
uint64_t workload_fingerprint(std::span<const MiniBatchSample> batches, uint64_t n, uint64_t d,
                              uint32_t elem_bits);

/// What one feature row costs to move.
struct CodecSpec {
  enum class Kind { kFull, kSq, kVq } kind = Kind::kFull;
  int sq_bits = 8;
  uint32_t vq_width = 16;
  uint32_t vq_length = 2048;
  CodeLayout vq_layout = CodeLayout::kPacked;

  static CodecSpec full() { return {}; }
  static CodecSpec sq(int k);
  static CodecSpec vq(uint32_t width, uint32_t length, CodeLayout layout);
  /// "full", "sq:K", "vq" (16-2048 packed) or "vq:W:L[:packed|byte]".
  static CodecSpec parse(std::string_view text);
  std::string name() const;

  /// FULL: d*b/8. SQ: ceil(d*k/8). VQ: num_parts codes, byte-aligned codes
  /// take ceil(bits/8) bytes each, packed rows take ceil(num_parts*bits/8).
  uint64_t bytes_per_row(uint64_t d, uint32_t elem_bits) const;
};

struct CacheConfig {
  uint64_t budget_bytes = 0;  // static, degree-ranked
};

struct CostModel {
  double pcie_bytes_per_sec = 16e9;
  double sample_cost_per_edge = 0.0;
  double dequant_cost_per_elem = 0.0;
  double compute_cost_per_batch = 0.0;

  void validate() const;
};

struct SimReport {
  double sample_s = 0.0;
  double load_s = 0.0;
  double dequant_s = 0.0;
  double compute_s = 0.0;
  uint64_t bytes_transferred = 0;
  double cache_hit_rate = 0.0;
  double epoch_s = 0.0;
  double speedup_vs_baseline = 1.0;
};

struct SimInput {
  const CsrGraph& graph;
  std::span<const MiniBatchSample> batches;
  uint64_t d = 0;
  uint32_t elem_bits = 32;
};

/// Nodes resident in the static cache: the top floor(budget / row_bytes)
/// by descending degree, ties to the lower id. Returned as a membership mask.
std::vector<bool> static_cache(const CsrGraph& g, uint64_t capacity_rows);

/// Deterministic cost accounting for one epoch.
SimReport simulate_epoch(const SimInput& in, const CodecSpec& codec, const CacheConfig& cache,
                         const CostModel& cost);

/// W data-parallel workers: batches dealt round-robin, each worker sees
/// pcie_bytes_per_sec / W and holds its own cache. The epoch is the
/// slowest worker's total.
struct MultiWorkerReport {
  uint32_t workers = 1;
  std::vector<SimReport> per_worker;
  double epoch_s = 0.0;
};
MultiWorkerReport simulate_workers(const SimInput& in, const CodecSpec& codec, const CacheConfig& cache,
                                   const CostModel& cost, uint32_t workers);

/// Chooses compute_cost_per_batch so the FULL, no-cache run of this
/// workload spends `load_fraction` of its epoch loading features.
inline constexpr double kDefaultLoadFraction = 0.85;
CostModel calibrate_cost_model(const SimInput& in, CostModel base,
                               double load_fraction = kDefaultLoadFraction);

// ---------------------------------------------------------------------------
// Breakdown reports

struct NamedReport {
  std::string name;
  SimReport report;
  uint64_t workload = 0;
};

struct BreakdownRow {
  std::string name;
  double sample_frac = 0.0;
  double load_frac = 0.0;
  double dequant_frac = 0.0;
  double compute_frac = 0.0;
  double epoch_s = 0.0;
  double speedup = 1.0;
};

/// speedup = baseline.epoch_s / variant.epoch_s. Throws InvalidArgument if
/// workloads differ.
std::vector<BreakdownRow> breakdown(const NamedReport& baseline, std::span<const NamedReport> variants);

enum class ReportFormat { kText, kCsv, kJson };
ReportFormat parse_report_format(std::string_view name);
std::string render_breakdown(std::span<const BreakdownRow> rows, ReportFormat format);

}  // namespace featgrind
