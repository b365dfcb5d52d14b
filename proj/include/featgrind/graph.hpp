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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace featgrind {

using NodeId = uint32_t;

/// Undirected graph in canonical CSR form: rows sorted, neighbor ids
/// strictly increasing, (u,v) stored iff (v,u) stored. With
/// has_self_loops every row also contains its own id.
class CsrGraph {
 public:
  CsrGraph() = default;
  CsrGraph(uint64_t n, std::vector<uint64_t> row_offsets, std::vector<NodeId> col_indices,
           bool has_self_loops);

  /// Builds a canonical graph from an undirected edge list. Duplicates and
  /// either orientation are accepted; self-loop entries in `edges` are
  /// dropped and re-added for every node iff `self_loops`.
  static CsrGraph from_edges(uint64_t n, std::span<const std::pair<NodeId, NodeId>> edges,
                             bool self_loops);

  uint64_t num_nodes() const { return n_; }
  uint64_t num_stored() const { return col_indices_.size(); }
  /// Number of undirected non-self-loop edges.
  uint64_t num_edges() const;
  bool has_self_loops() const { return has_self_loops_; }

  std::span<const NodeId> neighbors(uint64_t i) const {
    return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  /// Stored row length, self-loop included when present.
  uint64_t row_size(uint64_t i) const { return row_offsets_[i + 1] - row_offsets_[i]; }
  /// Degree excluding the self-loop.
  uint64_t degree(uint64_t i) const { return row_size(i) - (has_self_loops_ ? 1 : 0); }
  std::vector<uint64_t> degrees() const;

  std::span<const uint64_t> row_offsets() const { return row_offsets_; }
  std::span<const NodeId> col_indices() const { return col_indices_; }

  /// Non-self-loop edges as (u, v) with u < v, in row order.
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  CsrGraph with_self_loops() const;
  CsrGraph without_self_loops() const;

  /// Throws DataError if any structural invariant is broken.
  void validate() const;

  bool operator==(const CsrGraph&) const = default;

 private:
  uint64_t n_ = 0;
  std::vector<uint64_t> row_offsets_{0};
  std::vector<NodeId> col_indices_;
  bool has_self_loops_ = false;
};

/// CSRG1: magic "CSRG1\0\0\0", version u32 = 1, flags u32 (bit 0 =
/// self-loops), n u64, nnz u64, row_offsets u64 x (n+1), col_indices
/// u32 x nnz. Little-endian.
std::vector<uint8_t> encode_csrg(const CsrGraph& g);
CsrGraph decode_csrg(std::span<const uint8_t> bytes);
CsrGraph load_graph(const std::filesystem::path& path);
void save_graph(const CsrGraph& g, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic generators

enum class GraphKind { kStar, kPath, kComplete, kErdosRenyi, kPreferentialAttachment };

GraphKind parse_graph_kind(std::string_view name);
std::string_view to_string(GraphKind kind);

struct GenerateParams {
  double edge_probability = 0.0;  // erdos_renyi
  uint32_t attach_edges = 1;      // preferential_attachment (m)
  bool self_loops = false;
};

/// Node 0 is the star center. Deterministic for a fixed seed.
CsrGraph generate_graph(GraphKind kind, uint64_t n, const GenerateParams& params, uint64_t seed);

// ---------------------------------------------------------------------------
// Edge-deletion sparsifiers

enum class SparsifyVariant { kRandom, kCentralized, kUniform };

SparsifyVariant parse_sparsify_variant(std::string_view name);
std::string_view to_string(SparsifyVariant v);

struct SparsifyMethod {
  SparsifyVariant variant = SparsifyVariant::kRandom;
  double keep_fraction = 1.0;
};

/// ceil(keep_fraction * num_edges), tolerant of representation error in
/// keep_fraction (0.1 * 40000 keeps 4000, not 4001).
uint64_t kept_edge_count(uint64_t num_edges, double keep_fraction);

/// Edge priority used by CENTRALIZED and UNIFORM: min endpoint degree on
/// the input graph.
uint64_t edge_score(const CsrGraph& g, NodeId u, NodeId v);

/// Keeps exactly kept_edge_count(|E|, keep) undirected edges. RANDOM keeps
/// a uniform sample; CENTRALIZED deletes lowest-score edges first; UNIFORM
/// deletes highest-score edges first. Ties are broken by a seeded shuffle.
/// Node count and the self-loop flag are preserved.
CsrGraph sparsify(const CsrGraph& g, const SparsifyMethod& method, uint64_t seed);

}  // namespace featgrind
