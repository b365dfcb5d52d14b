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

#include "featgrind/graph.hpp"

#include <algorithm>
#include <string>

#include "featgrind/binio.hpp"
#include "featgrind/error.hpp"

namespace featgrind {

CsrGraph::CsrGraph(uint64_t n, std::vector<uint64_t> row_offsets, std::vector<NodeId> col_indices,
                   bool has_self_loops)
    : n_(n),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      has_self_loops_(has_self_loops) {
  validate();
}

CsrGraph CsrGraph::from_edges(uint64_t n, std::span<const std::pair<NodeId, NodeId>> edges, bool self_loops) {
  if (n > (uint64_t{1} << 32)) throw InvalidArgument("node count exceeds 32-bit ids");
  std::vector<uint64_t> counts(n + 1, 0);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw InvalidArgument("edge endpoint out of range");
    if (u == v) continue;
    ++counts[u + 1];
    ++counts[v + 1];
  }
  if (self_loops)
    for (uint64_t i = 0; i < n; ++i) ++counts[i + 1];
  for (uint64_t i = 0; i < n; ++i) counts[i + 1] += counts[i];

  std::vector<NodeId> cols(counts[n]);
  std::vector<uint64_t> fill(counts.begin(), counts.end() - 1);
  for (auto [u, v] : edges) {
    if (u == v) continue;
    cols[fill[u]++] = v;
    cols[fill[v]++] = u;
  }
  if (self_loops)
    for (uint64_t i = 0; i < n; ++i) cols[fill[i]++] = static_cast<NodeId>(i);

  // Sort and dedupe each row, then compact.
  std::vector<uint64_t> offsets(n + 1, 0);
  uint64_t out = 0;
  for (uint64_t i = 0; i < n; ++i) {
    auto first = cols.begin() + static_cast<std::ptrdiff_t>(counts[i]);
    auto last = cols.begin() + static_cast<std::ptrdiff_t>(counts[i + 1]);
    std::sort(first, last);
    last = std::unique(first, last);
    for (auto it = first; it != last; ++it) cols[out++] = *it;
    offsets[i + 1] = out;
  }
  cols.resize(out);
  cols.shrink_to_fit();

  CsrGraph g;
  g.n_ = n;
  g.row_offsets_ = std::move(offsets);
  g.col_indices_ = std::move(cols);
  g.has_self_loops_ = self_loops;
  return g;
}

uint64_t CsrGraph::num_edges() const {
  return (num_stored() - (has_self_loops_ ? n_ : 0)) / 2;
}

std::vector<uint64_t> CsrGraph::degrees() const {
  std::vector<uint64_t> deg(n_);
  for (uint64_t i = 0; i < n_; ++i) deg[i] = degree(i);
  return deg;
}

std::vector<std::pair<NodeId, NodeId>> CsrGraph::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(num_edges());
  for (uint64_t u = 0; u < n_; ++u)
    for (NodeId v : neighbors(u))
      if (v > u) edges.emplace_back(static_cast<NodeId>(u), v);
  return edges;
}

CsrGraph CsrGraph::with_self_loops() const {
  if (has_self_loops_) return *this;
  return from_edges(n_, edge_list(), true);
}

CsrGraph CsrGraph::without_self_loops() const {
  if (!has_self_loops_) return *this;
  return from_edges(n_, edge_list(), false);
}

void CsrGraph::validate() const {
  if (row_offsets_.size() != n_ + 1) throw DataError("CSR: row_offsets must have n+1 entries");
  if (row_offsets_.front() != 0) throw DataError("CSR: row_offsets[0] must be 0");
  if (row_offsets_.back() != col_indices_.size()) throw DataError("CSR: row_offsets[n] != number of stored edges");
  for (uint64_t i = 0; i < n_; ++i) {
    if (row_offsets_[i + 1] < row_offsets_[i]) throw DataError("CSR: row_offsets not monotone");
    bool has_self = false;
    const auto row = neighbors(i);
    for (uint64_t k = 0; k < row.size(); ++k) {
      if (row[k] >= n_) throw DataError("CSR: neighbor id out of range in row " + std::to_string(i));
      if (k > 0 && row[k] <= row[k - 1]) throw DataError("CSR: row " + std::to_string(i) + " not strictly increasing");
      if (row[k] == i) has_self = true;
    }
    if (has_self != has_self_loops_)
      throw DataError("CSR: row " + std::to_string(i) + (has_self ? " has an unexpected self-loop" : " lacks its self-loop"));
  }
  for (uint64_t u = 0; u < n_; ++u) {
    for (NodeId v : neighbors(u)) {
      const auto back = neighbors(v);
      if (!std::binary_search(back.begin(), back.end(), static_cast<NodeId>(u)))
        throw DataError("CSR: edge (" + std::to_string(u) + "," + std::to_string(v) + ") has no reverse");
    }
  }
}

// ---------------------------------------------------------------------------

namespace {
constexpr binio::Magic kMagic = binio::make_magic("CSRG1");
constexpr uint32_t kVersion = 1;
}  // namespace

std::vector<uint8_t> encode_csrg(const CsrGraph& g) {
  binio::Writer w;
  w.magic(kMagic);
  w.put<uint32_t>(kVersion);
  w.put<uint32_t>(g.has_self_loops() ? 1u : 0u);
  w.put<uint64_t>(g.num_nodes());
  w.put<uint64_t>(g.num_stored());
  w.array(g.row_offsets());
  w.array(g.col_indices());
  return w.take();
}

CsrGraph decode_csrg(std::span<const uint8_t> bytes) {
  binio::Reader r(bytes, "CSRG1");
  r.expect_magic(kMagic);
  const auto version = r.get<uint32_t>();
  if (version != kVersion) throw DataError("CSRG1: unsupported version " + std::to_string(version));
  const auto flags = r.get<uint32_t>();
  if (flags & ~1u) throw DataError("CSRG1: unknown flag bits");
  const auto n = r.get<uint64_t>();
  const auto nnz = r.get<uint64_t>();
  if (n >= (uint64_t{1} << 32)) throw DataError("CSRG1: node count exceeds 32-bit ids");
  auto offsets = r.array<uint64_t>(n + 1);
  auto cols = r.array<NodeId>(nnz);
  r.expect_end();
  return CsrGraph(n, std::move(offsets), std::move(cols), (flags & 1u) != 0);
}

CsrGraph load_graph(const std::filesystem::path& path) { return decode_csrg(binio::read_file(path)); }

void save_graph(const CsrGraph& g, const std::filesystem::path& path) { binio::write_file(path, encode_csrg(g)); }

}  // namespace featgrind
