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
#include <cmath>
#include <string>

#include "featgrind/error.hpp"
#include "featgrind/graph.hpp"
#include "featgrind/rng.hpp"

namespace featgrind {

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "star") return GraphKind::kStar;
  if (name == "path") return GraphKind::kPath;
  if (name == "complete") return GraphKind::kComplete;
  if (name == "erdos_renyi") return GraphKind::kErdosRenyi;
  if (name == "preferential_attachment") return GraphKind::kPreferentialAttachment;
  throw InvalidArgument("unknown graph kind '" + std::string(name) + "'");
}

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kStar: return "star";
    case GraphKind::kPath: return "path";
    case GraphKind::kComplete: return "complete";
    case GraphKind::kErdosRenyi: return "erdos_renyi";
    case GraphKind::kPreferentialAttachment: return "preferential_attachment";
  }
  return "?";
}

namespace {

using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

void complete_edges(uint64_t n, EdgeList& edges) {
  for (uint64_t u = 0; u < n; ++u)
    for (uint64_t v = u + 1; v < n; ++v) edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
}

// Batagelj & Brandes geometric skipping over the lower triangle.
EdgeList erdos_renyi_edges(uint64_t n, double p, Rng& rng) {
  EdgeList edges;
  if (p <= 0.0 || n < 2) return edges;
  if (p >= 1.0) {
    complete_edges(n, edges);
    return edges;
  }
  const double log_q = std::log1p(-p);
  int64_t v = 1;
  int64_t w = -1;
  const auto nn = static_cast<int64_t>(n);
  while (v < nn) {
    const double r = rng.uniform();
    w += 1 + static_cast<int64_t>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<NodeId>(w), static_cast<NodeId>(v));
  }
  return edges;
}

// Barabasi-Albert: seed clique on m+1 nodes, then each new node attaches to
// m distinct existing nodes drawn proportionally to degree.
EdgeList preferential_attachment_edges(uint64_t n, uint32_t m, Rng& rng) {
  EdgeList edges;
  const uint64_t seed_nodes = std::min<uint64_t>(n, m + 1);
  complete_edges(seed_nodes, edges);
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * (edges.size() + (n - seed_nodes) * m));
  for (auto [u, v] : edges) {
    endpoints.push_back(u);
    endpoints.push_back(v);
  }
  std::vector<NodeId> targets;
  targets.reserve(m);
  for (uint64_t t = seed_nodes; t < n; ++t) {
    targets.clear();
    while (targets.size() < m) {
      const NodeId cand = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), cand) == targets.end()) targets.push_back(cand);
    }
    for (NodeId v : targets) {
      edges.emplace_back(v, static_cast<NodeId>(t));
      endpoints.push_back(v);
      endpoints.push_back(static_cast<NodeId>(t));
    }
  }
  return edges;
}

}  // namespace

CsrGraph generate_graph(GraphKind kind, uint64_t n, const GenerateParams& params, uint64_t seed) {
  if (n < 1) throw InvalidArgument("graph needs at least one node");
  if (n > (uint64_t{1} << 32)) throw InvalidArgument("node count exceeds 32-bit ids");
  Rng rng(seed);
  EdgeList edges;
  switch (kind) {
    case GraphKind::kStar:
      for (uint64_t v = 1; v < n; ++v) edges.emplace_back(0, static_cast<NodeId>(v));
      break;
    case GraphKind::kPath:
      for (uint64_t v = 1; v < n; ++v) edges.emplace_back(static_cast<NodeId>(v - 1), static_cast<NodeId>(v));
      break;
    case GraphKind::kComplete:
      complete_edges(n, edges);
      break;
    case GraphKind::kErdosRenyi:
      if (!(params.edge_probability >= 0.0 && params.edge_probability <= 1.0))
        throw InvalidArgument("edge probability must be in [0, 1]");
      edges = erdos_renyi_edges(n, params.edge_probability, rng);
      break;
    case GraphKind::kPreferentialAttachment:
      if (params.attach_edges < 1) throw InvalidArgument("preferential attachment needs m >= 1");
      edges = preferential_attachment_edges(n, params.attach_edges, rng);
      break;
  }
  return CsrGraph::from_edges(n, edges, params.self_loops);
}

}  // namespace featgrind
