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

SparsifyVariant parse_sparsify_variant(std::string_view name) {
  if (name == "random") return SparsifyVariant::kRandom;
  if (name == "centralized") return SparsifyVariant::kCentralized;
  if (name == "uniform") return SparsifyVariant::kUniform;
  throw InvalidArgument("unknown sparsify method '" + std::string(name) + "'");
}

std::string_view to_string(SparsifyVariant v) {
  switch (v) {
    case SparsifyVariant::kRandom: return "random";
    case SparsifyVariant::kCentralized: return "centralized";
    case SparsifyVariant::kUniform: return "uniform";
  }
  return "?";
}

uint64_t kept_edge_count(uint64_t num_edges, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) throw InvalidArgument("keep fraction must be in (0, 1]");
  const double exact = keep_fraction * static_cast<double>(num_edges);
  const double nearest = std::round(exact);
  const double slack = 1e-9 * std::max(1.0, static_cast<double>(num_edges));
  const double count = std::abs(exact - nearest) <= slack ? nearest : std::ceil(exact);
  return std::min<uint64_t>(num_edges, static_cast<uint64_t>(count));
}

uint64_t edge_score(const CsrGraph& g, NodeId u, NodeId v) { return std::min(g.degree(u), g.degree(v)); }

CsrGraph sparsify(const CsrGraph& g, const SparsifyMethod& method, uint64_t seed) {
  const uint64_t keep = kept_edge_count(g.num_edges(), method.keep_fraction);
  auto edges = g.edge_list();
  Rng rng(seed);
  rng.shuffle(std::span(edges));

  if (method.variant != SparsifyVariant::kRandom) {
    // Scores come from the input graph; the shuffle above is the tie-break.
    std::vector<std::pair<uint64_t, std::pair<NodeId, NodeId>>> scored;
    scored.reserve(edges.size());
    for (auto e : edges) scored.emplace_back(edge_score(g, e.first, e.second), e);
    if (method.variant == SparsifyVariant::kCentralized) {
      std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    } else {
      std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    for (size_t i = 0; i < edges.size(); ++i) edges[i] = scored[i].second;
  }
  edges.resize(keep);
  return CsrGraph::from_edges(g.num_nodes(), edges, g.has_self_loops());
}

}  // namespace featgrind
