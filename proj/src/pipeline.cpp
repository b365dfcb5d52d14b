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

#include "featgrind/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>

#include <json.hpp>

#include "featgrind/binio.hpp"
#include "featgrind/bitpack.hpp"
#include "featgrind/error.hpp"
#include "featgrind/rng.hpp"

namespace featgrind {

void SamplerConfig::validate() const {
  if (fanouts.empty()) throw InvalidArgument("sampler needs at least one fanout");
  for (uint32_t f : fanouts)
    if (f < 1) throw InvalidArgument("fanouts must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
}

std::vector<MiniBatchSample> sample_batches(const CsrGraph& g, std::span<const NodeId> train_ids,
                                            const SamplerConfig& cfg) {
  cfg.validate();
  if (train_ids.empty()) throw InvalidArgument("training set is empty");
  const uint64_t n = g.num_nodes();
  for (NodeId id : train_ids)
    if (id >= n) throw InvalidArgument("training id " + std::to_string(id) + " out of range");

  Rng rng(cfg.seed);
  std::vector<NodeId> order(train_ids.begin(), train_ids.end());
  rng.shuffle(std::span(order));

  // Stamps avoid clearing O(n) sets per batch and per layer.
  std::vector<uint64_t> in_frontier(n, 0);
  std::vector<uint64_t> in_layer(n, 0);
  uint64_t frontier_stamp = 0;
  uint64_t layer_stamp = 0;
  std::vector<NodeId> scratch;

  std::vector<MiniBatchSample> batches;
  for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const size_t stop = std::min<size_t>(start + cfg.batch_size, order.size());
    MiniBatchSample b;
    ++frontier_stamp;
    ++layer_stamp;
    std::vector<NodeId> layer;
    for (size_t k = start; k < stop; ++k) {
      const NodeId s = order[k];
      b.seeds.push_back(s);
      if (in_frontier[s] != frontier_stamp) {
        in_frontier[s] = frontier_stamp;
        b.frontier.push_back(s);
      }
      if (in_layer[s] != layer_stamp) {
        in_layer[s] = layer_stamp;
        layer.push_back(s);
      }
    }
    for (uint32_t fanout : cfg.fanouts) {
      ++layer_stamp;
      std::vector<NodeId> next;
      for (NodeId u : layer) {
        scratch.clear();
        for (NodeId v : g.neighbors(u))
          if (v != u) scratch.push_back(v);
        const size_t take = std::min<size_t>(fanout, scratch.size());
        if (take < scratch.size()) {
          for (size_t i = 0; i < take; ++i) std::swap(scratch[i], scratch[i + rng.below(scratch.size() - i)]);
        }
        b.edges_touched += take;
        for (size_t i = 0; i < take; ++i) {
          const NodeId v = scratch[i];
          if (in_layer[v] != layer_stamp) {
            in_layer[v] = layer_stamp;
            next.push_back(v);
          }
          if (in_frontier[v] != frontier_stamp) {
            in_frontier[v] = frontier_stamp;
            b.frontier.push_back(v);
          }
        }
      }
      layer = std::move(next);
    }
    std::sort(b.frontier.begin(), b.frontier.end());
    batches.push_back(std::move(b));
  }
  return batches;
}

uint64_t workload_fingerprint(std::span<const MiniBatchSample> batches, uint64_t n, uint64_t d, uint32_t elem_bits) {
  auto mix = [](uint64_t h, uint64_t v) {
    return binio::fnv1a(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(&v), sizeof v), h);
  };
  uint64_t h = binio::fnv1a(std::string_view("workload"));
  h = mix(h, n);
  h = mix(h, d);
  h = mix(h, elem_bits);
  for (const auto& b : batches) {
    h = mix(h, b.seeds.size());
    for (NodeId s : b.seeds) h = mix(h, s);
    h = mix(h, b.frontier.size());
    for (NodeId v : b.frontier) h = mix(h, v);
    h = mix(h, b.edges_touched);
  }
  return h;
}

// ---------------------------------------------------------------------------

CodecSpec CodecSpec::sq(int k) {
  if (k < 1 || k > 8) throw InvalidArgument("SQ bit width must be in [1, 8]");
  CodecSpec c;
  c.kind = Kind::kSq;
  c.sq_bits = k;
  return c;
}

CodecSpec CodecSpec::vq(uint32_t width, uint32_t length, CodeLayout layout) {
  if (width < 1 || length < 2 || length > kMaxCodebookLength) throw InvalidArgument("invalid VQ width/length");
  CodecSpec c;
  c.kind = Kind::kVq;
  c.vq_width = width;
  c.vq_length = length;
  c.vq_layout = layout;
  return c;
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

uint64_t parse_uint(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(std::string("invalid ") + what + " '" + s + "'");
  }
}

}  // namespace

CodecSpec CodecSpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts[0] == "full" && parts.size() == 1) return full();
  if (parts[0] == "sq" && parts.size() == 2) return sq(static_cast<int>(parse_uint(parts[1], "SQ bit width")));
  if (parts[0] == "vq") {
    if (parts.size() == 1) return vq(16, 2048, CodeLayout::kPacked);
    if (parts.size() == 3 || parts.size() == 4) {
      const auto layout = parts.size() == 4 ? parse_layout(parts[3]) : CodeLayout::kPacked;
      return vq(static_cast<uint32_t>(parse_uint(parts[1], "VQ width")),
                static_cast<uint32_t>(parse_uint(parts[2], "VQ length")), layout);
    }
  }
  throw InvalidArgument("unknown codec '" + std::string(text) + "' (expected full, sq:K, vq or vq:W:L[:layout])");
}

std::string CodecSpec::name() const {
  switch (kind) {
    case Kind::kFull: return "full";
    case Kind::kSq: return "sq:" + std::to_string(sq_bits);
    case Kind::kVq:
      return "vq:" + std::to_string(vq_width) + ":" + std::to_string(vq_length) + ":" + std::string(to_string(vq_layout));
  }
  return "?";
}

uint64_t CodecSpec::bytes_per_row(uint64_t d, uint32_t elem_bits) const {
  switch (kind) {
    case Kind::kFull: return (d * elem_bits + 7) / 8;
    case Kind::kSq: return packed_size(d, static_cast<unsigned>(sq_bits));
    case Kind::kVq: {
      const uint64_t parts = (d + vq_width - 1) / vq_width;
      const unsigned bits = vq_code_bits(vq_length);
      if (vq_layout == CodeLayout::kByteAligned) return parts * ((bits + 7) / 8);
      return packed_size(parts, bits);
    }
  }
  return 0;
}

void CostModel::validate() const {
  if (!(pcie_bytes_per_sec > 0.0)) throw InvalidArgument("pcie_bytes_per_sec must be > 0");
  if (!(sample_cost_per_edge >= 0.0) || !(dequant_cost_per_elem >= 0.0) || !(compute_cost_per_batch >= 0.0))
    throw InvalidArgument("cost model entries must be non-negative");
}

std::vector<bool> static_cache(const CsrGraph& g, uint64_t capacity_rows) {
  const uint64_t n = g.num_nodes();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  const auto deg = g.degrees();
  const uint64_t keep = std::min(capacity_rows, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](NodeId a, NodeId b) { return deg[a] != deg[b] ? deg[a] > deg[b] : a < b; });
  std::vector<bool> cached(n, false);
  for (uint64_t i = 0; i < keep; ++i) cached[order[i]] = true;
  return cached;
}

SimReport simulate_epoch(const SimInput& in, const CodecSpec& codec, const CacheConfig& cache, const CostModel& cost) {
  cost.validate();
  const uint64_t row_bytes = codec.bytes_per_row(in.d, in.elem_bits);
  const uint64_t capacity = row_bytes == 0 ? in.graph.num_nodes() : cache.budget_bytes / row_bytes;
  const auto cached = static_cache(in.graph, capacity);

  uint64_t rows = 0, hits = 0, edges = 0;
  for (const auto& b : in.batches) {
    for (NodeId v : b.frontier) {
      if (v >= in.graph.num_nodes()) throw DataError("batch refers to node outside the graph");
      ++rows;
      if (cached[v]) ++hits;
    }
    edges += b.edges_touched;
  }
  SimReport r;
  r.bytes_transferred = (rows - hits) * row_bytes;
  r.load_s = static_cast<double>(r.bytes_transferred) / cost.pcie_bytes_per_sec;
  r.sample_s = cost.sample_cost_per_edge * static_cast<double>(edges);
  r.dequant_s = codec.kind == CodecSpec::Kind::kFull
                    ? 0.0
                    : cost.dequant_cost_per_elem * static_cast<double>(rows) * static_cast<double>(in.d);
  r.compute_s = cost.compute_cost_per_batch * static_cast<double>(in.batches.size());
  r.cache_hit_rate = rows == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(rows);
  r.epoch_s = r.sample_s + r.load_s + r.dequant_s + r.compute_s;
  return r;
}

MultiWorkerReport simulate_workers(const SimInput& in, const CodecSpec& codec, const CacheConfig& cache,
                                   const CostModel& cost, uint32_t workers) {
  if (workers < 1) throw InvalidArgument("need at least one worker");
  MultiWorkerReport out;
  out.workers = workers;
  CostModel shared = cost;
  shared.pcie_bytes_per_sec = cost.pcie_bytes_per_sec / workers;
  for (uint32_t w = 0; w < workers; ++w) {
    std::vector<MiniBatchSample> mine;
    for (size_t b = w; b < in.batches.size(); b += workers) mine.push_back(in.batches[b]);
    SimInput sub{in.graph, mine, in.d, in.elem_bits};
    out.per_worker.push_back(simulate_epoch(sub, codec, cache, shared));
    out.epoch_s = std::max(out.epoch_s, out.per_worker.back().epoch_s);
  }
  return out;
}

CostModel calibrate_cost_model(const SimInput& in, CostModel base, double load_fraction) {
  if (!(load_fraction > 0.0 && load_fraction < 1.0)) throw InvalidArgument("load fraction must be in (0, 1)");
  if (in.batches.empty()) throw InvalidArgument("cannot calibrate on an empty workload");
  base.compute_cost_per_batch = 0.0;
  const SimReport r = simulate_epoch(in, CodecSpec::full(), CacheConfig{}, base);
  const double compute_total = r.load_s * (1.0 - load_fraction) / load_fraction - r.sample_s;
  base.compute_cost_per_batch = std::max(0.0, compute_total) / static_cast<double>(in.batches.size());
  return base;
}

// ---------------------------------------------------------------------------

std::vector<BreakdownRow> breakdown(const NamedReport& baseline, std::span<const NamedReport> variants) {
  auto row = [&](const NamedReport& nr) {
    const SimReport& r = nr.report;
    BreakdownRow b;
    b.name = nr.name;
    b.epoch_s = r.epoch_s;
    if (r.epoch_s > 0.0) {
      b.sample_frac = r.sample_s / r.epoch_s;
      b.load_frac = r.load_s / r.epoch_s;
      b.dequant_frac = r.dequant_s / r.epoch_s;
      b.compute_frac = r.compute_s / r.epoch_s;
      b.speedup = baseline.report.epoch_s / r.epoch_s;
    }
    return b;
  };
  std::vector<BreakdownRow> rows{row(baseline)};
  rows.front().speedup = 1.0;
  for (const auto& v : variants) {
    if (v.workload != baseline.workload)
      throw InvalidArgument("report '" + v.name + "' was produced on a different workload than the baseline");
    rows.push_back(row(v));
  }
  return rows;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::kText;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw InvalidArgument("unknown report format '" + std::string(name) + "'");
}

std::string render_breakdown(std::span<const BreakdownRow> rows, ReportFormat format) {
  std::ostringstream out;
  char buf[256];
  switch (format) {
    case ReportFormat::kCsv:
      out << "name,sample_frac,load_frac,dequant_frac,compute_frac,epoch_s,speedup\n";
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.9g,%.6f", r.sample_frac, r.load_frac, r.dequant_frac,
                      r.compute_frac, r.epoch_s, r.speedup);
        out << r.name << ',' << buf << '\n';
      }
      break;
    case ReportFormat::kJson: {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        arr.push_back({{"name", r.name},
                       {"sample_frac", r.sample_frac},
                       {"load_frac", r.load_frac},
                       {"dequant_frac", r.dequant_frac},
                       {"compute_frac", r.compute_frac},
                       {"epoch_s", r.epoch_s},
                       {"speedup", r.speedup}});
      }
      out << arr.dump(2) << '\n';
      break;
    }
    case ReportFormat::kText: {
      size_t width = 8;
      for (const auto& r : rows) width = std::max(width, r.name.size());
      std::snprintf(buf, sizeof buf, "%-*s %8s %8s %8s %8s %12s %8s  %s\n", static_cast<int>(width), "variant",
                    "sample", "load", "dequant", "compute", "epoch_s", "speedup", "breakdown");
      out << buf;
      for (const auto& r : rows) {
        // 40-column bar: s = sample, L = load, q = dequant, c = compute.
        std::string bar;
        const double fracs[] = {r.sample_frac, r.load_frac, r.dequant_frac, r.compute_frac};
        const char marks[] = {'s', 'L', 'q', 'c'};
        for (int k = 0; k < 4; ++k) bar.append(static_cast<size_t>(std::lround(fracs[k] * 40.0)), marks[k]);
        std::snprintf(buf, sizeof buf, "%-*s %7.1f%% %7.1f%% %7.1f%% %7.1f%% %12.6g %7.2fx  %s\n",
                      static_cast<int>(width), r.name.c_str(), 100 * r.sample_frac, 100 * r.load_frac,
                      100 * r.dequant_frac, 100 * r.compute_frac, r.epoch_s, r.speedup, bar.c_str());
        out << buf;
      }
      break;
    }
  }
  return out.str();
}

}  // namespace featgrind
