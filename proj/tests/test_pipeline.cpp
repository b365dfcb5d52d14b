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

#include <gtest/gtest.h>

#include <json.hpp>
#include <numeric>
#include <set>

#include "featgrind/error.hpp"
#include "featgrind/pipeline.hpp"
#include "test_util.hpp"

namespace featgrind {
namespace {

CsrGraph pa_graph(uint64_t n, uint32_t m, uint64_t seed) {
  GenerateParams gp;
  gp.attach_edges = m;
  return generate_graph(GraphKind::kPreferentialAttachment, n, gp, seed);
}

std::vector<NodeId> all_ids(uint64_t n) {
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  return ids;
}

SamplerConfig sampler(std::vector<uint32_t> fanouts, uint64_t batch, uint64_t seed) {
  SamplerConfig c;
  c.fanouts = std::move(fanouts);
  c.batch_size = batch;
  c.seed = seed;
  return c;
}

uint64_t total_frontier(const std::vector<MiniBatchSample>& bs) {
  uint64_t t = 0;
  for (const auto& b : bs) t += b.frontier.size();
  return t;
}

TEST(Sampler, CountingBound) {
  auto g = pa_graph(5000, 8, 1);
  auto ids = all_ids(1000);
  auto bs = sample_batches(g, ids, sampler({5, 10}, 1000, 3));
  ASSERT_EQ(bs.size(), 1u);
  EXPECT_LE(bs[0].frontier.size(), 1000u * (1 + 5 + 50));
  EXPECT_GT(bs[0].frontier.size(), 1000u);
  EXPECT_LE(bs[0].edges_touched, 1000u * (5 + 50));
}

TEST(Sampler, FrontierIsSortedUniqueAndContainsSeeds) {
  auto g = pa_graph(800, 3, 2);
  auto ids = all_ids(800);
  auto bs = sample_batches(g, ids, sampler({3, 3}, 128, 5));
  EXPECT_EQ(bs.size(), 7u);
  std::set<NodeId> seen_seeds;
  for (const auto& b : bs) {
    EXPECT_TRUE(std::is_sorted(b.frontier.begin(), b.frontier.end()));
    EXPECT_EQ(std::adjacent_find(b.frontier.begin(), b.frontier.end()), b.frontier.end());
    for (NodeId s : b.seeds) {
      EXPECT_TRUE(std::binary_search(b.frontier.begin(), b.frontier.end(), s));
      EXPECT_TRUE(seen_seeds.insert(s).second);
    }
  }
  EXPECT_EQ(seen_seeds.size(), 800u);
}

TEST(Sampler, CompleteGraphSaturates) {
  auto g = generate_graph(GraphKind::kComplete, 30, {}, 0);
  std::vector<NodeId> seeds{4};
  auto bs = sample_batches(g, seeds, sampler({50}, 10, 1));
  EXPECT_EQ(bs[0].frontier.size(), 30u);
  auto gl = g.with_self_loops();
  bs = sample_batches(gl, seeds, sampler({50}, 10, 1));
  EXPECT_EQ(bs[0].frontier.size(), 30u);
  EXPECT_EQ(bs[0].edges_touched, 29u);
}

TEST(Sampler, Deterministic) {
  auto g = pa_graph(1000, 4, 9);
  auto ids = all_ids(1000);
  auto a = sample_batches(g, ids, sampler({5, 10, 15}, 100, 42));
  auto b = sample_batches(g, ids, sampler({5, 10, 15}, 100, 42));
  auto c = sample_batches(g, ids, sampler({5, 10, 15}, 100, 43));
  EXPECT_EQ(workload_fingerprint(a, 1000, 16, 32), workload_fingerprint(b, 1000, 16, 32));
  EXPECT_NE(workload_fingerprint(a, 1000, 16, 32), workload_fingerprint(c, 1000, 16, 32));
  EXPECT_NE(workload_fingerprint(a, 1000, 16, 32), workload_fingerprint(a, 1000, 17, 32));
}

TEST(Sampler, Errors) {
  auto g = pa_graph(50, 2, 1);
  std::vector<NodeId> none;
  EXPECT_THROW(sample_batches(g, none, sampler({5}, 10, 0)), InvalidArgument);
  std::vector<NodeId> bad{50};
  EXPECT_THROW(sample_batches(g, bad, sampler({5}, 10, 0)), InvalidArgument);
  auto ids = all_ids(50);
  EXPECT_THROW(sample_batches(g, ids, sampler({}, 10, 0)), InvalidArgument);
  EXPECT_THROW(sample_batches(g, ids, sampler({0}, 10, 0)), InvalidArgument);
  EXPECT_THROW(sample_batches(g, ids, sampler({2}, 0, 0)), InvalidArgument);
}

TEST(Codec, ParseNameAndRowBytes) {
  EXPECT_EQ(CodecSpec::parse("full").bytes_per_row(128, 32), 512u);
  EXPECT_EQ(CodecSpec::parse("sq:1").bytes_per_row(128, 32), 16u);
  EXPECT_EQ(CodecSpec::parse("sq:3").bytes_per_row(10, 32), 4u);
  EXPECT_EQ(CodecSpec::parse("vq").bytes_per_row(128, 32), 11u);
  EXPECT_EQ(CodecSpec::parse("vq:16:2048:byte").bytes_per_row(128, 32), 16u);
  EXPECT_EQ(CodecSpec::parse("vq:100:16384").bytes_per_row(602, 32), 13u);
  EXPECT_EQ(CodecSpec::parse("vq").name(), "vq:16:2048:packed");
  EXPECT_EQ(CodecSpec::parse("sq:4").name(), "sq:4");
  for (const char* bad : {"sq", "sq:0", "sq:9", "sq:x", "vq:16", "vq:0:4", "vq:4:1", "vq:4:4:nibble", "half", ""})
    EXPECT_THROW(CodecSpec::parse(bad), InvalidArgument) << bad;
}

struct Workload {
  CsrGraph g;
  std::vector<MiniBatchSample> batches;
  uint64_t d;
  SimInput input() const { return {g, batches, d, 32}; }
};

Workload make_workload(uint64_t d = 128) {
  Workload w{pa_graph(3000, 5, 4), {}, d};
  auto ids = all_ids(1500);
  w.batches = sample_batches(w.g, ids, sampler({5, 10}, 256, 8));
  return w;
}

TEST(Simulate, BytesArithmetic) {
  auto w = make_workload();
  const uint64_t f = total_frontier(w.batches);
  CostModel cost;
  auto full = simulate_epoch(w.input(), CodecSpec::full(), {}, cost);
  auto sq1 = simulate_epoch(w.input(), CodecSpec::sq(1), {}, cost);
  EXPECT_EQ(full.bytes_transferred, f * 512);
  EXPECT_EQ(sq1.bytes_transferred, f * 16);
  EXPECT_EQ(full.bytes_transferred, 32 * sq1.bytes_transferred);
  for (int k = 1; k <= 8; ++k)
    EXPECT_EQ(full.bytes_transferred * k, 32 * simulate_epoch(w.input(), CodecSpec::sq(k), {}, cost).bytes_transferred);
  EXPECT_EQ(full.cache_hit_rate, 0.0);
}

TEST(Simulate, FullCacheSaturates) {
  auto w = make_workload();
  CacheConfig cache{w.g.num_nodes() * 512};
  for (auto codec : {CodecSpec::full(), CodecSpec::sq(1), CodecSpec::sq(8), CodecSpec::parse("vq")}) {
    auto r = simulate_epoch(w.input(), codec, cache, CostModel{});
    EXPECT_EQ(r.load_s, 0.0);
    EXPECT_EQ(r.bytes_transferred, 0u);
    EXPECT_EQ(r.cache_hit_rate, 1.0);
  }
}

TEST(Simulate, EpochIsSumOfStages) {
  auto w = make_workload();
  CostModel cost{8e9, 1e-8, 1e-10, 2e-3};
  auto r = simulate_epoch(w.input(), CodecSpec::sq(2), CacheConfig{100000}, cost);
  EXPECT_DOUBLE_EQ(r.epoch_s, r.sample_s + r.load_s + r.dequant_s + r.compute_s);
  EXPECT_GT(r.dequant_s, 0.0);
  EXPECT_EQ(simulate_epoch(w.input(), CodecSpec::full(), {}, cost).dequant_s, 0.0);
  EXPECT_DOUBLE_EQ(r.compute_s, 2e-3 * static_cast<double>(w.batches.size()));
}

TEST(Simulate, HitRateMonotone) {
  auto w = make_workload();
  double prev = -1.0;
  for (uint64_t budget = 0; budget <= 3000 * 512; budget += 64 * 1024) {
    auto full = simulate_epoch(w.input(), CodecSpec::full(), {budget}, CostModel{});
    EXPECT_GE(full.cache_hit_rate, prev);
    prev = full.cache_hit_rate;
    double prev_codec = full.cache_hit_rate;
    for (int k : {8, 4, 2, 1}) {
      auto r = simulate_epoch(w.input(), CodecSpec::sq(k), {budget}, CostModel{});
      EXPECT_GE(r.cache_hit_rate, prev_codec);
      EXPECT_LE(r.cache_hit_rate, 1.0);
      prev_codec = r.cache_hit_rate;
    }
  }
}

TEST(Simulate, EpochMonotoneInRatioAndBudget) {
  auto w = make_workload();
  CostModel cost = calibrate_cost_model(w.input(), CostModel{16e9, 2e-9, 1e-11, 0});
  for (uint64_t budget : {0ull, 200000ull, 800000ull}) {
    double prev = simulate_epoch(w.input(), CodecSpec::sq(8), {budget}, cost).epoch_s;
    for (int k : {4, 2, 1}) {
      const double e = simulate_epoch(w.input(), CodecSpec::sq(k), {budget}, cost).epoch_s;
      EXPECT_LE(e, prev);
      prev = e;
    }
  }
  for (int k : {8, 1}) {
    double prev = simulate_epoch(w.input(), CodecSpec::sq(k), {0}, cost).epoch_s;
    for (uint64_t budget = 100000; budget <= 1600000; budget += 100000) {
      const double e = simulate_epoch(w.input(), CodecSpec::sq(k), {budget}, cost).epoch_s;
      EXPECT_LE(e, prev);
      prev = e;
    }
  }
}

TEST(Simulate, CalibrationHitsLoadFraction) {
  auto w = make_workload();
  CostModel cost = calibrate_cost_model(w.input(), CostModel{16e9, 1e-9, 0, 0});
  auto r = simulate_epoch(w.input(), CodecSpec::full(), {}, cost);
  EXPECT_NEAR(r.load_s / r.epoch_s, kDefaultLoadFraction, 1e-12);
  EXPECT_THROW(calibrate_cost_model(w.input(), CostModel{}, 1.0), InvalidArgument);
}

TEST(Simulate, AmdahlConsistency) {
  auto w = make_workload();
  CostModel cost = calibrate_cost_model(w.input(), CostModel{}, 0.9);
  const auto base = simulate_epoch(w.input(), CodecSpec::full(), {}, cost);
  const double p = base.load_s / base.epoch_s;
  for (int k = 1; k <= 8; ++k) {
    const auto r = simulate_epoch(w.input(), CodecSpec::sq(k), {}, cost);
    const double cr = 32.0 / k;
    EXPECT_NEAR(base.epoch_s / r.epoch_s, 1.0 / ((1 - p) + p / cr), 1e-9);
  }
  const auto r1 = simulate_epoch(w.input(), CodecSpec::sq(1), {}, cost);
  EXPECT_NEAR(base.epoch_s / r1.epoch_s, 7.804878048780488, 1e-9);
}

TEST(Simulate, CostModelValidation) {
  auto w = make_workload();
  EXPECT_THROW(simulate_epoch(w.input(), CodecSpec::full(), {}, CostModel{0.0, 0, 0, 0}), InvalidArgument);
  EXPECT_THROW(simulate_epoch(w.input(), CodecSpec::full(), {}, CostModel{1.0, -1, 0, 0}), InvalidArgument);
}

TEST(Workers, FullFlatQuantizedScales) {
  auto w = make_workload();
  CostModel cost = calibrate_cost_model(w.input(), CostModel{});
  const double full1 = simulate_workers(w.input(), CodecSpec::full(), {}, cost, 1).epoch_s;
  const double sq1 = simulate_workers(w.input(), CodecSpec::sq(1), {}, cost, 1).epoch_s;
  EXPECT_NEAR(full1, simulate_epoch(w.input(), CodecSpec::full(), {}, cost).epoch_s, 1e-12 * full1);
  double prev_sq = sq1;
  for (uint32_t workers : {2u, 4u}) {
    const auto full = simulate_workers(w.input(), CodecSpec::full(), {}, cost, workers);
    const auto sq = simulate_workers(w.input(), CodecSpec::sq(1), {}, cost, workers);
    EXPECT_EQ(full.per_worker.size(), workers);
    EXPECT_GT(full.epoch_s, 0.8 * full1);
    EXPECT_LT(sq.epoch_s, prev_sq);
    prev_sq = sq.epoch_s;
  }
  EXPECT_LT(prev_sq, 0.5 * sq1);
  EXPECT_THROW(simulate_workers(w.input(), CodecSpec::full(), {}, cost, 0), InvalidArgument);
}

TEST(Report, BreakdownAndRendering) {
  auto w = make_workload();
  CostModel cost = calibrate_cost_model(w.input(), CostModel{});
  const uint64_t fp = workload_fingerprint(w.batches, w.g.num_nodes(), w.d, 32);
  NamedReport base{"full", simulate_epoch(w.input(), CodecSpec::full(), {}, cost), fp};
  std::vector<NamedReport> vars{{"same", base.report, fp},
                                {"sq:1", simulate_epoch(w.input(), CodecSpec::sq(1), {}, cost), fp}};
  auto rows = breakdown(base, vars);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].speedup, 1.0);
  EXPECT_GT(rows[2].speedup, 1.0);
  EXPECT_LE(rows[2].speedup, 32.0);
  EXPECT_NEAR(rows[0].load_frac, 0.85, 1e-12);
  EXPECT_NEAR(rows[0].sample_frac + rows[0].load_frac + rows[0].dequant_frac + rows[0].compute_frac, 1.0, 1e-12);

  auto js = nlohmann::json::parse(render_breakdown(rows, ReportFormat::kJson));
  EXPECT_EQ(js.size(), 3u);
  EXPECT_EQ(js[2]["name"], "sq:1");
  auto csv = render_breakdown(rows, ReportFormat::kCsv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,sample_frac,load_frac,dequant_frac,compute_frac,epoch_s,speedup");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_NE(render_breakdown(rows, ReportFormat::kText).find("sq:1"), std::string::npos);

  std::vector<NamedReport> other{{"x", base.report, fp + 1}};
  EXPECT_THROW(breakdown(base, other), InvalidArgument);
  EXPECT_THROW(parse_report_format("xml"), InvalidArgument);
}

}  // namespace
}  // namespace featgrind
