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

// Serial reference vs OpenMP kernels on the hot paths.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "featgrind/graph.hpp"
#include "featgrind/kernels.hpp"
#include "featgrind/sq.hpp"

namespace fg = featgrind;
namespace k = featgrind::kernels;

namespace {

constexpr uint64_t kRows = 100000;
constexpr uint64_t kDim = 128;

std::vector<float> normal_values(uint64_t count, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<float> dist(0.0f, 1.0f);
  std::vector<float> v(count);
  for (float& x : v) x = dist(gen);
  return v;
}

fg::SqParams params(int bits) {
  const std::vector<float> v = normal_values(kRows * kDim, 1);
  return fg::fit_sq(fg::FeatureMatrix(kRows, kDim, v), bits);
}

template <bool Omp>
void BM_SqQuantize(benchmark::State& state) {
  const auto v = normal_values(kRows * kDim, 1);
  const auto p = params(4);
  std::vector<uint32_t> codes(v.size());
  for (auto _ : state) {
    if constexpr (Omp)
      k::omp::sq_quantize(v, p, codes);
    else
      k::serial::sq_quantize(v, p, codes);
    benchmark::DoNotOptimize(codes.data());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * v.size() * sizeof(float)));
}

template <bool Omp>
void BM_Pack(benchmark::State& state) {
  const unsigned bits = static_cast<unsigned>(state.range(0));
  std::mt19937_64 gen(2);
  std::vector<uint32_t> codes(kRows * kDim);
  for (auto& c : codes) c = static_cast<uint32_t>(gen() & ((1u << bits) - 1));
  std::vector<uint8_t> out((codes.size() * bits + 7) / 8);
  for (auto _ : state) {
    if constexpr (Omp)
      k::omp::pack(codes, bits, out);
    else
      k::serial::pack(codes, bits, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * codes.size()));
}

template <bool Omp>
void BM_GatherDecode(benchmark::State& state) {
  const auto v = normal_values(kRows * kDim, 1);
  const auto codec = fg::quantize_sq(fg::FeatureMatrix(kRows, kDim, v), params(4));
  std::mt19937_64 gen(3);
  std::vector<uint64_t> rows(20000);
  for (auto& r : rows) r = gen() % kRows;
  std::vector<float> out(rows.size() * kDim);
  for (auto _ : state) {
    if constexpr (Omp)
      k::omp::sq_gather_decode(codec.payload, codec.params, kDim, rows, out);
    else
      k::serial::sq_gather_decode(codec.payload, codec.params, kDim, rows, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * out.size()));
}

template <bool Omp>
void BM_NearestCentroid(benchmark::State& state) {
  const uint64_t dim = 16, n = 50000;
  const auto length = static_cast<uint64_t>(state.range(0));
  const auto xf = normal_values(n * dim, 4);
  const auto cf = normal_values(length * dim, 5);
  const std::vector<double> x(xf.begin(), xf.end()), c(cf.begin(), cf.end());
  std::vector<uint32_t> assign(n);
  std::vector<double> cost(n);
  for (auto _ : state) {
    if constexpr (Omp)
      k::omp::nearest_centroid(x, dim, c, fg::Metric::kEuclidean, assign, cost);
    else
      k::serial::nearest_centroid(x, dim, c, fg::Metric::kEuclidean, assign, cost);
    benchmark::DoNotOptimize(assign.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n));
}

template <bool Omp>
void BM_MeanAggregate(benchmark::State& state) {
  fg::GenerateParams gp;
  gp.attach_edges = 8;
  gp.self_loops = true;
  const auto g = fg::generate_graph(fg::GraphKind::kPreferentialAttachment, 5000, gp, 6);
  const uint64_t width = 256;
  std::vector<double> in(g.num_nodes() * width, 1.0), out(in.size());
  for (auto _ : state) {
    const k::Block block{in, out, width};
    if constexpr (Omp)
      k::omp::mean_aggregate(g, block);
    else
      k::serial::mean_aggregate(g, block);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * g.num_stored() * width));
}

}  // namespace

BENCHMARK(BM_SqQuantize<false>)->Name("sq_quantize/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SqQuantize<true>)->Name("sq_quantize/omp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Pack<false>)->Name("pack/serial")->Arg(1)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pack<true>)->Name("pack/omp")->Arg(1)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GatherDecode<false>)->Name("sq_gather_decode/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GatherDecode<true>)->Name("sq_gather_decode/omp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_NearestCentroid<false>)->Name("nearest_centroid/serial")->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestCentroid<true>)
    ->Name("nearest_centroid/omp")
    ->Arg(256)
    ->Arg(2048)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_MeanAggregate<false>)->Name("mean_aggregate/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeanAggregate<true>)->Name("mean_aggregate/omp")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
