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

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "featgrind/binio.hpp"
#include "featgrind/error.hpp"
#include "featgrind/factors.hpp"
#include "featgrind/features.hpp"
#include "featgrind/graph.hpp"
#include "featgrind/kernels.hpp"
#include "featgrind/pipeline.hpp"
#include "featgrind/rng.hpp"
#include "featgrind/sq.hpp"
#include "featgrind/vq.hpp"

namespace fg = featgrind;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersionText =
    "featgrind " FEATGRIND_VERSION " (formats: FMAT1 v1, CSRG1 v1, SQF1 v1, VQF1 v1)";

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };
Level g_level = Level::kWarn;

void log(Level level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= g_level) std::fprintf(stderr, "featgrind: %s: %s\n", names[static_cast<int>(level)], msg.c_str());
}

struct Globals {
  uint64_t seed = 0;
  int threads = 0;
  std::string log_level = "warn";
};

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

json meta(const std::string& command, const json& config) {
  json m;
  m["tool"] = "featgrind";
  m["version"] = FEATGRIND_VERSION;
  m["command"] = command;
  m["config"] = config;
  m["config_hash"] = hex64(fg::binio::fnv1a(config.dump()));
  return m;
}

void write_json(const std::filesystem::path& path, const json& j) {
  const std::string text = j.dump(2) + "\n";
  fg::binio::write_file(path, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

json read_json(const std::filesystem::path& path) {
  const auto bytes = fg::binio::read_file(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw fg::DataError(path.string() + ": invalid JSON: " + e.what());
  }
}

// Binary outputs keep their fixed layout; provenance goes next to them.
void write_with_sidecar(const std::filesystem::path& path, std::span<const uint8_t> bytes, const std::string& command,
                        const json& config) {
  fg::binio::write_file(path, bytes);
  json side = meta(command, config);
  side["output_fnv1a"] = hex64(fg::binio::fnv1a(bytes));
  write_json(path.string() + ".meta.json", side);
}

std::vector<uint64_t> parse_rows(const std::string& text) {
  std::vector<uint64_t> rows;
  if (text.empty()) return rows;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t pos = std::min(text.find(',', start), text.size());
    const std::string tok = text.substr(start, pos - start);
    size_t used = 0;
    uint64_t v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (tok.empty() || used != tok.size()) throw fg::InvalidArgument("invalid row id '" + tok + "'");
    rows.push_back(v);
    start = pos + 1;
  }
  return rows;
}

// ---------------------------------------------------------------------------

struct GenGraphArgs {
  std::string kind;
  uint64_t n = 0;
  double p = 0.0;
  uint32_t m = 1;
  bool self_loops = false;
  std::string out;
};

void run_gen_graph(const Globals& gl, const GenGraphArgs& a) {
  fg::GenerateParams params;
  params.edge_probability = a.p;
  params.attach_edges = a.m;
  params.self_loops = a.self_loops;
  const auto kind = fg::parse_graph_kind(a.kind);
  auto g = fg::generate_graph(kind, a.n, params, gl.seed);
  log(Level::kInfo, "generated " + std::to_string(g.num_nodes()) + " nodes, " + std::to_string(g.num_edges()) + " edges");
  json cfg{{"kind", fg::to_string(kind)}, {"n", a.n}, {"p", a.p}, {"m", a.m}, {"self_loops", a.self_loops},
           {"seed", gl.seed}};
  write_with_sidecar(a.out, fg::encode_csrg(g), "gen-graph", cfg);
}

struct GenFeaturesArgs {
  uint64_t n = 0;
  uint64_t d = 0;
  double noise = 1.0;
  std::string out;
};

void run_gen_features(const Globals& gl, const GenFeaturesArgs& a) {
  auto f = fg::synthetic_features(a.n, a.d, a.noise, gl.seed);
  json cfg{{"n", a.n}, {"d", a.d}, {"noise", a.noise}, {"seed", gl.seed}};
  write_with_sidecar(a.out, fg::encode_fmat(f), "gen-features", cfg);
}

struct SparsifyArgs {
  std::string graph;
  std::string method;
  double keep = 1.0;
  std::string out;
};

void run_sparsify(const Globals& gl, const SparsifyArgs& a) {
  fg::SparsifyMethod m;
  m.variant = fg::parse_sparsify_variant(a.method);
  m.keep_fraction = a.keep;
  const auto g = fg::load_graph(a.graph);
  auto out = fg::sparsify(g, m, gl.seed);
  log(Level::kInfo, "kept " + std::to_string(out.num_edges()) + " of " + std::to_string(g.num_edges()) + " edges");
  json cfg{{"graph", a.graph}, {"method", fg::to_string(m.variant)}, {"keep", a.keep}, {"seed", gl.seed}};
  write_with_sidecar(a.out, fg::encode_csrg(out), "sparsify", cfg);
}

// ---------------------------------------------------------------------------

struct SqArgs {
  std::string features;
  int k = 0;
  double clip = fg::kDefaultClipTailFraction;
  std::string params;
  std::string in;
  std::string rows;
  std::string out;
};

void run_sq_fit(const SqArgs& a) {
  const auto f = fg::load_features(a.features);
  fg::SqCodec c;
  c.params = fg::fit_sq(f, a.k, a.clip);
  c.d = f.cols();
  c.source_elem_bits = f.elem_bits();
  json cfg{{"features", a.features}, {"k", a.k}, {"clip", a.clip}};
  write_with_sidecar(a.out, fg::encode_sqf(c), "sq fit", cfg);
}

void run_sq_encode(const SqArgs& a) {
  const auto f = fg::load_features(a.features);
  fg::SqParams p;
  if (!a.params.empty()) {
    p = fg::load_sq(a.params).params;
    if (p.k != a.k)
      throw fg::InvalidArgument("--k " + std::to_string(a.k) + " does not match the fitted params (k = " +
                                std::to_string(p.k) + ")");
  } else {
    p = fg::fit_sq(f, a.k, a.clip);
  }
  auto c = fg::quantize_sq(f, p);
  const auto cr = fg::sq_compression_ratio(c);
  log(Level::kInfo, "compression ratio " + std::to_string(cr.payload) + " (with header " + std::to_string(cr.with_header) + ")");
  json cfg{{"features", a.features}, {"k", a.k}, {"clip", p.clip_tail_fraction}, {"params", a.params},
           {"e_min", p.e_min}, {"e_max", p.e_max}};
  write_with_sidecar(a.out, fg::encode_sqf(c), "sq encode", cfg);
}

void run_sq_decode(const SqArgs& a) {
  const auto c = fg::load_sq(a.in);
  const auto rows = parse_rows(a.rows);
  auto f = fg::dequantize_sq(c, rows);
  json cfg{{"in", a.in}, {"rows", a.rows}};
  write_with_sidecar(a.out, fg::encode_fmat(f), "sq decode", cfg);
}

struct VqArgs {
  std::string features;
  uint32_t width = 16;
  uint32_t length = 256;
  std::string metric = "cosine";
  std::string layout = "packed";
  double sample = 0.0;
  uint32_t max_iters = 50;
  double tol = 1e-4;
  uint32_t restarts = 4;
  std::string codebook;
  std::string in;
  std::string rows;
  std::string out;
};

fg::VqParams vq_params(const Globals& gl, const VqArgs& a) {
  fg::VqParams p;
  p.width = a.width;
  p.length = a.length;
  p.metric = fg::parse_metric(a.metric);
  p.layout = fg::parse_layout(a.layout);
  if (a.sample > 0.0) p.fit_sample_fraction = a.sample;
  p.kmeans_max_iters = a.max_iters;
  p.kmeans_tol = a.tol;
  p.restarts = a.restarts;
  p.seed = gl.seed;
  p.validate();
  return p;
}

json vq_config(const Globals& gl, const VqArgs& a) {
  return json{{"features", a.features}, {"width", a.width},     {"length", a.length},
              {"metric", a.metric},     {"layout", a.layout},   {"sample", a.sample},
              {"max_iters", a.max_iters}, {"tol", a.tol},       {"restarts", a.restarts},
              {"codebook", a.codebook}, {"seed", gl.seed}};
}

void report_vq_fit(const fg::VqCodec& c) {
  for (uint32_t p = 0; p < c.num_parts; ++p) {
    if (c.part_entries[p] < c.params.length)
      log(Level::kWarn, "part " + std::to_string(p) + " has only " + std::to_string(c.part_entries[p]) +
                            " distinct sub-vectors; codebook truncated");
  }
}

void run_vq_fit(const Globals& gl, const VqArgs& a) {
  const auto f = fg::load_features(a.features);
  auto c = fg::fit_vq(f, vq_params(gl, a));
  report_vq_fit(c);
  write_with_sidecar(a.out, fg::encode_vqf(c), "vq fit", vq_config(gl, a));
}

void run_vq_encode(const Globals& gl, const VqArgs& a) {
  const auto f = fg::load_features(a.features);
  fg::VqCodec c;
  if (!a.codebook.empty()) {
    c = fg::load_vq(a.codebook);
    c.source_elem_bits = f.elem_bits();
  } else {
    c = fg::fit_vq(f, vq_params(gl, a));
    report_vq_fit(c);
  }
  c = fg::encode_vq(f, std::move(c));
  const auto cr = fg::vq_compression_ratio(c);
  log(Level::kInfo, "compression ratio theoretical " + std::to_string(cr.theoretical) + ", realized " +
                        std::to_string(cr.realized) + ", codebook bytes " + std::to_string(cr.codebook_bytes));
  write_with_sidecar(a.out, fg::encode_vqf(c), "vq encode", vq_config(gl, a));
}

void run_vq_decode(const VqArgs& a) {
  const auto c = fg::load_vq(a.in);
  if (!c.has_codes) throw fg::DataError(a.in + ": codebook-only file has no codes to decode");
  auto f = fg::decode_vq(c, parse_rows(a.rows));
  json cfg{{"in", a.in}, {"rows", a.rows}};
  write_with_sidecar(a.out, fg::encode_fmat(f), "vq decode", cfg);
}

// ---------------------------------------------------------------------------

struct FactorsArgs {
  std::string graph;
  std::string features;
  uint32_t layers = 2;
  std::string estimator = "exact";
  uint64_t samples = 10000;
  uint64_t cap = fg::kDefaultExactNodeCap;
  double epsilon = 0.0;
  bool per_node = false;
  std::string out;
};

void run_factors(const Globals& gl, const FactorsArgs& a) {
  const auto est = fg::parse_estimator(a.estimator);
  auto g = fg::load_graph(a.graph);
  if (est == fg::FactorEstimator::kExact && g.num_nodes() > a.cap)
    throw fg::DataError("exact factors are capped at n <= " + std::to_string(a.cap) + " (graph has n = " +
                        std::to_string(g.num_nodes()) + "); use --estimator mc");
  if (!g.has_self_loops()) {
    log(Level::kInfo, "adding self-loops before aggregation");
    g = g.with_self_loops();
  }
  std::optional<fg::FeatureMatrix> f;
  if (!a.features.empty()) f = fg::load_features(a.features);
  const fg::FeatureMatrix* fp = f ? &*f : nullptr;
  const auto r = est == fg::FactorEstimator::kExact ? fg::factors_exact(g, fp, a.layers, a.cap)
                                                    : fg::factors_mc(g, fp, a.layers, a.samples, gl.seed);
  json cfg{{"graph", a.graph}, {"features", a.features}, {"layers", a.layers}, {"estimator", a.estimator},
           {"samples", est == fg::FactorEstimator::kExact ? 0 : a.samples}, {"cap", a.cap}, {"seed", gl.seed}};
  json out;
  out["n"] = r.n;
  out["L"] = r.layers;
  out["estimator"] = fg::to_string(r.estimator);
  out["features_model"] = r.features_model ? "iid" : "data";
  out["mean_c_f"] = r.mean_c_f;
  out["mean_c_e"] = r.mean_c_e;
  out["c_hat"] = r.c_hat;
  if (a.per_node) out["per_node"] = json{{"c_f", r.c_f}, {"c_e", r.c_e}};
  if (a.epsilon > 0.0) {
    cfg["epsilon"] = a.epsilon;
    const auto s = fg::suggest_cr(r, a.epsilon);
    out["suggestion"] = json{{"epsilon", a.epsilon}, {"delta_budget", s.delta_budget}, {"max_cr", s.max_cr},
                             {"sq_bits", s.sq_bits}, {"sq_cr", s.sq_cr}, {"exceeds_sq_range", s.exceeds_sq_range}};
  }
  out["meta"] = meta("factors", cfg);
  write_json(a.out, out);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string graph;
  std::string features;
  uint64_t d = 0;
  std::string codec = "full";
  std::string fanouts = "5,10,15";
  uint64_t batch_size = 1024;
  uint64_t cache_bytes = 0;
  std::string cost;
  double train_fraction = 1.0;
  uint32_t workers = 1;
  bool measure = false;
  std::string out;
};

fg::CostModel load_cost_model(const std::string& path) {
  const json j = read_json(path);
  if (!j.is_object()) throw fg::InvalidArgument(path + ": cost model must be a JSON object");
  fg::CostModel c;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw fg::InvalidArgument(path + ": '" + key + "' must be a number");
    const double v = value.get<double>();
    if (key == "pcie_bytes_per_sec") c.pcie_bytes_per_sec = v;
    else if (key == "sample_cost_per_edge") c.sample_cost_per_edge = v;
    else if (key == "dequant_cost_per_elem") c.dequant_cost_per_elem = v;
    else if (key == "compute_cost_per_batch") c.compute_cost_per_batch = v;
    else throw fg::InvalidArgument(path + ": unknown cost model key '" + key + "'");
  }
  c.validate();
  return c;
}

json cost_json(const fg::CostModel& c) {
  return json{{"pcie_bytes_per_sec", c.pcie_bytes_per_sec},
              {"sample_cost_per_edge", c.sample_cost_per_edge},
              {"dequant_cost_per_elem", c.dequant_cost_per_elem},
              {"compute_cost_per_batch", c.compute_cost_per_batch}};
}

json sim_json(const fg::SimReport& r) {
  return json{{"sample_s", r.sample_s},
              {"load_s", r.load_s},
              {"dequant_s", r.dequant_s},
              {"compute_s", r.compute_s},
              {"bytes_transferred", r.bytes_transferred},
              {"cache_hit_rate", r.cache_hit_rate},
              {"epoch_s", r.epoch_s},
              {"speedup_vs_baseline", r.speedup_vs_baseline}};
}

// Times the real gather-decode path over the sampled frontiers.
void measure_decode(const fg::FeatureMatrix& f, const fg::CodecSpec& codec, std::span<const fg::MiniBatchSample> batches,
                    uint64_t seed) {
  using clock = std::chrono::steady_clock;
  double seconds = 0.0;
  uint64_t rows = 0;
  auto time_batches = [&](auto&& decode) {
    for (const auto& b : batches) {
      std::vector<uint64_t> ids(b.frontier.begin(), b.frontier.end());
      const auto t0 = clock::now();
      const auto out = decode(ids);
      seconds += std::chrono::duration<double>(clock::now() - t0).count();
      rows += out.rows();
    }
  };
  switch (codec.kind) {
    case fg::CodecSpec::Kind::kFull:
      log(Level::kWarn, "--measure has nothing to time for the full-precision codec");
      return;
    case fg::CodecSpec::Kind::kSq: {
      const auto c = fg::quantize_sq(f, fg::fit_sq(f, codec.sq_bits));
      time_batches([&](std::span<const uint64_t> ids) { return fg::dequantize_sq(c, ids); });
      break;
    }
    case fg::CodecSpec::Kind::kVq: {
      fg::VqParams p;
      p.width = codec.vq_width;
      p.length = codec.vq_length;
      p.layout = codec.vq_layout;
      p.seed = seed;
      const auto c = fg::encode_vq(f, fg::fit_vq(f, p));
      time_batches([&](std::span<const uint64_t> ids) { return fg::decode_vq(c, ids); });
      break;
    }
  }
  const double elems = static_cast<double>(rows) * static_cast<double>(f.cols());
  std::fprintf(stderr, "measure: decoded %" PRIu64 " rows in %.6f s (%.3g s per element)\n", rows, seconds,
               elems > 0 ? seconds / elems : 0.0);
}

std::vector<uint32_t> parse_fanouts(const std::string& text) {
  std::vector<uint32_t> out;
  for (uint64_t v : parse_rows(text)) {
    if (v < 1 || v > UINT32_MAX) throw fg::InvalidArgument("fanouts must be in [1, 2^32)");
    out.push_back(static_cast<uint32_t>(v));
  }
  return out;
}

void run_simulate(const Globals& gl, const SimulateArgs& a) {
  const auto g = fg::load_graph(a.graph);
  const auto codec = fg::CodecSpec::parse(a.codec);
  if (!(a.train_fraction > 0.0 && a.train_fraction <= 1.0)) throw fg::InvalidArgument("--train-fraction must be in (0, 1]");
  if (a.features.empty() == (a.d == 0)) throw fg::InvalidArgument("give exactly one of --features or --d");
  uint64_t d = a.d;
  uint32_t elem_bits = 32;
  if (!a.features.empty()) {
    const auto shape = fg::peek_features(a.features);
    if (shape.n != g.num_nodes())
      throw fg::DataError("feature rows (" + std::to_string(shape.n) + ") != graph nodes (" +
                          std::to_string(g.num_nodes()) + ")");
    d = shape.d;
    elem_bits = shape.elem_bits;
  }
  if (codec.kind == fg::CodecSpec::Kind::kVq && codec.vq_width > d)
    throw fg::InvalidArgument("VQ width exceeds feature dimension");

  fg::SamplerConfig sc;
  sc.fanouts = parse_fanouts(a.fanouts);
  sc.batch_size = a.batch_size;
  sc.seed = gl.seed;

  std::vector<fg::NodeId> train(g.num_nodes());
  for (uint64_t i = 0; i < g.num_nodes(); ++i) train[i] = static_cast<fg::NodeId>(i);
  const auto train_n = static_cast<uint64_t>(std::ceil(a.train_fraction * static_cast<double>(g.num_nodes())));
  if (train_n < train.size()) {
    fg::Rng rng(fg::derive_seed(gl.seed, 0x747261696eULL));
    rng.shuffle(std::span(train));
    train.resize(train_n);
    std::sort(train.begin(), train.end());
  }
  const auto batches = fg::sample_batches(g, train, sc);
  const fg::SimInput input{g, batches, d, elem_bits};

  const bool calibrated = a.cost.empty();
  const fg::CostModel cost = calibrated ? fg::calibrate_cost_model(input, fg::CostModel{}) : load_cost_model(a.cost);
  const fg::CacheConfig cache{a.cache_bytes};

  const auto baseline = fg::simulate_workers(input, fg::CodecSpec::full(), cache, cost, a.workers);
  const auto run = fg::simulate_workers(input, codec, cache, cost, a.workers);
  // The slowest worker defines the epoch.
  size_t slowest = 0;
  for (size_t w = 1; w < run.per_worker.size(); ++w)
    if (run.per_worker[w].epoch_s > run.per_worker[slowest].epoch_s) slowest = w;
  fg::SimReport r = run.per_worker[slowest];
  r.speedup_vs_baseline = r.epoch_s > 0.0 ? baseline.epoch_s / r.epoch_s : 1.0;

  if (a.measure) {
    if (a.features.empty()) throw fg::InvalidArgument("--measure needs --features");
    measure_decode(fg::load_features(a.features), codec, batches, gl.seed);
  }

  json cfg{{"graph", a.graph},
           {"features", a.features},
           {"d", d},
           {"elem_bits", elem_bits},
           {"codec", codec.name()},
           {"fanouts", sc.fanouts},
           {"batch_size", a.batch_size},
           {"cache_bytes", a.cache_bytes},
           {"cost", cost_json(cost)},
           {"cost_source", calibrated ? "calibrated" : a.cost},
           {"train_fraction", a.train_fraction},
           {"workers", a.workers},
           {"seed", gl.seed}};
  json out = sim_json(r);
  out["codec"] = codec.name();
  out["workers"] = a.workers;
  out["workload"] = hex64(fg::workload_fingerprint(batches, g.num_nodes(), d, elem_bits));
  out["meta"] = meta("simulate", cfg);
  write_json(a.out, out);
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string baseline;
  std::vector<std::string> variants;
  std::string format = "text";
  std::string out;
};

fg::NamedReport load_sim_report(const std::string& path) {
  const json j = read_json(path);
  fg::NamedReport nr;
  try {
    nr.name = j.at("codec").get<std::string>();
    nr.workload = std::stoull(j.at("workload").get<std::string>(), nullptr, 16);
    auto& r = nr.report;
    r.sample_s = j.at("sample_s").get<double>();
    r.load_s = j.at("load_s").get<double>();
    r.dequant_s = j.at("dequant_s").get<double>();
    r.compute_s = j.at("compute_s").get<double>();
    r.bytes_transferred = j.at("bytes_transferred").get<uint64_t>();
    r.cache_hit_rate = j.at("cache_hit_rate").get<double>();
    r.epoch_s = j.at("epoch_s").get<double>();
    r.speedup_vs_baseline = j.at("speedup_vs_baseline").get<double>();
  } catch (const std::exception& e) {
    throw fg::DataError(path + ": not a simulate report: " + e.what());
  }
  return nr;
}

void run_report(const ReportArgs& a) {
  const auto format = fg::parse_report_format(a.format);
  const auto base = load_sim_report(a.baseline);
  std::vector<fg::NamedReport> vars;
  for (const auto& v : a.variants) vars.push_back(load_sim_report(v));
  const auto text = fg::render_breakdown(fg::breakdown(base, vars), format);
  if (a.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    fg::binio::write_file(a.out, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph feature quantization toolkit"};
  app.set_version_flag("--version", std::string(kVersionText));
  app.require_subcommand(1);
  app.fallthrough();

  Globals gl;
  app.add_option("--seed", gl.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", gl.threads, "Worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--log-level", gl.log_level, "error|warn|info|debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}))
      ->capture_default_str();

  GenGraphArgs gg;
  auto* c_gg = app.add_subcommand("gen-graph", "Generate a synthetic graph (CSRG1)");
  c_gg->add_option("--kind", gg.kind, "star|path|complete|erdos_renyi|preferential_attachment")->required();
  c_gg->add_option("--n", gg.n, "Node count")->required();
  c_gg->add_option("--p", gg.p, "Edge probability (erdos_renyi)");
  c_gg->add_option("--m", gg.m, "Edges per new node (preferential_attachment)");
  c_gg->add_flag("--self-loops", gg.self_loops, "Add a self-loop to every node");
  c_gg->add_option("--out", gg.out, "Output path")->required();

  GenFeaturesArgs gf;
  auto* c_gf = app.add_subcommand("gen-features", "Generate synthetic features (FMAT1)");
  c_gf->add_option("--n", gf.n, "Rows")->required();
  c_gf->add_option("--d", gf.d, "Columns")->required();
  c_gf->add_option("--noise", gf.noise, "Noise scale around the shared direction")->capture_default_str();
  c_gf->add_option("--out", gf.out, "Output path")->required();

  SparsifyArgs sp;
  auto* c_sp = app.add_subcommand("sparsify", "Delete edges with a RANDOM, CENTRALIZED or UNIFORM policy");
  c_sp->add_option("--graph", sp.graph, "Input graph")->required();
  c_sp->add_option("--method", sp.method, "random|centralized|uniform")->required();
  c_sp->add_option("--keep", sp.keep, "Fraction of edges to keep, in (0, 1]")->required();
  c_sp->add_option("--out", sp.out, "Output path")->required();

  SqArgs sq;
  auto* c_sq = app.add_subcommand("sq", "Log-domain scalar quantization");
  c_sq->require_subcommand(1);
  auto* c_sq_fit = c_sq->add_subcommand("fit", "Fit the clip range; writes a payload-free SQF1 file");
  c_sq_fit->add_option("--features", sq.features, "Input features")->required();
  c_sq_fit->add_option("--k", sq.k, "Bits per element")->required();
  c_sq_fit->add_option("--clip", sq.clip, "Tail fraction clipped on each side")->capture_default_str();
  c_sq_fit->add_option("--out", sq.out, "Output path")->required();
  auto* c_sq_enc = c_sq->add_subcommand("encode", "Quantize features to SQF1");
  c_sq_enc->add_option("--features", sq.features, "Input features")->required();
  c_sq_enc->add_option("--k", sq.k, "Bits per element")->required();
  c_sq_enc->add_option("--clip", sq.clip, "Tail fraction clipped on each side")->capture_default_str();
  c_sq_enc->add_option("--params", sq.params, "Reuse the range from an SQF1 file");
  c_sq_enc->add_option("--out", sq.out, "Output path")->required();
  auto* c_sq_dec = c_sq->add_subcommand("decode", "Dequantize SQF1 to FMAT1");
  c_sq_dec->add_option("--in", sq.in, "Input SQF1")->required();
  c_sq_dec->add_option("--rows", sq.rows, "Comma-separated row ids (default: all)");
  c_sq_dec->add_option("--out", sq.out, "Output path")->required();

  VqArgs vq;
  auto* c_vq = app.add_subcommand("vq", "Codebook vector quantization");
  c_vq->require_subcommand(1);
  auto add_vq_fit_opts = [&](CLI::App* c) {
    c->add_option("--width", vq.width, "Dimensions per part")->capture_default_str();
    c->add_option("--length", vq.length, "Codebook entries per part")->capture_default_str();
    c->add_option("--metric", vq.metric, "euclidean|cosine")->capture_default_str();
    c->add_option("--layout", vq.layout, "packed|byte")->capture_default_str();
    c->add_option("--sample", vq.sample, "Fraction of rows used for fitting (default min(1, 1e6/n))");
    c->add_option("--max-iters", vq.max_iters, "Lloyd iterations")->capture_default_str();
    c->add_option("--tol", vq.tol, "Relative objective change to stop")->capture_default_str();
    c->add_option("--restarts", vq.restarts, "k-means restarts")->capture_default_str();
  };
  auto* c_vq_fit = c_vq->add_subcommand("fit", "Fit codebooks; writes a codebook-only VQF1 file");
  c_vq_fit->add_option("--features", vq.features, "Input features")->required();
  add_vq_fit_opts(c_vq_fit);
  c_vq_fit->add_option("--out", vq.out, "Output path")->required();
  auto* c_vq_enc = c_vq->add_subcommand("encode", "Encode features to VQF1");
  c_vq_enc->add_option("--features", vq.features, "Input features")->required();
  add_vq_fit_opts(c_vq_enc);
  c_vq_enc->add_option("--codebook", vq.codebook, "Reuse codebooks from a VQF1 file");
  c_vq_enc->add_option("--out", vq.out, "Output path")->required();
  auto* c_vq_dec = c_vq->add_subcommand("decode", "Decode VQF1 to FMAT1");
  c_vq_dec->add_option("--in", vq.in, "Input VQF1")->required();
  c_vq_dec->add_option("--rows", vq.rows, "Comma-separated row ids (default: all)");
  c_vq_dec->add_option("--out", vq.out, "Output path")->required();

  FactorsArgs fa;
  auto* c_fa = app.add_subcommand("factors", "Aggregation factors and compression guidance");
  c_fa->add_option("--graph", fa.graph, "Input graph")->required();
  c_fa->add_option("--features", fa.features, "Features (default: iid model)");
  c_fa->add_option("--layers", fa.layers, "Aggregation layers")->capture_default_str();
  c_fa->add_option("--estimator", fa.estimator, "exact|mc")->capture_default_str();
  c_fa->add_option("--samples", fa.samples, "Monte Carlo samples")->capture_default_str();
  c_fa->add_option("--cap", fa.cap, "Node cap for the exact estimator")->capture_default_str();
  c_fa->add_option("--epsilon", fa.epsilon, "Error target for the compression suggestion");
  c_fa->add_flag("--per-node", fa.per_node, "Include per-node factors");
  c_fa->add_option("--out", fa.out, "Output JSON")->required();

  SimulateArgs si;
  auto* c_si = app.add_subcommand("simulate", "Simulate one epoch of mini-batch feature loading");
  c_si->add_option("--graph", si.graph, "Input graph")->required();
  c_si->add_option("--features", si.features, "Feature file (shape only, unless --measure)");
  c_si->add_option("--d", si.d, "Feature dimension when no feature file is given");
  c_si->add_option("--codec", si.codec, "full|sq:K|vq|vq:W:L[:layout]")->capture_default_str();
  c_si->add_option("--fanouts", si.fanouts, "Per-layer fanouts")->capture_default_str();
  c_si->add_option("--batch-size", si.batch_size, "Seeds per batch")->capture_default_str();
  c_si->add_option("--cache-bytes", si.cache_bytes, "Static cache budget")->capture_default_str();
  c_si->add_option("--cost", si.cost, "Cost model JSON (default: calibrated to 85% loading)");
  c_si->add_option("--train-fraction", si.train_fraction, "Fraction of nodes used as seeds")->capture_default_str();
  c_si->add_option("--workers", si.workers, "Workers sharing the bus")->capture_default_str();
  c_si->add_flag("--measure", si.measure, "Also time the real decode path (stderr only)");
  c_si->add_option("--out", si.out, "Output JSON")->required();

  ReportArgs re;
  auto* c_re = app.add_subcommand("report", "Breakdown and speedup table from simulate reports");
  c_re->add_option("--baseline", re.baseline, "Baseline report")->required();
  c_re->add_option("--variants", re.variants, "Variant reports")->required();
  c_re->add_option("--format", re.format, "text|csv|json")->capture_default_str();
  c_re->add_option("--out", re.out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "featgrind: " << e.what() << "\n";
    const CLI::App* sub = &app;
    for (const CLI::App* s = &app; s;) {
      const auto subs = s->get_subcommands();
      if (subs.empty()) break;
      sub = s = subs.front();
    }
    std::cerr << sub->help();
    return 1;
  }

  try {
    g_level = gl.log_level == "error" ? Level::kError
              : gl.log_level == "info"  ? Level::kInfo
              : gl.log_level == "debug" ? Level::kDebug
                                        : Level::kWarn;
    fg::kernels::set_num_threads(gl.threads);

    if (c_gg->parsed()) run_gen_graph(gl, gg);
    else if (c_gf->parsed()) run_gen_features(gl, gf);
    else if (c_sp->parsed()) run_sparsify(gl, sp);
    else if (c_sq_fit->parsed()) run_sq_fit(sq);
    else if (c_sq_enc->parsed()) run_sq_encode(sq);
    else if (c_sq_dec->parsed()) run_sq_decode(sq);
    else if (c_vq_fit->parsed()) run_vq_fit(gl, vq);
    else if (c_vq_enc->parsed()) run_vq_encode(gl, vq);
    else if (c_vq_dec->parsed()) run_vq_decode(vq);
    else if (c_fa->parsed()) run_factors(gl, fa);
    else if (c_si->parsed()) run_simulate(gl, si);
    else if (c_re->parsed()) run_report(re);
  } catch (const fg::InvalidArgument& e) {
    log(Level::kError, e.what());
    return 1;
  } catch (const fg::DataError& e) {
    log(Level::kError, e.what());
    return 2;
  } catch (const std::exception& e) {
    log(Level::kError, e.what());
    return 2;
  }
  return 0;
}
