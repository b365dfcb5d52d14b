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

#include "featgrind/factors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "featgrind/error.hpp"
#include "featgrind/kernels.hpp"
#include "featgrind/rng.hpp"

namespace featgrind {

std::string_view to_string(FactorEstimator e) { return e == FactorEstimator::kExact ? "exact" : "mc"; }

FactorEstimator parse_estimator(std::string_view name) {
  if (name == "exact") return FactorEstimator::kExact;
  if (name == "mc") return FactorEstimator::kMonteCarlo;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "'");
}

namespace {

constexpr uint64_t kBlockWidth = 64;

void require_self_loops(const CsrGraph& g) {
  if (!g.has_self_loops()) throw DataError("aggregation factors need a graph with self-loops");
}

// Propagates an n x width block through `layers` mean aggregations and adds
// each layer's per-row sum of squares into acc[l].
void propagate_block(const CsrGraph& g, std::vector<double>& cur, uint64_t width, uint32_t layers,
                     std::vector<std::vector<double>>& acc) {
  std::vector<double> next(cur.size());
  for (uint32_t l = 1; l <= layers; ++l) {
    kernels::omp::mean_aggregate(g, {cur, next, width});
    kernels::omp::accumulate_row_sumsq(next, width, acc[l]);
    cur.swap(next);
  }
}

void finish(FactorReport& r) {
  r.mean_c_f.assign(r.layers + 1, 0.0);
  r.mean_c_e.assign(r.layers + 1, 0.0);
  r.c_hat.assign(r.layers + 1, 0.0);
  for (uint32_t l = 0; l <= r.layers; ++l) {
    double sf = 0.0, se = 0.0;
    for (uint64_t i = 0; i < r.n; ++i) {
      sf += r.c_f[l][i];
      se += r.c_e[l][i];
    }
    r.mean_c_f[l] = sf / static_cast<double>(r.n);
    r.mean_c_e[l] = se / static_cast<double>(r.n);
    r.c_hat[l] = r.mean_c_e[l] / r.mean_c_f[l];
  }
}

void attach_features(FactorReport& r, const CsrGraph& g, const FeatureMatrix* features) {
  if (features) {
    r.c_f = feature_factors(g, *features, r.layers);
    r.features_model = false;
  } else {
    r.c_f = r.c_e;
    r.features_model = true;
  }
}

}  // namespace

std::vector<std::vector<double>> feature_factors(const CsrGraph& g, const FeatureMatrix& features, uint32_t layers) {
  require_self_loops(g);
  const uint64_t n = g.num_nodes();
  const uint64_t d = features.cols();
  if (features.rows() != n)
    throw DataError("feature rows (" + std::to_string(features.rows()) + ") != graph nodes (" + std::to_string(n) + ")");
  std::vector<double> cur(n * d);
  for (uint64_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (uint64_t j = 0; j < d; ++j) {
      cur[i * d + j] = features.at(i, j);
      norm += cur[i * d + j] * cur[i * d + j];
    }
    if (!(norm > 0.0)) throw DataError("feature row " + std::to_string(i) + " has zero norm");
    norm = std::sqrt(norm);
    for (uint64_t j = 0; j < d; ++j) cur[i * d + j] /= norm;
  }
  std::vector<std::vector<double>> sumsq(layers + 1, std::vector<double>(n, 0.0));
  propagate_block(g, cur, d, layers, sumsq);
  std::vector<std::vector<double>> c_f(layers + 1, std::vector<double>(n, 1.0));
  for (uint32_t l = 1; l <= layers; ++l)
    for (uint64_t i = 0; i < n; ++i) c_f[l][i] = std::sqrt(sumsq[l][i]);
  return c_f;
}

FactorReport factors_exact(const CsrGraph& g, const FeatureMatrix* features, uint32_t layers, uint64_t node_cap) {
  require_self_loops(g);
  const uint64_t n = g.num_nodes();
  if (n > node_cap)
    throw DataError("exact factors are capped at n <= " + std::to_string(node_cap) + " (graph has n = " +
                    std::to_string(n) + "); use the Monte Carlo estimator");
  FactorReport r;
  r.layers = layers;
  r.n = n;
  r.estimator = FactorEstimator::kExact;

  // Starting from identity error covariance, node i's error variance after
  // l aggregations is the squared norm of row i of M^l. Propagate the
  // identity a column block at a time.
  std::vector<std::vector<double>> acc(layers + 1, std::vector<double>(n, 0.0));
  for (uint64_t c0 = 0; c0 < n; c0 += kBlockWidth) {
    const uint64_t width = std::min(kBlockWidth, n - c0);
    std::vector<double> cur(n * width, 0.0);
    for (uint64_t c = 0; c < width; ++c) cur[(c0 + c) * width + c] = 1.0;
    propagate_block(g, cur, width, layers, acc);
  }
  r.c_e.assign(layers + 1, std::vector<double>(n, 1.0));
  for (uint32_t l = 1; l <= layers; ++l)
    for (uint64_t i = 0; i < n; ++i) r.c_e[l][i] = std::sqrt(acc[l][i]);
  attach_features(r, g, features);
  finish(r);
  return r;
}

FactorReport factors_mc(const CsrGraph& g, const FeatureMatrix* features, uint32_t layers, uint64_t num_samples,
                        uint64_t seed) {
  require_self_loops(g);
  if (num_samples < 2) throw InvalidArgument("Monte Carlo factors need at least 2 samples");
  const uint64_t n = g.num_nodes();
  FactorReport r;
  r.layers = layers;
  r.n = n;
  r.estimator = FactorEstimator::kMonteCarlo;
  r.num_samples = num_samples;

  std::vector<std::vector<double>> acc(layers + 1, std::vector<double>(n, 0.0));
  for (uint64_t s0 = 0; s0 < num_samples; s0 += kBlockWidth) {
    const uint64_t width = std::min(kBlockWidth, num_samples - s0);
    std::vector<double> cur(n * width);
    const auto cols = static_cast<int64_t>(width);
#pragma omp parallel for schedule(static)
    for (int64_t c = 0; c < cols; ++c) {
      Rng rng(derive_seed(seed, s0 + static_cast<uint64_t>(c)));
      for (uint64_t i = 0; i < n; ++i) cur[i * width + static_cast<uint64_t>(c)] = rng.normal();
    }
    propagate_block(g, cur, width, layers, acc);
  }
  r.c_e.assign(layers + 1, std::vector<double>(n, 1.0));
  for (uint32_t l = 1; l <= layers; ++l)
    for (uint64_t i = 0; i < n; ++i) r.c_e[l][i] = std::sqrt(acc[l][i] / static_cast<double>(num_samples));
  attach_features(r, g, features);
  finish(r);
  return r;
}

CrSuggestion suggest_cr(double c_hat, double epsilon, uint32_t elem_bits) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(c_hat > 0.0)) throw InvalidArgument("C_hat must be > 0");
  if (elem_bits < 1) throw InvalidArgument("element width must be >= 1 bit");
  CrSuggestion s;
  const double b = elem_bits;
  s.delta_budget = epsilon / c_hat;
  const double bits_needed = -std::log2(s.delta_budget);  // b / CR at the bound
  s.max_cr = bits_needed <= 1.0 ? b : b / bits_needed;
  s.sq_bits = std::max(1, static_cast<int>(std::ceil(b / s.max_cr - 1e-12)));
  s.sq_cr = b / s.sq_bits;
  s.exceeds_sq_range = s.sq_bits > 8;
  return s;
}

CrSuggestion suggest_cr(const FactorReport& report, double epsilon, uint32_t elem_bits) {
  return suggest_cr(report.final_c_hat(), epsilon, elem_bits);
}

}  // namespace featgrind
