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
#include <optional>
#include <string_view>
#include <vector>

#include "featgrind/features.hpp"
#include "featgrind/graph.hpp"

namespace featgrind {

inline constexpr uint64_t kDefaultExactNodeCap = 5000;

enum class FactorEstimator { kExact, kMonteCarlo };
std::string_view to_string(FactorEstimator e);
FactorEstimator parse_estimator(std::string_view name);

/// Aggregation factors for layers 0..L under mean aggregation with
/// self-loops. c_e[l][i] is the RMS size of node i's propagated iid unit
/// error after l aggregations; c_f[l][i] is the norm of node i's
/// aggregated unit-normalized feature row (or the iid model when no
/// features were given, in which case c_f == c_e).
struct FactorReport {
  uint32_t layers = 0;
  uint64_t n = 0;
  std::vector<std::vector<double>> c_f;
  std::vector<std::vector<double>> c_e;
  std::vector<double> mean_c_f;
  std::vector<double> mean_c_e;
  std::vector<double> c_hat;  // mean_c_e / mean_c_f
  FactorEstimator estimator = FactorEstimator::kExact;
  uint64_t num_samples = 0;
  bool features_model = false;  // true when c_f came from the iid model

  double final_c_hat() const { return c_hat.back(); }
};

/// Exact error factors from the closed form C^e_{i,l}^2 = sum_j (M^l)_{ij}^2,
/// M the mean-aggregation operator, computed in column blocks. Throws
/// DataError if g lacks self-loops or n > node_cap.
FactorReport factors_exact(const CsrGraph& g, const FeatureMatrix* features, uint32_t layers,
                           uint64_t node_cap = kDefaultExactNodeCap);

/// Monte Carlo error factors: RMS over `num_samples` propagated iid N(0,1)
/// node signals. Sample s draws from its own derived stream, so the result
/// is independent of thread count.
FactorReport factors_mc(const CsrGraph& g, const FeatureMatrix* features, uint32_t layers,
                        uint64_t num_samples, uint64_t seed);

/// Feature factors only: c_f[l][i] = ||(M^l X)_i|| with unit-norm rows.
/// Throws DataError for a zero feature row.
std::vector<std::vector<double>> feature_factors(const CsrGraph& g, const FeatureMatrix& features,
                                                 uint32_t layers);

/// Heuristic compression guidance. The loss bound scales with delta * C_hat
/// and delta ~ 2^(-b/CR); taking those as equalities gives
/// delta_budget = epsilon / C_hat and CR_max = b / max(1, -log2 delta_budget).
struct CrSuggestion {
  double delta_budget = 0.0;
  double max_cr = 0.0;     // continuous bound, capped at b
  int sq_bits = 1;         // ceil(b / max_cr)
  double sq_cr = 0.0;      // b / sq_bits
  bool exceeds_sq_range = false;  // sq_bits > 8
};
CrSuggestion suggest_cr(double c_hat, double epsilon, uint32_t elem_bits = 32);
CrSuggestion suggest_cr(const FactorReport& report, double epsilon, uint32_t elem_bits = 32);

}  // namespace featgrind
