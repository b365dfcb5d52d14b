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
#include <span>
#include <vector>

namespace featgrind {

enum class Metric : uint8_t { kEuclidean = 0, kCosine = 1 };

struct KMeansOptions {
  uint32_t max_iters = 50;
  double tol = 1e-4;  // relative objective change
  uint32_t restarts = 4;
};

/// Points are row-major n x dim. For kCosine the caller passes unit-norm
/// rows (zero rows must already be filtered out).
struct KMeansResult {
  std::vector<double> centroids;  // k x dim
  std::vector<uint32_t> assignment;
  double objective = 0.0;
  /// Objective after every assignment step of the winning restart.
  std::vector<double> history;
  uint32_t restart = 0;
};

/// Squared L2 for kEuclidean, 1 - dot for kCosine (unit vectors).
double point_cost(std::span<const double> x, std::span<const double> c, Metric metric);

/// Sum of point_cost over nearest centroids; ties to the lowest index.
double kmeans_objective(std::span<const double> points, uint64_t dim, std::span<const double> centroids,
                        Metric metric);

/// Lloyd's iterations from k-means++ seeds, best of `restarts`. Requires
/// n >= k. Empty clusters take the point farthest from its centroid.
/// Throws std::logic_error if an iteration increases the objective.
KMeansResult kmeans(std::span<const double> points, uint64_t dim, uint32_t k, Metric metric,
                    const KMeansOptions& opts, uint64_t seed);

}  // namespace featgrind
