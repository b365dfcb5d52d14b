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

#include "featgrind/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "featgrind/error.hpp"
#include "featgrind/kernels.hpp"
#include "featgrind/rng.hpp"

namespace featgrind {

double point_cost(std::span<const double> x, std::span<const double> c, Metric metric) {
  if (metric == Metric::kEuclidean) {
    double s = 0.0;
    for (size_t j = 0; j < x.size(); ++j) {
      const double diff = x[j] - c[j];
      s += diff * diff;
    }
    return s;
  }
  double dot = 0.0;
  for (size_t j = 0; j < x.size(); ++j) dot += x[j] * c[j];
  return 1.0 - dot;
}

double kmeans_objective(std::span<const double> points, uint64_t dim, std::span<const double> centroids,
                        Metric metric) {
  const uint64_t n = points.size() / dim;
  std::vector<uint32_t> assign(n);
  std::vector<double> cost(n);
  kernels::serial::nearest_centroid(points, dim, centroids, metric, assign, cost);
  double total = 0.0;
  for (double c : cost) total += c;
  return total;
}

namespace {

struct Run {
  std::vector<double> centroids;
  std::vector<uint32_t> assignment;
  std::vector<double> history;
  double objective = 0.0;
};

std::vector<double> seed_plus_plus(std::span<const double> points, uint64_t n, uint64_t dim, uint32_t k,
                                   Metric metric, Rng& rng) {
  std::vector<double> centroids;
  centroids.reserve(static_cast<size_t>(k) * dim);
  auto add = [&](uint64_t i) {
    centroids.insert(centroids.end(), points.begin() + static_cast<std::ptrdiff_t>(i * dim),
                     points.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
  };
  add(rng.below(n));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (uint32_t c = 1; c < k; ++c) {
    const auto last = std::span<const double>(centroids).subspan((c - 1) * dim, dim);
    double total = 0.0;
    for (uint64_t i = 0; i < n; ++i) {
      // D^2 weighting; for unit vectors |x - c|^2 = 2 (1 - cos).
      const double dist = std::max(0.0, point_cost(points.subspan(i * dim, dim), last, metric));
      nearest[i] = std::min(nearest[i], dist);
      total += nearest[i];
    }
    uint64_t pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      for (uint64_t i = 0; i < n; ++i) {
        cum += nearest[i];
        if (nearest[i] > 0.0 && cum > target) {
          pick = i;
          break;
        }
      }
      while (nearest[pick] <= 0.0 && pick > 0) --pick;
    } else {
      pick = rng.below(n);
    }
    add(pick);
  }
  return centroids;
}

void normalize(std::span<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : v) x /= norm;
}

Run lloyd(std::span<const double> points, uint64_t n, uint64_t dim, uint32_t k, Metric metric,
          const KMeansOptions& opts, Rng& rng) {
  Run run;
  run.centroids = seed_plus_plus(points, n, dim, k, metric, rng);
  run.assignment.assign(n, 0);
  std::vector<double> cost(n);

  auto assign_all = [&] {
    kernels::omp::nearest_centroid(points, dim, run.centroids, metric, run.assignment, cost);
    double total = 0.0;
    for (double c : cost) total += c;
    return total;
  };

  run.objective = assign_all();
  run.history.push_back(run.objective);

  std::vector<double> sums(static_cast<size_t>(k) * dim);
  std::vector<uint64_t> counts(k);
  std::vector<uint32_t> previous;
  for (uint32_t iter = 0; iter < opts.max_iters && run.objective > 0.0; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (uint64_t i = 0; i < n; ++i) {
      const uint32_t c = run.assignment[i];
      ++counts[c];
      for (uint64_t j = 0; j < dim; ++j) sums[c * dim + j] += points[i * dim + j];
    }
    std::vector<bool> taken(n, false);
    for (uint32_t c = 0; c < k; ++c) {
      auto centroid = std::span(run.centroids).subspan(c * dim, dim);
      auto sum = std::span(sums).subspan(c * dim, dim);
      if (counts[c] > 0) {
        if (metric == Metric::kEuclidean) {
          for (uint64_t j = 0; j < dim; ++j) centroid[j] = sum[j] / static_cast<double>(counts[c]);
        } else {
          double norm = 0.0;
          for (double x : sum) norm += x * x;
          if (norm > 0.0) {
            std::copy(sum.begin(), sum.end(), centroid.begin());
            normalize(centroid);
          }
        }
        continue;
      }
      // Empty cluster: reseed at the worst-served point.
      uint64_t far = 0;
      double far_cost = -1.0;
      for (uint64_t i = 0; i < n; ++i) {
        if (!taken[i] && cost[i] > far_cost) {
          far_cost = cost[i];
          far = i;
        }
      }
      taken[far] = true;
      std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(far * dim), dim, centroid.begin());
    }

    previous = run.assignment;
    const double prev = run.objective;
    run.objective = assign_all();
    run.history.push_back(run.objective);
    if (run.objective > prev + 1e-12 * std::max(1.0, std::abs(prev)))
      throw std::logic_error("k-means objective increased from " + std::to_string(prev) + " to " +
                             std::to_string(run.objective));
    if (previous == run.assignment || prev - run.objective <= opts.tol * prev) break;
  }
  return run;
}

}  // namespace

KMeansResult kmeans(std::span<const double> points, uint64_t dim, uint32_t k, Metric metric,
                    const KMeansOptions& opts, uint64_t seed) {
  if (dim == 0 || points.size() % dim != 0) throw InvalidArgument("k-means: points must be n x dim");
  const uint64_t n = points.size() / dim;
  if (k < 1 || n < k) throw InvalidArgument("k-means needs at least k points");
  if (opts.restarts < 1) throw InvalidArgument("k-means needs at least one restart");

  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (uint32_t r = 0; r < opts.restarts; ++r) {
    Rng rng(derive_seed(seed, r));
    Run run = lloyd(points, n, dim, k, metric, opts, rng);
    if (run.objective < best.objective) {
      best.centroids = std::move(run.centroids);
      best.assignment = std::move(run.assignment);
      best.history = std::move(run.history);
      best.objective = run.objective;
      best.restart = r;
    }
  }
  return best;
}

}  // namespace featgrind
