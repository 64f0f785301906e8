// Copyright 2026 The MKA Authors.
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

#include "mka/numerics/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mka/error.hpp"
#include "mka/numerics/kernels.hpp"
#include "mka/numerics/rng.hpp"

namespace mka::numerics {
namespace {

Matrix seed_centers(const SampleMatrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows();
  Matrix centers(k, x.cols());
  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  std::size_t pick = static_cast<std::size_t>(rng.index(n));
  for (std::size_t c = 0;; ++c) {
    chosen[pick] = true;
    std::copy(x.row(pick).begin(), x.row(pick).end(), centers.row(c).begin());
    if (c + 1 == k) break;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(x.row(i), centers.row(c)));
      total += d2[i];
    }
    if (total <= 0.0) {
      // All remaining points coincide with a center; take the first unused one.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
      continue;
    }
    const double target = rng.uniform() * total;
    double acc = 0.0;
    pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      if (acc > target) {
        pick = i;
        break;
      }
    }
    if (pick == n) {
      // Rounding left target beyond the running sum; fall back to the last positive-weight point.
      for (std::size_t i = n; i-- > 0;) {
        if (d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
  }
  return centers;
}

void repair_empty(const SampleMatrix& x, Matrix& centers, std::vector<std::size_t>& labels) {
  const std::size_t k = centers.rows();
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t l : labels) ++counts[l];

  for (std::size_t empty = 0; empty < k; ++empty) {
    if (counts[empty] != 0) continue;
    const std::size_t largest =
        static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != largest) continue;
      const double d = squared_distance(x.row(i), centers.row(largest));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    labels[far] = empty;
    --counts[largest];
    counts[empty] = 1;
    std::copy(x.row(far).begin(), x.row(far).end(), centers.row(empty).begin());
  }
}

double update_centers(const SampleMatrix& x, Matrix& centers, const std::vector<std::size_t>& labels) {
  const std::size_t k = centers.rows();
  const std::size_t d = x.cols();
  Matrix sums(k, d);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++counts[labels[i]];
    auto row = x.row(i);
    auto acc = sums.row(labels[i]);
    for (std::size_t j = 0; j < d; ++j) acc[j] += row[j];
  }
  double max_shift = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double inv = 1.0 / static_cast<double>(counts[c]);
    double shift = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double updated = sums(c, j) * inv;
      const double delta = updated - centers(c, j);
      shift += delta * delta;
      centers(c, j) = updated;
    }
    max_shift = std::max(max_shift, std::sqrt(shift));
  }
  return max_shift;
}

double inertia_of(const SampleMatrix& x, const Matrix& centers, const std::vector<std::size_t>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) s += squared_distance(x.row(i), centers.row(labels[i]));
  return s;
}

}  // namespace

ClusterResult kmeans(const SampleMatrix& x, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = x.rows();
  if (k == 0) throw InvalidArgument("kmeans: K must be at least 1");
  if (k > n) throw InvalidArgument("kmeans: K exceeds the sample count");
  if (x.cols() == 0) throw InvalidArgument("kmeans: zero-dimensional samples");
  if (options.max_iterations < 1) throw InvalidArgument("kmeans: max_iterations must be at least 1");

  Rng rng(seed);
  ClusterResult result;
  result.centers = seed_centers(x, k, rng);

  std::vector<std::size_t> labels(n, k);
  std::vector<std::size_t> next(n);
  std::vector<double> distances(n);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    kernels::omp::assign_nearest(x, result.centers, next, distances);
    repair_empty(x, result.centers, next);
    const bool fixpoint = next == labels;
    labels.swap(next);
    const double shift = update_centers(x, result.centers, labels);
    result.inertia_history.push_back(inertia_of(x, result.centers, labels));
    result.iterations = iter + 1;
    if (fixpoint || shift < options.tolerance) break;
  }
  result.assignments = std::move(labels);
  result.inertia = result.inertia_history.back();
  return result;
}

ClusterResult kmeans_best_of(const SampleMatrix& x, std::size_t k, std::uint64_t seed, int restarts,
                             const KMeansOptions& options) {
  if (restarts < 1) throw InvalidArgument("kmeans_best_of: restarts must be at least 1");
  ClusterResult best = kmeans(x, k, mix_seed(seed, 0), options);
  for (int r = 1; r < restarts; ++r) {
    ClusterResult candidate = kmeans(x, k, mix_seed(seed, static_cast<std::uint64_t>(r)), options);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

}  // namespace mka::numerics
