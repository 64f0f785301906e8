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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mka/numerics/tensor.hpp"

namespace mka::numerics {

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;  // max center displacement that counts as converged
};

struct ClusterResult {
  Matrix centers;                      // K x d
  std::vector<std::size_t> assignments;  // n labels in [0, K)
  double inertia = 0.0;
  std::vector<double> inertia_history;  // one entry per Lloyd iteration
  int iterations = 0;
};

/// Lloyd's algorithm with distance-weighted (k-means++) seeding. Empty
/// clusters are refilled with the point farthest from the center of the
/// largest cluster, so every label in [0, K) is populated on return.
ClusterResult kmeans(const SampleMatrix& x, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

/// Best (lowest inertia) of `restarts` seeded runs; ties keep the earliest run.
ClusterResult kmeans_best_of(const SampleMatrix& x, std::size_t k, std::uint64_t seed, int restarts,
                             const KMeansOptions& options = {});

}  // namespace mka::numerics
