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

// Synthetic dataset with a known optimum. Every ego image has three contact
// regions and one decoy region on a 64x64 feature grid. Each contact region
// holds six patches whose features lie on a line p + t e:
//
//   t = -1, 0 (the contact, small), +1, 4, 12, 24
//
// With four clusters the three patches around t = 0 merge into one cluster
// whose center maps onto the contact. Fewer clusters merge that group with
// the t = 4 patch and more clusters split it, so the chosen pixel leaves
// the contact in both cases. The decoy region carries p exactly and so
// outscores the contacts once it is included.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mka/lmsc/lmsc.hpp"
#include "mka/metrics/metrics.hpp"
#include "mka/pipeline/formats.hpp"

namespace mka::pipeline {

struct FixtureOptions {
  std::uint64_t seed = 0;
  std::size_t train_per_class = 6;
  std::size_t test_per_class = 2;
  double noise = 1e-3;
  bool depth_for_test = true;
};

struct FixtureSample {
  std::string id;
  std::string split;  // "train" or "test"
  std::size_t label = 0;
  FeatureBundle ego;
  FeatureBundle exo;
  std::vector<lmsc::RegionMask> masks;             // contact 0, 1, 2, then the decoy
  std::array<metrics::PixelCoord, 3> gt_keypoints;  // 448 x 448 frame
  std::optional<metrics::DepthImage> depth;
  metrics::CameraIntrinsics intrinsics;
  std::array<metrics::ContactRegion3D, 3> contact_regions;
};

struct Fixture {
  std::string tool;
  std::vector<std::string> affordances;
  std::vector<FixtureSample> samples;  // train samples first, then test
};

inline constexpr std::size_t kFixtureGrid = 64;
inline constexpr std::size_t kFixtureExoGrid = 16;
inline constexpr std::size_t kFixtureImage = 448;

Fixture make_fixture(const FixtureOptions& options);

/// Writes bundles, masks and depth maps under `dir` plus `dir`/manifest.json.
/// Returns the manifest path.
std::string write_fixture(const Fixture& fixture, const std::string& dir);

}  // namespace mka::pipeline
