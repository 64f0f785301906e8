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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mka/kgt/kgt.hpp"
#include "mka/numerics/tensor.hpp"

namespace mka::metrics {

/// Single-channel map.
using Heatmap = numerics::DenseMap;

/// Additive 1e-12 smoothing, sum-normalization, then sum gt ln(gt / pred).
double kld(const Heatmap& pred, const Heatmap& gt);

/// Sum of the element-wise minimum of the sum-normalized maps.
double sim(const Heatmap& pred, const Heatmap& gt);

/// Mean z-score of `pred` at the nonzero pixels of `fixations`. A constant
/// prediction scores 0.
double nss(const Heatmap& pred, const Heatmap& fixations);

/// Pixels whose min-max normalized ground-truth value exceeds `threshold`.
Heatmap fixations_from_gt(const Heatmap& gt, double threshold = 0.1);

struct PixelCoord {
  double row = 0.0;
  double col = 0.0;
};

/// Isotropic Gaussians of peak 1, merged by pixel-wise maximum.
Heatmap gaussian_gt_heatmap(std::span<const PixelCoord> keypoints, double sigma, std::size_t height,
                            std::size_t width);

inline constexpr double kDefaultSigma = 10.0;

struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
  void validate() const;
};

/// Depth in meters; 0 marks an invalid reading.
struct DepthImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> depth;

  double at(std::size_t row, std::size_t col) const { return depth[row * width + col]; }
};

/// Pinhole back-projection with u = column and v = row.
kgt::Vec3 project_to_3d(std::size_t row, std::size_t col, const DepthImage& depth, const CameraIntrinsics& intr);

/// Like project_to_3d, but an invalid reading is replaced by the median of
/// the valid depths in the surrounding 5x5 window.
kgt::Vec3 project_to_3d_with_fallback(std::size_t row, std::size_t col, const DepthImage& depth,
                                      const CameraIntrinsics& intr);

struct ContactRegion3D {
  kgt::Vec3 center{};
  double radius = 0.0;  // m
};

/// Hits / 3 with slot-matched regions (functional, little, wrist).
double tpc(std::span<const kgt::Vec3, 3> keypoints, std::span<const ContactRegion3D, 3> regions);

/// Percentage with one decimal, trailing ".0" dropped: 100, 66.7, 33.3, 0.
std::string format_percent(double ratio);

struct GroundingScores {
  double kld = 0.0;
  double sim = 0.0;
  double nss = 0.0;
};

GroundingScores score_heatmaps(const Heatmap& pred, const Heatmap& gt);

}  // namespace mka::metrics
