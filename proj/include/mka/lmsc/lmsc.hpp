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
#include <span>
#include <vector>

#include "mka/numerics/pca.hpp"
#include "mka/numerics/tensor.hpp"

namespace mka::lmsc {

using numerics::DenseMap;

/// f + resample(upsample_2x(f)) + resample(downsample_half(f)), both extra
/// terms brought back to f's grid with corner-aligned bilinear resampling.
DenseMap multiscale(const DenseMap& f);

struct ReducedFeatures {
  DenseMap map;  // k channels
  numerics::PcaModel model;
  bool degenerate = false;  // every pixel identical; map is all zeros
};

/// Projects every pixel onto the top-k PCA basis fitted over the whole map.
ReducedFeatures reduce_features(const DenseMap& f_ms, std::size_t k);

struct RegionMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t region_id = 0;
  std::vector<std::uint8_t> bitmap;  // row-major, nonzero = inside

  bool contains(std::size_t row, std::size_t col) const { return bitmap[row * width + col] != 0; }
  std::size_t pixel_count() const;
};

struct Candidate {
  std::size_t row = 0;  // feature-grid coordinates
  std::size_t col = 0;
  std::size_t region_id = 0;
  std::size_t cluster_index = 0;
  bool fallback = false;  // centroid of an unclusterable region
  std::vector<double> descriptor;  // reduced feature at (row, col)
  std::vector<double> center;      // cluster center; equals descriptor for fallbacks
};

struct CandidateKeypointSet {
  std::size_t grid_height = 0;
  std::size_t grid_width = 0;
  std::size_t clusters_per_region = 0;  // J
  std::size_t region_count = 0;         // S
  std::vector<Candidate> points;        // region_id asc, then cluster_index asc

  /// Column of the T x (S*J) selection matrix that scores this candidate.
  std::size_t slot(const Candidate& c) const { return c.region_id * clusters_per_region + c.cluster_index; }
  std::size_t max_slots() const { return region_count * clusters_per_region; }
};

struct ExtractOptions {
  int kmeans_restarts = 8;
};

/// Per region: K-means with J clusters over the mask's feature vectors, each
/// center mapped to the nearest in-mask pixel (ties to the first pixel in
/// row-major order). Regions with fewer than J pixels contribute their
/// centroid pixel instead. Cluster indices within a region follow the
/// row-major order of the chosen pixels.
CandidateKeypointSet extract_candidates(const DenseMap& f_reduced, std::span<const RegionMask> masks, std::size_t J,
                                        std::uint64_t seed, const ExtractOptions& options = {});

/// Grid cell -> pixel in an image of the given size: the pixel containing the
/// cell center.
std::size_t grid_to_image(std::size_t index, std::size_t grid_extent, std::size_t image_extent);

}  // namespace mka::lmsc
