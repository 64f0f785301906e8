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

#include "mka/lmsc/lmsc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mka/error.hpp"
#include "mka/numerics/kmeans.hpp"
#include "mka/numerics/resample.hpp"
#include "mka/numerics/rng.hpp"

namespace mka::lmsc {

using numerics::bilinear_resize;
using numerics::Matrix;

DenseMap multiscale(const DenseMap& f) {
  if (f.height < 2 || f.width < 2) throw InvalidArgument("multiscale: map must be at least 2x2");
  const DenseMap up = bilinear_resize(bilinear_resize(f, 2 * f.height, 2 * f.width), f.height, f.width);
  const DenseMap down = bilinear_resize(bilinear_resize(f, f.height / 2, f.width / 2), f.height, f.width);
  DenseMap out = f;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += up.data[i] + down.data[i];
  return out;
}

ReducedFeatures reduce_features(const DenseMap& f_ms, std::size_t k) {
  if (k == 0 || f_ms.channels < k) throw InvalidArgument("reduce_features: need 1 <= k <= channels");
  const std::size_t n = f_ms.pixel_count();
  if (n < 2) throw InvalidArgument("reduce_features: need at least two pixels");
  Matrix samples(n, f_ms.channels, f_ms.data);

  ReducedFeatures out;
  out.model = numerics::pca_fit(samples, k);
  out.map = DenseMap(f_ms.height, f_ms.width, k);
  out.degenerate = !(out.model.total_variance > 0.0);
  if (out.degenerate) return out;
  for (std::size_t p = 0; p < n; ++p) {
    const auto y = out.model.transform(samples.row(p));
    std::copy(y.begin(), y.end(), out.map.data.begin() + static_cast<std::ptrdiff_t>(p * k));
  }
  return out;
}

std::size_t RegionMask::pixel_count() const {
  return static_cast<std::size_t>(std::count_if(bitmap.begin(), bitmap.end(), [](std::uint8_t b) { return b != 0; }));
}

namespace {

std::size_t centroid_pixel(const std::vector<std::size_t>& pixels, std::size_t width) {
  double mr = 0.0, mc = 0.0;
  for (std::size_t p : pixels) {
    mr += static_cast<double>(p / width);
    mc += static_cast<double>(p % width);
  }
  mr /= static_cast<double>(pixels.size());
  mc /= static_cast<double>(pixels.size());
  std::size_t best = pixels.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t p : pixels) {
    const double dr = static_cast<double>(p / width) - mr;
    const double dc = static_cast<double>(p % width) - mc;
    const double d = dr * dr + dc * dc;
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

}  // namespace

CandidateKeypointSet extract_candidates(const DenseMap& f_reduced, std::span<const RegionMask> masks, std::size_t J,
                                        std::uint64_t seed, const ExtractOptions& options) {
  if (masks.empty()) throw InvalidArgument("extract_candidates: no region masks");
  if (J == 0) throw InvalidArgument("extract_candidates: J must be at least 1");

  CandidateKeypointSet set;
  set.grid_height = f_reduced.height;
  set.grid_width = f_reduced.width;
  set.clusters_per_region = J;
  set.region_count = masks.size();

  std::vector<const RegionMask*> ordered;
  std::vector<bool> seen(masks.size(), false);
  for (const auto& mask : masks) {
    if (mask.height != f_reduced.height || mask.width != f_reduced.width || mask.bitmap.size() != mask.height * mask.width) {
      throw InvalidArgument("extract_candidates: mask shape does not match the feature grid");
    }
    if (mask.region_id >= masks.size() || seen[mask.region_id]) {
      throw InvalidArgument("extract_candidates: region ids must be a permutation of [0, S)");
    }
    seen[mask.region_id] = true;
    ordered.push_back(&mask);
  }
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->region_id < b->region_id; });

  const std::size_t d = f_reduced.channels;
  for (const RegionMask* mask : ordered) {
    std::vector<std::size_t> pixels;
    for (std::size_t p = 0; p < mask->bitmap.size(); ++p) {
      if (mask->bitmap[p] != 0) pixels.push_back(p);
    }
    if (pixels.empty()) {
      throw InvalidArgument("extract_candidates: region " + std::to_string(mask->region_id) + " has no pixels");
    }

    if (pixels.size() < J) {
      const std::size_t p = centroid_pixel(pixels, f_reduced.width);
      const auto feat = f_reduced.pixel(p);
      std::vector<double> descriptor(feat.begin(), feat.end());
      set.points.push_back({p / f_reduced.width, p % f_reduced.width, mask->region_id, 0, true, descriptor, descriptor});
      continue;
    }

    Matrix x(pixels.size(), d);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      const auto feat = f_reduced.pixel(pixels[i]);
      std::copy(feat.begin(), feat.end(), x.row(i).begin());
    }
    const auto clusters =
        numerics::kmeans_best_of(x, J, numerics::mix_seed(seed, mask->region_id), options.kmeans_restarts);

    std::vector<std::pair<std::size_t, std::size_t>> chosen;  // (pixel, original cluster)
    for (std::size_t j = 0; j < J; ++j) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < pixels.size(); ++i) {
        const double dist = numerics::squared_distance(x.row(i), clusters.centers.row(j));
        if (dist < best_d) {
          best_d = dist;
          best = i;
        }
      }
      chosen.emplace_back(pixels[best], j);
    }
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t j = 0; j < J; ++j) {
      const std::size_t p = chosen[j].first;
      const auto feat = f_reduced.pixel(p);
      const auto center = clusters.centers.row(chosen[j].second);
      set.points.push_back({p / f_reduced.width, p % f_reduced.width, mask->region_id, j, false,
                            std::vector<double>(feat.begin(), feat.end()),
                            std::vector<double>(center.begin(), center.end())});
    }
  }
  return set;
}

std::size_t grid_to_image(std::size_t index, std::size_t grid_extent, std::size_t image_extent) {
  const double scale = static_cast<double>(image_extent) / static_cast<double>(grid_extent);
  const auto v = static_cast<std::size_t>(std::floor((static_cast<double>(index) + 0.5) * scale));
  return std::min(v, image_extent - 1);
}

}  // namespace mka::lmsc
