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

#include "mka/pipeline/fixtures.hpp"

#include <filesystem>

#include "mka/numerics/rng.hpp"
#include "mka/pipeline/manifest.hpp"

namespace mka::pipeline {

namespace {

using numerics::Rng;

constexpr std::size_t kBand = 16;
constexpr std::size_t kBaseChannels = 6;  // p on 0..4, line direction e on 4, contact offset q on 5
constexpr std::size_t kLineChannel = 4;
constexpr std::size_t kOffsetChannel = 5;
constexpr double kBackgroundScale = 0.2;
constexpr std::array<double, 3> kContactOffset = {0.2, 0.35, 0.5};

struct Patch {
  std::size_t row0, row1;  // feature rows [row0, row1)
  std::size_t mask_row0, mask_row1;
  double t;
  bool contact;
};

constexpr std::array<Patch, 6> kPatches = {{
    {0, 8, 2, 6, -1.0, false},
    {8, 14, 10, 12, 0.0, true},
    {14, 22, 16, 20, 1.0, false},
    {22, 40, 24, 38, 4.0, false},
    {40, 52, 42, 50, 12.0, false},
    {52, 64, 54, 62, 24.0, false},
}};
constexpr std::size_t kMaskCol0 = 3, kMaskCol1 = 13;       // within a band
constexpr std::size_t kContactCol0 = 6, kContactCol1 = 10;  // within a band

std::vector<double> base_vector(std::size_t channels) {
  std::vector<double> p(channels, 0.0);
  p[0] = p[1] = p[2] = p[3] = 1.0;
  p[kLineChannel] = 1.5;
  return p;
}

void set_pixel(DenseMap& m, std::size_t r, std::size_t c, const std::vector<double>& v) {
  for (std::size_t k = 0; k < v.size(); ++k) m.at(r, c, k) = v[k];
}

DenseMap ego_base(std::size_t channels) {
  const std::vector<double> p = base_vector(channels);
  std::vector<double> bg = p;
  for (double& v : bg) v *= kBackgroundScale;
  DenseMap m(kFixtureGrid, kFixtureGrid, channels);
  for (std::size_t r = 0; r < kFixtureGrid; ++r)
    for (std::size_t c = 0; c < kFixtureGrid; ++c) set_pixel(m, r, c, bg);
  for (std::size_t band = 0; band < 4; ++band) {
    for (std::size_t r = 0; r < kFixtureGrid; ++r) {
      for (std::size_t bc = 1; bc + 1 < kBand; ++bc) {
        std::vector<double> v = p;
        if (band < 3) {
          for (const Patch& patch : kPatches) {
            if (r >= patch.row0 && r < patch.row1) {
              v[kLineChannel] += patch.t;
              if (patch.contact) v[kOffsetChannel] = kContactOffset[band];
            }
          }
        }
        set_pixel(m, r, band * kBand + bc, v);
      }
    }
  }
  return m;
}

std::vector<lmsc::RegionMask> fixture_masks() {
  std::vector<lmsc::RegionMask> masks(4);
  for (std::size_t band = 0; band < 4; ++band) {
    lmsc::RegionMask& m = masks[band];
    m.height = m.width = kFixtureGrid;
    m.region_id = band;
    m.bitmap.assign(kFixtureGrid * kFixtureGrid, 0);
    for (std::size_t r = 0; r < kFixtureGrid; ++r) {
      for (std::size_t bc = kMaskCol0; bc < kMaskCol1; ++bc) {
        bool inside = false;
        if (band == 3) {
          inside = r >= 2 && r + 2 < kFixtureGrid;
        } else {
          for (const Patch& patch : kPatches) {
            if (r < patch.mask_row0 || r >= patch.mask_row1) continue;
            inside = !patch.contact || (bc >= kContactCol0 && bc < kContactCol1);
          }
        }
        if (inside) m.bitmap[r * kFixtureGrid + band * kBand + bc] = 1;
      }
    }
  }
  return masks;
}

std::array<metrics::PixelCoord, 3> contact_pixels() {
  std::array<metrics::PixelCoord, 3> out{};
  const Patch& contact = kPatches[1];
  for (std::size_t band = 0; band < 3; ++band) {
    double row = 0.0, col = 0.0;
    for (std::size_t r = contact.mask_row0; r < contact.mask_row1; ++r)
      row += static_cast<double>(lmsc::grid_to_image(r, kFixtureGrid, kFixtureImage));
    for (std::size_t c = kContactCol0; c < kContactCol1; ++c)
      col += static_cast<double>(lmsc::grid_to_image(band * kBand + c, kFixtureGrid, kFixtureImage));
    out[band] = {row / static_cast<double>(contact.mask_row1 - contact.mask_row0),
                 col / static_cast<double>(kContactCol1 - kContactCol0)};
  }
  return out;
}

DenseMap exo_base(std::size_t channels, std::size_t label) {
  const std::vector<double> p = base_vector(channels);
  std::vector<double> bg = p;
  for (double& v : bg) v *= kBackgroundScale;
  std::vector<double> contact = p;
  contact[kBaseChannels + label] = 1.0;
  DenseMap m(kFixtureExoGrid, kFixtureExoGrid, channels);
  for (std::size_t r = 0; r < kFixtureExoGrid; ++r) {
    for (std::size_t c = 0; c < kFixtureExoGrid; ++c) {
      const bool inside = r >= 2 && r < 14 && c >= 2 && c < 14;
      set_pixel(m, r, c, inside ? contact : bg);
    }
  }
  return m;
}

FeatureBundle noisy_bundle(const std::string& id, const DenseMap& base, double noise, Rng& rng) {
  FeatureBundle b;
  b.image_id = id;
  b.source_height = b.source_width = static_cast<std::uint32_t>(kFixtureImage);
  b.layer_indices = {3, 6, 9};
  for (auto& layer : b.layers) {
    layer = base;
    for (double& v : layer.data) v += rng.normal(0.0, noise);
  }
  return b;
}

}  // namespace

Fixture make_fixture(const FixtureOptions& options) {
  Fixture fx;
  fx.tool = "drill";
  fx.affordances = {"hold", "press", "click", "open"};
  const std::size_t classes = fx.affordances.size();
  const std::size_t channels = kBaseChannels + classes;

  const DenseMap ego = ego_base(channels);
  const std::vector<lmsc::RegionMask> masks = fixture_masks();
  const auto gt = contact_pixels();

  metrics::CameraIntrinsics intr{600.0, 600.0, 224.0, 224.0};
  metrics::DepthImage depth;
  depth.height = depth.width = kFixtureImage;
  depth.depth.assign(kFixtureImage * kFixtureImage, 0.5);
  std::array<metrics::ContactRegion3D, 3> regions{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double z = 0.5;
    regions[i].center = {(gt[i].col - intr.cx) * z / intr.fx, (gt[i].row - intr.cy) * z / intr.fy, z};
    regions[i].radius = 0.015;
  }

  std::size_t index = 0;
  for (const char* split : {"train", "test"}) {
    const std::size_t per_class = std::string(split) == "train" ? options.train_per_class : options.test_per_class;
    for (std::size_t i = 0; i < per_class; ++i) {
      for (std::size_t label = 0; label < classes; ++label) {
        Rng rng(numerics::mix_seed(options.seed, index));
        FixtureSample s;
        char id[32];
        std::snprintf(id, sizeof(id), "%s_%03zu", split, index);
        s.id = id;
        s.split = split;
        s.label = label;
        s.ego = noisy_bundle(s.id, ego, options.noise, rng);
        s.exo = noisy_bundle(s.id + "_exo", exo_base(channels, label), options.noise, rng);
        s.masks = masks;
        s.gt_keypoints = gt;
        s.intrinsics = intr;
        s.contact_regions = regions;
        if (s.split == "test" && options.depth_for_test) s.depth = depth;
        fx.samples.push_back(std::move(s));
        ++index;
      }
    }
  }
  return fx;
}

std::string write_fixture(const Fixture& fx, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "features");
  fs::create_directories(fs::path(dir) / "masks");
  fs::create_directories(fs::path(dir) / "depth");

  Manifest manifest;
  manifest.tool = fx.tool;
  manifest.affordances = fx.affordances;
  for (const FixtureSample& s : fx.samples) {
    ManifestSample entry;
    entry.id = s.id;
    entry.ego = "features/" + s.id + "_ego.fbnd";
    entry.exo = "features/" + s.id + "_exo.fbnd";
    save_bundle(s.ego, (fs::path(dir) / entry.ego).string());
    save_bundle(s.exo, (fs::path(dir) / entry.exo).string());
    for (std::size_t m = 0; m < s.masks.size(); ++m) {
      const std::string rel = "masks/" + s.id + "_r" + std::to_string(m) + ".mask";
      save_mask(s.masks[m], (fs::path(dir) / rel).string());
      entry.masks.push_back(rel);
    }
    entry.label = fx.affordances[s.label];
    entry.split = s.split;
    entry.gt_keypoints = std::vector<metrics::PixelCoord>(s.gt_keypoints.begin(), s.gt_keypoints.end());
    if (s.depth) {
      entry.depth = "depth/" + s.id + ".dpth";
      save_depth(*s.depth, (fs::path(dir) / *entry.depth).string());
      entry.intrinsics = s.intrinsics;
      entry.contact_regions = s.contact_regions;
    }
    manifest.samples.push_back(std::move(entry));
  }
  const std::string path = (fs::path(dir) / "manifest.json").string();
  save_manifest(manifest, path);
  return path;
}

}  // namespace mka::pipeline
