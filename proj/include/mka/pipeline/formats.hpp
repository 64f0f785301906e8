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

// Binary containers exchanged with the feature exporter. All integers and
// floats are little-endian; layouts are documented in docs/formats.md.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mka/lmsc/lmsc.hpp"
#include "mka/metrics/metrics.hpp"
#include "mka/numerics/tensor.hpp"

namespace mka::pipeline {

using numerics::DenseMap;

inline constexpr std::uint16_t kBundleVersion = 1;
inline constexpr std::uint16_t kMaskVersion = 1;
inline constexpr std::uint16_t kDepthVersion = 1;

struct FeatureBundle {
  std::string image_id;
  std::uint32_t source_height = 0;
  std::uint32_t source_width = 0;
  std::array<std::int32_t, 3> layer_indices{};
  std::array<DenseMap, 3> layers;

  /// Throws FormatError(kBadShape) for empty layers or an id that does not fit.
  void validate() const;
};

std::vector<std::uint8_t> encode_bundle(const FeatureBundle& bundle);
FeatureBundle decode_bundle(const std::vector<std::uint8_t>& bytes, const std::string& context = "bundle");
void save_bundle(const FeatureBundle& bundle, const std::string& path);
FeatureBundle load_bundle(const std::string& path);

std::vector<std::uint8_t> encode_mask(const lmsc::RegionMask& mask);
lmsc::RegionMask decode_mask(const std::vector<std::uint8_t>& bytes, const std::string& context = "mask");
void save_mask(const lmsc::RegionMask& mask, const std::string& path);
lmsc::RegionMask load_mask(const std::string& path);

std::vector<std::uint8_t> encode_depth(const metrics::DepthImage& depth);
metrics::DepthImage decode_depth(const std::vector<std::uint8_t>& bytes, const std::string& context = "depth");
void save_depth(const metrics::DepthImage& depth, const std::string& path);
metrics::DepthImage load_depth(const std::string& path);

/// Resamples the second and third layers onto the first layer's grid.
std::array<DenseMap, 3> align_layers(const FeatureBundle& bundle);

}  // namespace mka::pipeline
