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
#include <optional>
#include <string>
#include <vector>

#include "mka/metrics/metrics.hpp"

namespace mka::pipeline {

inline constexpr int kManifestVersion = 1;

struct ManifestSample {
  std::string id;
  std::string ego;                 // feature bundle paths, relative to the manifest
  std::string exo;
  std::vector<std::string> masks;  // region order; the first S are used
  std::string label;
  std::string split;               // "train", "test" or empty for both
  std::optional<std::vector<metrics::PixelCoord>> gt_keypoints;  // 448 x 448 frame
  std::optional<std::string> depth;
  std::optional<metrics::CameraIntrinsics> intrinsics;
  std::optional<std::array<metrics::ContactRegion3D, 3>> contact_regions;  // functional, little, wrist
};

struct Manifest {
  std::string tool;
  std::vector<std::string> affordances;
  std::vector<ManifestSample> samples;
  std::string base_dir;  // directory the relative paths resolve against; not serialized

  /// Index of `label` in the vocabulary; VocabularyError if absent.
  std::size_t label_index(const std::string& label) const;
  std::string resolve(const std::string& relative) const;

  /// Checks ids, labels and optional fields. With `check_paths`, every
  /// referenced file must exist (IoError naming the first missing one).
  void validate(bool check_paths) const;

  /// Samples used for training: everything not marked "test".
  std::vector<std::size_t> training_indices() const;
  /// Samples used for inference and evaluation: everything not marked "train".
  std::vector<std::size_t> evaluation_indices() const;
};

/// Canonical JSON: sorted keys, two-space indent, trailing newline.
std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text, const std::string& base_dir = ".");

/// Reads, parses and validates including path checks.
Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& manifest, const std::string& path);

}  // namespace mka::pipeline
