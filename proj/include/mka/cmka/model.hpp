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
#include <string>
#include <utility>
#include <vector>

#include "mka/cmka/cmka.hpp"
#include "mka/cmka/layers.hpp"
#include "mka/lmsc/fusion.hpp"

namespace mka::cmka {

struct ModelShape {
  std::size_t d_in = 0;      // backbone channels per ego layer
  std::size_t d_proj = 0;    // per-layer projection width
  std::size_t d_hidden = 0;  // fusion MLP hidden width
  std::size_t d_out = 0;     // fused feature width
  std::size_t d_exo = 0;     // exo feature width
  std::size_t d_cam = 0;     // CAM head hidden width
  std::size_t classes = 0;   // T
  std::size_t regions = 0;   // S
  std::size_t clusters = 0;  // J
};

/// Every trainable parameter of the pipeline.
struct CmkaModel {
  lmsc::FusionParams fusion;
  SelectionWeights selection;  // T x (S*J)
  Linear proj;                 // d_out -> d_exo, shared by the three keypoints
  CamHead cam;
  std::size_t regions = 0;
  std::size_t clusters = 0;

  ModelShape shape() const;

  /// Near-identity fusion and proj, zero selection weights, seeded CAM head.
  static CmkaModel initialize(const ModelShape& shape, std::uint64_t seed);

  /// Throws InvalidModel on inconsistent shapes or non-finite values.
  void validate() const;
};

/// Gradient buffers with the same layout as CmkaModel.
struct CmkaGrad {
  lmsc::FusionGrad fusion;
  Matrix selection;
  Linear proj;
  CamHead cam;

  static CmkaGrad zeros_like(const CmkaModel& model);
};

/// (parameter, gradient) pairs over every trainable scalar, in a fixed
/// order. Normalization statistics are not trainable and are excluded.
std::vector<std::pair<double*, double*>> parameter_pairs(CmkaModel& model, CmkaGrad& grad);

/// Versioned "CMKA" container of named f32 tensors.
std::vector<std::uint8_t> encode_checkpoint(const CmkaModel& model);
CmkaModel decode_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& context = "checkpoint");
void save_checkpoint(const CmkaModel& model, const std::string& path);
CmkaModel load_checkpoint(const std::string& path);

inline constexpr std::uint16_t kCheckpointVersion = 1;

}  // namespace mka::cmka
