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

#include "mka/cmka/trainer.hpp"

namespace mka::pipeline {

struct RunConfig {
  std::size_t regions = 3;   // S
  std::size_t clusters = 4;  // J
  std::size_t pca_dim = 3;   // k
  double sigma = 10.0;       // GT heatmap kernel, pixels at 448 x 448
  int kmeans_restarts = 8;
  // Model widths; 0 means "same as the ego channel count".
  std::size_t d_proj = 0;
  std::size_t d_hidden = 0;
  std::size_t d_out = 0;
  std::size_t d_cam = 8;
  cmka::TrainConfig train;  // lr, epochs, seed, radius, temperature, shuffle

  std::uint64_t seed() const { return train.seed; }
  void validate() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const std::string& text);
std::string run_config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::string& path);

}  // namespace mka::pipeline
