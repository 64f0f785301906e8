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
#include <cstdint>
#include <span>
#include <vector>

#include "mka/cmka/model.hpp"
#include "mka/lmsc/lmsc.hpp"

namespace mka::cmka {

struct TrainingSample {
  std::array<DenseMap, lmsc::kFusedLayers> ego;  // backbone layers on the ego feature grid
  DenseMap exo;                                  // exo features fed to the CAM head
  std::size_t label = 0;
  CandidateKeypointSet candidates;
};

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 15;
  std::uint64_t seed = 0;
  double radius = 4.0;
  double temperature = 0.5;
  bool shuffle = true;

  void validate() const;
};

struct LossRecord {
  int epoch = 0;  // 0 is the evaluation before the first update
  double classification = 0.0;
  double cosine = 0.0;
  double total = 0.0;
};

struct TrainResult {
  CmkaModel model;
  std::vector<LossRecord> history;  // epochs + 1 entries
};

struct SampleLoss {
  double classification = 0.0;
  double cosine = 0.0;
  double total() const { return classification + cosine; }
};

/// L_cls + L_cos for one sample under soft selection. When `grad` is given,
/// accumulates dL/dparams into it. `frozen_prototype` replaces the prototype
/// computed from the current CAM head.
SampleLoss sample_loss(const CmkaModel& model, const TrainingSample& sample, const TrainConfig& config,
                       CmkaGrad* grad = nullptr, const Prototype* frozen_prototype = nullptr);

/// Mean per-sample losses over the dataset.
LossRecord evaluate(const CmkaModel& model, std::span<const TrainingSample> samples, const TrainConfig& config,
                    int epoch);

/// Plain SGD with batch size 1.
TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config, CmkaModel initial);

struct InferOptions {
  std::size_t pca_dim = 3;
  std::uint64_t seed = 0;
  int kmeans_restarts = 8;
};

/// fuse -> multiscale -> reduce -> extract_candidates.
CandidateKeypointSet prepare_candidates(const std::array<DenseMap, lmsc::kFusedLayers>& ego,
                                        std::span<const lmsc::RegionMask> masks, const CmkaModel& model,
                                        const InferOptions& options);

struct ImagePoint {
  std::size_t row = 0;
  std::size_t col = 0;
};

struct InferResult {
  CandidateKeypointSet candidates;
  SelectedKeypoints selected;
  std::array<ImagePoint, 3> image_points{};  // functional, little, wrist
};

InferResult infer(const std::array<DenseMap, lmsc::kFusedLayers>& ego, std::span<const lmsc::RegionMask> masks,
                  std::size_t affordance, const CmkaModel& model, const InferOptions& options,
                  std::size_t image_height = 448, std::size_t image_width = 448);

}  // namespace mka::cmka
