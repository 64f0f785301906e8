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

#include "mka/cmka/layers.hpp"
#include "mka/lmsc/lmsc.hpp"
#include "mka/numerics/tensor.hpp"

namespace mka::cmka {

using lmsc::Candidate;
using lmsc::CandidateKeypointSet;

/// Output slot labels, in the order select_keypoints fills them.
enum class Slot : std::size_t { kFunctional = 0, kLittle = 1, kWrist = 2 };

inline constexpr std::array<const char*, 3> kSlotNames = {"functional", "little", "wrist"};

/// T x N learnable weights, one row per affordance class.
struct SelectionWeights {
  Matrix matrix;

  SelectionWeights() = default;
  SelectionWeights(std::size_t classes, std::size_t slots) : matrix(classes, slots) {}

  std::size_t class_count() const { return matrix.rows(); }
  std::size_t slot_count() const { return matrix.cols(); }
  std::span<const double> row(std::size_t t) const { return matrix.row(t); }
};

struct SelectedKeypoints {
  /// Indices into CandidateKeypointSet::points, in slot order.
  std::array<std::size_t, 3> candidate_index{};
  std::array<Candidate, 3> points{};
};

/// Hard top-3 by descending weight. Equal weights resolve to the lower
/// candidate index.
SelectedKeypoints select_keypoints(std::span<const double> weights_row, const CandidateKeypointSet& candidates);

struct KeypointFeature {
  std::vector<double> vector;
  std::size_t row = 0;
  std::size_t col = 0;
  double radius_used = 0.0;
};

/// Pixels of the disc of radius r around (row, col), clipped to the grid,
/// in scan order.
std::vector<std::size_t> disc_pixels(std::size_t height, std::size_t width, std::size_t row, std::size_t col,
                                     double r);

KeypointFeature extract_region_feature(const DenseMap& f, std::size_t row, std::size_t col, double r);

/// f_gk = sum_i proj(F_i).
std::vector<double> aggregate_keypoint_features(std::span<const KeypointFeature> features, const Linear& proj);

struct LossWithGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// 1 - cos(f_op, f_gk) with its gradient in f_gk.
LossWithGrad cosine_loss(std::span<const double> f_op, std::span<const double> f_gk);

/// Softmax cross-entropy with its gradient in the scores.
LossWithGrad classification_loss(std::span<const double> scores, std::size_t label);

/// Temperature softmax over the occupied slots of one weight row.
struct SoftSelection {
  std::vector<double> attention;  // per candidate, sums to 1
};

SoftSelection soft_select(std::span<const double> weights_row, const CandidateKeypointSet& candidates,
                          double temperature);

/// Training-time surrogate of the hard selection:
/// f_gk = 3 * proj(sum_n a_n F_n), which equals sum_i proj(F_i) when
/// the attention is one-hot thirds over three candidates.
std::vector<double> soft_aggregate(const SoftSelection& selection, std::span<const std::vector<double>> features,
                                   const Linear& proj);

struct SoftAggregateGrad {
  std::vector<double> weights_row;               // dL/dW_t, N entries
  std::vector<std::vector<double>> features;     // dL/dF_n per candidate
};

/// Accumulates dL/dproj and returns the remaining gradients.
SoftAggregateGrad soft_aggregate_backward(std::span<const double> weights_row, const CandidateKeypointSet& candidates,
                                          double temperature, const SoftSelection& selection,
                                          std::span<const std::vector<double>> features, const Linear& proj,
                                          std::span<const double> grad_f_gk, Linear& grad_proj);

struct Prototype {
  std::vector<double> vector;
  std::size_t mask_pixels = 0;
};

struct PrototypeOptions {
  std::size_t clusters = 3;
  std::size_t restarts = 4;
  std::uint64_t seed = 0x70726f746f;
};

/// Clusters the exo features whose class activation reaches the channel mean
/// and returns the center closest in angle to the masked mean.
Prototype extract_prototype(const DenseMap& exo, const DenseMap& localization, std::size_t label,
                            const PrototypeOptions& options = {});

}  // namespace mka::cmka
