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

#include "mka/numerics/kernels.hpp"
#include "mka/numerics/tensor.hpp"

namespace mka::cmka {

using kernels::Conv2dParams;
using numerics::DenseMap;
using numerics::Matrix;

/// y = W x + b.
struct Linear {
  Matrix weight;  // out x in
  std::vector<double> bias;

  Linear() = default;
  Linear(std::size_t in, std::size_t out) : weight(out, in), bias(out, 0.0) {}

  std::size_t in_dim() const { return weight.cols(); }
  std::size_t out_dim() const { return weight.rows(); }

  std::vector<double> forward(std::span<const double> x) const;
  /// Accumulates dW, db and returns dL/dx.
  std::vector<double> backward(std::span<const double> x, std::span<const double> grad_out, Linear& grad) const;
};

/// Gradients of a same-padded convolution given dL/d(output).
void conv2d_backward(const DenseMap& input, const Conv2dParams& conv, const DenseMap& grad_out, Conv2dParams& grad,
                     DenseMap* grad_input);

void relu_inplace(DenseMap& m);
/// grad *= (pre > 0)
void relu_backward_inplace(const DenseMap& pre, DenseMap& grad);

/// Per-class activation head: per-pixel feed-forward layer, two 3x3
/// convolutions and a 1x1 class-aware convolution, ReLU between stages.
struct CamHead {
  Linear feed_forward;  // d_exo -> d_cam, applied per pixel
  Conv2dParams conv1;   // 3x3, d_cam -> d_cam
  Conv2dParams conv2;   // 3x3, d_cam -> d_cam
  Conv2dParams classifier;  // 1x1, d_cam -> C

  std::size_t input_dim() const { return feed_forward.in_dim(); }
  std::size_t class_count() const { return classifier.out_channels; }

  static CamHead zeros(std::size_t d_exo, std::size_t d_cam, std::size_t classes);
  /// Seeded Gaussian weights with variance gain / fan_in, zero biases.
  static CamHead initialize(std::size_t d_exo, std::size_t d_cam, std::size_t classes, std::uint64_t seed,
                            double gain = 2.0);
};

struct CamTrace {
  DenseMap input;
  DenseMap ff_pre, ff_out;
  DenseMap conv1_pre, conv1_out;
  DenseMap conv2_pre, conv2_out;
};

struct CamOutput {
  DenseMap localization;       // P, C channels at input resolution
  std::vector<double> scores;  // spatial mean of each channel of P
};

CamOutput cam_forward(const DenseMap& exo, const CamHead& head, CamTrace* trace = nullptr);

/// Accumulates head gradients from dL/dscores.
void cam_backward(const CamHead& head, const CamTrace& trace, std::span<const double> grad_scores, CamHead& grad);

}  // namespace mka::cmka
