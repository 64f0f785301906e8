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
#include <utility>
#include <vector>

#include "mka/numerics/tensor.hpp"

namespace mka::lmsc {

using numerics::DenseMap;
using numerics::Matrix;

inline constexpr std::size_t kFusedLayers = 3;

enum class Activation { kIdentity, kRelu };

/// Linear map followed by per-channel standardization with stored statistics.
struct LayerProjection {
  Matrix weight;  // d_proj x d_in
  std::vector<double> bias;
  std::vector<double> running_mean;
  std::vector<double> running_std;  // strictly positive
};

struct Mlp {
  Matrix w1;  // d_hidden x d_proj
  std::vector<double> b1;
  Matrix w2;  // d_out x d_hidden
  std::vector<double> b2;
  Activation activation = Activation::kRelu;
};

struct FusionParams {
  std::array<LayerProjection, kFusedLayers> layers;
  std::array<double, kFusedLayers> alphas{};
  Mlp mlp;

  std::size_t input_dim() const { return layers[0].weight.cols(); }
  std::size_t projection_dim() const { return layers[0].weight.rows(); }
  std::size_t output_dim() const { return mlp.w2.rows(); }

  /// Identity projections, identity statistics, identity MLP with no
  /// activation, and the given mixing weights. Requires equal dimensions.
  static FusionParams identity(std::size_t dim, std::array<double, kFusedLayers> alphas);

  /// Near-identity start: every weight matrix is the rectangular identity plus
  /// seeded Gaussian noise of scale `noise / sqrt(fan_in)`, biases zero,
  /// statistics (0, 1), alphas 1/3 and a ReLU MLP.
  static FusionParams initialize(std::size_t d_in, std::size_t d_proj, std::size_t d_hidden, std::size_t d_out,
                                 std::uint64_t seed, double noise = 0.01);

  /// Throws InvalidArgument on inconsistent shapes or non-finite values.
  void validate() const;
};

/// Intermediate activations kept for the backward pass.
struct FusionTrace {
  std::array<DenseMap, kFusedLayers> normalized;
  DenseMap mixed;
  DenseMap hidden_pre;
  DenseMap hidden;
};

/// f = MLP(sum_m alpha_m * normalize(linear_m(layer_m))).
DenseMap fuse_layers(std::span<const DenseMap> layers, const FusionParams& params, FusionTrace* trace = nullptr);

struct FusionGrad {
  std::array<Matrix, kFusedLayers> weight;
  std::array<std::vector<double>, kFusedLayers> bias;
  std::array<double, kFusedLayers> alphas{};
  Matrix w1, w2;
  std::vector<double> b1, b2;

  static FusionGrad zeros_like(const FusionParams& p);
};

/// Sparse upstream gradient: (flat pixel index, dL/df at that pixel).
using PixelGradients = std::vector<std::pair<std::size_t, std::vector<double>>>;

/// Accumulates dL/dparams into `grad` given dL/df at a set of pixels.
void fuse_layers_backward(std::span<const DenseMap> layers, const FusionParams& params, const FusionTrace& trace,
                          const PixelGradients& grad_f, FusionGrad& grad);

/// Sets each layer's running statistics to the per-channel mean and standard
/// deviation of its linear output over every pixel of `bundles`.
void calibrate_normalization(FusionParams& params, std::span<const std::array<DenseMap, kFusedLayers>> bundles);

}  // namespace mka::lmsc
