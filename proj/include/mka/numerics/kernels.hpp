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

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// reference implementation and `omp` splits the outer loop across OpenMP
// threads. Both call the same per-element helpers, so their outputs are
// bit-identical; the parity tests and the benchmark rely on that.

#include <cstddef>
#include <span>
#include <vector>

#include "mka/numerics/tensor.hpp"

namespace mka::kernels {

using numerics::DenseMap;
using numerics::Matrix;

/// Square same-padded stride-1 convolution. Weights are laid out
/// [out][ky][kx][in].
struct Conv2dParams {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t size = 1;  // odd
  std::vector<double> weights;
  std::vector<double> bias;

  Conv2dParams() = default;
  Conv2dParams(std::size_t in, std::size_t out, std::size_t k)
      : in_channels(in), out_channels(out), size(k), weights(out * k * k * in, 0.0), bias(out, 0.0) {}

  std::size_t weight_index(std::size_t o, std::size_t ky, std::size_t kx, std::size_t i) const {
    return ((o * size + ky) * size + kx) * in_channels + i;
  }
};

struct GaussianPeak {
  double row = 0.0;
  double col = 0.0;
};

namespace serial {
DenseMap bilinear_resize(const DenseMap& in, std::size_t out_h, std::size_t out_w);
/// out = W * in + b per pixel; W is out_ch x in_ch.
DenseMap pixelwise_linear(const DenseMap& in, const Matrix& weights, std::span<const double> bias);
DenseMap conv2d_same(const DenseMap& in, const Conv2dParams& conv);
/// Population covariance (divides by n) of the rows of x about `mean`.
Matrix covariance(const Matrix& x, std::span<const double> mean);
/// Nearest center per row (ties to the lowest center index).
void assign_nearest(const Matrix& x, const Matrix& centers, std::span<std::size_t> labels,
                    std::span<double> distances);
DenseMap gaussian_max_map(std::size_t height, std::size_t width, std::span<const GaussianPeak> peaks,
                          double sigma);
}  // namespace serial

namespace omp {
DenseMap bilinear_resize(const DenseMap& in, std::size_t out_h, std::size_t out_w);
DenseMap pixelwise_linear(const DenseMap& in, const Matrix& weights, std::span<const double> bias);
DenseMap conv2d_same(const DenseMap& in, const Conv2dParams& conv);
Matrix covariance(const Matrix& x, std::span<const double> mean);
void assign_nearest(const Matrix& x, const Matrix& centers, std::span<std::size_t> labels,
                    std::span<double> distances);
DenseMap gaussian_max_map(std::size_t height, std::size_t width, std::span<const GaussianPeak> peaks,
                          double sigma);
}  // namespace omp

/// Number of worker threads the omp kernels will use (1 without OpenMP).
int max_threads();

}  // namespace mka::kernels
