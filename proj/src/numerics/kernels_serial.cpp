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

#include "kernel_detail.hpp"
#include "mka/error.hpp"

namespace mka::kernels::serial {

DenseMap bilinear_resize(const DenseMap& in, std::size_t out_h, std::size_t out_w) {
  DenseMap out(out_h, out_w, in.channels);
  for (std::size_t r = 0; r < out_h; ++r) detail::resize_row(in, out, r);
  return out;
}

DenseMap pixelwise_linear(const DenseMap& in, const Matrix& weights, std::span<const double> bias) {
  if (weights.cols() != in.channels) throw InvalidArgument("pixelwise_linear: channel mismatch");
  DenseMap out(in.height, in.width, weights.rows());
  for (std::size_t p = 0; p < in.pixel_count(); ++p) detail::linear_pixel(in, out, weights, bias, p);
  return out;
}

DenseMap conv2d_same(const DenseMap& in, const Conv2dParams& conv) {
  if (conv.in_channels != in.channels) throw InvalidArgument("conv2d: channel mismatch");
  DenseMap out(in.height, in.width, conv.out_channels);
  for (std::size_t r = 0; r < in.height; ++r) {
    for (std::size_t c = 0; c < in.width; ++c) detail::conv_pixel(in, out, conv, r, c);
  }
  return out;
}

Matrix covariance(const Matrix& x, std::span<const double> mean) {
  const std::size_t d = x.cols();
  Matrix cov(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) = detail::covariance_entry(x, mean, i, j);
      cov(j, i) = cov(i, j);
    }
  }
  return cov;
}

void assign_nearest(const Matrix& x, const Matrix& centers, std::span<std::size_t> labels,
                    std::span<double> distances) {
  for (std::size_t n = 0; n < x.rows(); ++n) detail::nearest_center(x, centers, n, labels[n], distances[n]);
}

DenseMap gaussian_max_map(std::size_t height, std::size_t width, std::span<const GaussianPeak> peaks,
                          double sigma) {
  DenseMap out(height, width, 1);
  for (std::size_t r = 0; r < height; ++r) detail::gaussian_row(out, peaks, sigma, r);
  return out;
}

}  // namespace mka::kernels::serial
