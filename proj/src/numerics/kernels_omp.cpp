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

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mka::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace omp {

DenseMap bilinear_resize(const DenseMap& in, std::size_t out_h, std::size_t out_w) {
  DenseMap out(out_h, out_w, in.channels);
  const auto rows = static_cast<long>(out_h);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) detail::resize_row(in, out, static_cast<std::size_t>(r));
  return out;
}

DenseMap pixelwise_linear(const DenseMap& in, const Matrix& weights, std::span<const double> bias) {
  if (weights.cols() != in.channels) throw InvalidArgument("pixelwise_linear: channel mismatch");
  DenseMap out(in.height, in.width, weights.rows());
  const auto pixels = static_cast<long>(in.pixel_count());
#pragma omp parallel for schedule(static)
  for (long p = 0; p < pixels; ++p) detail::linear_pixel(in, out, weights, bias, static_cast<std::size_t>(p));
  return out;
}

DenseMap conv2d_same(const DenseMap& in, const Conv2dParams& conv) {
  if (conv.in_channels != in.channels) throw InvalidArgument("conv2d: channel mismatch");
  DenseMap out(in.height, in.width, conv.out_channels);
  const auto rows = static_cast<long>(in.height);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < in.width; ++c) detail::conv_pixel(in, out, conv, static_cast<std::size_t>(r), c);
  }
  return out;
}

Matrix covariance(const Matrix& x, std::span<const double> mean) {
  const auto d = static_cast<long>(x.cols());
  Matrix cov(x.cols(), x.cols());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < d; ++i) {
    for (long j = i; j < d; ++j) {
      const double v = detail::covariance_entry(x, mean, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      cov(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
      cov(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
    }
  }
  return cov;
}

void assign_nearest(const Matrix& x, const Matrix& centers, std::span<std::size_t> labels,
                    std::span<double> distances) {
  const auto n = static_cast<long>(x.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    detail::nearest_center(x, centers, k, labels[k], distances[k]);
  }
}

DenseMap gaussian_max_map(std::size_t height, std::size_t width, std::span<const GaussianPeak> peaks,
                          double sigma) {
  DenseMap out(height, width, 1);
  const auto rows = static_cast<long>(height);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) detail::gaussian_row(out, peaks, sigma, static_cast<std::size_t>(r));
  return out;
}

}  // namespace omp
}  // namespace mka::kernels
