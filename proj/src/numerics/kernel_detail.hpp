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

// Per-element bodies shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>
#include <limits>

#include "mka/numerics/kernels.hpp"

namespace mka::kernels::detail {

/// Corner-aligned source coordinate for output index i.
inline void source_coord(std::size_t i, std::size_t in, std::size_t out, std::size_t& i0,
                         std::size_t& i1, double& t) {
  if (in == 1 || out == 1) {
    i0 = i1 = 0;
    t = 0.0;
    return;
  }
  const double src = static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
  i0 = std::min(static_cast<std::size_t>(src), in - 1);
  i1 = std::min(i0 + 1, in - 1);
  t = src - static_cast<double>(i0);
}

inline void resize_row(const DenseMap& in, DenseMap& out, std::size_t r) {
  std::size_t r0, r1;
  double ty;
  source_coord(r, in.height, out.height, r0, r1, ty);
  for (std::size_t c = 0; c < out.width; ++c) {
    std::size_t c0, c1;
    double tx;
    source_coord(c, in.width, out.width, c0, c1, tx);
    for (std::size_t ch = 0; ch < in.channels; ++ch) {
      const double a = in.at(r0, c0, ch);
      const double b = in.at(r0, c1, ch);
      const double d = in.at(r1, c0, ch);
      const double e = in.at(r1, c1, ch);
      const double top = a + (b - a) * tx;
      const double bottom = d + (e - d) * tx;
      out.at(r, c, ch) = top + (bottom - top) * ty;
    }
  }
}

inline void linear_pixel(const DenseMap& in, DenseMap& out, const Matrix& w, std::span<const double> bias,
                         std::size_t p) {
  const double* x = in.data.data() + p * in.channels;
  double* y = out.data.data() + p * out.channels;
  for (std::size_t o = 0; o < w.rows(); ++o) {
    double s = bias.empty() ? 0.0 : bias[o];
    for (std::size_t i = 0; i < w.cols(); ++i) s += w(o, i) * x[i];
    y[o] = s;
  }
}

inline void conv_pixel(const DenseMap& in, DenseMap& out, const Conv2dParams& conv, std::size_t r,
                       std::size_t c) {
  const long half = static_cast<long>(conv.size / 2);
  const long h = static_cast<long>(in.height);
  const long w = static_cast<long>(in.width);
  for (std::size_t o = 0; o < conv.out_channels; ++o) {
    double s = conv.bias[o];
    for (std::size_t ky = 0; ky < conv.size; ++ky) {
      const long rr = static_cast<long>(r) + static_cast<long>(ky) - half;
      if (rr < 0 || rr >= h) continue;
      for (std::size_t kx = 0; kx < conv.size; ++kx) {
        const long cc = static_cast<long>(c) + static_cast<long>(kx) - half;
        if (cc < 0 || cc >= w) continue;
        const double* x = in.data.data() + in.index(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
        const double* k = conv.weights.data() + conv.weight_index(o, ky, kx, 0);
        for (std::size_t i = 0; i < conv.in_channels; ++i) s += k[i] * x[i];
      }
    }
    out.at(r, c, o) = s;
  }
}

inline double covariance_entry(const Matrix& x, std::span<const double> mean, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t n = 0; n < x.rows(); ++n) s += (x(n, i) - mean[i]) * (x(n, j) - mean[j]);
  return s / static_cast<double>(x.rows());
}

inline void nearest_center(const Matrix& x, const Matrix& centers, std::size_t n, std::size_t& label,
                           double& distance) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < centers.rows(); ++k) {
    const double d = numerics::squared_distance(x.row(n), centers.row(k));
    if (d < best) {
      best = d;
      best_k = k;
    }
  }
  label = best_k;
  distance = best;
}

inline void gaussian_row(DenseMap& out, std::span<const GaussianPeak> peaks, double sigma, std::size_t r) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t c = 0; c < out.width; ++c) {
    double best = 0.0;
    for (const auto& p : peaks) {
      const double dr = static_cast<double>(r) - p.row;
      const double dc = static_cast<double>(c) - p.col;
      best = std::max(best, std::exp(-(dr * dr + dc * dc) * inv));
    }
    out.at(r, c, 0) = best;
  }
}

}  // namespace mka::kernels::detail
