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

#include "mka/cmka/layers.hpp"

#include <cmath>

#include "mka/error.hpp"
#include "mka/numerics/rng.hpp"

namespace mka::cmka {

std::vector<double> Linear::forward(std::span<const double> x) const {
  if (x.size() != in_dim()) throw InvalidArgument("linear: input dimension mismatch");
  std::vector<double> y = numerics::matvec(weight, x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bias[i];
  return y;
}

std::vector<double> Linear::backward(std::span<const double> x, std::span<const double> grad_out, Linear& grad) const {
  for (std::size_t o = 0; o < out_dim(); ++o) {
    grad.bias[o] += grad_out[o];
    for (std::size_t i = 0; i < in_dim(); ++i) grad.weight(o, i) += grad_out[o] * x[i];
  }
  return numerics::matvec_transposed(weight, grad_out);
}

void conv2d_backward(const DenseMap& input, const Conv2dParams& conv, const DenseMap& grad_out, Conv2dParams& grad,
                     DenseMap* grad_input) {
  const long half = static_cast<long>(conv.size / 2);
  const long h = static_cast<long>(input.height);
  const long w = static_cast<long>(input.width);
  if (grad_input != nullptr) *grad_input = DenseMap(input.height, input.width, input.channels);
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      for (std::size_t o = 0; o < conv.out_channels; ++o) {
        const double g = grad_out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c), o);
        if (g == 0.0) continue;
        grad.bias[o] += g;
        for (std::size_t ky = 0; ky < conv.size; ++ky) {
          const long rr = r + static_cast<long>(ky) - half;
          if (rr < 0 || rr >= h) continue;
          for (std::size_t kx = 0; kx < conv.size; ++kx) {
            const long cc = c + static_cast<long>(kx) - half;
            if (cc < 0 || cc >= w) continue;
            const std::size_t base = input.index(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
            const std::size_t widx = conv.weight_index(o, ky, kx, 0);
            for (std::size_t i = 0; i < conv.in_channels; ++i) {
              grad.weights[widx + i] += g * input.data[base + i];
              if (grad_input != nullptr) grad_input->data[base + i] += g * conv.weights[widx + i];
            }
          }
        }
      }
    }
  }
}

void relu_inplace(DenseMap& m) {
  for (double& v : m.data) v = v > 0.0 ? v : 0.0;
}

void relu_backward_inplace(const DenseMap& pre, DenseMap& grad) {
  for (std::size_t i = 0; i < grad.data.size(); ++i) {
    if (!(pre.data[i] > 0.0)) grad.data[i] = 0.0;
  }
}

CamHead CamHead::zeros(std::size_t d_exo, std::size_t d_cam, std::size_t classes) {
  CamHead head;
  head.feed_forward = Linear(d_exo, d_cam);
  head.conv1 = Conv2dParams(d_cam, d_cam, 3);
  head.conv2 = Conv2dParams(d_cam, d_cam, 3);
  head.classifier = Conv2dParams(d_cam, classes, 1);
  return head;
}

CamHead CamHead::initialize(std::size_t d_exo, std::size_t d_cam, std::size_t classes, std::uint64_t seed,
                            double gain) {
  CamHead head = zeros(d_exo, d_cam, classes);
  numerics::Rng rng(seed);
  const double ff_scale = std::sqrt(gain / static_cast<double>(d_exo));
  for (double& v : head.feed_forward.weight.data()) v = ff_scale * rng.normal();
  const double conv_scale = std::sqrt(gain / static_cast<double>(9 * d_cam));
  for (double& v : head.conv1.weights) v = conv_scale * rng.normal();
  for (double& v : head.conv2.weights) v = conv_scale * rng.normal();
  const double cls_scale = std::sqrt(1.0 / static_cast<double>(d_cam));
  for (double& v : head.classifier.weights) v = cls_scale * rng.normal();
  return head;
}

CamOutput cam_forward(const DenseMap& exo, const CamHead& head, CamTrace* trace) {
  if (exo.channels != head.input_dim()) throw InvalidArgument("cam_forward: exo channels do not match the head");
  if (exo.pixel_count() == 0) throw InvalidArgument("cam_forward: empty feature map");

  DenseMap ff_pre = kernels::omp::pixelwise_linear(exo, head.feed_forward.weight, head.feed_forward.bias);
  DenseMap ff_out = ff_pre;
  relu_inplace(ff_out);
  DenseMap c1_pre = kernels::omp::conv2d_same(ff_out, head.conv1);
  DenseMap c1_out = c1_pre;
  relu_inplace(c1_out);
  DenseMap c2_pre = kernels::omp::conv2d_same(c1_out, head.conv2);
  DenseMap c2_out = c2_pre;
  relu_inplace(c2_out);

  CamOutput out;
  out.localization = kernels::omp::conv2d_same(c2_out, head.classifier);
  const std::size_t classes = head.class_count();
  out.scores.assign(classes, 0.0);
  for (std::size_t p = 0; p < out.localization.pixel_count(); ++p) {
    for (std::size_t k = 0; k < classes; ++k) out.scores[k] += out.localization.data[p * classes + k];
  }
  for (double& s : out.scores) s /= static_cast<double>(out.localization.pixel_count());

  if (trace != nullptr) {
    trace->input = exo;
    trace->ff_pre = std::move(ff_pre);
    trace->ff_out = std::move(ff_out);
    trace->conv1_pre = std::move(c1_pre);
    trace->conv1_out = std::move(c1_out);
    trace->conv2_pre = std::move(c2_pre);
    trace->conv2_out = std::move(c2_out);
  }
  return out;
}

void cam_backward(const CamHead& head, const CamTrace& trace, std::span<const double> grad_scores, CamHead& grad) {
  const std::size_t classes = head.class_count();
  if (grad_scores.size() != classes) throw InvalidArgument("cam_backward: score gradient size mismatch");
  const std::size_t h = trace.input.height, w = trace.input.width;
  const double inv = 1.0 / static_cast<double>(h * w);

  DenseMap g_p(h, w, classes);
  for (std::size_t p = 0; p < h * w; ++p) {
    for (std::size_t k = 0; k < classes; ++k) g_p.data[p * classes + k] = grad_scores[k] * inv;
  }
  DenseMap g_c2;
  conv2d_backward(trace.conv2_out, head.classifier, g_p, grad.classifier, &g_c2);
  relu_backward_inplace(trace.conv2_pre, g_c2);
  DenseMap g_c1;
  conv2d_backward(trace.conv1_out, head.conv2, g_c2, grad.conv2, &g_c1);
  relu_backward_inplace(trace.conv1_pre, g_c1);
  DenseMap g_ff;
  conv2d_backward(trace.ff_out, head.conv1, g_c1, grad.conv1, &g_ff);
  relu_backward_inplace(trace.ff_pre, g_ff);
  for (std::size_t p = 0; p < h * w; ++p) {
    const auto x = trace.input.pixel(p);
    const std::span<const double> g(g_ff.data.data() + p * g_ff.channels, g_ff.channels);
    for (std::size_t o = 0; o < head.feed_forward.out_dim(); ++o) {
      grad.feed_forward.bias[o] += g[o];
      if (g[o] == 0.0) continue;
      for (std::size_t i = 0; i < head.feed_forward.in_dim(); ++i) grad.feed_forward.weight(o, i) += g[o] * x[i];
    }
  }
}

}  // namespace mka::cmka
