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

#include "mka/lmsc/fusion.hpp"

#include <cmath>

#include "mka/error.hpp"
#include "mka/numerics/kernels.hpp"
#include "mka/numerics/rng.hpp"

namespace mka::lmsc {
namespace {

Matrix near_identity(std::size_t rows, std::size_t cols, numerics::Rng& rng, double noise) {
  Matrix m(rows, cols);
  const double scale = noise / std::sqrt(static_cast<double>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = (i == j ? 1.0 : 0.0) + scale * rng.normal();
  }
  return m;
}

double activate(Activation a, double z) { return a == Activation::kRelu ? (z > 0.0 ? z : 0.0) : z; }
double activate_grad(Activation a, double z) { return a == Activation::kRelu ? (z > 0.0 ? 1.0 : 0.0) : 1.0; }

bool finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

FusionParams FusionParams::identity(std::size_t dim, std::array<double, kFusedLayers> alphas) {
  FusionParams p;
  for (auto& layer : p.layers) {
    layer.weight = Matrix::identity(dim);
    layer.bias.assign(dim, 0.0);
    layer.running_mean.assign(dim, 0.0);
    layer.running_std.assign(dim, 1.0);
  }
  p.alphas = alphas;
  p.mlp.w1 = Matrix::identity(dim);
  p.mlp.b1.assign(dim, 0.0);
  p.mlp.w2 = Matrix::identity(dim);
  p.mlp.b2.assign(dim, 0.0);
  p.mlp.activation = Activation::kIdentity;
  return p;
}

FusionParams FusionParams::initialize(std::size_t d_in, std::size_t d_proj, std::size_t d_hidden, std::size_t d_out,
                                      std::uint64_t seed, double noise) {
  numerics::Rng rng(seed);
  FusionParams p;
  for (auto& layer : p.layers) {
    layer.weight = near_identity(d_proj, d_in, rng, noise);
    layer.bias.assign(d_proj, 0.0);
    layer.running_mean.assign(d_proj, 0.0);
    layer.running_std.assign(d_proj, 1.0);
  }
  p.alphas = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  p.mlp.w1 = near_identity(d_hidden, d_proj, rng, noise);
  p.mlp.b1.assign(d_hidden, 0.0);
  p.mlp.w2 = near_identity(d_out, d_hidden, rng, noise);
  p.mlp.b2.assign(d_out, 0.0);
  p.mlp.activation = Activation::kRelu;
  return p;
}

void FusionParams::validate() const {
  const std::size_t d_in = input_dim();
  const std::size_t d_proj = projection_dim();
  for (const auto& layer : layers) {
    if (layer.weight.cols() != d_in || layer.weight.rows() != d_proj || layer.bias.size() != d_proj ||
        layer.running_mean.size() != d_proj || layer.running_std.size() != d_proj) {
      throw InvalidArgument("fusion params: inconsistent layer projection shapes");
    }
    if (!layer.weight.all_finite() || !finite(layer.bias) || !finite(layer.running_mean)) {
      throw InvalidArgument("fusion params: non-finite projection value");
    }
    for (double s : layer.running_std) {
      if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("fusion params: running std must be positive");
    }
  }
  for (double a : alphas) {
    if (!std::isfinite(a)) throw InvalidArgument("fusion params: non-finite alpha");
  }
  if (mlp.w1.cols() != d_proj || mlp.b1.size() != mlp.w1.rows() || mlp.w2.cols() != mlp.w1.rows() ||
      mlp.b2.size() != mlp.w2.rows()) {
    throw InvalidArgument("fusion params: inconsistent MLP shapes");
  }
  if (!mlp.w1.all_finite() || !mlp.w2.all_finite() || !finite(mlp.b1) || !finite(mlp.b2)) {
    throw InvalidArgument("fusion params: non-finite MLP value");
  }
}

DenseMap fuse_layers(std::span<const DenseMap> layers, const FusionParams& params, FusionTrace* trace) {
  if (layers.size() != kFusedLayers) throw InvalidArgument("fuse_layers: exactly three layers are required");
  params.validate();
  for (const auto& layer : layers) {
    if (layer.height != layers[0].height || layer.width != layers[0].width) {
      throw InvalidArgument("fuse_layers: layers differ in spatial shape");
    }
    if (layer.channels != params.input_dim()) throw InvalidArgument("fuse_layers: layer channels do not match params");
  }

  const std::size_t h = layers[0].height, w = layers[0].width;
  const std::size_t d_proj = params.projection_dim();
  DenseMap mixed(h, w, d_proj);
  std::array<DenseMap, kFusedLayers> normalized;
  for (std::size_t m = 0; m < kFusedLayers; ++m) {
    const auto& proj = params.layers[m];
    DenseMap y = kernels::omp::pixelwise_linear(layers[m], proj.weight, proj.bias);
    for (std::size_t p = 0; p < y.pixel_count(); ++p) {
      for (std::size_t c = 0; c < d_proj; ++c) {
        double& v = y.data[p * d_proj + c];
        v = (v - proj.running_mean[c]) / proj.running_std[c];
        mixed.data[p * d_proj + c] += params.alphas[m] * v;
      }
    }
    normalized[m] = std::move(y);
  }

  DenseMap hidden_pre = kernels::omp::pixelwise_linear(mixed, params.mlp.w1, params.mlp.b1);
  DenseMap hidden = hidden_pre;
  for (double& v : hidden.data) v = activate(params.mlp.activation, v);
  DenseMap out = kernels::omp::pixelwise_linear(hidden, params.mlp.w2, params.mlp.b2);

  if (trace != nullptr) {
    trace->normalized = std::move(normalized);
    trace->mixed = std::move(mixed);
    trace->hidden_pre = std::move(hidden_pre);
    trace->hidden = std::move(hidden);
  }
  return out;
}

FusionGrad FusionGrad::zeros_like(const FusionParams& p) {
  FusionGrad g;
  for (std::size_t m = 0; m < kFusedLayers; ++m) {
    g.weight[m] = Matrix(p.layers[m].weight.rows(), p.layers[m].weight.cols());
    g.bias[m].assign(p.layers[m].bias.size(), 0.0);
  }
  g.w1 = Matrix(p.mlp.w1.rows(), p.mlp.w1.cols());
  g.b1.assign(p.mlp.b1.size(), 0.0);
  g.w2 = Matrix(p.mlp.w2.rows(), p.mlp.w2.cols());
  g.b2.assign(p.mlp.b2.size(), 0.0);
  return g;
}

void fuse_layers_backward(std::span<const DenseMap> layers, const FusionParams& params, const FusionTrace& trace,
                          const PixelGradients& grad_f, FusionGrad& grad) {
  const std::size_t d_proj = params.projection_dim();
  const std::size_t d_hidden = params.mlp.w1.rows();
  const std::size_t d_out = params.output_dim();
  const std::size_t d_in = params.input_dim();
  std::vector<double> g_hidden(d_hidden), g_mixed(d_proj), g_y(d_proj);

  for (const auto& [p, gf] : grad_f) {
    if (gf.size() != d_out) throw InvalidArgument("fuse_layers_backward: gradient width mismatch");
    const double* hid = trace.hidden.data.data() + p * d_hidden;
    const double* pre = trace.hidden_pre.data.data() + p * d_hidden;
    const double* mix = trace.mixed.data.data() + p * d_proj;

    for (std::size_t o = 0; o < d_out; ++o) {
      grad.b2[o] += gf[o];
      for (std::size_t j = 0; j < d_hidden; ++j) grad.w2(o, j) += gf[o] * hid[j];
    }
    for (std::size_t j = 0; j < d_hidden; ++j) {
      double s = 0.0;
      for (std::size_t o = 0; o < d_out; ++o) s += params.mlp.w2(o, j) * gf[o];
      g_hidden[j] = s * activate_grad(params.mlp.activation, pre[j]);
    }
    for (std::size_t j = 0; j < d_hidden; ++j) {
      grad.b1[j] += g_hidden[j];
      for (std::size_t i = 0; i < d_proj; ++i) grad.w1(j, i) += g_hidden[j] * mix[i];
    }
    for (std::size_t i = 0; i < d_proj; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d_hidden; ++j) s += params.mlp.w1(j, i) * g_hidden[j];
      g_mixed[i] = s;
    }

    for (std::size_t m = 0; m < kFusedLayers; ++m) {
      const auto& proj = params.layers[m];
      const double* nrm = trace.normalized[m].data.data() + p * d_proj;
      const double* x = layers[m].data.data() + p * d_in;
      double g_alpha = 0.0;
      for (std::size_t c = 0; c < d_proj; ++c) {
        g_alpha += g_mixed[c] * nrm[c];
        g_y[c] = params.alphas[m] * g_mixed[c] / proj.running_std[c];
      }
      grad.alphas[m] += g_alpha;
      for (std::size_t c = 0; c < d_proj; ++c) {
        grad.bias[m][c] += g_y[c];
        for (std::size_t i = 0; i < d_in; ++i) grad.weight[m](c, i) += g_y[c] * x[i];
      }
    }
  }
}

void calibrate_normalization(FusionParams& params, std::span<const std::array<DenseMap, kFusedLayers>> bundles) {
  if (bundles.empty()) throw InvalidArgument("calibrate_normalization: no data");
  const std::size_t d_proj = params.projection_dim();
  for (std::size_t m = 0; m < kFusedLayers; ++m) {
    auto& proj = params.layers[m];
    std::vector<double> sum(d_proj, 0.0), sum_sq(d_proj, 0.0);
    double count = 0.0;
    for (const auto& bundle : bundles) {
      const DenseMap y = kernels::omp::pixelwise_linear(bundle[m], proj.weight, proj.bias);
      for (std::size_t p = 0; p < y.pixel_count(); ++p) {
        for (std::size_t c = 0; c < d_proj; ++c) {
          const double v = y.data[p * d_proj + c];
          sum[c] += v;
          sum_sq[c] += v * v;
        }
      }
      count += static_cast<double>(y.pixel_count());
    }
    for (std::size_t c = 0; c < d_proj; ++c) {
      const double mean = sum[c] / count;
      const double var = std::max(0.0, sum_sq[c] / count - mean * mean);
      proj.running_mean[c] = mean;
      proj.running_std[c] = std::sqrt(var + 1e-12);
    }
  }
}

}  // namespace mka::lmsc
