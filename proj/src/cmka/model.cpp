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

#include "mka/cmka/model.hpp"

#include <cmath>
#include <map>

#include "mka/error.hpp"
#include "mka/io/binary.hpp"
#include "mka/numerics/rng.hpp"

namespace mka::cmka {

namespace {

bool finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void push(std::vector<std::pair<double*, double*>>& out, std::vector<double>& p, std::vector<double>& g) {
  for (std::size_t i = 0; i < p.size(); ++i) out.emplace_back(&p[i], &g[i]);
}

void push_linear(std::vector<std::pair<double*, double*>>& out, Linear& p, Linear& g) {
  push(out, p.weight.data(), g.weight.data());
  push(out, p.bias, g.bias);
}

void push_conv(std::vector<std::pair<double*, double*>>& out, Conv2dParams& p, Conv2dParams& g) {
  push(out, p.weights, g.weights);
  push(out, p.bias, g.bias);
}

void check_conv(const Conv2dParams& c, std::size_t in, std::size_t out, std::size_t k, const char* name) {
  if (c.in_channels != in || c.out_channels != out || c.size != k || c.weights.size() != out * k * k * in ||
      c.bias.size() != out) {
    throw InvalidModel(std::string("CAM head ") + name + " has inconsistent shape");
  }
  if (!finite(c.weights) || !finite(c.bias)) throw InvalidModel(std::string("CAM head ") + name + " is not finite");
}

}  // namespace

ModelShape CmkaModel::shape() const {
  ModelShape s;
  s.d_in = fusion.input_dim();
  s.d_proj = fusion.projection_dim();
  s.d_hidden = fusion.mlp.w1.rows();
  s.d_out = fusion.output_dim();
  s.d_exo = cam.input_dim();
  s.d_cam = cam.feed_forward.out_dim();
  s.classes = selection.class_count();
  s.regions = regions;
  s.clusters = clusters;
  return s;
}

CmkaModel CmkaModel::initialize(const ModelShape& s, std::uint64_t seed) {
  if (s.d_in == 0 || s.d_proj == 0 || s.d_hidden == 0 || s.d_out == 0 || s.d_exo == 0 || s.d_cam == 0) {
    throw InvalidArgument("model dimensions must be positive");
  }
  if (s.classes < 2) throw InvalidArgument("at least two affordance classes are required");
  if (s.regions == 0 || s.clusters == 0) throw InvalidArgument("regions and clusters must be positive");
  CmkaModel m;
  m.fusion = lmsc::FusionParams::initialize(s.d_in, s.d_proj, s.d_hidden, s.d_out, numerics::mix_seed(seed, 1));
  m.selection = SelectionWeights(s.classes, s.regions * s.clusters);
  m.proj = Linear(s.d_out, s.d_exo);
  numerics::Rng rng(numerics::mix_seed(seed, 2));
  const double scale = 0.01 / std::sqrt(static_cast<double>(s.d_out));
  for (std::size_t i = 0; i < s.d_exo; ++i) {
    for (std::size_t j = 0; j < s.d_out; ++j) m.proj.weight(i, j) = (i == j ? 1.0 : 0.0) + scale * rng.normal();
  }
  m.cam = CamHead::initialize(s.d_exo, s.d_cam, s.classes, numerics::mix_seed(seed, 3));
  m.regions = s.regions;
  m.clusters = s.clusters;
  return m;
}

void CmkaModel::validate() const {
  try {
    fusion.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidModel(e.what());
  }
  const std::size_t t = selection.class_count();
  if (t < 1 || selection.slot_count() < 1) throw InvalidModel("selection weights must be non-empty");
  if (selection.slot_count() != regions * clusters) throw InvalidModel("selection width must equal S*J");
  if (!selection.matrix.all_finite()) throw InvalidModel("selection weights are not finite");
  if (proj.in_dim() != fusion.output_dim() || proj.bias.size() != proj.out_dim()) {
    throw InvalidModel("proj does not match the fused feature width");
  }
  if (!proj.weight.all_finite() || !finite(proj.bias)) throw InvalidModel("proj is not finite");
  if (proj.out_dim() != cam.input_dim()) throw InvalidModel("proj output must match the exo feature width");
  const std::size_t d_cam = cam.feed_forward.out_dim();
  if (cam.feed_forward.bias.size() != d_cam || !cam.feed_forward.weight.all_finite() ||
      !finite(cam.feed_forward.bias)) {
    throw InvalidModel("CAM feed-forward layer is inconsistent");
  }
  check_conv(cam.conv1, d_cam, d_cam, 3, "conv1");
  check_conv(cam.conv2, d_cam, d_cam, 3, "conv2");
  check_conv(cam.classifier, d_cam, t, 1, "classifier");
}

CmkaGrad CmkaGrad::zeros_like(const CmkaModel& m) {
  CmkaGrad g;
  g.fusion = lmsc::FusionGrad::zeros_like(m.fusion);
  g.selection = Matrix(m.selection.matrix.rows(), m.selection.matrix.cols());
  g.proj = Linear(m.proj.in_dim(), m.proj.out_dim());
  g.cam = CamHead::zeros(m.cam.input_dim(), m.cam.feed_forward.out_dim(), m.cam.class_count());
  return g;
}

std::vector<std::pair<double*, double*>> parameter_pairs(CmkaModel& m, CmkaGrad& g) {
  std::vector<std::pair<double*, double*>> out;
  for (std::size_t l = 0; l < lmsc::kFusedLayers; ++l) {
    push(out, m.fusion.layers[l].weight.data(), g.fusion.weight[l].data());
    push(out, m.fusion.layers[l].bias, g.fusion.bias[l]);
  }
  for (std::size_t l = 0; l < lmsc::kFusedLayers; ++l) out.emplace_back(&m.fusion.alphas[l], &g.fusion.alphas[l]);
  push(out, m.fusion.mlp.w1.data(), g.fusion.w1.data());
  push(out, m.fusion.mlp.b1, g.fusion.b1);
  push(out, m.fusion.mlp.w2.data(), g.fusion.w2.data());
  push(out, m.fusion.mlp.b2, g.fusion.b2);
  push(out, m.selection.matrix.data(), g.selection.data());
  push_linear(out, m.proj, g.proj);
  push_linear(out, m.cam.feed_forward, g.cam.feed_forward);
  push_conv(out, m.cam.conv1, g.cam.conv1);
  push_conv(out, m.cam.conv2, g.cam.conv2);
  push_conv(out, m.cam.classifier, g.cam.classifier);
  return out;
}

// ---- checkpoint ------------------------------------------------------------

namespace {

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<double> data;
};

using TensorMap = std::map<std::string, Tensor>;

void put(std::vector<std::pair<std::string, Tensor>>& out, std::string name, std::vector<std::uint32_t> dims,
         std::vector<double> data) {
  out.emplace_back(std::move(name), Tensor{std::move(dims), std::move(data)});
}

std::uint32_t u32(std::size_t v) { return static_cast<std::uint32_t>(v); }

void put_matrix(std::vector<std::pair<std::string, Tensor>>& out, std::string name, const Matrix& m) {
  put(out, std::move(name), {u32(m.rows()), u32(m.cols())}, m.data());
}

void put_vector(std::vector<std::pair<std::string, Tensor>>& out, std::string name, const std::vector<double>& v) {
  put(out, std::move(name), {u32(v.size())}, v);
}

void put_conv(std::vector<std::pair<std::string, Tensor>>& out, const std::string& name, const Conv2dParams& c) {
  put(out, name + ".weight", {u32(c.out_channels), u32(c.size), u32(c.size), u32(c.in_channels)}, c.weights);
  put_vector(out, name + ".bias", c.bias);
}

const Tensor& take(const TensorMap& t, const std::string& name, std::size_t rank) {
  const auto it = t.find(name);
  if (it == t.end()) throw FormatError(FormatErrorCode::kBadShape, "checkpoint is missing tensor " + name);
  if (it->second.dims.size() != rank) {
    throw FormatError(FormatErrorCode::kBadShape, "checkpoint tensor " + name + " has the wrong rank");
  }
  return it->second;
}

Matrix take_matrix(const TensorMap& t, const std::string& name) {
  const Tensor& x = take(t, name, 2);
  return Matrix(x.dims[0], x.dims[1], x.data);
}

std::vector<double> take_vector(const TensorMap& t, const std::string& name) { return take(t, name, 1).data; }

Conv2dParams take_conv(const TensorMap& t, const std::string& name) {
  const Tensor& w = take(t, name + ".weight", 4);
  if (w.dims[1] != w.dims[2]) throw FormatError(FormatErrorCode::kBadShape, name + " kernel is not square");
  Conv2dParams c(w.dims[3], w.dims[0], w.dims[1]);
  c.weights = w.data;
  c.bias = take_vector(t, name + ".bias");
  return c;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const CmkaModel& m) {
  m.validate();
  std::vector<std::pair<std::string, Tensor>> tensors;
  put(tensors, "layout", {2}, {static_cast<double>(m.regions), static_cast<double>(m.clusters)});
  for (std::size_t l = 0; l < lmsc::kFusedLayers; ++l) {
    const std::string p = "fusion.layer" + std::to_string(l);
    const auto& layer = m.fusion.layers[l];
    put_matrix(tensors, p + ".weight", layer.weight);
    put_vector(tensors, p + ".bias", layer.bias);
    put_vector(tensors, p + ".running_mean", layer.running_mean);
    put_vector(tensors, p + ".running_std", layer.running_std);
  }
  put(tensors, "fusion.alphas", {3}, {m.fusion.alphas.begin(), m.fusion.alphas.end()});
  put_matrix(tensors, "fusion.mlp.w1", m.fusion.mlp.w1);
  put_vector(tensors, "fusion.mlp.b1", m.fusion.mlp.b1);
  put_matrix(tensors, "fusion.mlp.w2", m.fusion.mlp.w2);
  put_vector(tensors, "fusion.mlp.b2", m.fusion.mlp.b2);
  put(tensors, "fusion.mlp.relu", {1}, {m.fusion.mlp.activation == lmsc::Activation::kRelu ? 1.0 : 0.0});
  put_matrix(tensors, "selection", m.selection.matrix);
  put_matrix(tensors, "proj.weight", m.proj.weight);
  put_vector(tensors, "proj.bias", m.proj.bias);
  put_matrix(tensors, "cam.ff.weight", m.cam.feed_forward.weight);
  put_vector(tensors, "cam.ff.bias", m.cam.feed_forward.bias);
  put_conv(tensors, "cam.conv1", m.cam.conv1);
  put_conv(tensors, "cam.conv2", m.cam.conv2);
  put_conv(tensors, "cam.classifier", m.cam.classifier);

  io::ByteWriter w;
  w.magic("CMKA");
  w.u16(kCheckpointVersion);
  w.u32(u32(tensors.size()));
  for (const auto& [name, t] : tensors) {
    w.short_string(name);
    w.u32(u32(t.dims.size()));
    for (std::uint32_t d : t.dims) w.u32(d);
    for (double v : t.data) w.f32(static_cast<float>(v));
  }
  return w.buffer();
}

CmkaModel decode_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  io::ByteReader r(bytes, context);
  r.expect_magic("CMKA");
  r.expect_version(kCheckpointVersion);
  const std::uint32_t count = r.u32();
  TensorMap tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.short_string();
    Tensor t;
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw FormatError(FormatErrorCode::kBadShape, context + ": tensor " + name + " rank too large");
    std::uint64_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      t.dims.push_back(r.u32());
      n *= t.dims.back();
    }
    if (n > r.remaining() / 4) {
      throw FormatError(FormatErrorCode::kTruncated, context + ": tensor " + name + " runs past the end");
    }
    t.data.resize(static_cast<std::size_t>(n));
    for (double& v : t.data) v = r.f32();
    if (!tensors.emplace(std::move(name), std::move(t)).second) {
      throw FormatError(FormatErrorCode::kBadShape, context + ": duplicate tensor name");
    }
  }
  r.expect_end();

  CmkaModel m;
  const auto layout = take_vector(tensors, "layout");
  if (layout.size() != 2) throw FormatError(FormatErrorCode::kBadShape, context + ": bad layout tensor");
  m.regions = static_cast<std::size_t>(layout[0]);
  m.clusters = static_cast<std::size_t>(layout[1]);
  for (std::size_t l = 0; l < lmsc::kFusedLayers; ++l) {
    const std::string p = "fusion.layer" + std::to_string(l);
    auto& layer = m.fusion.layers[l];
    layer.weight = take_matrix(tensors, p + ".weight");
    layer.bias = take_vector(tensors, p + ".bias");
    layer.running_mean = take_vector(tensors, p + ".running_mean");
    layer.running_std = take_vector(tensors, p + ".running_std");
  }
  const auto alphas = take_vector(tensors, "fusion.alphas");
  if (alphas.size() != 3) throw FormatError(FormatErrorCode::kBadShape, context + ": expected three alphas");
  for (std::size_t l = 0; l < 3; ++l) m.fusion.alphas[l] = alphas[l];
  m.fusion.mlp.w1 = take_matrix(tensors, "fusion.mlp.w1");
  m.fusion.mlp.b1 = take_vector(tensors, "fusion.mlp.b1");
  m.fusion.mlp.w2 = take_matrix(tensors, "fusion.mlp.w2");
  m.fusion.mlp.b2 = take_vector(tensors, "fusion.mlp.b2");
  const auto relu = take_vector(tensors, "fusion.mlp.relu");
  m.fusion.mlp.activation = (!relu.empty() && relu[0] != 0.0) ? lmsc::Activation::kRelu : lmsc::Activation::kIdentity;
  m.selection.matrix = take_matrix(tensors, "selection");
  m.proj.weight = take_matrix(tensors, "proj.weight");
  m.proj.bias = take_vector(tensors, "proj.bias");
  m.cam.feed_forward.weight = take_matrix(tensors, "cam.ff.weight");
  m.cam.feed_forward.bias = take_vector(tensors, "cam.ff.bias");
  m.cam.conv1 = take_conv(tensors, "cam.conv1");
  m.cam.conv2 = take_conv(tensors, "cam.conv2");
  m.cam.classifier = take_conv(tensors, "cam.classifier");
  try {
    m.validate();
  } catch (const InvalidModel& e) {
    throw FormatError(FormatErrorCode::kBadShape, context + ": " + e.what());
  }
  return m;
}

void save_checkpoint(const CmkaModel& model, const std::string& path) {
  io::write_file(path, encode_checkpoint(model));
}

CmkaModel load_checkpoint(const std::string& path) { return decode_checkpoint(io::read_file(path), path); }

}  // namespace mka::cmka
