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

#include "mka/pipeline/formats.hpp"

#include <cmath>
#include <limits>

#include "mka/error.hpp"
#include "mka/io/binary.hpp"
#include "mka/numerics/resample.hpp"

namespace mka::pipeline {

namespace {

// Rejects headers whose payload could not possibly fit in what is left.
void require_payload(io::ByteReader& r, std::uint64_t count, std::uint64_t width) {
  if (count > r.remaining() / width) {
    throw FormatError(FormatErrorCode::kTruncated, r.context() + ": payload runs past the end of the file");
  }
}

}  // namespace

void FeatureBundle::validate() const {
  if (image_id.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw FormatError(FormatErrorCode::kBadShape, "bundle image id is too long");
  }
  for (const auto& layer : layers) {
    if (layer.height == 0 || layer.width == 0 || layer.channels == 0) {
      throw FormatError(FormatErrorCode::kBadShape, "bundle layer has an empty dimension");
    }
    if (layer.data.size() != layer.height * layer.width * layer.channels) {
      throw FormatError(FormatErrorCode::kBadShape, "bundle layer data does not match its shape");
    }
  }
  if (layers[1].channels != layers[0].channels || layers[2].channels != layers[0].channels) {
    throw FormatError(FormatErrorCode::kBadShape, "bundle layers differ in channel count");
  }
}

std::vector<std::uint8_t> encode_bundle(const FeatureBundle& b) {
  b.validate();
  io::ByteWriter w;
  w.magic("FBND");
  w.u16(kBundleVersion);
  w.u16(3);
  w.short_string(b.image_id);
  w.u32(b.source_height);
  w.u32(b.source_width);
  for (std::size_t m = 0; m < 3; ++m) {
    const DenseMap& layer = b.layers[m];
    w.i32(b.layer_indices[m]);
    w.u32(static_cast<std::uint32_t>(layer.height));
    w.u32(static_cast<std::uint32_t>(layer.width));
    w.u32(static_cast<std::uint32_t>(layer.channels));
    for (double v : layer.data) w.f32(static_cast<float>(v));
  }
  return w.buffer();
}

FeatureBundle decode_bundle(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  io::ByteReader r(bytes, context);
  r.expect_magic("FBND");
  r.expect_version(kBundleVersion);
  const std::uint16_t count = r.u16();
  if (count != 3) throw FormatError(FormatErrorCode::kBadShape, context + ": expected 3 layers");
  FeatureBundle b;
  b.image_id = r.short_string();
  b.source_height = r.u32();
  b.source_width = r.u32();
  for (std::size_t m = 0; m < 3; ++m) {
    b.layer_indices[m] = r.i32();
    const std::uint32_t h = r.u32(), w = r.u32(), c = r.u32();
    if (h == 0 || w == 0 || c == 0) throw FormatError(FormatErrorCode::kBadShape, context + ": empty layer");
    const std::uint64_t n = static_cast<std::uint64_t>(h) * w * c;
    require_payload(r, n, 4);
    DenseMap layer(h, w, c);
    for (double& v : layer.data) {
      v = r.f32();
      if (!std::isfinite(v)) throw FormatError(FormatErrorCode::kBadShape, context + ": non-finite feature value");
    }
    b.layers[m] = std::move(layer);
  }
  r.expect_end();
  b.validate();
  return b;
}

void save_bundle(const FeatureBundle& bundle, const std::string& path) { io::write_file(path, encode_bundle(bundle)); }
FeatureBundle load_bundle(const std::string& path) { return decode_bundle(io::read_file(path), path); }

std::vector<std::uint8_t> encode_mask(const lmsc::RegionMask& m) {
  if (m.bitmap.size() != m.height * m.width || m.region_id > 0xFFFF) {
    throw FormatError(FormatErrorCode::kBadShape, "mask shape does not match its bitmap");
  }
  io::ByteWriter w;
  w.magic("MASK");
  w.u16(kMaskVersion);
  w.u16(static_cast<std::uint16_t>(m.region_id));
  w.u32(static_cast<std::uint32_t>(m.height));
  w.u32(static_cast<std::uint32_t>(m.width));
  for (std::uint8_t v : m.bitmap) w.u8(v != 0 ? 1 : 0);
  return w.buffer();
}

lmsc::RegionMask decode_mask(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  io::ByteReader r(bytes, context);
  r.expect_magic("MASK");
  r.expect_version(kMaskVersion);
  lmsc::RegionMask m;
  m.region_id = r.u16();
  m.height = r.u32();
  m.width = r.u32();
  if (m.height == 0 || m.width == 0) throw FormatError(FormatErrorCode::kBadShape, context + ": empty mask");
  require_payload(r, static_cast<std::uint64_t>(m.height) * m.width, 1);
  m.bitmap.resize(m.height * m.width);
  r.read(m.bitmap.data(), m.bitmap.size());
  for (std::uint8_t v : m.bitmap) {
    if (v > 1) throw FormatError(FormatErrorCode::kBadShape, context + ": mask bytes must be 0 or 1");
  }
  r.expect_end();
  return m;
}

void save_mask(const lmsc::RegionMask& mask, const std::string& path) { io::write_file(path, encode_mask(mask)); }
lmsc::RegionMask load_mask(const std::string& path) { return decode_mask(io::read_file(path), path); }

std::vector<std::uint8_t> encode_depth(const metrics::DepthImage& d) {
  if (d.depth.size() != d.height * d.width || d.depth.empty()) {
    throw FormatError(FormatErrorCode::kBadShape, "depth image shape does not match its data");
  }
  io::ByteWriter w;
  w.magic("DPTH");
  w.u16(kDepthVersion);
  w.u32(static_cast<std::uint32_t>(d.height));
  w.u32(static_cast<std::uint32_t>(d.width));
  for (double v : d.depth) w.f32(static_cast<float>(v));
  return w.buffer();
}

metrics::DepthImage decode_depth(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  io::ByteReader r(bytes, context);
  r.expect_magic("DPTH");
  r.expect_version(kDepthVersion);
  metrics::DepthImage d;
  d.height = r.u32();
  d.width = r.u32();
  if (d.height == 0 || d.width == 0) throw FormatError(FormatErrorCode::kBadShape, context + ": empty depth image");
  require_payload(r, static_cast<std::uint64_t>(d.height) * d.width, 4);
  d.depth.resize(d.height * d.width);
  for (double& v : d.depth) {
    v = r.f32();
    if (std::isnan(v) || v < 0.0) throw FormatError(FormatErrorCode::kBadShape, context + ": negative depth");
  }
  r.expect_end();
  return d;
}

void save_depth(const metrics::DepthImage& depth, const std::string& path) {
  io::write_file(path, encode_depth(depth));
}
metrics::DepthImage load_depth(const std::string& path) { return decode_depth(io::read_file(path), path); }

std::array<DenseMap, 3> align_layers(const FeatureBundle& b) {
  std::array<DenseMap, 3> out;
  out[0] = b.layers[0];
  for (std::size_t m = 1; m < 3; ++m) {
    out[m] = numerics::bilinear_resize(b.layers[m], b.layers[0].height, b.layers[0].width);
  }
  return out;
}

}  // namespace mka::pipeline
