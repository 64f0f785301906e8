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

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mka/error.hpp"
#include "mka/lmsc/fusion.hpp"
#include "mka/lmsc/lmsc.hpp"
#include "mka/numerics/gradient_check.hpp"
#include "mka/numerics/resample.hpp"
#include "mka/numerics/rng.hpp"

using namespace mka;
using namespace mka::lmsc;
using numerics::Rng;

namespace {

DenseMap random_map(Rng& rng, std::size_t h, std::size_t w, std::size_t c) {
  DenseMap m(h, w, c);
  for (double& v : m.data) v = rng.normal();
  return m;
}

FusionParams random_params(Rng& rng, std::size_t d_in, std::size_t d_proj, std::size_t d_hidden, std::size_t d_out) {
  FusionParams p = FusionParams::initialize(d_in, d_proj, d_hidden, d_out, rng.next_u64(), 1.0);
  for (auto& layer : p.layers) {
    for (double& b : layer.bias) b = rng.normal() * 0.3;
    for (double& m : layer.running_mean) m = rng.normal() * 0.2;
    for (double& s : layer.running_std) s = rng.uniform(0.5, 2.0);
  }
  for (double& a : p.alphas) a = rng.normal();
  for (double& b : p.mlp.b1) b = rng.normal() * 0.3;
  for (double& b : p.mlp.b2) b = rng.normal() * 0.3;
  return p;
}

// Straight-line re-implementation of the fusion forward pass.
DenseMap fusion_oracle(const std::array<DenseMap, 3>& layers, const FusionParams& p) {
  const std::size_t h = layers[0].height, w = layers[0].width;
  const std::size_t d_in = p.input_dim(), d_proj = p.projection_dim();
  const std::size_t d_hidden = p.mlp.w1.rows(), d_out = p.output_dim();
  DenseMap out(h, w, d_out);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      std::vector<double> mixed(d_proj, 0.0);
      for (std::size_t m = 0; m < 3; ++m) {
        for (std::size_t o = 0; o < d_proj; ++o) {
          double y = p.layers[m].bias[o];
          for (std::size_t i = 0; i < d_in; ++i) y += p.layers[m].weight(o, i) * layers[m].at(r, c, i);
          mixed[o] += p.alphas[m] * (y - p.layers[m].running_mean[o]) / p.layers[m].running_std[o];
        }
      }
      std::vector<double> hidden(d_hidden);
      for (std::size_t j = 0; j < d_hidden; ++j) {
        double z = p.mlp.b1[j];
        for (std::size_t i = 0; i < d_proj; ++i) z += p.mlp.w1(j, i) * mixed[i];
        hidden[j] = p.mlp.activation == Activation::kRelu ? std::max(0.0, z) : z;
      }
      for (std::size_t o = 0; o < d_out; ++o) {
        double v = p.mlp.b2[o];
        for (std::size_t j = 0; j < d_hidden; ++j) v += p.mlp.w2(o, j) * hidden[j];
        out.at(r, c, o) = v;
      }
    }
  }
  return out;
}

RegionMask rect_mask(std::size_t h, std::size_t w, std::size_t id, std::size_t r0, std::size_t r1, std::size_t c0,
                     std::size_t c1) {
  RegionMask m{h, w, id, std::vector<std::uint8_t>(h * w, 0)};
  for (std::size_t r = r0; r < r1; ++r)
    for (std::size_t c = c0; c < c1; ++c) m.bitmap[r * w + c] = 1;
  return m;
}

}  // namespace

TEST_CASE("fuse_layers: one-hot mixing returns the normalized first layer") {
  Rng rng(1);
  std::array<DenseMap, 3> layers{random_map(rng, 4, 5, 6), random_map(rng, 4, 5, 6), random_map(rng, 4, 5, 6)};
  FusionParams p = FusionParams::identity(6, {1.0, 0.0, 0.0});
  for (std::size_t c = 0; c < 6; ++c) {
    p.layers[0].running_mean[c] = 0.1 * static_cast<double>(c);
    p.layers[0].running_std[c] = 1.0 + 0.5 * static_cast<double>(c);
  }
  const DenseMap f = fuse_layers(layers, p);
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    const std::size_t c = i % 6;
    const double expected = (layers[0].data[i] - p.layers[0].running_mean[c]) / p.layers[0].running_std[c];
    CHECK(f.data[i] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("fuse_layers: identical layers under a convex combination") {
  Rng rng(2);
  const DenseMap shared = random_map(rng, 3, 3, 4);
  std::array<DenseMap, 3> layers{shared, shared, shared};
  const FusionParams p = FusionParams::identity(4, {0.2, 0.5, 0.3});
  const DenseMap f = fuse_layers(layers, p);
  for (std::size_t i = 0; i < f.data.size(); ++i) CHECK(std::abs(f.data[i] - shared.data[i]) < 1e-12);
}

TEST_CASE("fuse_layers: random params match the straight-line oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::array<DenseMap, 3> layers{random_map(rng, 4, 4, 8), random_map(rng, 4, 4, 8), random_map(rng, 4, 4, 8)};
    const FusionParams p = random_params(rng, 8, 6, 7, 5);
    const DenseMap f = fuse_layers(layers, p);
    const DenseMap oracle = fusion_oracle(layers, p);
    REQUIRE(f.same_shape(oracle));
    for (std::size_t i = 0; i < f.data.size(); ++i) CHECK(std::abs(f.data[i] - oracle.data[i]) < 1e-9);
  }
}

TEST_CASE("fuse_layers: shape mismatches are rejected") {
  Rng rng(4);
  const FusionParams p = FusionParams::identity(4, {1, 1, 1});
  std::array<DenseMap, 3> spatial{random_map(rng, 3, 3, 4), random_map(rng, 3, 4, 4), random_map(rng, 3, 3, 4)};
  CHECK_THROWS_AS(fuse_layers(spatial, p), InvalidArgument);
  std::array<DenseMap, 3> channels{random_map(rng, 3, 3, 5), random_map(rng, 3, 3, 5), random_map(rng, 3, 3, 5)};
  CHECK_THROWS_AS(fuse_layers(channels, p), InvalidArgument);
  std::vector<DenseMap> two{random_map(rng, 3, 3, 4), random_map(rng, 3, 3, 4)};
  CHECK_THROWS_AS(fuse_layers(two, p), InvalidArgument);
}

namespace {

// Flattens every trainable fusion parameter (stats excluded) in a fixed order.
std::vector<double> flatten(const FusionParams& p) {
  std::vector<double> v;
  for (const auto& l : p.layers) {
    v.insert(v.end(), l.weight.data().begin(), l.weight.data().end());
    v.insert(v.end(), l.bias.begin(), l.bias.end());
  }
  v.insert(v.end(), p.alphas.begin(), p.alphas.end());
  v.insert(v.end(), p.mlp.w1.data().begin(), p.mlp.w1.data().end());
  v.insert(v.end(), p.mlp.b1.begin(), p.mlp.b1.end());
  v.insert(v.end(), p.mlp.w2.data().begin(), p.mlp.w2.data().end());
  v.insert(v.end(), p.mlp.b2.begin(), p.mlp.b2.end());
  return v;
}

void unflatten(std::span<const double> v, FusionParams& p) {
  std::size_t k = 0;
  auto take = [&](auto& container) {
    for (double& x : container) x = v[k++];
  };
  for (auto& l : p.layers) {
    take(l.weight.data());
    take(l.bias);
  }
  for (double& a : p.alphas) a = v[k++];
  take(p.mlp.w1.data());
  take(p.mlp.b1);
  take(p.mlp.w2.data());
  take(p.mlp.b2);
}

std::vector<double> flatten(const FusionGrad& g) {
  std::vector<double> v;
  for (std::size_t m = 0; m < 3; ++m) {
    v.insert(v.end(), g.weight[m].data().begin(), g.weight[m].data().end());
    v.insert(v.end(), g.bias[m].begin(), g.bias[m].end());
  }
  v.insert(v.end(), g.alphas.begin(), g.alphas.end());
  v.insert(v.end(), g.w1.data().begin(), g.w1.data().end());
  v.insert(v.end(), g.b1.begin(), g.b1.end());
  v.insert(v.end(), g.w2.data().begin(), g.w2.data().end());
  v.insert(v.end(), g.b2.begin(), g.b2.end());
  return v;
}

}  // namespace

TEST_CASE("fuse_layers_backward matches central differences") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::array<DenseMap, 3> layers{random_map(rng, 3, 3, 4), random_map(rng, 3, 3, 4), random_map(rng, 3, 3, 4)};
    FusionParams p = random_params(rng, 4, 3, 5, 3);
    // Loss = sum over a few pixels of <g_p, f_p> with fixed random g_p.
    PixelGradients upstream;
    for (std::size_t pix : {0UL, 4UL, 7UL}) {
      std::vector<double> g(3);
      for (double& x : g) x = rng.normal();
      upstream.emplace_back(pix, g);
    }
    auto loss = [&](std::span<const double> theta) {
      FusionParams q = p;
      unflatten(theta, q);
      const DenseMap f = fuse_layers(layers, q);
      double s = 0.0;
      for (const auto& [pix, g] : upstream) s += numerics::dot(f.pixel(pix), g);
      return s;
    };
    FusionTrace trace;
    fuse_layers(layers, p, &trace);
    FusionGrad grad = FusionGrad::zeros_like(p);
    fuse_layers_backward(layers, p, trace, upstream, grad);
    const auto theta = flatten(p);
    const auto numeric = numerics::finite_diff_gradient(loss, theta, 1e-5);
    CHECK(numerics::relative_error(flatten(grad), numeric) < 1e-6);
  }
}

TEST_CASE("calibrate_normalization standardizes each projected channel") {
  Rng rng(6);
  std::vector<std::array<DenseMap, 3>> bundles;
  for (int i = 0; i < 2; ++i) {
    std::array<DenseMap, 3> b{random_map(rng, 5, 5, 3), random_map(rng, 5, 5, 3), random_map(rng, 5, 5, 3)};
    for (auto& layer : b)
      for (double& v : layer.data) v = 4.0 + 3.0 * v;
    bundles.push_back(b);
  }
  FusionParams p = FusionParams::identity(3, {1, 0, 0});
  calibrate_normalization(p, bundles);
  double mean = 0, sq = 0, n = 0;
  for (const auto& b : bundles) {
    const DenseMap f = fuse_layers(b, p);
    for (std::size_t i = 0; i < f.data.size(); i += 3) {
      mean += f.data[i];
      sq += f.data[i] * f.data[i];
      n += 1;
    }
  }
  CHECK(std::abs(mean / n) < 1e-9);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("multiscale: constants triple") {
  const DenseMap c(6, 5, 2, 1.25);
  for (double v : multiscale(c).data) CHECK(v == 3.75);
  CHECK_THROWS_AS(multiscale(DenseMap(1, 5, 2)), InvalidArgument);
}

TEST_CASE("multiscale: 2x2 map equals the composition of resampling round trips") {
  DenseMap f(2, 2, 1);
  f.data = {0.0, 1.0, 2.0, 3.0};
  const DenseMap up = numerics::bilinear_resize(numerics::bilinear_resize(f, 4, 4), 2, 2);
  const DenseMap down = numerics::bilinear_resize(numerics::bilinear_resize(f, 1, 1), 2, 2);
  const DenseMap ms = multiscale(f);
  for (std::size_t i = 0; i < 4; ++i) CHECK(ms.data[i] == doctest::Approx(f.data[i] + up.data[i] + down.data[i]));
  // Down to 1x1 keeps the top-left corner; the up round trip is exact on affine data.
  CHECK(ms.data[3] == doctest::Approx(3.0 + 3.0 + 0.0));
}

TEST_CASE("multiscale: affine ramps triple") {
  DenseMap f(8, 10, 2);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 10; ++c) {
      f.at(r, c, 0) = 0.5 * r - 0.25 * c + 2.0;
      f.at(r, c, 1) = -1.5 * r + 3.0;
    }
  const DenseMap ms = multiscale(f);
  for (std::size_t r = 1; r + 1 < 8; ++r)
    for (std::size_t c = 1; c + 1 < 10; ++c)
      for (std::size_t ch = 0; ch < 2; ++ch) CHECK(std::abs(ms.at(r, c, ch) - 3.0 * f.at(r, c, ch)) < 1e-9);
}

TEST_CASE("reduce_features: full basis preserves pairwise distances") {
  Rng rng(7);
  const DenseMap f = random_map(rng, 5, 6, 4);
  const ReducedFeatures red = reduce_features(f, 4);
  CHECK_FALSE(red.degenerate);
  for (std::size_t a = 0; a < f.pixel_count(); ++a)
    for (std::size_t b = a + 1; b < f.pixel_count(); ++b) {
      const double d0 = numerics::squared_distance(f.pixel(a), f.pixel(b));
      const double d1 = numerics::squared_distance(red.map.pixel(a), red.map.pixel(b));
      CHECK(std::abs(std::sqrt(d0) - std::sqrt(d1)) < 1e-9);
    }
}

TEST_CASE("reduce_features: rank-1 map keeps all variance with k = 1") {
  DenseMap f(4, 4, 5);
  for (std::size_t p = 0; p < 16; ++p)
    for (std::size_t c = 0; c < 5; ++c) f.data[p * 5 + c] = static_cast<double>(p) * (1.0 + c);
  const ReducedFeatures red = reduce_features(f, 1);
  CHECK(red.model.explained_variance[0] / red.model.total_variance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reduce_features: planted 3-D latent structure is recovered with k = 3") {
  Rng rng(8);
  numerics::Matrix basis(3, 12);
  for (double& v : basis.data()) v = rng.normal();
  DenseMap f(7, 7, 12);
  for (std::size_t p = 0; p < 49; ++p) {
    const double z[3] = {rng.normal(), rng.normal(), rng.normal()};
    for (std::size_t c = 0; c < 12; ++c) f.data[p * 12 + c] = 1.0 + z[0] * basis(0, c) + z[1] * basis(1, c) + z[2] * basis(2, c);
  }
  const ReducedFeatures red = reduce_features(f, 3);
  double worst = 0.0;
  for (std::size_t p = 0; p < 49; ++p) {
    const auto back = red.model.inverse_transform(red.map.pixel(p));
    worst = std::max(worst, std::sqrt(numerics::squared_distance(back, f.pixel(p))));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("reduce_features: identical pixels give a flagged zero projection") {
  const ReducedFeatures red = reduce_features(DenseMap(3, 3, 4, 2.0), 2);
  CHECK(red.degenerate);
  for (double v : red.map.data) CHECK(v == 0.0);
  CHECK_THROWS_AS(reduce_features(DenseMap(3, 3, 2, 1.0), 3), InvalidArgument);
}

TEST_CASE("extract_candidates: S = 3, J = 4 all clusterable gives 12 candidates") {
  Rng rng(9);
  const DenseMap f = random_map(rng, 12, 12, 3);
  std::vector<RegionMask> masks{rect_mask(12, 12, 0, 0, 4, 0, 12), rect_mask(12, 12, 1, 4, 8, 0, 12),
                                rect_mask(12, 12, 2, 8, 12, 0, 12)};
  const auto set = extract_candidates(f, masks, 4, 1);
  CHECK(set.points.size() == 12);
  CHECK(set.max_slots() == 12);
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    CHECK(set.points[i].region_id == i / 4);
    CHECK(set.points[i].cluster_index == i % 4);
    CHECK(set.slot(set.points[i]) == i);
  }
}

TEST_CASE("extract_candidates: a two-pixel region falls back to its centroid") {
  Rng rng(10);
  const DenseMap f = random_map(rng, 6, 6, 3);
  RegionMask m{6, 6, 0, std::vector<std::uint8_t>(36, 0)};
  m.bitmap[2 * 6 + 1] = 1;
  m.bitmap[2 * 6 + 2] = 1;
  std::vector<RegionMask> masks{m};
  const auto set = extract_candidates(f, masks, 4, 3);
  REQUIRE(set.points.size() == 1);
  CHECK(set.points[0].fallback);
  CHECK(set.points[0].row == 2);
  CHECK(m.contains(set.points[0].row, set.points[0].col));
}

TEST_CASE("extract_candidates: non-convex fallback centroid snaps into the mask") {
  const DenseMap f(5, 5, 2, 1.0);
  RegionMask m{5, 5, 0, std::vector<std::uint8_t>(25, 0)};
  m.bitmap[0] = 1;   // (0,0)
  m.bitmap[24] = 1;  // (4,4); centroid (2,2) lies outside
  std::vector<RegionMask> masks{m};
  const auto set = extract_candidates(f, masks, 3, 0);
  REQUIRE(set.points.size() == 1);
  CHECK(m.contains(set.points[0].row, set.points[0].col));
}

TEST_CASE("extract_candidates: two constant patches, J = 2, match brute-force nearest search") {
  DenseMap f(6, 8, 2);
  RegionMask m = rect_mask(6, 8, 0, 1, 5, 1, 7);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 8; ++c) {
      const bool left = c < 4;
      f.at(r, c, 0) = left ? 0.0 : 10.0;
      f.at(r, c, 1) = left ? 1.0 : -3.0;
    }
  std::vector<RegionMask> masks{m};
  const auto set = extract_candidates(f, masks, 2, 5);
  REQUIRE(set.points.size() == 2);
  // Brute force: first in-mask pixel (row-major) whose feature equals each patch value.
  std::vector<std::pair<std::size_t, std::size_t>> expected;
  for (double target : {0.0, 10.0}) {
    for (std::size_t r = 0; r < 6 && expected.size() < (target == 0.0 ? 1u : 2u); ++r)
      for (std::size_t c = 0; c < 8; ++c)
        if (m.contains(r, c) && f.at(r, c, 0) == target) {
          expected.emplace_back(r, c);
          break;
        }
  }
  CHECK(set.points[0].row == expected[0].first);
  CHECK(set.points[0].col == expected[0].second);
  CHECK(set.points[1].row == expected[1].first);
  CHECK(set.points[1].col == expected[1].second);
  CHECK(set.points[0].col < 4);
  CHECK(set.points[1].col >= 4);
}

TEST_CASE("extract_candidates: invariants on random masks") {
  Rng rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t h = 8 + rng.index(6), w = 8 + rng.index(6);
    const DenseMap f = random_map(rng, h, w, 3);
    const std::size_t S = 1 + rng.index(4), J = 1 + rng.index(5);
    std::vector<RegionMask> masks;
    std::size_t expected = 0;
    for (std::size_t s = 0; s < S; ++s) {
      RegionMask m{h, w, S - 1 - s, std::vector<std::uint8_t>(h * w, 0)};
      const double density = rng.uniform(0.02, 0.5);
      for (auto& b : m.bitmap) b = rng.uniform() < density ? 1 : 0;
      if (m.pixel_count() == 0) m.bitmap[rng.index(h * w)] = 1;
      expected += m.pixel_count() >= J ? J : 1;
      masks.push_back(m);
    }
    const auto a = extract_candidates(f, masks, J, 99);
    const auto b = extract_candidates(f, masks, J, 99);
    CHECK(a.points.size() == expected);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      const Candidate& c = a.points[i];
      const RegionMask& m = *std::find_if(masks.begin(), masks.end(), [&](auto& mm) { return mm.region_id == c.region_id; });
      CHECK(m.contains(c.row, c.col));
      CHECK(c.row == b.points[i].row);
      CHECK(c.col == b.points[i].col);
      CHECK(c.descriptor == b.points[i].descriptor);
      if (i > 0) {
        const Candidate& prev = a.points[i - 1];
        CHECK((prev.region_id < c.region_id || (prev.region_id == c.region_id && prev.cluster_index < c.cluster_index)));
      }
      // Nearest-pixel fidelity: no in-mask pixel earlier in scan order ties, none is strictly closer.
      if (!c.fallback) {
        const double dc = numerics::squared_distance(f.pixel(c.row, c.col), c.center);
        for (std::size_t r = 0; r < h; ++r)
          for (std::size_t col = 0; col < w; ++col) {
            if (!m.contains(r, col)) continue;
            const double d = numerics::squared_distance(f.pixel(r, col), c.center);
            CHECK(d >= dc);
            if (d == dc) CHECK(r * w + col >= c.row * w + c.col);
          }
      }
    }
  }
}

TEST_CASE("extract_candidates: error paths") {
  const DenseMap f(4, 4, 2, 0.0);
  std::vector<RegionMask> empty_region{RegionMask{4, 4, 0, std::vector<std::uint8_t>(16, 0)}};
  CHECK_THROWS_AS(extract_candidates(f, empty_region, 2, 0), InvalidArgument);
  std::vector<RegionMask> none;
  CHECK_THROWS_AS(extract_candidates(f, none, 2, 0), InvalidArgument);
  std::vector<RegionMask> wrong{rect_mask(5, 4, 0, 0, 2, 0, 2)};
  CHECK_THROWS_AS(extract_candidates(f, wrong, 2, 0), InvalidArgument);
  std::vector<RegionMask> dup{rect_mask(4, 4, 0, 0, 2, 0, 2), rect_mask(4, 4, 0, 2, 4, 0, 2)};
  CHECK_THROWS_AS(extract_candidates(f, dup, 2, 0), InvalidArgument);
}

TEST_CASE("grid_to_image maps cell centers into the 448 frame") {
  CHECK(grid_to_image(0, 64, 448) == 3);
  CHECK(grid_to_image(63, 64, 448) == 444);
  CHECK(grid_to_image(0, 32, 448) == 7);
  CHECK(grid_to_image(5, 448, 448) == 5);
}
