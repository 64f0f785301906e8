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

#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mka/error.hpp"
#include "mka/metrics/metrics.hpp"
#include "mka/numerics/rng.hpp"

using namespace mka;
using namespace mka::metrics;
using numerics::Rng;

namespace {

Heatmap row_map(std::vector<double> v) {
  Heatmap m(1, v.size(), 1);
  m.data = std::move(v);
  return m;
}

Heatmap random_map(Rng& rng, std::size_t h, std::size_t w) {
  Heatmap m(h, w, 1);
  for (double& v : m.data) v = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, 3.0);
  m.data[rng.index(m.data.size())] = 1.0;
  return m;
}

}  // namespace

TEST_CASE("kld: identical maps and the two-cell example") {
  Rng rng(1);
  const Heatmap p = random_map(rng, 7, 5);
  CHECK(std::abs(kld(p, p)) < 1e-9);
  CHECK(std::abs(kld(row_map({0.5, 0.5}), row_map({1.0, 0.0})) - std::log(2.0)) < 1e-9);
  CHECK(kld(row_map({0.5, 0.5}), row_map({1.0, 0.0})) == doctest::Approx(0.6931).epsilon(1e-4));
}

TEST_CASE("kld: Gibbs inequality on random pairs") {
  Rng rng(2);
  for (int t = 0; t < 300; ++t) {
    const Heatmap p = random_map(rng, 4, 6), q = random_map(rng, 4, 6);
    CHECK(kld(p, q) >= -1e-12);
  }
}

TEST_CASE("kld: errors") {
  CHECK_THROWS_AS(kld(row_map({1, 2}), row_map({1, 2, 3})), InvalidArgument);
  CHECK_THROWS_AS(kld(row_map({1, 2}), row_map({0, 0})), InvalidArgument);
  CHECK_THROWS_AS(kld(row_map({-1, 2}), row_map({1, 1})), InvalidArgument);
}

TEST_CASE("sim: identity, disjoint supports and the two-cell example") {
  Rng rng(3);
  const Heatmap p = random_map(rng, 6, 6);
  CHECK(std::abs(sim(p, p) - 1.0) < 1e-12);
  CHECK(sim(row_map({1, 0, 0}), row_map({0, 2, 3})) == 0.0);
  CHECK(std::abs(sim(row_map({0.5, 0.5}), row_map({1.0, 0.0})) - 0.5) < 1e-12);
  CHECK_THROWS_AS(sim(row_map({0, 0}), row_map({1, 0})), InvalidArgument);
}

TEST_CASE("sim: range and symmetry on random pairs") {
  Rng rng(4);
  for (int t = 0; t < 300; ++t) {
    const Heatmap p = random_map(rng, 5, 5), q = random_map(rng, 5, 5);
    const double a = sim(p, q);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0 + 1e-12);
    CHECK(std::abs(a - sim(q, p)) < 1e-12);
  }
}

TEST_CASE("nss: constant prediction, single peak and full coverage") {
  Heatmap fix(10, 10, 1);
  fix.data[37] = 1.0;
  CHECK(nss(Heatmap(10, 10, 1, 0.4), fix) == 0.0);

  Heatmap pred(10, 10, 1, 0.0);
  pred.data[37] = 1.0;
  const double sd = std::sqrt(0.01 * 0.99);
  CHECK(std::abs(nss(pred, fix) - (1.0 - 0.01) / sd) < 1e-9);
  CHECK(nss(pred, fix) == doctest::Approx(9.95).epsilon(1e-3));

  Rng rng(5);
  const Heatmap r = random_map(rng, 10, 10);
  CHECK(std::abs(nss(r, Heatmap(10, 10, 1, 1.0))) < 1e-9);
  CHECK_THROWS_AS(nss(r, Heatmap(10, 10, 1, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(nss(r, Heatmap(10, 9, 1, 1.0)), InvalidArgument);
}

TEST_CASE("nss: invariant under positive affine maps of the prediction") {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const Heatmap p = random_map(rng, 6, 7);
    Heatmap fix(6, 7, 1);
    for (double& v : fix.data) v = rng.uniform() < 0.3 ? 1.0 : 0.0;
    fix.data[0] = 1.0;
    const double a = rng.uniform(0.01, 50.0), b = rng.uniform(-5.0, 5.0);
    Heatmap q = p;
    for (double& v : q.data) v = a * v + b;
    CHECK(std::abs(nss(p, fix) - nss(q, fix)) < 1e-9);
  }
}

TEST_CASE("fixations_from_gt thresholds the min-max normalized map") {
  const Heatmap gt = row_map({0.0, 0.05, 0.1, 0.11, 0.5, 1.0});
  const Heatmap f = fixations_from_gt(gt);
  CHECK(f.data == std::vector<double>{0, 0, 0, 1, 1, 1});
  CHECK(fixations_from_gt(row_map({2, 2})).data == std::vector<double>{0, 0});
}

TEST_CASE("gaussian_gt_heatmap: peak, symmetry and the two-peak midpoint") {
  const std::array<PixelCoord, 1> one = {PixelCoord{7, 3}};
  const Heatmap m = gaussian_gt_heatmap(one, 2.0, 15, 11);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    if (m.data[i] > m.data[arg]) arg = i;
  }
  CHECK(arg == 7 * 11 + 3);
  CHECK(m.data[arg] == 1.0);

  const std::array<PixelCoord, 1> centre = {PixelCoord{6, 6}};
  const Heatmap s = gaussian_gt_heatmap(centre, 3.0, 13, 13);
  for (std::size_t r = 0; r < 13; ++r) {
    for (std::size_t c = 0; c < 13; ++c) {
      CHECK(s.at(r, c, 0) == s.at(12 - r, c, 0));
      CHECK(s.at(r, c, 0) == s.at(r, 12 - c, 0));
      CHECK(s.at(r, c, 0) == s.at(c, r, 0));
    }
  }

  const double sigma = 2.0;
  const std::array<PixelCoord, 2> two = {PixelCoord{5, 5}, PixelCoord{5, 25}};
  const Heatmap t = gaussian_gt_heatmap(two, sigma, 11, 31);
  CHECK(t.at(5, 5, 0) == 1.0);
  CHECK(t.at(5, 25, 0) == 1.0);
  CHECK(std::abs(t.at(5, 15, 0) - std::exp(-12.5)) < 1e-15);
  CHECK(t.at(5, 15, 0) == doctest::Approx(3.7e-6).epsilon(0.01));
}

TEST_CASE("gaussian_gt_heatmap: values in (0, 1] and decreasing with distance to the nearest keypoint") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    std::vector<PixelCoord> kps;
    for (int k = 0; k < 3; ++k) kps.push_back({static_cast<double>(rng.index(20)), static_cast<double>(rng.index(24))});
    const Heatmap m = gaussian_gt_heatmap(kps, 4.0, 20, 24);
    std::vector<std::pair<double, double>> by_distance;
    for (std::size_t r = 0; r < 20; ++r) {
      for (std::size_t c = 0; c < 24; ++c) {
        double best = 1e300;
        for (const auto& k : kps) best = std::min(best, (r - k.row) * (r - k.row) + (c - k.col) * (c - k.col));
        const double v = m.at(r, c, 0);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
        by_distance.emplace_back(best, v);
      }
    }
    std::sort(by_distance.begin(), by_distance.end());
    for (std::size_t i = 1; i < by_distance.size(); ++i) {
      if (by_distance[i].first > by_distance[i - 1].first) CHECK(by_distance[i].second < by_distance[i - 1].second);
      if (by_distance[i].first == by_distance[i - 1].first) CHECK(by_distance[i].second == by_distance[i - 1].second);
    }
  }
  const std::array<PixelCoord, 1> out = {PixelCoord{20, 0}};
  CHECK_THROWS_AS(gaussian_gt_heatmap(out, 4.0, 20, 24), InvalidArgument);
  CHECK_THROWS_AS(gaussian_gt_heatmap(std::span<const PixelCoord>{}, 0.0, 20, 24), InvalidArgument);
}

TEST_CASE("project_to_3d: pinhole examples") {
  DepthImage d{480, 640, std::vector<double>(480 * 640, 1.0)};
  const CameraIntrinsics intr{600, 600, 320, 240};
  const auto c = project_to_3d(240, 320, d, intr);
  CHECK(c == kgt::Vec3{0, 0, 1});
  d.depth[240 * 640 + 920 - 600] = 2.0;  // u - cx = fx needs u = 920; use a wider image below
  DepthImage wide{10, 1300, std::vector<double>(10 * 1300, 2.0)};
  const CameraIntrinsics wi{600, 600, 320, 5};
  CHECK(std::abs(project_to_3d(5, 920, wide, wi)[0] - 2.0) < 1e-12);
  d.depth[300 * 640 + 380] = 0.5;
  const auto p = project_to_3d(300, 380, d, intr);
  CHECK(std::abs(p[0] - 0.05) < 1e-12);
  CHECK(std::abs(p[1] - 0.05) < 1e-12);
  CHECK(p[2] == 0.5);
}

TEST_CASE("project_to_3d: reprojection recovers the pixel") {
  Rng rng(8);
  DepthImage d{30, 40, std::vector<double>(1200)};
  for (double& v : d.depth) v = rng.uniform(0.2, 3.0);
  const CameraIntrinsics intr{rng.uniform(300, 900), rng.uniform(300, 900), 19.5, 14.2};
  for (std::size_t r = 0; r < 30; ++r) {
    for (std::size_t c = 0; c < 40; ++c) {
      const auto x = project_to_3d(r, c, d, intr);
      CHECK(std::abs(intr.fx * x[0] / x[2] + intr.cx - static_cast<double>(c)) < 1e-9);
      CHECK(std::abs(intr.fy * x[1] / x[2] + intr.cy - static_cast<double>(r)) < 1e-9);
    }
  }
}

TEST_CASE("project_to_3d: invalid depth and the 5x5 median fallback") {
  DepthImage d{7, 7, std::vector<double>(49, 0.0)};
  const CameraIntrinsics intr{100, 100, 3, 3};
  CHECK_THROWS_AS(project_to_3d(3, 3, d, intr), InvalidDepth);
  CHECK_THROWS_AS(project_to_3d_with_fallback(3, 3, d, intr), InvalidDepth);
  d.depth[1 * 7 + 1] = 1.0;
  d.depth[5 * 7 + 5] = 3.0;
  d.depth[2 * 7 + 4] = 2.0;
  d.depth[0] = 100.0;  // outside the window
  CHECK(project_to_3d_with_fallback(3, 3, d, intr)[2] == 2.0);
  d.depth[4 * 7 + 2] = 2.5;
  CHECK(project_to_3d_with_fallback(3, 3, d, intr)[2] == 2.25);
  d.depth[3 * 7 + 3] = 0.7;
  CHECK(project_to_3d_with_fallback(3, 3, d, intr)[2] == 0.7);
  CHECK_THROWS_AS(project_to_3d(7, 0, d, intr), InvalidArgument);
  CHECK_THROWS_AS(project_to_3d(0, 0, d, CameraIntrinsics{0, 1, 0, 0}), InvalidArgument);
}

TEST_CASE("tpc: hit ratios and their reported form") {
  const std::array<ContactRegion3D, 3> regions = {ContactRegion3D{{0, 0, 0}, 0.01},
                                                  ContactRegion3D{{0.1, 0, 0}, 0.01},
                                                  ContactRegion3D{{0, 0.1, 0}, 0.01}};
  const std::array<kgt::Vec3, 3> all = {kgt::Vec3{0.005, 0, 0}, kgt::Vec3{0.1, 0.01, 0}, kgt::Vec3{0, 0.1, 0.002}};
  CHECK(tpc(all, regions) == 1.0);
  CHECK(format_percent(tpc(all, regions)) == "100");
  const std::array<kgt::Vec3, 3> two = {kgt::Vec3{0.005, 0, 0}, kgt::Vec3{0.1, 0, 0}, kgt::Vec3{0, 0, 0}};
  CHECK(tpc(two, regions) == 2.0 / 3.0);
  CHECK(format_percent(tpc(two, regions)) == "66.7");
  const std::array<kgt::Vec3, 3> none = {kgt::Vec3{1, 0, 0}, kgt::Vec3{1, 0, 0}, kgt::Vec3{1, 0, 0}};
  CHECK(tpc(none, regions) == 0.0);
  CHECK(format_percent(0.0) == "0");
  CHECK(format_percent(1.0 / 3.0) == "33.3");
  CHECK(format_percent(0.6) == "60");
}

TEST_CASE("score_heatmaps: a perfect prediction") {
  const std::array<PixelCoord, 3> kps = {PixelCoord{10, 10}, PixelCoord{30, 12}, PixelCoord{20, 40}};
  const Heatmap gt = gaussian_gt_heatmap(kps, 5.0, 48, 48);
  const auto s = score_heatmaps(gt, gt);
  CHECK(std::abs(s.kld) < 1e-9);
  CHECK(std::abs(s.sim - 1.0) < 1e-9);
  CHECK(s.nss > 0.0);
}
