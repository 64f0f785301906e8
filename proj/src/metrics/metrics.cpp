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

#include "mka/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mka/error.hpp"
#include "mka/numerics/kernels.hpp"

namespace mka::metrics {

namespace {

constexpr double kEps = 1e-12;

void check_pair(const Heatmap& a, const Heatmap& b, const char* op) {
  if (a.channels != 1 || b.channels != 1) throw InvalidArgument(std::string(op) + ": heatmaps must have one channel");
  if (a.height != b.height || a.width != b.width) throw InvalidArgument(std::string(op) + ": shape mismatch");
  if (a.data.empty()) throw InvalidArgument(std::string(op) + ": empty heatmap");
  for (const Heatmap* m : {&a, &b}) {
    for (double v : m->data) {
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument(std::string(op) + ": values must be finite and >= 0");
    }
  }
}

double mass(const Heatmap& m) {
  double s = 0.0;
  for (double v : m.data) s += v;
  return s;
}

std::vector<double> smoothed(const Heatmap& m) {
  std::vector<double> out(m.data.size());
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = m.data[i] + kEps;
    s += out[i];
  }
  for (double& v : out) v /= s;
  return out;
}

}  // namespace

double kld(const Heatmap& pred, const Heatmap& gt) {
  check_pair(pred, gt, "kld");
  if (!(mass(gt) > 0.0)) throw InvalidArgument("kld: ground truth has no mass");
  const auto p = smoothed(pred);
  const auto q = smoothed(gt);
  double out = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) out += q[i] * std::log(q[i] / p[i]);
  return out;
}

double sim(const Heatmap& pred, const Heatmap& gt) {
  check_pair(pred, gt, "sim");
  const double mp = mass(pred), mg = mass(gt);
  if (!(mp > 0.0) || !(mg > 0.0)) throw InvalidArgument("sim: both maps need positive mass");
  double out = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) out += std::min(pred.data[i] / mp, gt.data[i] / mg);
  return out;
}

double nss(const Heatmap& pred, const Heatmap& fixations) {
  if (pred.channels != 1 || fixations.channels != 1 || pred.height != fixations.height ||
      pred.width != fixations.width) {
    throw InvalidArgument("nss: shape mismatch");
  }
  std::size_t count = 0;
  for (double f : fixations.data) count += f != 0.0 ? 1 : 0;
  if (count == 0) throw InvalidArgument("nss: no fixations");
  const auto [lo, hi] = std::minmax_element(pred.data.begin(), pred.data.end());
  if (*lo == *hi) return 0.0;
  const double n = static_cast<double>(pred.data.size());
  double mean = 0.0;
  for (double v : pred.data) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : pred.data) var += (v - mean) * (v - mean);
  var /= n;
  if (!std::isfinite(var)) throw InvalidArgument("nss: prediction is not finite");
  const double sd = std::sqrt(var);
  if (!(sd > 0.0)) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    if (fixations.data[i] != 0.0) total += (pred.data[i] - mean) / sd;
  }
  return total / static_cast<double>(count);
}

Heatmap fixations_from_gt(const Heatmap& gt, double threshold) {
  if (gt.channels != 1 || gt.data.empty()) throw InvalidArgument("fixations_from_gt: expected a non-empty heatmap");
  const auto [lo, hi] = std::minmax_element(gt.data.begin(), gt.data.end());
  Heatmap out(gt.height, gt.width, 1);
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < gt.data.size(); ++i) out.data[i] = (gt.data[i] - *lo) / range > threshold ? 1.0 : 0.0;
  return out;
}

Heatmap gaussian_gt_heatmap(std::span<const PixelCoord> keypoints, double sigma, std::size_t height,
                            std::size_t width) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("gaussian_gt_heatmap: sigma must be positive");
  if (height == 0 || width == 0) throw InvalidArgument("gaussian_gt_heatmap: empty shape");
  std::vector<kernels::GaussianPeak> peaks;
  for (const auto& k : keypoints) {
    if (!(k.row >= 0.0 && k.row <= static_cast<double>(height - 1) && k.col >= 0.0 &&
          k.col <= static_cast<double>(width - 1))) {
      throw InvalidArgument("gaussian_gt_heatmap: keypoint outside the map");
    }
    peaks.push_back({k.row, k.col});
  }
  return kernels::omp::gaussian_max_map(height, width, peaks, sigma);
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) ||
      !std::isfinite(cy)) {
    throw InvalidArgument("camera intrinsics need positive focal lengths");
  }
}

namespace {

kgt::Vec3 pinhole(std::size_t row, std::size_t col, double d, const CameraIntrinsics& intr) {
  return {(static_cast<double>(col) - intr.cx) * d / intr.fx, (static_cast<double>(row) - intr.cy) * d / intr.fy, d};
}

bool valid_depth(double d) { return std::isfinite(d) && d > 0.0; }

void check_pixel(std::size_t row, std::size_t col, const DepthImage& depth) {
  if (depth.depth.size() != depth.height * depth.width) throw InvalidArgument("depth image has the wrong size");
  if (row >= depth.height || col >= depth.width) throw InvalidArgument("keypoint outside the depth image");
}

}  // namespace

kgt::Vec3 project_to_3d(std::size_t row, std::size_t col, const DepthImage& depth, const CameraIntrinsics& intr) {
  intr.validate();
  check_pixel(row, col, depth);
  const double d = depth.at(row, col);
  if (!valid_depth(d)) {
    throw InvalidDepth("no valid depth at (" + std::to_string(row) + ", " + std::to_string(col) + ")");
  }
  return pinhole(row, col, d, intr);
}

kgt::Vec3 project_to_3d_with_fallback(std::size_t row, std::size_t col, const DepthImage& depth,
                                      const CameraIntrinsics& intr) {
  intr.validate();
  check_pixel(row, col, depth);
  if (valid_depth(depth.at(row, col))) return pinhole(row, col, depth.at(row, col), intr);
  std::vector<double> window;
  const std::size_t r0 = row >= 2 ? row - 2 : 0, c0 = col >= 2 ? col - 2 : 0;
  const std::size_t r1 = std::min(depth.height - 1, row + 2), c1 = std::min(depth.width - 1, col + 2);
  for (std::size_t r = r0; r <= r1; ++r) {
    for (std::size_t c = c0; c <= c1; ++c) {
      if (valid_depth(depth.at(r, c))) window.push_back(depth.at(r, c));
    }
  }
  if (window.empty()) {
    throw InvalidDepth("no valid depth in the 5x5 window around (" + std::to_string(row) + ", " +
                       std::to_string(col) + ")");
  }
  std::sort(window.begin(), window.end());
  const std::size_t m = window.size() / 2;
  const double d = window.size() % 2 == 1 ? window[m] : 0.5 * (window[m - 1] + window[m]);
  return pinhole(row, col, d, intr);
}

double tpc(std::span<const kgt::Vec3, 3> keypoints, std::span<const ContactRegion3D, 3> regions) {
  int hits = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(regions[i].radius > 0.0)) throw InvalidArgument("contact region radius must be positive");
    if (kgt::norm3(kgt::sub(keypoints[i], regions[i].center)) <= regions[i].radius) ++hits;
  }
  return static_cast<double>(hits) / 3.0;
}

std::string format_percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", ratio * 100.0);
  std::string s(buf);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  if (s == "-0") s = "0";
  return s;
}

GroundingScores score_heatmaps(const Heatmap& pred, const Heatmap& gt) {
  return {kld(pred, gt), sim(pred, gt), nss(pred, fixations_from_gt(gt))};
}

}  // namespace mka::metrics
