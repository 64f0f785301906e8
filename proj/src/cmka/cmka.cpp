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

#include "mka/cmka/cmka.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mka/error.hpp"
#include "mka/numerics/kmeans.hpp"

namespace mka::cmka {

namespace {

void check_row(std::span<const double> weights_row, const CandidateKeypointSet& candidates) {
  if (weights_row.size() != candidates.max_slots()) {
    throw InvalidArgument("selection row has " + std::to_string(weights_row.size()) + " entries, expected " +
                          std::to_string(candidates.max_slots()));
  }
  for (const Candidate& c : candidates.points) {
    if (candidates.slot(c) >= weights_row.size()) throw InvalidArgument("candidate slot outside the weight row");
  }
}

}  // namespace

SelectedKeypoints select_keypoints(std::span<const double> weights_row, const CandidateKeypointSet& candidates) {
  if (candidates.points.size() < 3) {
    throw InsufficientCandidates("need at least 3 candidates, have " + std::to_string(candidates.points.size()));
  }
  check_row(weights_row, candidates);
  std::vector<std::size_t> order(candidates.points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return weights_row[candidates.slot(candidates.points[a])] > weights_row[candidates.slot(candidates.points[b])];
  });
  SelectedKeypoints out;
  for (std::size_t i = 0; i < 3; ++i) {
    out.candidate_index[i] = order[i];
    out.points[i] = candidates.points[order[i]];
  }
  return out;
}

std::vector<std::size_t> disc_pixels(std::size_t height, std::size_t width, std::size_t row, std::size_t col,
                                     double r) {
  if (row >= height || col >= width) throw InvalidArgument("disc centre outside the grid");
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("disc radius must be finite and non-negative");
  const long reach = static_cast<long>(std::floor(r));
  const double r2 = r * r;
  std::vector<std::size_t> out;
  for (long dr = -reach; dr <= reach; ++dr) {
    const long rr = static_cast<long>(row) + dr;
    if (rr < 0 || rr >= static_cast<long>(height)) continue;
    for (long dc = -reach; dc <= reach; ++dc) {
      const long cc = static_cast<long>(col) + dc;
      if (cc < 0 || cc >= static_cast<long>(width)) continue;
      if (static_cast<double>(dr * dr + dc * dc) <= r2) {
        out.push_back(static_cast<std::size_t>(rr) * width + static_cast<std::size_t>(cc));
      }
    }
  }
  return out;
}

KeypointFeature extract_region_feature(const DenseMap& f, std::size_t row, std::size_t col, double r) {
  const auto pixels = disc_pixels(f.height, f.width, row, col, r);
  KeypointFeature out;
  out.vector.assign(f.channels, 0.0);
  for (std::size_t p : pixels) {
    const auto v = f.pixel(p);
    for (std::size_t ch = 0; ch < f.channels; ++ch) out.vector[ch] += v[ch];
  }
  const double inv = 1.0 / static_cast<double>(pixels.size());
  for (double& v : out.vector) v *= inv;
  out.row = row;
  out.col = col;
  out.radius_used = r;
  return out;
}

std::vector<double> aggregate_keypoint_features(std::span<const KeypointFeature> features, const Linear& proj) {
  if (features.size() != 3) throw InvalidArgument("aggregate_keypoint_features expects three features");
  std::vector<double> out(proj.out_dim(), 0.0);
  for (const KeypointFeature& k : features) {
    if (k.vector.size() != proj.in_dim()) throw InvalidArgument("keypoint feature does not match proj input");
    const auto y = proj.forward(k.vector);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  }
  return out;
}

LossWithGrad cosine_loss(std::span<const double> f_op, std::span<const double> f_gk) {
  if (f_op.size() != f_gk.size()) throw InvalidArgument("cosine_loss: dimension mismatch");
  const double na = numerics::norm(f_op);
  const double nb = numerics::norm(f_gk);
  if (!(na > 0.0) || !(nb > 0.0) || !std::isfinite(na) || !std::isfinite(nb)) {
    throw NumericError("cosine_loss: zero-norm or non-finite vector");
  }
  const double d = numerics::dot(f_op, f_gk);
  const double cos = d / (na * nb);
  LossWithGrad out;
  out.loss = 1.0 - cos;
  out.grad.resize(f_gk.size());
  // d cos / d b = a / (|a||b|) - cos * b / |b|^2
  for (std::size_t i = 0; i < f_gk.size(); ++i) {
    out.grad[i] = -(f_op[i] / (na * nb) - cos * f_gk[i] / (nb * nb));
  }
  return out;
}

LossWithGrad classification_loss(std::span<const double> scores, std::size_t label) {
  if (scores.size() < 2) throw InvalidArgument("classification_loss needs at least two classes");
  if (label >= scores.size()) throw InvalidArgument("classification_loss: label out of range");
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - top);
  const double lse = top + std::log(sum);
  LossWithGrad out;
  out.loss = lse - scores[label];
  out.grad.resize(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) out.grad[k] = std::exp(scores[k] - lse);
  out.grad[label] -= 1.0;
  return out;
}

SoftSelection soft_select(std::span<const double> weights_row, const CandidateKeypointSet& candidates,
                          double temperature) {
  if (!(temperature > 0.0)) throw InvalidArgument("soft selection temperature must be positive");
  if (candidates.points.empty()) throw InsufficientCandidates("soft selection over an empty candidate set");
  check_row(weights_row, candidates);
  SoftSelection out;
  out.attention.resize(candidates.points.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < candidates.points.size(); ++n) {
    out.attention[n] = weights_row[candidates.slot(candidates.points[n])] / temperature;
    top = std::max(top, out.attention[n]);
  }
  double sum = 0.0;
  for (double& a : out.attention) {
    a = std::exp(a - top);
    sum += a;
  }
  for (double& a : out.attention) a /= sum;
  return out;
}

std::vector<double> soft_aggregate(const SoftSelection& selection, std::span<const std::vector<double>> features,
                                   const Linear& proj) {
  if (features.size() != selection.attention.size()) throw InvalidArgument("soft_aggregate: feature count mismatch");
  std::vector<double> mixed(proj.in_dim(), 0.0);
  for (std::size_t n = 0; n < features.size(); ++n) {
    if (features[n].size() != proj.in_dim()) throw InvalidArgument("soft_aggregate: feature dimension mismatch");
    for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] += selection.attention[n] * features[n][i];
  }
  auto y = proj.forward(mixed);
  for (double& v : y) v *= 3.0;
  return y;
}

SoftAggregateGrad soft_aggregate_backward(std::span<const double> weights_row, const CandidateKeypointSet& candidates,
                                          double temperature, const SoftSelection& selection,
                                          std::span<const std::vector<double>> features, const Linear& proj,
                                          std::span<const double> grad_f_gk, Linear& grad_proj) {
  const std::size_t n_cand = features.size();
  const std::size_t d = proj.in_dim();
  std::vector<double> mixed(d, 0.0);
  for (std::size_t n = 0; n < n_cand; ++n) {
    for (std::size_t i = 0; i < d; ++i) mixed[i] += selection.attention[n] * features[n][i];
  }
  std::vector<double> g3(grad_f_gk.begin(), grad_f_gk.end());
  for (double& v : g3) v *= 3.0;
  const auto g_mixed = proj.backward(mixed, g3, grad_proj);

  SoftAggregateGrad out;
  out.weights_row.assign(weights_row.size(), 0.0);
  out.features.resize(n_cand);
  std::vector<double> g_att(n_cand);
  double weighted = 0.0;
  for (std::size_t n = 0; n < n_cand; ++n) {
    g_att[n] = numerics::dot(g_mixed, features[n]);
    weighted += selection.attention[n] * g_att[n];
    out.features[n].resize(d);
    for (std::size_t i = 0; i < d; ++i) out.features[n][i] = selection.attention[n] * g_mixed[i];
  }
  for (std::size_t n = 0; n < n_cand; ++n) {
    out.weights_row[candidates.slot(candidates.points[n])] +=
        selection.attention[n] * (g_att[n] - weighted) / temperature;
  }
  return out;
}

Prototype extract_prototype(const DenseMap& exo, const DenseMap& localization, std::size_t label,
                            const PrototypeOptions& options) {
  if (exo.height != localization.height || exo.width != localization.width) {
    throw InvalidArgument("extract_prototype: localization map does not match the exo grid");
  }
  if (label >= localization.channels) throw InvalidArgument("extract_prototype: label out of range");
  const std::size_t n_pix = exo.pixel_count();
  if (n_pix == 0) throw EmptyPrototype("extract_prototype: empty feature map");

  double mean = 0.0;
  for (std::size_t p = 0; p < n_pix; ++p) mean += localization.data[p * localization.channels + label];
  mean /= static_cast<double>(n_pix);
  const double threshold = mean - 1e-12 * (std::abs(mean) + 1.0);

  std::vector<std::size_t> selected;
  for (std::size_t p = 0; p < n_pix; ++p) {
    const double a = localization.data[p * localization.channels + label];
    if (std::isfinite(a) && a >= threshold) selected.push_back(p);
  }
  if (selected.empty()) throw EmptyPrototype("extract_prototype: no pixel reaches the activation mean");

  const std::size_t d = exo.channels;
  numerics::SampleMatrix x(selected.size(), d);
  std::vector<double> masked_mean(d, 0.0);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const auto v = exo.pixel(selected[i]);
    for (std::size_t ch = 0; ch < d; ++ch) {
      x(i, ch) = v[ch];
      masked_mean[ch] += v[ch];
    }
  }
  for (double& v : masked_mean) v /= static_cast<double>(selected.size());
  const double mean_norm = numerics::norm(masked_mean);
  if (!(mean_norm > 0.0)) throw EmptyPrototype("extract_prototype: masked features average to zero");

  const std::size_t k = std::min(options.clusters, selected.size());
  const auto clusters =
      numerics::kmeans_best_of(x, k, options.seed + label, static_cast<int>(options.restarts));

  std::size_t best = 0;
  double best_cos = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const auto center = clusters.centers.row(c);
    const double cn = numerics::norm(center);
    if (!(cn > 0.0)) continue;
    const double cos = numerics::dot(center, masked_mean) / (cn * mean_norm);
    if (cos > best_cos) {
      best_cos = cos;
      best = c;
    }
  }
  if (best_cos == -std::numeric_limits<double>::infinity()) {
    throw EmptyPrototype("extract_prototype: every cluster center is zero");
  }
  Prototype out;
  const auto center = clusters.centers.row(best);
  out.vector.assign(center.begin(), center.end());
  out.mask_pixels = selected.size();
  return out;
}

}  // namespace mka::cmka
