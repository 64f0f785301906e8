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

#include "mka/cmka/trainer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "mka/error.hpp"
#include "mka/numerics/rng.hpp"

namespace mka::cmka {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning rate must be finite and non-negative");
  }
  if (epochs < 1) throw InvalidArgument("epochs must be at least 1");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InvalidArgument("radius must be finite and non-negative");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw InvalidArgument("temperature must be positive");
}

SampleLoss sample_loss(const CmkaModel& model, const TrainingSample& sample, const TrainConfig& config,
                       CmkaGrad* grad, const Prototype* frozen_prototype) {
  if (sample.label >= model.selection.class_count()) throw InvalidArgument("sample label outside the vocabulary");
  const auto& cands = sample.candidates;
  if (cands.points.empty()) throw InsufficientCandidates("training sample has no candidates");
  if (cands.grid_height != sample.ego[0].height || cands.grid_width != sample.ego[0].width) {
    throw InvalidArgument("candidate grid does not match the ego feature grid");
  }

  lmsc::FusionTrace fusion_trace;
  const DenseMap f = lmsc::fuse_layers(sample.ego, model.fusion, grad != nullptr ? &fusion_trace : nullptr);
  if (!f.all_finite()) throw NumericError("fused features are not finite");

  std::vector<std::vector<std::size_t>> discs(cands.points.size());
  std::vector<std::vector<double>> features(cands.points.size());
  for (std::size_t n = 0; n < cands.points.size(); ++n) {
    const Candidate& c = cands.points[n];
    discs[n] = disc_pixels(f.height, f.width, c.row, c.col, config.radius);
    features[n] = extract_region_feature(f, c.row, c.col, config.radius).vector;
  }

  CamTrace cam_trace;
  const CamOutput cam = cam_forward(sample.exo, model.cam, grad != nullptr ? &cam_trace : nullptr);
  if (!cam.localization.all_finite()) throw NumericError("class activation map is not finite");
  const LossWithGrad cls = classification_loss(cam.scores, sample.label);
  const Prototype prototype =
      frozen_prototype != nullptr ? *frozen_prototype : extract_prototype(sample.exo, cam.localization, sample.label);

  const auto row = model.selection.row(sample.label);
  const SoftSelection selection = soft_select(row, cands, config.temperature);
  const auto f_gk = soft_aggregate(selection, features, model.proj);
  const LossWithGrad cos = cosine_loss(prototype.vector, f_gk);

  if (grad != nullptr) {
    cam_backward(model.cam, cam_trace, cls.grad, grad->cam);
    const SoftAggregateGrad sg = soft_aggregate_backward(row, cands, config.temperature, selection, features,
                                                         model.proj, cos.grad, grad->proj);
    auto g_row = grad->selection.row(sample.label);
    for (std::size_t i = 0; i < g_row.size(); ++i) g_row[i] += sg.weights_row[i];

    DenseMap grad_f(f.height, f.width, f.channels);
    std::vector<bool> touched(f.pixel_count(), false);
    for (std::size_t n = 0; n < discs.size(); ++n) {
      const double inv = 1.0 / static_cast<double>(discs[n].size());
      for (std::size_t p : discs[n]) {
        touched[p] = true;
        for (std::size_t ch = 0; ch < f.channels; ++ch) grad_f.data[p * f.channels + ch] += sg.features[n][ch] * inv;
      }
    }
    lmsc::PixelGradients sparse;
    for (std::size_t p = 0; p < touched.size(); ++p) {
      if (!touched[p]) continue;
      const auto g = grad_f.pixel(p);
      sparse.emplace_back(p, std::vector<double>(g.begin(), g.end()));
    }
    lmsc::fuse_layers_backward(sample.ego, model.fusion, fusion_trace, sparse, grad->fusion);
  }
  return {cls.loss, cos.loss};
}

LossRecord evaluate(const CmkaModel& model, std::span<const TrainingSample> samples, const TrainConfig& config,
                    int epoch) {
  LossRecord rec;
  rec.epoch = epoch;
  for (const auto& s : samples) {
    const SampleLoss l = sample_loss(model, s, config);
    rec.classification += l.classification;
    rec.cosine += l.cosine;
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  rec.classification *= inv;
  rec.cosine *= inv;
  rec.total = rec.classification + rec.cosine;
  return rec;
}

namespace {

LossRecord checked_evaluate(const CmkaModel& model, std::span<const TrainingSample> samples, const TrainConfig& config,
                            int epoch) {
  LossRecord rec;
  try {
    rec = evaluate(model, samples, config, epoch);
  } catch (const NumericError& e) {
    throw TrainingDiverged(epoch, e.what());
  }
  if (!std::isfinite(rec.total)) throw TrainingDiverged(epoch, "non-finite loss");
  return rec;
}

}  // namespace

TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config, CmkaModel initial) {
  config.validate();
  initial.validate();
  if (samples.empty()) throw InvalidArgument("training set is empty");
  for (const auto& s : samples) {
    if (s.candidates.max_slots() != initial.selection.slot_count()) {
      throw InvalidArgument("candidate layout does not match the selection matrix width");
    }
  }

  TrainResult result;
  result.model = std::move(initial);
  result.history.push_back(checked_evaluate(result.model, samples, config, 0));

  std::vector<std::size_t> order(samples.size());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.shuffle) {
      numerics::Rng rng(numerics::mix_seed(config.seed, static_cast<std::uint64_t>(epoch)));
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    }
    for (std::size_t idx : order) {
      CmkaGrad grad = CmkaGrad::zeros_like(result.model);
      SampleLoss loss;
      try {
        loss = sample_loss(result.model, samples[idx], config, &grad);
      } catch (const NumericError& e) {
        throw TrainingDiverged(epoch, e.what());
      }
      if (!std::isfinite(loss.total())) throw TrainingDiverged(epoch, "non-finite loss");
      for (auto [p, g] : parameter_pairs(result.model, grad)) {
        *p -= config.learning_rate * *g;
        if (!std::isfinite(*p)) throw TrainingDiverged(epoch, "non-finite parameter after update");
      }
    }
    result.history.push_back(checked_evaluate(result.model, samples, config, epoch));
  }
  return result;
}

CandidateKeypointSet prepare_candidates(const std::array<DenseMap, lmsc::kFusedLayers>& ego,
                                        std::span<const lmsc::RegionMask> masks, const CmkaModel& model,
                                        const InferOptions& options) {
  if (masks.size() != model.regions) {
    throw InvalidArgument("model expects " + std::to_string(model.regions) + " regions, got " +
                          std::to_string(masks.size()));
  }
  const DenseMap f = lmsc::fuse_layers(ego, model.fusion);
  const DenseMap f_ms = lmsc::multiscale(f);
  const auto reduced = lmsc::reduce_features(f_ms, std::min(options.pca_dim, f_ms.channels));
  lmsc::ExtractOptions extract;
  extract.kmeans_restarts = options.kmeans_restarts;
  return lmsc::extract_candidates(reduced.map, masks, model.clusters, options.seed, extract);
}

InferResult infer(const std::array<DenseMap, lmsc::kFusedLayers>& ego, std::span<const lmsc::RegionMask> masks,
                  std::size_t affordance, const CmkaModel& model, const InferOptions& options,
                  std::size_t image_height, std::size_t image_width) {
  model.validate();
  if (affordance >= model.selection.class_count()) throw InvalidArgument("affordance index outside the vocabulary");
  InferResult out;
  out.candidates = prepare_candidates(ego, masks, model, options);
  out.selected = select_keypoints(model.selection.row(affordance), out.candidates);
  for (std::size_t i = 0; i < 3; ++i) {
    const Candidate& c = out.selected.points[i];
    out.image_points[i] = {lmsc::grid_to_image(c.row, out.candidates.grid_height, image_height),
                           lmsc::grid_to_image(c.col, out.candidates.grid_width, image_width)};
  }
  return out;
}

}  // namespace mka::cmka
