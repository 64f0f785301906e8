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

// The operations behind each CLI subcommand, kept free of argument parsing
// and file placement so tests can drive them directly.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mka/cmka/model.hpp"
#include "mka/cmka/trainer.hpp"
#include "mka/kgt/kgt.hpp"
#include "mka/metrics/metrics.hpp"
#include "mka/numerics/rng.hpp"
#include "mka/pipeline/config.hpp"
#include "mka/pipeline/manifest.hpp"

namespace mka::pipeline {

using numerics::DenseMap;

inline constexpr std::size_t kImageSize = 448;

struct LoadedSample {
  std::string id;
  std::size_t label = 0;
  std::array<DenseMap, 3> ego;  // aligned to the first layer's grid
  DenseMap exo;                 // last exo layer
  std::vector<lmsc::RegionMask> masks;
};

/// Loads the bundles and the first `regions` masks of one manifest sample.
/// Masks must match the ego feature grid.
LoadedSample load_sample(const Manifest& manifest, std::size_t index, std::size_t regions);

cmka::ModelShape model_shape(const RunConfig& config, const LoadedSample& sample, std::size_t classes);

// ---- train ----

cmka::TrainResult run_train(const Manifest& manifest, const RunConfig& config);
std::string loss_history_text(const std::vector<cmka::LossRecord>& history);
std::string loss_history_json(const std::vector<cmka::LossRecord>& history);

// ---- infer ----

struct CandidateRecord {
  std::size_t row = 0, col = 0;  // image frame
  std::size_t region = 0, cluster = 0;
  double weight = 0.0;
  bool fallback = false;
};

struct PredictionRecord {
  std::string id;
  std::string affordance;
  std::string error;           // empty on success
  std::string error_category;
  std::array<metrics::PixelCoord, 3> keypoints{};  // functional, little, wrist
  std::vector<CandidateRecord> candidates;

  bool ok() const { return error.empty(); }
};

struct Predictions {
  std::vector<PredictionRecord> records;
};

/// One record per evaluation sample, in manifest order. `affordance`
/// overrides every sample's own label.
Predictions run_infer(const Manifest& manifest, const cmka::CmkaModel& model, const RunConfig& config,
                      const std::optional<std::string>& affordance = std::nullopt);
std::string predictions_to_json(const Predictions& predictions);
Predictions predictions_from_json(const std::string& text);
std::string predictions_text(const Predictions& predictions);

// ---- eval ----

struct ImageScores {
  std::string id;
  std::string error;  // prediction failed or the sample has no GT keypoints
  metrics::GroundingScores scores;
  std::optional<double> tpc;
  std::string tpc_error;

  bool scored() const { return error.empty(); }
};

struct EvalReport {
  std::vector<ImageScores> images;
  metrics::GroundingScores mean;
  std::size_t scored = 0;
  std::optional<double> mean_tpc;
  std::size_t tpc_count = 0;
};

/// Predictions must list exactly the evaluation samples, in manifest order.
EvalReport run_eval(const Predictions& predictions, const Manifest& manifest, const RunConfig& config);
std::string eval_to_json(const EvalReport& report);
std::string eval_text(const EvalReport& report);

// ---- sweep ----

struct SweepCell {
  std::size_t regions = 0;
  std::size_t clusters = 0;
  std::string error;
  std::string error_category;
  metrics::GroundingScores mean;
  std::optional<double> mean_tpc;
  std::vector<cmka::LossRecord> history;

  bool ok() const { return error.empty(); }
};

struct SweepReport {
  std::vector<std::size_t> s_values;
  std::vector<std::size_t> j_values;
  std::vector<SweepCell> cells;  // S-major
  std::optional<std::size_t> best_kld, best_sim, best_nss;
  std::optional<std::size_t> best;  // most metric wins, ties to the lower KLD
};

/// Trains and evaluates one model per (S, J) cell. Cell failures are
/// recorded and the grid continues.
SweepReport run_sweep(const Manifest& manifest, const RunConfig& config, const std::vector<std::size_t>& s_values,
                      const std::vector<std::size_t>& j_values);
std::string sweep_to_json(const SweepReport& report);
std::string sweep_text(const SweepReport& report);

// ---- simulate-kgt ----

/// Object keypoints (k0, k1, k2) for one trial.
using TripleSampler = std::function<std::array<kgt::Vec3, 3>(numerics::Rng&)>;
/// Initial hand placement, applied to the hand triangle at rest.
using PoseSampler = std::function<kgt::RigidTransform(numerics::Rng&)>;

struct SimulationOptions {
  int trials = 1000;
  std::uint64_t seed = 0;
  kgt::HandModel hand;
  TripleSampler object_sampler;  // default: random triangle within 1 m
  PoseSampler hand_sampler;      // default: random rotation and translation
  int max_retries = 100;         // per trial
};

struct SimulationReport {
  int trials = 0;
  int retries = 0;
  double max_contact_error = 0.0;  // m
  double max_orthonormality_error = 0.0;
  double max_det_error = 0.0;
  double seconds = 0.0;
};

kgt::Mat3 random_rotation(numerics::Rng& rng);
/// Hand triangle with the wrist at the origin, functional on +x, little in
/// the upper xy half-plane.
kgt::ContactTriple rest_hand(const kgt::HandModel& hand);

/// Each trial solves for the grasp pose, moves the sampled hand with it and
/// measures how far the hand contacts land from the adjusted targets.
/// Degenerate samples are redrawn; a trial that exhausts its retries raises
/// DegenerateGeometry.
SimulationReport run_simulate_kgt(const SimulationOptions& options);
std::string simulation_to_json(const SimulationReport& report);
std::string simulation_text(const SimulationReport& report);

}  // namespace mka::pipeline
