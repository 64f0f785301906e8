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

#include "mka/pipeline/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>

#include "json.hpp"
#include "mka/error.hpp"
#include "mka/pipeline/formats.hpp"

namespace mka::pipeline {

using nlohmann::json;

namespace {

constexpr std::uint64_t kModelStream = 0x4d4f44454c;  // model initialization seed stream

cmka::InferOptions infer_options(const RunConfig& config) {
  cmka::InferOptions o;
  o.pca_dim = config.pca_dim;
  o.seed = config.seed();
  o.kmeans_restarts = config.kmeans_restarts;
  return o;
}

// Runs `body`, turning any failure into (message, category) for a record.
template <typename Body>
void isolate(Body&& body, std::string& error, std::string& category) {
  try {
    body();
  } catch (const Error& e) {
    error = e.what();
    category = category_name(e.category());
  } catch (const std::exception& e) {
    error = e.what();
    category = "internal";
  }
}

}  // namespace

LoadedSample load_sample(const Manifest& manifest, std::size_t index, std::size_t regions) {
  const ManifestSample& s = manifest.samples.at(index);
  if (s.masks.size() < regions) {
    throw InvalidArgument("sample " + s.id + " lists " + std::to_string(s.masks.size()) + " masks but " +
                          std::to_string(regions) + " regions are configured");
  }
  LoadedSample out;
  out.id = s.id;
  out.label = manifest.label_index(s.label);
  const FeatureBundle ego = load_bundle(manifest.resolve(s.ego));
  out.ego = align_layers(ego);
  FeatureBundle exo = load_bundle(manifest.resolve(s.exo));
  out.exo = std::move(exo.layers[2]);
  for (std::size_t m = 0; m < regions; ++m) {
    const std::string path = manifest.resolve(s.masks[m]);
    lmsc::RegionMask mask = load_mask(path);
    if (mask.height != out.ego[0].height || mask.width != out.ego[0].width) {
      throw InvalidArgument("mask " + path + " does not match the ego feature grid");
    }
    out.masks.push_back(std::move(mask));
  }
  return out;
}

cmka::ModelShape model_shape(const RunConfig& config, const LoadedSample& sample, std::size_t classes) {
  const std::size_t d_in = sample.ego[0].channels;
  cmka::ModelShape shape;
  shape.d_in = d_in;
  shape.d_proj = config.d_proj ? config.d_proj : d_in;
  shape.d_hidden = config.d_hidden ? config.d_hidden : d_in;
  shape.d_out = config.d_out ? config.d_out : d_in;
  shape.d_exo = sample.exo.channels;
  shape.d_cam = config.d_cam;
  shape.classes = classes;
  shape.regions = config.regions;
  shape.clusters = config.clusters;
  return shape;
}

// ---- train ----

cmka::TrainResult run_train(const Manifest& manifest, const RunConfig& config) {
  config.validate();
  const std::vector<std::size_t> indices = manifest.training_indices();
  if (indices.empty()) throw InvalidArgument("manifest has no training samples");

  std::vector<LoadedSample> loaded;
  loaded.reserve(indices.size());
  for (std::size_t i : indices) loaded.push_back(load_sample(manifest, i, config.regions));
  for (const LoadedSample& s : loaded) {
    if (s.exo.channels != loaded[0].exo.channels) {
      throw InvalidArgument("sample " + s.id + " has a different exo channel count");
    }
    if (s.ego[0].channels != loaded[0].ego[0].channels) {
      throw InvalidArgument("sample " + s.id + " has a different ego channel count");
    }
  }

  const cmka::ModelShape shape = model_shape(config, loaded[0], manifest.affordances.size());
  cmka::CmkaModel initial = cmka::CmkaModel::initialize(shape, numerics::mix_seed(config.seed(), kModelStream));

  std::vector<cmka::TrainingSample> samples(loaded.size());
  const cmka::InferOptions options = infer_options(config);
  std::vector<std::exception_ptr> failures(loaded.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    try {
      cmka::TrainingSample& t = samples[i];
      t.ego = loaded[i].ego;
      t.exo = loaded[i].exo;
      t.label = loaded[i].label;
      t.candidates = cmka::prepare_candidates(t.ego, loaded[i].masks, initial, options);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  return cmka::train(samples, config.train, std::move(initial));
}

std::string loss_history_text(const std::vector<cmka::LossRecord>& history) {
  std::string out = "epoch  classification  cosine  total\n";
  for (const auto& r : history) {
    char line[128];
    std::snprintf(line, sizeof(line), "%5d  %14.6f  %6.6f  %.6f\n", r.epoch, r.classification, r.cosine, r.total);
    out += line;
  }
  return out;
}

std::string loss_history_json(const std::vector<cmka::LossRecord>& history) {
  json rows = json::array();
  for (const auto& r : history) {
    rows.push_back({{"epoch", r.epoch}, {"classification", r.classification}, {"cosine", r.cosine}, {"total", r.total}});
  }
  return json{{"history", rows}}.dump(2) + "\n";
}

// ---- infer ----

Predictions run_infer(const Manifest& manifest, const cmka::CmkaModel& model, const RunConfig& config,
                      const std::optional<std::string>& affordance) {
  model.validate();
  if (model.selection.class_count() != manifest.affordances.size()) {
    throw VocabularyError("checkpoint has " + std::to_string(model.selection.class_count()) +
                          " affordance rows but the manifest vocabulary has " +
                          std::to_string(manifest.affordances.size()));
  }
  std::optional<std::size_t> forced;
  if (affordance) forced = manifest.label_index(*affordance);

  const std::vector<std::size_t> indices = manifest.evaluation_indices();
  const cmka::InferOptions options = infer_options(config);
  Predictions out;
  out.records.resize(indices.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t n = 0; n < indices.size(); ++n) {
    const ManifestSample& entry = manifest.samples[indices[n]];
    PredictionRecord& rec = out.records[n];
    rec.id = entry.id;
    const std::size_t label = forced ? *forced : manifest.label_index(entry.label);
    rec.affordance = manifest.affordances[label];
    isolate(
        [&] {
          const LoadedSample s = load_sample(manifest, indices[n], model.regions);
          const cmka::InferResult r = cmka::infer(s.ego, s.masks, label, model, options, kImageSize, kImageSize);
          for (std::size_t i = 0; i < 3; ++i) {
            rec.keypoints[i] = {static_cast<double>(r.image_points[i].row),
                                static_cast<double>(r.image_points[i].col)};
          }
          const auto& cands = r.candidates;
          for (const lmsc::Candidate& c : cands.points) {
            rec.candidates.push_back({lmsc::grid_to_image(c.row, cands.grid_height, kImageSize),
                                      lmsc::grid_to_image(c.col, cands.grid_width, kImageSize), c.region_id,
                                      c.cluster_index, model.selection.matrix(label, cands.slot(c)), c.fallback});
          }
        },
        rec.error, rec.error_category);
    if (!rec.ok()) rec.candidates.clear();
  }
  return out;
}

std::string predictions_to_json(const Predictions& p) {
  json records = json::array();
  for (const PredictionRecord& r : p.records) {
    json jr{{"id", r.id}, {"affordance", r.affordance}};
    if (!r.ok()) {
      jr["error"] = r.error;
      jr["error_category"] = r.error_category;
    } else {
      json kps = json::array();
      for (std::size_t i = 0; i < 3; ++i) {
        kps.push_back({{"slot", cmka::kSlotNames[i]}, {"row", r.keypoints[i].row}, {"col", r.keypoints[i].col}});
      }
      jr["keypoints"] = kps;
      json cands = json::array();
      for (const CandidateRecord& c : r.candidates) {
        cands.push_back({{"row", c.row}, {"col", c.col}, {"region", c.region}, {"cluster", c.cluster},
                         {"weight", c.weight}, {"fallback", c.fallback}});
      }
      jr["candidates"] = cands;
    }
    records.push_back(jr);
  }
  return json{{"version", 1}, {"records", records}}.dump(2) + "\n";
}

Predictions predictions_from_json(const std::string& text) {
  Predictions p;
  try {
    const json root = json::parse(text);
    for (const json& jr : root.at("records")) {
      PredictionRecord r;
      r.id = jr.at("id").get<std::string>();
      r.affordance = jr.value("affordance", std::string());
      if (jr.contains("error")) {
        r.error = jr.at("error").get<std::string>();
        r.error_category = jr.value("error_category", std::string());
        if (r.error.empty()) r.error = "unspecified error";
      } else {
        const json& kps = jr.at("keypoints");
        if (!kps.is_array() || kps.size() != 3) throw InvalidArgument("predictions: " + r.id + " needs 3 keypoints");
        for (std::size_t i = 0; i < 3; ++i) {
          if (kps[i].at("slot").get<std::string>() != cmka::kSlotNames[i]) {
            throw InvalidArgument("predictions: " + r.id + " keypoints must be ordered functional, little, wrist");
          }
          r.keypoints[i] = {kps[i].at("row").get<double>(), kps[i].at("col").get<double>()};
        }
        if (jr.contains("candidates")) {
          for (const json& jc : jr.at("candidates")) {
            r.candidates.push_back({jc.at("row").get<std::size_t>(), jc.at("col").get<std::size_t>(),
                                    jc.at("region").get<std::size_t>(), jc.at("cluster").get<std::size_t>(),
                                    jc.at("weight").get<double>(), jc.at("fallback").get<bool>()});
          }
        }
      }
      p.records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("predictions: ") + e.what());
  }
  return p;
}

std::string predictions_text(const Predictions& p) {
  std::string out;
  for (const PredictionRecord& r : p.records) {
    out += r.id + "  " + r.affordance;
    if (!r.ok()) {
      out += "  error[" + r.error_category + "]: " + r.error + "\n";
      continue;
    }
    for (std::size_t i = 0; i < 3; ++i) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "  %s=(%.0f, %.0f)", cmka::kSlotNames[i], r.keypoints[i].row,
                    r.keypoints[i].col);
      out += buf;
    }
    out += "  candidates=" + std::to_string(r.candidates.size()) + "\n";
  }
  return out;
}

// ---- eval ----

EvalReport run_eval(const Predictions& predictions, const Manifest& manifest, const RunConfig& config) {
  const std::vector<std::size_t> indices = manifest.evaluation_indices();
  if (predictions.records.size() != indices.size()) {
    throw AlignmentError("predictions list " + std::to_string(predictions.records.size()) +
                         " images but the manifest has " + std::to_string(indices.size()) + " evaluation samples");
  }
  for (std::size_t n = 0; n < indices.size(); ++n) {
    if (predictions.records[n].id != manifest.samples[indices[n]].id) {
      throw AlignmentError("prediction " + std::to_string(n) + " is for \"" + predictions.records[n].id +
                           "\" but the manifest expects \"" + manifest.samples[indices[n]].id + "\"");
    }
  }

  EvalReport report;
  report.images.resize(indices.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t n = 0; n < indices.size(); ++n) {
    const ManifestSample& entry = manifest.samples[indices[n]];
    const PredictionRecord& pred = predictions.records[n];
    ImageScores& img = report.images[n];
    img.id = entry.id;
    if (!pred.ok()) {
      img.error = "prediction failed: " + pred.error;
      continue;
    }
    if (!entry.gt_keypoints) {
      img.error = "no ground-truth keypoints";
      continue;
    }
    std::string category;
    isolate(
        [&] {
          const metrics::Heatmap p = metrics::gaussian_gt_heatmap(pred.keypoints, config.sigma, kImageSize, kImageSize);
          const metrics::Heatmap g =
              metrics::gaussian_gt_heatmap(*entry.gt_keypoints, config.sigma, kImageSize, kImageSize);
          img.scores = metrics::score_heatmaps(p, g);
        },
        img.error, category);
    if (!img.scored() || !entry.contact_regions) continue;
    isolate(
        [&] {
          const metrics::DepthImage depth = load_depth(manifest.resolve(*entry.depth));
          std::array<kgt::Vec3, 3> points{};
          for (std::size_t i = 0; i < 3; ++i) {
            const auto scale = [](double v, std::size_t extent) {
              const double s = std::floor(v * static_cast<double>(extent) / static_cast<double>(kImageSize));
              return static_cast<std::size_t>(std::clamp(s, 0.0, static_cast<double>(extent - 1)));
            };
            points[i] = metrics::project_to_3d_with_fallback(scale(pred.keypoints[i].row, depth.height),
                                                             scale(pred.keypoints[i].col, depth.width), depth,
                                                             *entry.intrinsics);
          }
          img.tpc = metrics::tpc(points, *entry.contact_regions);
        },
        img.tpc_error, category);
  }

  double kld = 0.0, sim = 0.0, nss = 0.0, tpc = 0.0;
  for (const ImageScores& img : report.images) {
    if (!img.scored()) continue;
    ++report.scored;
    kld += img.scores.kld;
    sim += img.scores.sim;
    nss += img.scores.nss;
    if (img.tpc) {
      ++report.tpc_count;
      tpc += *img.tpc;
    }
  }
  if (report.scored > 0) {
    const double n = static_cast<double>(report.scored);
    report.mean = {kld / n, sim / n, nss / n};
  }
  if (report.tpc_count > 0) report.mean_tpc = tpc / static_cast<double>(report.tpc_count);
  return report;
}

std::string eval_to_json(const EvalReport& r) {
  json images = json::array();
  for (const ImageScores& img : r.images) {
    json ji{{"id", img.id}};
    if (!img.scored()) {
      ji["error"] = img.error;
    } else {
      ji["kld"] = img.scores.kld;
      ji["sim"] = img.scores.sim;
      ji["nss"] = img.scores.nss;
    }
    if (img.tpc) {
      ji["tpc"] = *img.tpc;
      ji["tpc_percent"] = metrics::format_percent(*img.tpc);
    }
    if (!img.tpc_error.empty()) ji["tpc_error"] = img.tpc_error;
    images.push_back(ji);
  }
  json mean{{"scored", r.scored}};
  if (r.scored > 0) {
    mean["kld"] = r.mean.kld;
    mean["sim"] = r.mean.sim;
    mean["nss"] = r.mean.nss;
  }
  if (r.mean_tpc) {
    mean["tpc"] = *r.mean_tpc;
    mean["tpc_percent"] = metrics::format_percent(*r.mean_tpc);
    mean["tpc_images"] = r.tpc_count;
  }
  return json{{"images", images}, {"mean", mean}}.dump(2) + "\n";
}

std::string eval_text(const EvalReport& r) {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof(line), "%-24s %9s %9s %9s %7s\n", "image", "KLD", "SIM", "NSS", "TPC");
  out += line;
  for (const ImageScores& img : r.images) {
    if (!img.scored()) {
      out += img.id + "  skipped: " + img.error + "\n";
      continue;
    }
    const std::string tpc = img.tpc ? metrics::format_percent(*img.tpc) : "-";
    std::snprintf(line, sizeof(line), "%-24s %9.4f %9.4f %9.4f %7s\n", img.id.c_str(), img.scores.kld,
                  img.scores.sim, img.scores.nss, tpc.c_str());
    out += line;
  }
  if (r.scored > 0) {
    const std::string tpc = r.mean_tpc ? metrics::format_percent(*r.mean_tpc) : "-";
    std::snprintf(line, sizeof(line), "%-24s %9.4f %9.4f %9.4f %7s\n", "mean", r.mean.kld, r.mean.sim, r.mean.nss,
                  tpc.c_str());
    out += line;
  } else {
    out += "mean  no scored images\n";
  }
  return out;
}

// ---- sweep ----

SweepReport run_sweep(const Manifest& manifest, const RunConfig& config, const std::vector<std::size_t>& s_values,
                      const std::vector<std::size_t>& j_values) {
  if (s_values.empty() || j_values.empty()) throw InvalidArgument("sweep needs at least one S and one J value");
  SweepReport report;
  report.s_values = s_values;
  report.j_values = j_values;
  for (std::size_t S : s_values) {
    for (std::size_t J : j_values) {
      SweepCell cell;
      cell.regions = S;
      cell.clusters = J;
      isolate(
          [&] {
            RunConfig c = config;
            c.regions = S;
            c.clusters = J;
            const cmka::TrainResult trained = run_train(manifest, c);
            cell.history = trained.history;
            const EvalReport eval = run_eval(run_infer(manifest, trained.model, c), manifest, c);
            if (eval.scored == 0) throw InvalidArgument("no evaluation image could be scored");
            cell.mean = eval.mean;
            cell.mean_tpc = eval.mean_tpc;
          },
          cell.error, cell.error_category);
      report.cells.push_back(std::move(cell));
    }
  }

  auto pick = [&](auto better) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
      if (!report.cells[i].ok()) continue;
      if (!best || better(report.cells[i].mean, report.cells[*best].mean)) best = i;
    }
    return best;
  };
  report.best_kld = pick([](const auto& a, const auto& b) { return a.kld < b.kld; });
  report.best_sim = pick([](const auto& a, const auto& b) { return a.sim > b.sim; });
  report.best_nss = pick([](const auto& a, const auto& b) { return a.nss > b.nss; });
  if (report.best_kld) {
    std::vector<int> wins(report.cells.size(), 0);
    for (const auto& b : {report.best_kld, report.best_sim, report.best_nss}) ++wins[*b];
    std::size_t best = *report.best_kld;
    for (std::size_t i = 0; i < wins.size(); ++i) {
      if (wins[i] > wins[best] || (wins[i] == wins[best] && report.cells[i].ok() &&
                                   report.cells[i].mean.kld < report.cells[best].mean.kld)) {
        best = i;
      }
    }
    report.best = best;
  }
  return report;
}

std::string sweep_to_json(const SweepReport& r) {
  json cells = json::array();
  for (const SweepCell& c : r.cells) {
    json jc{{"S", c.regions}, {"J", c.clusters}};
    if (!c.ok()) {
      jc["error"] = c.error;
      jc["error_category"] = c.error_category;
    } else {
      jc["kld"] = c.mean.kld;
      jc["sim"] = c.mean.sim;
      jc["nss"] = c.mean.nss;
      if (c.mean_tpc) jc["tpc"] = *c.mean_tpc;
      if (!c.history.empty()) {
        jc["initial_loss"] = c.history.front().total;
        jc["final_loss"] = c.history.back().total;
      }
    }
    cells.push_back(jc);
  }
  auto cell_ref = [&](const std::optional<std::size_t>& i) -> json {
    if (!i) return nullptr;
    return json{{"S", r.cells[*i].regions}, {"J", r.cells[*i].clusters}};
  };
  // Dense grids for heatmap plotting, rows follow S and columns follow J.
  json grid;
  for (const char* metric : {"kld", "sim", "nss"}) {
    json rows = json::array();
    for (std::size_t si = 0; si < r.s_values.size(); ++si) {
      json row = json::array();
      for (std::size_t ji = 0; ji < r.j_values.size(); ++ji) {
        const SweepCell& c = r.cells[si * r.j_values.size() + ji];
        if (!c.ok()) {
          row.push_back(nullptr);
        } else {
          const std::string m = metric;
          row.push_back(m == "kld" ? c.mean.kld : m == "sim" ? c.mean.sim : c.mean.nss);
        }
      }
      rows.push_back(row);
    }
    grid[metric] = rows;
  }
  return json{{"S_values", r.s_values}, {"J_values", r.j_values}, {"cells", cells}, {"grid", grid},
              {"best", cell_ref(r.best)}, {"best_kld", cell_ref(r.best_kld)}, {"best_sim", cell_ref(r.best_sim)},
              {"best_nss", cell_ref(r.best_nss)}}
             .dump(2) +
         "\n";
}

std::string sweep_text(const SweepReport& r) {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof(line), "%3s %3s %9s %9s %9s\n", "S", "J", "KLD", "SIM", "NSS");
  out += line;
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const SweepCell& c = r.cells[i];
    if (!c.ok()) {
      std::snprintf(line, sizeof(line), "%3zu %3zu  error[%s]: %s\n", c.regions, c.clusters, c.error_category.c_str(),
                    c.error.c_str());
    } else {
      std::snprintf(line, sizeof(line), "%3zu %3zu %9.4f %9.4f %9.4f%s\n", c.regions, c.clusters, c.mean.kld,
                    c.mean.sim, c.mean.nss, r.best && *r.best == i ? "  *best" : "");
    }
    out += line;
  }
  if (!r.best) out += "no cell completed\n";
  return out;
}

// ---- simulate-kgt ----

kgt::Mat3 random_rotation(numerics::Rng& rng) {
  double q[4];
  double n = 0.0;
  do {
    n = 0.0;
    for (double& v : q) {
      v = rng.normal();
      n += v * v;
    }
  } while (n < 1e-6);
  n = std::sqrt(n);
  const double w = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

kgt::ContactTriple rest_hand(const kgt::HandModel& hand) {
  const double a = hand.wrist_to_functional, b = hand.wrist_to_little, c = hand.functional_to_little;
  const double p = (a * a + b * b - c * c) / (2 * a);
  return {{0, 0, 0}, {a, 0, 0}, {p, std::sqrt(std::max(0.0, b * b - p * p)), 0}};
}

namespace {

kgt::Vec3 uniform_point(numerics::Rng& rng, double half) {
  return {rng.uniform(-half, half), rng.uniform(-half, half), rng.uniform(-half, half)};
}

std::array<kgt::Vec3, 3> default_object(numerics::Rng& rng) {
  const kgt::Vec3 k0 = uniform_point(rng, 0.5);
  return {k0, kgt::add(k0, uniform_point(rng, 0.15)), kgt::add(k0, uniform_point(rng, 0.15))};
}

kgt::RigidTransform default_hand_pose(numerics::Rng& rng) { return {random_rotation(rng), uniform_point(rng, 0.5)}; }

kgt::Vec3 apply(const kgt::RigidTransform& t, const kgt::Vec3& p) { return kgt::add(kgt::mul(t.R, p), t.T); }

}  // namespace

SimulationReport run_simulate_kgt(const SimulationOptions& options) {
  if (options.trials < 1) throw InvalidArgument("simulate-kgt needs at least one trial");
  if (options.max_retries < 0) throw InvalidArgument("max_retries must be non-negative");
  options.hand.validate();
  const TripleSampler object = options.object_sampler ? options.object_sampler : default_object;
  const PoseSampler pose = options.hand_sampler ? options.hand_sampler : default_hand_pose;
  const kgt::ContactTriple rest = rest_hand(options.hand);

  SimulationReport report;
  report.trials = options.trials;
  numerics::Rng rng(options.seed);
  const auto start = std::chrono::steady_clock::now();
  for (int t = 0; t < options.trials; ++t) {
    for (int attempt = 0;; ++attempt) {
      try {
        const auto k = object(rng);
        const kgt::RigidTransform placement = pose(rng);
        const kgt::ContactTriple hand{apply(placement, rest.wrist), apply(placement, rest.functional),
                                      apply(placement, rest.little)};
        const kgt::GraspPose g = kgt::grasp_pose_for_execution(k[0], k[1], k[2], options.hand, hand);
        const kgt::Vec3 moved[3] = {kgt::move_hand_point(g, hand.wrist), kgt::move_hand_point(g, hand.functional),
                                    kgt::move_hand_point(g, hand.little)};
        const kgt::Vec3 target[3] = {g.contacts.wrist, g.contacts.functional, g.contacts.little};
        for (int i = 0; i < 3; ++i) {
          report.max_contact_error = std::max(report.max_contact_error, kgt::norm3(kgt::sub(moved[i], target[i])));
        }
        const kgt::Mat3& R = g.pose.R;
        report.max_orthonormality_error = std::max(
            report.max_orthonormality_error, kgt::frobenius_distance(kgt::mul(kgt::transpose(R), R), kgt::identity3()));
        report.max_det_error = std::max(report.max_det_error, std::abs(kgt::det(R) - 1.0));
        break;
      } catch (const DegenerateGeometry&) {
        if (attempt >= options.max_retries) throw;
        ++report.retries;
      }
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string simulation_to_json(const SimulationReport& r) {
  return json{{"trials", r.trials},
              {"retries", r.retries},
              {"max_contact_error_m", r.max_contact_error},
              {"max_orthonormality_error", r.max_orthonormality_error},
              {"max_det_error", r.max_det_error},
              {"seconds", r.seconds}}
             .dump(2) +
         "\n";
}

std::string simulation_text(const SimulationReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "trials: %d\nretries: %d\nmax contact error: %.3e m\nmax orthonormality error: %.3e\n"
                "max det error: %.3e\nelapsed: %.6f s\n",
                r.trials, r.retries, r.max_contact_error, r.max_orthonormality_error, r.max_det_error, r.seconds);
  return buf;
}

}  // namespace mka::pipeline
