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

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mka/cmka/model.hpp"
#include "mka/error.hpp"
#include "mka/io/binary.hpp"
#include "mka/pipeline/cli.hpp"
#include "mka/pipeline/commands.hpp"
#include "mka/pipeline/fixtures.hpp"
#include "mka/pipeline/formats.hpp"
#include "mka/pipeline/manifest.hpp"

using namespace mka;
using namespace mka::pipeline;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("mka_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// One fixture on disk shared by every case in this file.
const std::string& fixture_manifest() {
  static TempDir dir("pipeline_fixture");
  static const std::string path = write_fixture(make_fixture({}), dir.path.string());
  return path;
}

FormatErrorCode format_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e.code();
  }
  FAIL("expected a FormatError");
  return FormatErrorCode::kBadShape;
}

FeatureBundle small_bundle() {
  FeatureBundle b;
  b.image_id = "img";
  b.source_height = b.source_width = 448;
  b.layer_indices = {5, 8, 11};
  for (std::size_t m = 0; m < 3; ++m) {
    b.layers[m] = DenseMap(3, 4, 2);
    for (std::size_t i = 0; i < b.layers[m].data.size(); ++i) b.layers[m].data[i] = 0.25 * i - 1.5 + m;
  }
  return b;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "mka");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

double distance(const metrics::PixelCoord& a, const metrics::PixelCoord& b) {
  return std::hypot(a.row - b.row, a.col - b.col);
}

}  // namespace

// ---- formats ----

TEST_CASE("bundle: round trip preserves ids, indices and f32 values") {
  const FeatureBundle b = small_bundle();
  const auto bytes = encode_bundle(b);
  const FeatureBundle back = decode_bundle(bytes);
  CHECK(back.image_id == "img");
  CHECK(back.source_height == 448);
  CHECK(back.layer_indices == b.layer_indices);
  for (std::size_t m = 0; m < 3; ++m) CHECK(back.layers[m].data == b.layers[m].data);
  CHECK(encode_bundle(back) == bytes);
}

TEST_CASE("bundle: wrong magic, wrong version and truncation have distinct codes") {
  const auto good = encode_bundle(small_bundle());
  auto magic = good;
  magic[0] = 'X';
  CHECK(format_code([&] { decode_bundle(magic); }) == FormatErrorCode::kBadMagic);
  auto version = good;
  version[4] = 9;
  CHECK(format_code([&] { decode_bundle(version); }) == FormatErrorCode::kBadVersion);
  for (std::size_t keep : {std::size_t{2}, std::size_t{7}, std::size_t{20}, good.size() - 1}) {
    const std::vector<std::uint8_t> cut(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(keep));
    CHECK(format_code([&] { decode_bundle(cut); }) == FormatErrorCode::kTruncated);
  }
  auto trailing = good;
  trailing.push_back(0);
  CHECK(format_code([&] { decode_bundle(trailing); }) == FormatErrorCode::kBadShape);
  auto count = good;
  count[6] = 2;
  CHECK(format_code([&] { decode_bundle(count); }) == FormatErrorCode::kBadShape);
}

TEST_CASE("bundle: a huge declared layer is reported as truncated") {
  io::ByteWriter w;
  w.magic("FBND");
  w.u16(1);
  w.u16(3);
  w.short_string("x");
  w.u32(448);
  w.u32(448);
  w.i32(0);
  w.u32(100000);
  w.u32(100000);
  w.u32(100000);
  CHECK(format_code([&] { decode_bundle(w.buffer()); }) == FormatErrorCode::kTruncated);
}

TEST_CASE("bundle: missing file raises an I/O error naming the path") {
  try {
    load_bundle("/nonexistent/dir/a.fbnd");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.path() == "/nonexistent/dir/a.fbnd");
  }
}

TEST_CASE("align_layers resamples later layers onto the first grid") {
  FeatureBundle b = small_bundle();
  b.layers[2] = DenseMap(6, 8, 2, 3.0);
  const auto aligned = align_layers(b);
  for (const auto& layer : aligned) {
    CHECK(layer.height == 3);
    CHECK(layer.width == 4);
  }
  CHECK(aligned[1].data == b.layers[1].data);
  for (double v : aligned[2].data) CHECK(v == doctest::Approx(3.0));
}

TEST_CASE("mask and depth containers round trip and reject damage") {
  lmsc::RegionMask m;
  m.height = 2;
  m.width = 3;
  m.region_id = 7;
  m.bitmap = {1, 0, 1, 0, 0, 1};
  const auto mb = encode_mask(m);
  const auto mback = decode_mask(mb);
  CHECK(mback.region_id == 7);
  CHECK(mback.bitmap == m.bitmap);
  auto bad_byte = mb;
  bad_byte.back() = 2;
  CHECK(format_code([&] { decode_mask(bad_byte); }) == FormatErrorCode::kBadShape);
  auto bad_magic = mb;
  bad_magic[1] = 'Z';
  CHECK(format_code([&] { decode_mask(bad_magic); }) == FormatErrorCode::kBadMagic);
  CHECK(format_code([&] { decode_mask({mb.begin(), mb.end() - 1}); }) == FormatErrorCode::kTruncated);

  metrics::DepthImage d;
  d.height = 2;
  d.width = 2;
  d.depth = {0.5, 0.0, 1.25, 2.0};
  const auto db = encode_depth(d);
  CHECK(decode_depth(db).depth == d.depth);
  auto bad_version = db;
  bad_version[5] = 3;
  CHECK(format_code([&] { decode_depth(bad_version); }) == FormatErrorCode::kBadVersion);
  CHECK(format_code([&] { decode_bundle(db); }) == FormatErrorCode::kBadMagic);
}

// ---- manifest and config ----

TEST_CASE("manifest: write, read, write is byte-identical") {
  const std::string text = io::read_text_file(fixture_manifest());
  const Manifest m = manifest_from_json(text, fs::path(fixture_manifest()).parent_path().string());
  CHECK(manifest_to_json(m) == text);

  Manifest hand;
  hand.tool = "mug";
  hand.affordances = {"hold", "pour"};
  ManifestSample s;
  s.id = "a";
  s.ego = "e.fbnd";
  s.exo = "x.fbnd";
  s.masks = {"m0.mask"};
  s.label = "pour";
  s.gt_keypoints = std::vector<metrics::PixelCoord>{{1.5, 2.25}, {0.1, 1e-7}};
  s.depth = "d.dpth";
  s.intrinsics = metrics::CameraIntrinsics{600.5, 601.0, 224.0, 223.0};
  s.contact_regions = std::array<metrics::ContactRegion3D, 3>{
      {{{0.1, 0.2, 0.3}, 0.01}, {{-0.1, 0.0, 0.5}, 0.02}, {{1.0 / 3.0, 2.0, 0.4}, 0.015}}};
  hand.samples.push_back(s);
  const std::string once = manifest_to_json(hand);
  CHECK(manifest_to_json(manifest_from_json(once)) == once);
  CHECK(once.find("\"affordances\"") < once.find("\"samples\""));
}

TEST_CASE("manifest: unknown labels, missing files and duplicate ids are rejected") {
  Manifest m = manifest_from_json(io::read_text_file(fixture_manifest()),
                                  fs::path(fixture_manifest()).parent_path().string());
  Manifest bad_label = m;
  bad_label.samples[0].label = "throw";
  CHECK_THROWS_AS(manifest_from_json(manifest_to_json(bad_label)), VocabularyError);
  CHECK_THROWS_AS(m.label_index("throw"), VocabularyError);

  Manifest missing = m;
  missing.samples[3].masks[1] = "masks/absent.mask";
  try {
    missing.validate(true);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.path().find("absent.mask") != std::string::npos);
  }

  Manifest dup = m;
  dup.samples[1].id = dup.samples[0].id;
  CHECK_THROWS_AS(dup.validate(false), InvalidArgument);
}

TEST_CASE("manifest: split selection") {
  const Manifest m = load_manifest(fixture_manifest());
  CHECK(m.training_indices().size() == 24);
  CHECK(m.evaluation_indices().size() == 8);
  Manifest unsplit = m;
  for (auto& s : unsplit.samples) s.split.clear();
  CHECK(unsplit.training_indices().size() == 32);
  CHECK(unsplit.evaluation_indices().size() == 32);
}

TEST_CASE("run config: defaults, validation and JSON round trip") {
  const RunConfig d;
  CHECK(d.regions == 3);
  CHECK(d.clusters == 4);
  CHECK(d.pca_dim == 3);
  CHECK(d.train.radius == 4.0);
  CHECK(d.sigma == 10.0);
  CHECK(d.train.learning_rate == 0.01);
  CHECK(d.train.epochs == 15);
  CHECK(d.train.temperature == 0.5);

  CHECK_THROWS_AS(run_config_from_json(R"({"epochs": 0})"), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(R"({"S": 0})"), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(R"({"J": 0})"), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(R"({"learning_rat": 0.1})"), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json("{"), InvalidArgument);

  const RunConfig c = run_config_from_json(R"({"S": 2, "J": 5, "seed": 9, "learning_rate": 0.5})");
  CHECK(c.regions == 2);
  CHECK(c.clusters == 5);
  CHECK(c.seed() == 9);
  CHECK(run_config_to_json(run_config_from_json(run_config_to_json(c))) == run_config_to_json(c));
}

// ---- fixtures ----

TEST_CASE("fixtures: default options load; seeds change bundles but not schemas") {
  const Manifest m = load_manifest(fixture_manifest());
  CHECK(m.affordances.size() == 4);
  CHECK(m.samples.size() == 32);

  FixtureOptions other;
  other.seed = 5;
  const Fixture a = make_fixture({});
  const Fixture b = make_fixture(other);
  const Fixture a2 = make_fixture({});
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(encode_bundle(a.samples[0].ego) == encode_bundle(a2.samples[0].ego));
  CHECK(encode_bundle(a.samples[0].ego) != encode_bundle(b.samples[0].ego));
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].id == b.samples[i].id);
    CHECK(a.samples[i].ego.layers[0].same_shape(b.samples[i].ego.layers[0]));
    CHECK(a.samples[i].masks.size() == b.samples[i].masks.size());
  }
}

// ---- train / infer / eval ----

TEST_CASE("train: fixture loss falls and two runs give identical checkpoints") {
  const Manifest m = load_manifest(fixture_manifest());
  const RunConfig cfg;
  const cmka::TrainResult first = run_train(m, cfg);
  CHECK(first.history.size() == 16);
  CHECK(first.history.back().total < first.history.front().total);
  const cmka::TrainResult second = run_train(m, cfg);
  CHECK(cmka::encode_checkpoint(first.model) == cmka::encode_checkpoint(second.model));

  const std::string json = loss_history_json(first.history);
  CHECK(json.find("\"classification\"") != std::string::npos);
  CHECK(loss_history_text(first.history).find("epoch") == 0);
}

TEST_CASE("infer and eval on the fixture") {
  const Manifest m = load_manifest(fixture_manifest());
  const RunConfig cfg;
  const cmka::TrainResult trained = run_train(m, cfg);
  const Predictions preds = run_infer(m, trained.model, cfg);
  REQUIRE(preds.records.size() == 8);

  SUBCASE("each prediction lands on a distinct planted contact") {
    for (std::size_t n = 0; n < preds.records.size(); ++n) {
      const PredictionRecord& r = preds.records[n];
      REQUIRE(r.ok());
      CHECK(r.id == m.samples[m.evaluation_indices()[n]].id);
      CHECK(r.candidates.size() == 12);
      const auto& gt = *m.samples[m.evaluation_indices()[n]].gt_keypoints;
      std::set<std::size_t> hit;
      for (const auto& kp : r.keypoints) {
        for (std::size_t g = 0; g < 3; ++g)
          if (distance(kp, gt[g]) < 14.0) hit.insert(g);
      }
      CHECK(hit.size() == 3);
    }
  }

  SUBCASE("predictions survive a JSON round trip") {
    const std::string text = predictions_to_json(preds);
    CHECK(predictions_to_json(predictions_from_json(text)) == text);
  }

  SUBCASE("the aggregate is the mean of independently scored images") {
    const EvalReport report = run_eval(preds, m, cfg);
    CHECK(report.scored == 8);
    double kld = 0.0, sim = 0.0, nss = 0.0;
    for (std::size_t n = 0; n < 8; ++n) {
      const auto& gt = *m.samples[m.evaluation_indices()[n]].gt_keypoints;
      const auto s = metrics::score_heatmaps(
          metrics::gaussian_gt_heatmap(preds.records[n].keypoints, 10.0, 448, 448),
          metrics::gaussian_gt_heatmap(gt, 10.0, 448, 448));
      CHECK(report.images[n].scores.kld == doctest::Approx(s.kld).epsilon(1e-12));
      kld += s.kld;
      sim += s.sim;
      nss += s.nss;
    }
    CHECK(report.mean.kld == doctest::Approx(kld / 8).epsilon(1e-12));
    CHECK(report.mean.sim == doctest::Approx(sim / 8).epsilon(1e-12));
    CHECK(report.mean.nss == doctest::Approx(nss / 8).epsilon(1e-12));
    CHECK(report.tpc_count == 8);
  }

  SUBCASE("forced affordance applies to every image") {
    const Predictions forced = run_infer(m, trained.model, cfg, std::string("press"));
    for (const auto& r : forced.records) CHECK(r.affordance == "press");
    CHECK_THROWS_AS(run_infer(m, trained.model, cfg, std::string("throw")), VocabularyError);
  }
}

TEST_CASE("eval: ground-truth predictions score perfectly and TPC is formatted") {
  const Manifest m = load_manifest(fixture_manifest());
  const RunConfig cfg;
  Predictions perfect;
  for (std::size_t i : m.evaluation_indices()) {
    PredictionRecord r;
    r.id = m.samples[i].id;
    r.affordance = m.samples[i].label;
    for (std::size_t k = 0; k < 3; ++k) r.keypoints[k] = (*m.samples[i].gt_keypoints)[k];
    perfect.records.push_back(r);
  }
  const EvalReport report = run_eval(perfect, m, cfg);
  CHECK(std::abs(report.mean.kld) < 1e-9);
  CHECK(report.mean.sim == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(report.mean_tpc);
  CHECK(metrics::format_percent(*report.mean_tpc) == "100");

  Predictions one_off = perfect;
  one_off.records[0].keypoints[2] = {400.0, 400.0};
  const EvalReport partial = run_eval(one_off, m, cfg);
  REQUIRE(partial.images[0].tpc);
  CHECK(metrics::format_percent(*partial.images[0].tpc) == "66.7");
  CHECK(eval_text(partial).find("66.7") != std::string::npos);
  CHECK(eval_to_json(partial).find("\"tpc_percent\": \"66.7\"") != std::string::npos);

  Predictions failed = perfect;
  failed.records[1].error = "insufficient candidates";
  const EvalReport skipped = run_eval(failed, m, cfg);
  CHECK(skipped.scored == 7);
  CHECK_FALSE(skipped.images[1].scored());
}

TEST_CASE("eval: id mismatches raise alignment errors") {
  const Manifest m = load_manifest(fixture_manifest());
  Predictions p;
  for (std::size_t i : m.evaluation_indices()) {
    PredictionRecord r;
    r.id = m.samples[i].id;
    p.records.push_back(r);
  }
  Predictions swapped = p;
  std::swap(swapped.records[0], swapped.records[1]);
  CHECK_THROWS_AS(run_eval(swapped, m, RunConfig{}), AlignmentError);
  Predictions short_list = p;
  short_list.records.pop_back();
  CHECK_THROWS_AS(run_eval(short_list, m, RunConfig{}), AlignmentError);
}

TEST_CASE("infer: records follow manifest order and failures stay per image") {
  TempDir dir("infer_batch");
  Manifest m = load_manifest(fixture_manifest());
  // Make two training samples evaluable too, for a batch of 10.
  m.samples[2].split.clear();
  m.samples[5].split.clear();
  for (auto& s : m.samples) {
    s.ego = m.resolve(s.ego);
    s.exo = m.resolve(s.exo);
    for (auto& p : s.masks) p = m.resolve(p);
    if (s.depth) s.depth = m.resolve(*s.depth);
  }
  // Sample 5 gets single-pixel masks: one candidate per region.
  lmsc::RegionMask dot;
  dot.height = dot.width = kFixtureGrid;
  dot.bitmap.assign(kFixtureGrid * kFixtureGrid, 0);
  for (std::size_t r = 0; r < 2; ++r) {
    dot.region_id = r;
    std::fill(dot.bitmap.begin(), dot.bitmap.end(), 0);
    dot.bitmap[(10 + r) * kFixtureGrid + 7] = 1;
    save_mask(dot, dir / ("dot" + std::to_string(r) + ".mask"));
    m.samples[5].masks[r] = dir / ("dot" + std::to_string(r) + ".mask");
  }
  m.base_dir = dir.path.string();
  save_manifest(m, dir / "manifest.json");
  const Manifest batch = load_manifest(dir / "manifest.json");

  RunConfig cfg;
  cfg.regions = 2;
  const LoadedSample first = load_sample(batch, 0, 2);
  const cmka::CmkaModel model =
      cmka::CmkaModel::initialize(model_shape(cfg, first, batch.affordances.size()), 1);
  const Predictions preds = run_infer(batch, model, cfg);
  REQUIRE(preds.records.size() == 10);
  const auto idx = batch.evaluation_indices();
  for (std::size_t n = 0; n < 10; ++n) CHECK(preds.records[n].id == batch.samples[idx[n]].id);
  CHECK(preds.records[0].id == batch.samples[2].id);
  CHECK(preds.records[1].error_category == "insufficient-candidates");
  for (std::size_t n = 2; n < 10; ++n) CHECK(preds.records[n].ok());
}

// ---- sweep ----

TEST_CASE("sweep: a single cell matches a direct train and eval") {
  const Manifest m = load_manifest(fixture_manifest());
  const RunConfig cfg;
  const SweepReport sweep = run_sweep(m, cfg, {3}, {4});
  REQUIRE(sweep.cells.size() == 1);
  REQUIRE(sweep.cells[0].ok());
  const EvalReport direct = run_eval(run_infer(m, run_train(m, cfg).model, cfg), m, cfg);
  CHECK(sweep.cells[0].mean.kld == direct.mean.kld);
  CHECK(sweep.cells[0].mean.sim == direct.mean.sim);
  CHECK(sweep.cells[0].mean.nss == direct.mean.nss);
  REQUIRE(sweep.best);
  CHECK(*sweep.best == 0);
}

TEST_CASE("sweep: a failing cell is recorded and the grid continues") {
  const Manifest m = load_manifest(fixture_manifest());
  RunConfig cfg;
  cfg.train.epochs = 1;
  const SweepReport sweep = run_sweep(m, cfg, {3, 5}, {4});
  REQUIRE(sweep.cells.size() == 2);
  CHECK(sweep.cells[0].ok());
  CHECK_FALSE(sweep.cells[1].ok());
  CHECK(sweep.cells[1].error_category == "invalid-argument");
  CHECK(*sweep.best == 0);
  const std::string json = sweep_to_json(sweep);
  CHECK(json.find("\"grid\"") != std::string::npos);
  CHECK_THROWS_AS(run_sweep(m, cfg, {}, {4}), InvalidArgument);
}

// ---- simulate-kgt ----

TEST_CASE("simulate-kgt: random trials land on the contacts") {
  SimulationOptions o;
  o.trials = 1000;
  o.seed = 11;
  o.hand = {0.095, 0.082, 0.062, kgt::FunctionalFinger::kIndex};
  const SimulationReport r = run_simulate_kgt(o);
  CHECK(r.trials == 1000);
  CHECK(r.max_contact_error < 1e-9);
  CHECK(r.max_orthonormality_error < 1e-9);
  CHECK(r.max_det_error < 1e-9);
}

TEST_CASE("simulate-kgt: hand already on its own triangle gives zero error") {
  SimulationOptions o;
  o.trials = 1;
  o.hand = {0.095, 0.082, 0.062, kgt::FunctionalFinger::kIndex};
  const kgt::ContactTriple rest = rest_hand(o.hand);
  o.object_sampler = [&](numerics::Rng&) { return std::array<kgt::Vec3, 3>{rest.wrist, rest.functional, rest.little}; };
  o.hand_sampler = [](numerics::Rng&) { return kgt::RigidTransform{kgt::identity3(), {0, 0, 0}}; };
  const SimulationReport r = run_simulate_kgt(o);
  CHECK(r.max_contact_error < 1e-15);
  CHECK(r.retries == 0);
}

TEST_CASE("simulate-kgt: collinear samples are redrawn and counted") {
  SimulationOptions o;
  o.trials = 3;
  o.hand = {0.095, 0.082, 0.062, kgt::FunctionalFinger::kIndex};
  int calls = 0;
  o.object_sampler = [&](numerics::Rng& rng) {
    ++calls;
    const double u = rng.uniform();
    const kgt::Vec3 k0{u, u, u};
    if (calls % 2 == 1) return std::array<kgt::Vec3, 3>{k0, {1, 1, 1}, {2, 2, 2}};
    return std::array<kgt::Vec3, 3>{k0, {0.1, 0.05, 0.0}, {0.05, 0.1, 0.02}};
  };
  const SimulationReport r = run_simulate_kgt(o);
  CHECK(r.retries == 3);
  CHECK(r.max_contact_error < 1e-9);

  o.object_sampler = [](numerics::Rng&) { return std::array<kgt::Vec3, 3>{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}}; };
  o.max_retries = 4;
  CHECK_THROWS_AS(run_simulate_kgt(o), DegenerateGeometry);
  o.trials = 0;
  CHECK_THROWS_AS(run_simulate_kgt(o), InvalidArgument);
}

// ---- CLI ----

TEST_CASE("cli: exit codes by failure category") {
  TempDir dir("cli_codes");
  const std::string manifest = fixture_manifest();
  CHECK(cli({"--help"}) == kExitOk);
  CHECK(cli({}) == kExitUsage);
  CHECK(cli({"train", "--out", dir / "t"}) == kExitUsage);
  CHECK(cli({"train", "--manifest", dir / "none.json", "--out", dir / "t"}) == kExitIo);

  io::write_text_file(dir / "zero.json", R"({"epochs": 0})");
  CHECK(cli({"train", "--manifest", manifest, "--config", dir / "zero.json", "--out", dir / "t"}) == kExitUsage);

  io::write_text_file(dir / "bad.cmka", "CMKX....");
  CHECK(cli({"infer", "--manifest", manifest, "--checkpoint", dir / "bad.cmka", "--out", dir / "i"}) == kExitFormat);

  CHECK(cli({"simulate-kgt", "--trials", "0"}) == kExitUsage);
  std::string text;
  CHECK(cli({"simulate-kgt", "--trials", "50", "--seed", "4"}, &text) == kExitOk);
  CHECK(text.find("max contact error") != std::string::npos);

  CHECK(exit_code_for(ErrorCategory::kVocabulary) == kExitVocabulary);
  CHECK(exit_code_for(ErrorCategory::kAlignment) == kExitVocabulary);
  CHECK(exit_code_for(ErrorCategory::kTrainingDiverged) == kExitNumeric);
  CHECK(exit_code_for(ErrorCategory::kDegenerateGeometry) == kExitGeometry);
}

TEST_CASE("cli: train, infer and eval end to end with deterministic outputs") {
  TempDir dir("cli_e2e");
  const std::string manifest = fixture_manifest();
  REQUIRE(cli({"train", "--manifest", manifest, "--seed", "0", "--out", dir / "a"}) == kExitOk);
  REQUIRE(cli({"train", "--manifest", manifest, "--seed", "0", "--out", dir / "b"}) == kExitOk);
  CHECK(io::read_file(dir / "a/checkpoint.cmka") == io::read_file(dir / "b/checkpoint.cmka"));
  CHECK(fs::exists(dir / "a/loss_history.txt"));
  CHECK(fs::exists(dir / "a/loss_history.json"));

  REQUIRE(cli({"infer", "--manifest", manifest, "--checkpoint", dir / "a/checkpoint.cmka", "--out", dir / "a"}) ==
          kExitOk);
  REQUIRE(cli({"infer", "--manifest", manifest, "--checkpoint", dir / "a/checkpoint.cmka", "--out", dir / "b"}) ==
          kExitOk);
  CHECK(io::read_file(dir / "a/predictions.json") == io::read_file(dir / "b/predictions.json"));
  CHECK(cli({"infer", "--manifest", manifest, "--checkpoint", dir / "a/checkpoint.cmka", "--affordance", "throw",
             "--out", dir / "c"}) == kExitVocabulary);

  std::string text;
  REQUIRE(cli({"eval", dir / "a/predictions.json", "--manifest", manifest, "--out", dir / "a"}, &text) == kExitOk);
  CHECK(text.find("mean") != std::string::npos);
  CHECK(fs::exists(dir / "a/metrics.json"));

  REQUIRE(cli({"synth-fixtures", "--seed", "2", "--out", dir / "fx"}) == kExitOk);
  CHECK(fs::exists(dir / "fx/manifest.json"));
}
