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

#include "mka/pipeline/cli.hpp"

#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "mka/cmka/model.hpp"
#include "mka/io/binary.hpp"
#include "mka/pipeline/commands.hpp"
#include "mka/pipeline/fixtures.hpp"

namespace mka::pipeline {

namespace fs = std::filesystem;

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInvalidArgument:
      return kExitUsage;
    case ErrorCategory::kIo:
      return kExitIo;
    case ErrorCategory::kFormat:
    case ErrorCategory::kInvalidModel:
      return kExitFormat;
    case ErrorCategory::kNumeric:
    case ErrorCategory::kTrainingDiverged:
    case ErrorCategory::kEmptyPrototype:
    case ErrorCategory::kInsufficientCandidates:
      return kExitNumeric;
    case ErrorCategory::kDegenerateGeometry:
    case ErrorCategory::kInvalidDepth:
      return kExitGeometry;
    case ErrorCategory::kVocabulary:
    case ErrorCategory::kAlignment:
      return kExitVocabulary;
  }
  return kExitOther;
}

namespace {

struct Options {
  std::string manifest;
  std::string config;
  std::string checkpoint;
  std::string out;
  std::string affordance;
  std::string predictions;
  std::optional<std::uint64_t> seed;
  int trials = 1000;
  std::vector<std::size_t> s_values = {2, 3, 4};
  std::vector<std::size_t> j_values = {2, 3, 4, 5};
};

RunConfig run_config(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.seed) c.train.seed = *o.seed;
  c.validate();
  return c;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create output directory");
}

std::string join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

void cmd_train(const Options& o, std::ostream& out) {
  const RunConfig config = run_config(o);
  const Manifest manifest = load_manifest(o.manifest);
  const cmka::TrainResult result = run_train(manifest, config);
  ensure_dir(o.out);
  cmka::save_checkpoint(result.model, join(o.out, "checkpoint.cmka"));
  const std::string table = loss_history_text(result.history);
  io::write_text_file(join(o.out, "loss_history.txt"), table);
  io::write_text_file(join(o.out, "loss_history.json"), loss_history_json(result.history));
  out << table;
}

void cmd_infer(const Options& o, std::ostream& out) {
  const RunConfig config = run_config(o);
  const Manifest manifest = load_manifest(o.manifest);
  const cmka::CmkaModel model = cmka::load_checkpoint(o.checkpoint);
  const std::optional<std::string> affordance =
      o.affordance.empty() ? std::nullopt : std::optional<std::string>(o.affordance);
  const Predictions predictions = run_infer(manifest, model, config, affordance);
  ensure_dir(o.out);
  io::write_text_file(join(o.out, "predictions.json"), predictions_to_json(predictions));
  out << predictions_text(predictions);
}

void cmd_eval(const Options& o, std::ostream& out) {
  const RunConfig config = run_config(o);
  const Manifest manifest = load_manifest(o.manifest);
  const Predictions predictions = predictions_from_json(io::read_text_file(o.predictions));
  const EvalReport report = run_eval(predictions, manifest, config);
  const std::string text = eval_text(report);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    io::write_text_file(join(o.out, "metrics.json"), eval_to_json(report));
    io::write_text_file(join(o.out, "metrics.txt"), text);
  }
  out << text;
}

void cmd_sweep(const Options& o, std::ostream& out) {
  const RunConfig config = run_config(o);
  const Manifest manifest = load_manifest(o.manifest);
  const SweepReport report = run_sweep(manifest, config, o.s_values, o.j_values);
  const std::string text = sweep_text(report);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    io::write_text_file(join(o.out, "sweep.json"), sweep_to_json(report));
    io::write_text_file(join(o.out, "sweep.txt"), text);
  }
  out << text;
}

void cmd_simulate(const Options& o, std::ostream& out) {
  SimulationOptions sim;
  sim.trials = o.trials;
  sim.seed = o.seed.value_or(0);
  if (!o.config.empty()) {
    sim.hand = kgt::load_hand_model(o.config);
  } else {
    sim.hand.wrist_to_functional = 0.095;
    sim.hand.wrist_to_little = 0.082;
    sim.hand.functional_to_little = 0.062;
  }
  const SimulationReport report = run_simulate_kgt(sim);
  const std::string text = simulation_text(report);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    io::write_text_file(join(o.out, "simulation.json"), simulation_to_json(report));
  }
  out << text;
}

void cmd_synth(const Options& o, std::ostream& out) {
  FixtureOptions fo;
  fo.seed = o.seed.value_or(0);
  const std::string manifest = write_fixture(make_fixture(fo), o.out);
  out << "wrote " << manifest << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Keypoint affordance grounding and grasp transfer"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Overrides the configured seed"); };
  auto add_config = [&](CLI::App* c, const char* what) { c->add_option("--config", o.config, what); };

  CLI::App* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  train->add_option("--manifest", o.manifest)->required();
  add_config(train, "Run configuration (JSON)");
  add_seed(train);
  train->add_option("--out", o.out, "Output directory")->required();

  CLI::App* infer = app.add_subcommand("infer", "Predict three keypoints per evaluation image");
  infer->add_option("--manifest", o.manifest)->required();
  infer->add_option("--checkpoint", o.checkpoint)->required();
  infer->add_option("--affordance", o.affordance, "Affordance for every image; default is each sample's label");
  add_config(infer, "Run configuration (JSON)");
  add_seed(infer);
  infer->add_option("--out", o.out, "Output directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("predictions", o.predictions, "predictions.json from infer")->required();
  eval->add_option("--manifest", o.manifest)->required();
  add_config(eval, "Run configuration (JSON)");
  eval->add_option("--out", o.out, "Output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "Train and evaluate over a grid of S and J");
  sweep->add_option("--manifest", o.manifest)->required();
  sweep->add_option("--s-values", o.s_values)->delimiter(',');
  sweep->add_option("--j-values", o.j_values)->delimiter(',');
  add_config(sweep, "Run configuration (JSON)");
  add_seed(sweep);
  sweep->add_option("--out", o.out, "Output directory");

  CLI::App* sim = app.add_subcommand("simulate-kgt", "Randomized grasp-transfer round trips");
  sim->add_option("--trials", o.trials)->check(CLI::PositiveNumber);
  add_config(sim, "Hand model (JSON)");
  add_seed(sim);
  sim->add_option("--out", o.out, "Output directory");

  CLI::App* synth = app.add_subcommand("synth-fixtures", "Write the synthetic fixture dataset");
  add_seed(synth);
  synth->add_option("--out", o.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) cmd_train(o, out);
    else if (infer->parsed()) cmd_infer(o, out);
    else if (eval->parsed()) cmd_eval(o, out);
    else if (sweep->parsed()) cmd_sweep(o, out);
    else if (sim->parsed()) cmd_simulate(o, out);
    else if (synth->parsed()) cmd_synth(o, out);
  } catch (const Error& e) {
    err << "error [" << category_name(e.category()) << "]: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOk;
}

}  // namespace mka::pipeline
