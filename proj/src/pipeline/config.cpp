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

#include "mka/pipeline/config.hpp"

#include <cmath>

#include "json.hpp"
#include "mka/error.hpp"
#include "mka/io/binary.hpp"

namespace mka::pipeline {

using nlohmann::json;

void RunConfig::validate() const {
  if (regions < 1) throw InvalidArgument("config: S must be at least 1");
  if (clusters < 1) throw InvalidArgument("config: J must be at least 1");
  if (pca_dim < 1) throw InvalidArgument("config: k must be at least 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("config: sigma must be positive");
  if (kmeans_restarts < 1) throw InvalidArgument("config: kmeans_restarts must be at least 1");
  if (d_cam < 1) throw InvalidArgument("config: d_cam must be at least 1");
  train.validate();
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "S") c.regions = value.get<std::size_t>();
      else if (key == "J") c.clusters = value.get<std::size_t>();
      else if (key == "k") c.pca_dim = value.get<std::size_t>();
      else if (key == "r") c.train.radius = value.get<double>();
      else if (key == "sigma") c.sigma = value.get<double>();
      else if (key == "learning_rate") c.train.learning_rate = value.get<double>();
      else if (key == "epochs") c.train.epochs = value.get<int>();
      else if (key == "temperature") c.train.temperature = value.get<double>();
      else if (key == "shuffle") c.train.shuffle = value.get<bool>();
      else if (key == "seed") c.train.seed = value.get<std::uint64_t>();
      else if (key == "kmeans_restarts") c.kmeans_restarts = value.get<int>();
      else if (key == "d_proj") c.d_proj = value.get<std::size_t>();
      else if (key == "d_hidden") c.d_hidden = value.get<std::size_t>();
      else if (key == "d_out") c.d_out = value.get<std::size_t>();
      else if (key == "d_cam") c.d_cam = value.get<std::size_t>();
      else throw InvalidArgument("config: unknown key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["S"] = c.regions;
  j["J"] = c.clusters;
  j["k"] = c.pca_dim;
  j["r"] = c.train.radius;
  j["sigma"] = c.sigma;
  j["learning_rate"] = c.train.learning_rate;
  j["epochs"] = c.train.epochs;
  j["temperature"] = c.train.temperature;
  j["shuffle"] = c.train.shuffle;
  j["seed"] = c.train.seed;
  j["kmeans_restarts"] = c.kmeans_restarts;
  j["d_proj"] = c.d_proj;
  j["d_hidden"] = c.d_hidden;
  j["d_out"] = c.d_out;
  j["d_cam"] = c.d_cam;
  return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::string& path) { return run_config_from_json(io::read_text_file(path)); }

}  // namespace mka::pipeline
