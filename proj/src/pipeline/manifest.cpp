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

#include "mka/pipeline/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "mka/error.hpp"
#include "mka/io/binary.hpp"

namespace mka::pipeline {

using nlohmann::json;

std::size_t Manifest::label_index(const std::string& label) const {
  const auto it = std::find(affordances.begin(), affordances.end(), label);
  if (it == affordances.end()) throw VocabularyError("affordance \"" + label + "\" is not in the vocabulary");
  return static_cast<std::size_t>(it - affordances.begin());
}

std::string Manifest::resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  if (p.is_absolute()) return relative;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

void Manifest::validate(bool check_paths) const {
  if (affordances.empty()) throw InvalidArgument("manifest: empty affordance vocabulary");
  std::set<std::string> vocab(affordances.begin(), affordances.end());
  if (vocab.size() != affordances.size()) throw InvalidArgument("manifest: duplicate affordance names");
  std::set<std::string> ids;
  for (const ManifestSample& s : samples) {
    if (s.id.empty()) throw InvalidArgument("manifest: sample with empty id");
    if (!ids.insert(s.id).second) throw InvalidArgument("manifest: duplicate sample id " + s.id);
    label_index(s.label);
    if (s.split != "" && s.split != "train" && s.split != "test") {
      throw InvalidArgument("manifest: sample " + s.id + " has unknown split \"" + s.split + "\"");
    }
    if (s.masks.empty()) throw InvalidArgument("manifest: sample " + s.id + " lists no masks");
    if (s.gt_keypoints && s.gt_keypoints->empty()) {
      throw InvalidArgument("manifest: sample " + s.id + " has an empty keypoint list");
    }
    if (s.intrinsics) s.intrinsics->validate();
    if (s.contact_regions && !(s.depth && s.intrinsics)) {
      throw InvalidArgument("manifest: sample " + s.id + " has contact regions without depth and intrinsics");
    }
    if (check_paths) {
      std::vector<std::string> paths = {s.ego, s.exo};
      paths.insert(paths.end(), s.masks.begin(), s.masks.end());
      if (s.depth) paths.push_back(*s.depth);
      for (const std::string& p : paths) {
        const std::string full = resolve(p);
        if (!std::filesystem::is_regular_file(full)) throw IoError(full, "referenced file not found");
      }
    }
  }
}

std::vector<std::size_t> Manifest::training_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].split != "test") out.push_back(i);
  return out;
}

std::vector<std::size_t> Manifest::evaluation_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].split != "train") out.push_back(i);
  return out;
}

std::string manifest_to_json(const Manifest& m) {
  json root;
  root["version"] = kManifestVersion;
  root["tool"] = m.tool;
  root["affordances"] = m.affordances;
  root["samples"] = json::array();
  for (const ManifestSample& s : m.samples) {
    json js;
    js["id"] = s.id;
    js["ego"] = s.ego;
    js["exo"] = s.exo;
    js["masks"] = s.masks;
    js["label"] = s.label;
    if (!s.split.empty()) js["split"] = s.split;
    if (s.gt_keypoints) {
      json kps = json::array();
      for (const auto& p : *s.gt_keypoints) kps.push_back({p.row, p.col});
      js["gt_keypoints"] = kps;
    }
    if (s.depth) js["depth"] = *s.depth;
    if (s.intrinsics) {
      js["intrinsics"] = {{"fx", s.intrinsics->fx}, {"fy", s.intrinsics->fy},
                          {"cx", s.intrinsics->cx}, {"cy", s.intrinsics->cy}};
    }
    if (s.contact_regions) {
      json regions = json::array();
      for (const auto& r : *s.contact_regions) {
        regions.push_back({{"center", r.center}, {"radius", r.radius}});
      }
      js["contact_regions"] = regions;
    }
    root["samples"].push_back(js);
  }
  return root.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("manifest: ") + e.what());
  }
  Manifest m;
  m.base_dir = base_dir;
  try {
    const int version = root.value("version", kManifestVersion);
    if (version != kManifestVersion) {
      throw InvalidArgument("manifest: unsupported version " + std::to_string(version));
    }
    m.tool = root.value("tool", std::string());
    m.affordances = root.at("affordances").get<std::vector<std::string>>();
    for (const json& js : root.at("samples")) {
      ManifestSample s;
      s.id = js.at("id").get<std::string>();
      s.ego = js.at("ego").get<std::string>();
      s.exo = js.at("exo").get<std::string>();
      s.masks = js.at("masks").get<std::vector<std::string>>();
      s.label = js.at("label").get<std::string>();
      s.split = js.value("split", std::string());
      if (js.contains("gt_keypoints")) {
        std::vector<metrics::PixelCoord> kps;
        for (const json& p : js.at("gt_keypoints")) {
          const auto rc = p.get<std::array<double, 2>>();
          kps.push_back({rc[0], rc[1]});
        }
        s.gt_keypoints = kps;
      }
      if (js.contains("depth")) s.depth = js.at("depth").get<std::string>();
      if (js.contains("intrinsics")) {
        const json& ji = js.at("intrinsics");
        s.intrinsics = metrics::CameraIntrinsics{ji.at("fx").get<double>(), ji.at("fy").get<double>(),
                                                 ji.at("cx").get<double>(), ji.at("cy").get<double>()};
      }
      if (js.contains("contact_regions")) {
        const json& jr = js.at("contact_regions");
        if (!jr.is_array() || jr.size() != 3) {
          throw InvalidArgument("manifest: sample " + s.id + " needs exactly 3 contact regions");
        }
        std::array<metrics::ContactRegion3D, 3> regions{};
        for (std::size_t i = 0; i < 3; ++i) {
          regions[i].center = jr[i].at("center").get<kgt::Vec3>();
          regions[i].radius = jr[i].at("radius").get<double>();
        }
        s.contact_regions = regions;
      }
      m.samples.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("manifest: ") + e.what());
  }
  m.validate(false);
  return m;
}

Manifest load_manifest(const std::string& path) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  Manifest m = manifest_from_json(io::read_text_file(path), dir.empty() ? "." : dir);
  m.validate(true);
  return m;
}

void save_manifest(const Manifest& manifest, const std::string& path) {
  io::write_text_file(path, manifest_to_json(manifest));
}

}  // namespace mka::pipeline
