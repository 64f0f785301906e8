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

#include "mka/kgt/kgt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "json.hpp"
#include "mka/error.hpp"
#include "mka/io/binary.hpp"

namespace mka::kgt {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

Mat3 transpose(const Mat3& m) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
  }
  return t;
}

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

Vec3 mul(const Mat3& m, const Vec3& v) {
  return {dot3(m[0], v), dot3(m[1], v), dot3(m[2], v)};
}

double det(const Mat3& m) { return dot3(m[0], cross(m[1], m[2])); }

Mat3 identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

double frobenius_distance(const Mat3& a, const Mat3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) s += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
  }
  return std::sqrt(s);
}

namespace {

bool finite3(const Vec3& v) { return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]); }

// Unit in-plane axes (x toward f, y toward l's side) and the plane normal.
struct Basis {
  Vec3 x, y, z;
};

Basis plane_basis(const Vec3& origin, const Vec3& f, const Vec3& l, const char* stage) {
  if (!finite3(origin) || !finite3(f) || !finite3(l)) throw DegenerateGeometry(stage, "non-finite keypoint");
  const Vec3 a = sub(f, origin);
  const Vec3 b = sub(l, origin);
  const Vec3 n = cross(a, b);
  const double nn = norm3(n);
  if (!(nn > kCollinearTolerance)) throw DegenerateGeometry(stage, "keypoints are collinear");
  Basis out;
  out.x = scale(a, 1.0 / norm3(a));
  out.z = scale(n, 1.0 / nn);
  out.y = cross(out.z, out.x);
  return out;
}

}  // namespace

void HandModel::validate() const {
  const double a = wrist_to_functional, b = wrist_to_little, c = functional_to_little;
  for (double v : {a, b, c}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidModel("hand model lengths must be positive and finite");
  }
  if (!(a + b > c && a + c > b && b + c > a)) throw InvalidModel("hand model lengths violate the triangle inequality");
}

HandModel hand_model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("hand model: ") + e.what());
  }
  HandModel h;
  try {
    h.wrist_to_functional = j.at("wrist_to_functional_m").get<double>();
    h.wrist_to_little = j.at("wrist_to_little_m").get<double>();
    h.functional_to_little = j.at("functional_to_little_m").get<double>();
    const std::string finger = j.value("functional_finger", std::string("index"));
    if (finger == "index") {
      h.functional_finger = FunctionalFinger::kIndex;
    } else if (finger == "thumb") {
      h.functional_finger = FunctionalFinger::kThumb;
    } else {
      throw InvalidArgument("hand model: functional_finger must be \"index\" or \"thumb\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("hand model: ") + e.what());
  }
  h.validate();
  return h;
}

std::string hand_model_to_json(const HandModel& hand) {
  nlohmann::json j;
  j["wrist_to_functional_m"] = hand.wrist_to_functional;
  j["wrist_to_little_m"] = hand.wrist_to_little;
  j["functional_to_little_m"] = hand.functional_to_little;
  j["functional_finger"] = hand.functional_finger == FunctionalFinger::kThumb ? "thumb" : "index";
  return j.dump(2) + "\n";
}

HandModel load_hand_model(const std::string& path) { return hand_model_from_json(io::read_text_file(path)); }

ContactTriple adjust_keypoints(const Vec3& k0, const Vec3& k1, const Vec3& k2, const HandModel& hand) {
  hand.validate();
  const Basis basis = plane_basis(k0, k1, k2, "adjust_keypoints");
  const double a = hand.wrist_to_functional;
  const double b = hand.wrist_to_little;
  const double c = hand.functional_to_little;
  // Little-finger contact in the (x, y) plane coordinates of the wrist.
  const double p = (a * a + b * b - c * c) / (2.0 * a);
  const double q = std::sqrt(std::max(0.0, b * b - p * p));
  ContactTriple out;
  out.wrist = k0;
  out.functional = add(k0, scale(basis.x, a));
  out.little = add(k0, add(scale(basis.x, p), scale(basis.y, q)));
  return out;
}

Frame build_frame(const Vec3& origin, const Vec3& f, const Vec3& l) {
  const Basis basis = plane_basis(origin, f, l, "build_frame");
  Frame out;
  out.origin = origin;
  for (int i = 0; i < 3; ++i) {
    out.rotation[i][0] = basis.x[i];
    out.rotation[i][1] = basis.y[i];
    out.rotation[i][2] = basis.z[i];
  }
  return out;
}

RigidTransform relative_pose(const ContactTriple& object, const ContactTriple& hand) {
  const Frame o = build_frame(object.wrist, object.functional, object.little);
  const Frame h = build_frame(hand.wrist, hand.functional, hand.little);
  const Mat3 ro_t = transpose(o.rotation);
  RigidTransform out;
  out.R = mul(ro_t, h.rotation);
  out.T = mul(ro_t, sub(hand.wrist, object.wrist));
  return out;
}

GraspPose grasp_pose_for_execution(const Vec3& k0, const Vec3& k1, const Vec3& k2, const HandModel& hand,
                                   const ContactTriple& current_hand) {
  GraspPose out;
  out.contacts = adjust_keypoints(k0, k1, k2, hand);
  out.object_frame = build_frame(out.contacts.wrist, out.contacts.functional, out.contacts.little);
  build_frame(current_hand.wrist, current_hand.functional, current_hand.little);
  out.pose = relative_pose(out.contacts, current_hand);
  return out;
}

Vec3 move_hand_point(const GraspPose& grasp, const Vec3& p) {
  const Mat3& ro = grasp.object_frame.rotation;
  const Vec3 local = sub(mul(transpose(ro), sub(p, grasp.object_frame.origin)), grasp.pose.T);
  return add(grasp.object_frame.origin, mul(ro, mul(transpose(grasp.pose.R), local)));
}

std::string pose_to_json(const RigidTransform& pose) {
  nlohmann::json j;
  std::vector<double> r;
  for (const auto& row : pose.R) r.insert(r.end(), row.begin(), row.end());
  j["R"] = r;
  j["T"] = std::vector<double>(pose.T.begin(), pose.T.end());
  return j.dump();
}

RigidTransform pose_from_json(const std::string& text) {
  RigidTransform out;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto r = j.at("R").get<std::vector<double>>();
    const auto t = j.at("T").get<std::vector<double>>();
    if (r.size() != 9 || t.size() != 3) throw InvalidArgument("pose: R needs 9 values and T needs 3");
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) out.R[i][k] = r[static_cast<std::size_t>(i * 3 + k)];
      out.T[i] = t[static_cast<std::size_t>(i)];
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("pose: ") + e.what());
  }
  return out;
}

}  // namespace mka::kgt
