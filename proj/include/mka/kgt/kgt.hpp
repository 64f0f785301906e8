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

#include <array>
#include <string>

namespace mka::kgt {

using Vec3 = std::array<double, 3>;
/// Row-major 3x3.
using Mat3 = std::array<std::array<double, 3>, 3>;

enum class FunctionalFinger { kIndex, kThumb };

/// Palm triangle measured on the hand.
struct HandModel {
  double wrist_to_functional = 0.0;  // m
  double wrist_to_little = 0.0;      // m
  double functional_to_little = 0.0;  // m
  FunctionalFinger functional_finger = FunctionalFinger::kIndex;

  /// Throws InvalidModel unless all lengths are positive and finite and
  /// satisfy the strict triangle inequality.
  void validate() const;
};

HandModel hand_model_from_json(const std::string& text);
std::string hand_model_to_json(const HandModel& hand);
HandModel load_hand_model(const std::string& path);

/// Contact triple; the order matches the three selected keypoints.
struct ContactTriple {
  Vec3 wrist{};
  Vec3 functional{};
  Vec3 little{};
};

/// Rotation with columns (x, y, z) and an origin, both in world coordinates.
struct Frame {
  Vec3 origin{};
  Mat3 rotation{};
};

/// Hand frame expressed in object-frame coordinates.
struct RigidTransform {
  Mat3 R{};
  Vec3 T{};
};

inline constexpr double kCollinearTolerance = 1e-8;

/// Snaps (k0, k1, k2) = (wrist, functional, little) onto the hand triangle:
/// wrist stays at k0, functional lies on the k0->k1 ray, and little lies in
/// the plane on k2's side of that ray.
ContactTriple adjust_keypoints(const Vec3& k0, const Vec3& k1, const Vec3& k2, const HandModel& hand);

Frame build_frame(const Vec3& origin, const Vec3& f, const Vec3& l);

/// R = R_O^T R_H and T = R_O^T (W - W_o).
RigidTransform relative_pose(const ContactTriple& object, const ContactTriple& hand);

struct GraspPose {
  ContactTriple contacts;  // adjusted object contacts
  Frame object_frame;
  RigidTransform pose;
};

GraspPose grasp_pose_for_execution(const Vec3& k0, const Vec3& k1, const Vec3& k2, const HandModel& hand,
                                   const ContactTriple& current_hand);

/// Rigid motion that carries the current hand onto the contacts:
/// p' = W_o + R_O R^T (R_O^T (p - W_o) - T).
Vec3 move_hand_point(const GraspPose& grasp, const Vec3& p);

/// {"R": [9 row-major], "T": [3]}
std::string pose_to_json(const RigidTransform& pose);
RigidTransform pose_from_json(const std::string& text);

// Small linear algebra helpers.
Vec3 sub(const Vec3& a, const Vec3& b);
Vec3 add(const Vec3& a, const Vec3& b);
Vec3 scale(const Vec3& a, double s);
Vec3 cross(const Vec3& a, const Vec3& b);
double dot3(const Vec3& a, const Vec3& b);
double norm3(const Vec3& a);
Mat3 transpose(const Mat3& m);
Mat3 mul(const Mat3& a, const Mat3& b);
Vec3 mul(const Mat3& m, const Vec3& v);
double det(const Mat3& m);
Mat3 identity3();
double frobenius_distance(const Mat3& a, const Mat3& b);

}  // namespace mka::kgt
