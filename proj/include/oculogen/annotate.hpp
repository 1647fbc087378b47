// Copyright 2026 The Oculogen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Ground-truth labels: the 28 3D landmarks of a posed model, their image
// projections, and the per-image JSON record.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "oculogen/error.hpp"
#include "oculogen/eye_texture.hpp"
#include "oculogen/eyeball.hpp"
#include "oculogen/eyeregion.hpp"
#include "oculogen/geom.hpp"
#include "oculogen/staging.hpp"

namespace oculogen {

inline constexpr int kEyelidLandmarks = 12;
inline constexpr int kIrisLandmarks = 8;
inline constexpr int kPupilLandmarks = 8;
inline constexpr int kLandmarkCount = kEyelidLandmarks + kIrisLandmarks + kPupilLandmarks;
inline constexpr const char* kLabelSchemaVersion = "1";

inline const std::array<std::string, kLandmarkCount>& landmark_names() {
  static const auto names = [] {
    std::array<std::string, kLandmarkCount> n;
    for (int i = 0; i < kEyelidLandmarks; ++i) n[i] = "eyelid_" + std::to_string(i);
    for (int i = 0; i < kIrisLandmarks; ++i) n[kEyelidLandmarks + i] = "iris_" + std::to_string(i);
    for (int i = 0; i < kPupilLandmarks; ++i) n[kEyelidLandmarks + kIrisLandmarks + i] = "pupil_" + std::to_string(i);
    return n;
  }();
  return names;
}

/// eyelid_0..11, iris_0..7, pupil_0..7 in that order (head frame, mm).
struct LandmarkSet {
  std::array<Vec3, kLandmarkCount> points{};
  Vec3 pupil_center;
  UnitVec3 gaze;

  std::span<const Vec3> eyelid() const { return std::span(points).subspan(0, kEyelidLandmarks); }
  std::span<const Vec3> iris() const { return std::span(points).subspan(kEyelidLandmarks, kIrisLandmarks); }
  std::span<const Vec3> pupil() const {
    return std::span(points).subspan(kEyelidLandmarks + kIrisLandmarks, kPupilLandmarks);
  }
};

/// Eyelid weight implied by an eyeball pose; pitches beyond the lid range
/// saturate.
inline double eyelid_weight_for(const PosedEyeball& eye) {
  const double pitch = rad2deg(std::asin(std::clamp(eye.optical_axis.y(), -1.0, 1.0)));
  return eyelid_weight(std::clamp(pitch, -kEyelidPitchLimitDeg, kEyelidPitchLimitDeg));
}

inline LandmarkSet collect_landmarks_3d(const EyeballModel& eyeball, const PosedEyeball& eye,
                                        const EyeRegionModel& region, const PosedEyeRegion& lids) {
  if (std::abs(eyelid_weight_for(eye) - lids.eyelid_weight) > 1e-6)
    throw Error(Errc::InconsistentPose, "eyelid weight does not match the eyeball pitch");
  LandmarkSet lm;
  const auto lid = eyelid_landmarks_3d(region, lids.face);
  for (int i = 0; i < kEyelidLandmarks; ++i) lm.points[i] = lid[i];
  for (int i = 0; i < kIrisLandmarks; ++i)
    lm.points[kEyelidLandmarks + i] = eye.inner.vertices.at(eyeball.iris_landmark_vertex_ids[i]);
  for (int i = 0; i < kPupilLandmarks; ++i)
    lm.points[kEyelidLandmarks + kIrisLandmarks + i] = eye.inner.vertices.at(eyeball.pupil_landmark_vertex_ids[i]);
  lm.pupil_center = eye.pupil_center;
  lm.gaze = eye.optical_axis;
  return lm;
}

/// Gaze in camera coordinates: x right, y up, z toward the camera, so eye
/// contact is (0, 0, 1).
inline UnitVec3 gaze_in_camera(const CameraPose& cam, const UnitVec3& g) {
  return UnitVec3(cam.orientation.inverse()(g.vec()));
}

struct LabelRecord {
  std::string image;
  double camera_theta_deg = 0, camera_phi_deg = 0, camera_radius_mm = 0, mm_per_px = 0;
  int image_width = 0, image_height = 0;
  double gaze_alpha_deg = 0, gaze_beta_deg = 0;
  Vec3 gaze_camera;
  Vec3 gaze_head;
  LightingSpec lighting;
  EyeConfig eye;
  std::array<Vec2, kLandmarkCount> landmarks{};
  Vec2 pupil_center;
  bool pose_valid = true;
  bool pupil_visible = true;
  std::uint64_t seed = 0;
  int identity = 0;

  std::span<const Vec2> eyelid_landmarks() const { return std::span(landmarks).subspan(0, kEyelidLandmarks); }

  nlohmann::ordered_json to_json() const {
    using nlohmann::ordered_json;
    auto v3 = [](const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); };
    ordered_json lms = ordered_json::object();
    for (int i = 0; i < kLandmarkCount; ++i) lms[landmark_names()[i]] = ordered_json::array({landmarks[i].u, landmarks[i].v});
    ordered_json j;
    j["schema_version"] = kLabelSchemaVersion;
    j["image"] = image;
    j["identity"] = identity;
    j["seed"] = seed;
    j["camera"] = {{"theta_deg", camera_theta_deg}, {"phi_deg", camera_phi_deg}, {"radius_mm", camera_radius_mm},
                   {"mm_per_px", mm_per_px},        {"image_width", image_width}, {"image_height", image_height}};
    j["gaze"] = {{"alpha_deg", gaze_alpha_deg}, {"beta_deg", gaze_beta_deg}, {"vector_camera", v3(gaze_camera)},
                 {"vector_head", v3(gaze_head)}};
    j["lighting"] = {{"env_id", lighting.env_id}, {"rotation_deg", lighting.rotation_deg}, {"intensity", lighting.intensity}};
    j["eye"] = {{"iris_color", std::string(to_string(eye.iris_color))},
                {"sclera_tint", std::string(to_string(eye.sclera_tint))},
                {"pupil_dilation", eye.pupil_dilation},
                {"iris_scale", eye.iris_scale},
                {"vein_density", eye.vein_density}};
    j["landmarks_2d"] = std::move(lms);
    j["pupil_center_2d"] = ordered_json::array({pupil_center.u, pupil_center.v});
    j["flags"] = {{"pose_valid", pose_valid}, {"pupil_visible", pupil_visible}};
    return j;
  }

  std::string serialize() const { return to_json().dump(2) + "\n"; }

  static LabelRecord from_json(const nlohmann::json& j) {
    try {
      if (j.at("schema_version").get<std::string>() != kLabelSchemaVersion)
        throw Error(Errc::ParseError, "unsupported label schema version");
      auto v3 = [](const nlohmann::json& a) { return Vec3{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()}; };
      LabelRecord r;
      r.image = j.at("image").get<std::string>();
      r.identity = j.at("identity").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
      const auto& c = j.at("camera");
      r.camera_theta_deg = c.at("theta_deg").get<double>();
      r.camera_phi_deg = c.at("phi_deg").get<double>();
      r.camera_radius_mm = c.at("radius_mm").get<double>();
      r.mm_per_px = c.at("mm_per_px").get<double>();
      r.image_width = c.at("image_width").get<int>();
      r.image_height = c.at("image_height").get<int>();
      const auto& g = j.at("gaze");
      r.gaze_alpha_deg = g.at("alpha_deg").get<double>();
      r.gaze_beta_deg = g.at("beta_deg").get<double>();
      r.gaze_camera = v3(g.at("vector_camera"));
      r.gaze_head = v3(g.at("vector_head"));
      const auto& l = j.at("lighting");
      r.lighting = {l.at("env_id").get<std::string>(), l.at("rotation_deg").get<double>(), l.at("intensity").get<double>()};
      const auto& e = j.at("eye");
      r.eye.iris_color = iris_color_from_string(e.at("iris_color").get<std::string>());
      r.eye.sclera_tint = sclera_tint_from_string(e.at("sclera_tint").get<std::string>());
      r.eye.pupil_dilation = e.at("pupil_dilation").get<double>();
      r.eye.iris_scale = e.at("iris_scale").get<double>();
      r.eye.vein_density = e.at("vein_density").get<double>();
      const auto& lm = j.at("landmarks_2d");
      if (lm.size() != kLandmarkCount) throw Error(Errc::ParseError, "label must have 28 landmarks");
      for (int i = 0; i < kLandmarkCount; ++i) {
        const auto& p = lm.at(landmark_names()[i]);
        r.landmarks[i] = {p.at(0).get<double>(), p.at(1).get<double>()};
      }
      const auto& pc = j.at("pupil_center_2d");
      r.pupil_center = {pc.at(0).get<double>(), pc.at(1).get<double>()};
      r.pose_valid = j.at("flags").at("pose_valid").get<bool>();
      r.pupil_visible = j.at("flags").at("pupil_visible").get<bool>();
      return r;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, std::string("malformed label: ") + e.what());
    }
  }
};

/// Projects the landmark set through `scene.camera` and fills every label
/// field. The visibility flag is computed from the projected landmarks.
inline LabelRecord make_label_record(const SceneConfig& scene, const LandmarkSet& lm, const std::string& image_name) {
  const CameraPose& cam = scene.camera;
  LabelRecord r;
  r.image = image_name;
  r.camera_theta_deg = cam.spherical.theta_deg;
  r.camera_phi_deg = cam.spherical.phi_deg;
  r.camera_radius_mm = cam.spherical.radius;
  r.mm_per_px = cam.mm_per_px();
  r.image_width = cam.image_width;
  r.image_height = cam.image_height;
  r.gaze_alpha_deg = scene.gaze.alpha_deg;
  r.gaze_beta_deg = scene.gaze.beta_deg;
  r.gaze_camera = gaze_in_camera(cam, scene.gaze.vector).vec();
  r.gaze_head = scene.gaze.vector.vec();
  r.lighting = scene.lighting;
  r.eye = scene.eye;
  for (int i = 0; i < kLandmarkCount; ++i) r.landmarks[i] = project(cam, lm.points[i]);
  r.pupil_center = project(cam, lm.pupil_center);
  r.pose_valid = validate_pose(scene.eye_rotation());
  r.pupil_visible = point_strictly_inside(r.pupil_center, r.eyelid_landmarks());
  r.seed = scene.seed;
  return r;
}

}  // namespace oculogen
