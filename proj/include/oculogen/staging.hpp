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

// Scene posing: orthographic camera placement on a sphere around the eyeball,
// gaze construction from eye contact plus pitch/yaw offsets, anatomical and
// pupil-visibility filters, and pose enumeration/randomization.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oculogen/error.hpp"
#include "oculogen/eye_texture.hpp"
#include "oculogen/eyeball.hpp"
#include "oculogen/geom.hpp"
#include "oculogen/random.hpp"

namespace oculogen {

inline constexpr double kDefaultMmPerPx = 0.5;
inline constexpr double kDefaultCameraRadius = 100.0;

/// Orthographic camera looking at the eyeball center.
struct CameraPose {
  SphericalCoord spherical;
  Vec3 center;
  Vec3 position;
  Rotation orientation;
  double ortho_width = 60.0;
  double ortho_height = 40.0;
  int image_width = 120;
  int image_height = 80;

  double mm_per_px() const { return ortho_width / image_width; }
  Vec3 right() const { return orientation(Vec3{1, 0, 0}); }
  Vec3 up() const { return orientation(Vec3{0, 1, 0}); }
  Vec3 forward() const { return orientation(Vec3{0, 0, -1}); }
};

inline CameraPose place_camera(double theta_deg, double phi_deg, double radius, int image_width, int image_height,
                               double mm_per_px = kDefaultMmPerPx, const Vec3& center = {}) {
  if (!(std::abs(phi_deg) < 90.0)) throw Error(Errc::DegenerateFrame, "camera elevation at a pole");
  if (image_width <= 0 || image_height <= 0 || !(mm_per_px > 0))
    throw Error(Errc::InvalidParams, "image dimensions and scale must be positive");
  CameraPose c;
  c.spherical = SphericalCoord::make(theta_deg, phi_deg, radius);
  c.center = center;
  c.position = spherical_to_cartesian(c.spherical, center);
  c.orientation = look_at(c.position, center, UnitVec3::assume_unit({0, 1, 0}));
  c.image_width = image_width;
  c.image_height = image_height;
  c.ortho_width = image_width * mm_per_px;
  c.ortho_height = image_height * mm_per_px;
  return c;
}

/// Orthographic projection to pixel coordinates: origin at the top-left
/// image corner, +x right, +y down.
inline Vec2 project(const CameraPose& cam, const Vec3& p) {
  const Vec3 rel = p - cam.position;
  const double s = 1.0 / cam.mm_per_px();
  return {0.5 * cam.image_width + dot(rel, cam.right()) * s, 0.5 * cam.image_height - dot(rel, cam.up()) * s};
}

/// Inverse of `project` for a point at `depth` mm in front of the camera.
inline Vec3 unproject(const CameraPose& cam, const Vec2& px, double depth) {
  const double mm = cam.mm_per_px();
  return cam.position + (px.u - 0.5 * cam.image_width) * mm * cam.right() -
         (px.v - 0.5 * cam.image_height) * mm * cam.up() + depth * cam.forward();
}

/// Gaze vector: start at eye contact (eyeball center toward the camera), pitch
/// by alpha about the camera's horizontal axis (positive looks up), then yaw by
/// beta about the camera's up axis (positive turns toward camera-right).
inline UnitVec3 gaze_direction(const CameraPose& cam, double alpha_deg, double beta_deg) {
  const UnitVec3 g0(cam.position - cam.center);
  const Rotation pitch = Rotation::axis_angle(-cam.right(), alpha_deg);
  const Rotation yaw = Rotation::axis_angle(cam.up(), beta_deg);
  return UnitVec3((yaw * pitch)(g0.vec()));
}

/// Eyeball-in-head rotation of a head-frame gaze vector.
struct EyeRotation {
  double pitch_deg = 0;  ///< positive up
  double yaw_deg = 0;    ///< positive toward +X
};

inline EyeRotation eye_rotation_in_head(const UnitVec3& g) {
  return {rad2deg(std::asin(std::clamp(g.y(), -1.0, 1.0))), rad2deg(std::atan2(g.x(), g.z()))};
}

/// Roll-free rotation taking the model's optical axis (+Z) to `g`.
inline Rotation eyeball_orientation(const EyeRotation& r) {
  return Rotation::axis_angle({0, 1, 0}, r.yaw_deg) * Rotation::axis_angle({-1, 0, 0}, r.pitch_deg);
}

struct PoseConstraints {
  double alpha_max_deg = 25.0;
  double beta_max_deg = 35.0;
};

/// Anatomical limit on the eyeball-in-head rotation.
inline bool validate_pose(const EyeRotation& r, const PoseConstraints& c = {}) {
  constexpr double eps = 1e-9;
  return std::abs(r.pitch_deg) <= c.alpha_max_deg + eps && std::abs(r.yaw_deg) <= c.beta_max_deg + eps;
}

inline double polygon_area(std::span<const Vec2> poly) {
  double a = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) a += poly[j].u * poly[i].v - poly[i].u * poly[j].v;
  return 0.5 * a;
}

/// Even-odd point-in-polygon test; points on an edge count as outside and a
/// zero-area polygon contains nothing.
inline bool point_strictly_inside(const Vec2& p, std::span<const Vec2> poly) {
  if (poly.size() < 3 || std::abs(polygon_area(poly)) < 1e-9) return false;
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[j];
    const Vec2& b = poly[i];
    const double cr = (b.u - a.u) * (p.v - a.v) - (b.v - a.v) * (p.u - a.u);
    const bool within = std::min(a.u, b.u) <= p.u && p.u <= std::max(a.u, b.u) && std::min(a.v, b.v) <= p.v &&
                        p.v <= std::max(a.v, b.v);
    if (std::abs(cr) < 1e-12 && within) return false;
    if ((a.v > p.v) != (b.v > p.v)) {
      const double x = a.u + (p.v - a.v) * (b.u - a.u) / (b.v - a.v);
      if (p.u < x) inside = !inside;
    }
  }
  return inside;
}

inline bool pupil_visible(const CameraPose& cam, const Vec3& pupil_center, std::span<const Vec2> eyelid_landmarks_2d) {
  return point_strictly_inside(project(cam, pupil_center), eyelid_landmarks_2d);
}

struct GazeSpec {
  double alpha_deg = 0;
  double beta_deg = 0;
  UnitVec3 vector;  ///< head frame
};

/// Eye-model configuration (iris/sclera appearance and pupil/iris size).
struct EyeConfig {
  IrisColor iris_color = IrisColor::brown;
  ScleraTint sclera_tint = ScleraTint::white;
  double vein_density = 0.3;
  double pupil_dilation = 0.2;
  double iris_scale = 1.0;
};

struct LightingSpec {
  std::string env_id;
  double rotation_deg = 0;
  double intensity = 1;
};

struct SceneConfig {
  CameraPose camera;
  GazeSpec gaze;
  LightingSpec lighting;
  EyeConfig eye;
  std::uint64_t seed = 0;
  int camera_index = 0;
  int gaze_index = 0;

  EyeRotation eye_rotation() const { return eye_rotation_in_head(gaze.vector); }
};

struct CameraSettings {
  double radius = kDefaultCameraRadius;
  int image_width = 120;
  int image_height = 80;
  double mm_per_px = kDefaultMmPerPx;
};

/// Cartesian product of camera and gaze grids in row-major (theta, phi,
/// alpha, beta) order, keeping only anatomically valid eyeball rotations.
inline std::vector<SceneConfig> enumerate_poses(std::span<const std::pair<double, double>> camera_grid,
                                                std::span<const double> alphas, std::span<const double> betas,
                                                const PoseConstraints& constraints, const CameraSettings& cs = {}) {
  if (camera_grid.empty() || alphas.empty() || betas.empty()) throw Error(Errc::InvalidParams, "empty grid");
  std::vector<SceneConfig> out;
  for (std::size_t ci = 0; ci < camera_grid.size(); ++ci) {
    const auto [theta, phi] = camera_grid[ci];
    const CameraPose cam = place_camera(theta, phi, cs.radius, cs.image_width, cs.image_height, cs.mm_per_px);
    int gi = 0;
    for (double a : alphas) {
      for (double b : betas) {
        const UnitVec3 g = gaze_direction(cam, a, b);
        if (validate_pose(eye_rotation_in_head(g), constraints)) {
          SceneConfig s;
          s.camera = cam;
          s.gaze = {a, b, g};
          s.camera_index = static_cast<int>(ci);
          s.gaze_index = gi;
          out.push_back(std::move(s));
        }
        ++gi;
      }
    }
  }
  if (out.empty()) throw Error(Errc::EmptyEnumeration, "every pose violates the rotation constraints");
  return out;
}

struct RandomizationToggles {
  bool iris_color = true;
  bool sclera_tint = true;
  bool pupil_dilation = true;
  bool vein_density = true;
  bool iris_scale = true;
  bool env_rotation = true;
  bool env_intensity = true;
};

/// Fills eye appearance and lighting from `rng`. Every draw happens whether or
/// not its toggle is set, so toggles never shift the other draws.
inline SceneConfig sample_scene_randomness(SceneConfig base, Rng& rng, std::span<const std::string> env_ids,
                                           const RandomizationToggles& on = {}) {
  if (env_ids.empty()) throw Error(Errc::InvalidParams, "no lighting environments available");
  const auto color = kIrisColors[rng.index(kIrisColors.size())];
  const auto tint = kScleraTints[rng.index(kScleraTints.size())];
  const double dilation = rng.uniform();
  const double veins = rng.uniform();
  const double scale = rng.uniform(kIrisScaleMin, kIrisScaleMax);
  const auto& env = env_ids[rng.index(env_ids.size())];
  const double rotation = rng.uniform(0.0, 360.0);
  const double intensity = std::exp(rng.uniform(std::log(0.5), std::log(2.0)));

  if (on.iris_color) base.eye.iris_color = color;
  if (on.sclera_tint) base.eye.sclera_tint = tint;
  if (on.pupil_dilation) base.eye.pupil_dilation = dilation;
  if (on.vein_density) base.eye.vein_density = veins;
  if (on.iris_scale) base.eye.iris_scale = scale;
  base.lighting.env_id = env;
  base.lighting.rotation_deg = on.env_rotation ? rotation : 0.0;
  base.lighting.intensity = on.env_intensity ? intensity : 1.0;
  return base;
}

}  // namespace oculogen
