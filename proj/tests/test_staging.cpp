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

#include <array>
#include <limits>
#include <map>
#include <tuple>

#include "test_support.hpp"

namespace oculogen {
namespace {

using testing::expect_vec_near;

TEST(PlaceCamera, Frontal) {
  const CameraPose c = place_camera(0, 0, 100, 120, 80, 0.5);
  expect_vec_near(c.position, {0, 0, 100}, 1e-12);
  EXPECT_DOUBLE_EQ(c.ortho_width, 60.0);
  EXPECT_DOUBLE_EQ(c.ortho_height, 40.0);
  EXPECT_DOUBLE_EQ(c.mm_per_px(), 0.5);
}

TEST(PlaceCamera, CenterProjectsToImageCenter) {
  const CameraPose c = place_camera(20, 10, 100, 120, 80, 0.5);
  const Vec2 p = project(c, {0, 0, 0});
  EXPECT_NEAR(p.u, 60.0, 1e-6);
  EXPECT_NEAR(p.v, 40.0, 1e-6);
}

TEST(PlaceCamera, PoleIsDegenerate) {
  try {
    place_camera(0, 90, 100, 120, 80, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateFrame);
  }
}

TEST(Project, RightOffsetScalesByResolution) {
  const CameraPose c = place_camera(0, 0, 100, 120, 80, 0.5);
  const Vec2 p = project(c, c.right());
  EXPECT_NEAR(p.u, 62.0, 1e-12);
  EXPECT_NEAR(p.v, 40.0, 1e-12);
  const Vec2 q = project(c, c.up());
  EXPECT_NEAR(q.v, 38.0, 1e-12);
}

TEST(Project, UnprojectRoundTrip) {
  Rng rng(20);
  for (int i = 0; i < 1000; ++i) {
    const CameraPose c = place_camera(rng.uniform(-60, 60), rng.uniform(-60, 60), 100, 120, 80, 0.5);
    const Vec2 px{rng.uniform(-50, 170), rng.uniform(-50, 130)};
    const Vec2 back = project(c, unproject(c, px, rng.uniform(0, 200)));
    EXPECT_NEAR(back.u, px.u, 1e-9);
    EXPECT_NEAR(back.v, px.v, 1e-9);
  }
}

TEST(GazeDirection, EyeContactPointsAtCamera) {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const CameraPose c = place_camera(rng.uniform(-180, 180), rng.uniform(-80, 80), rng.uniform(10, 200), 120, 80, 0.5);
    expect_vec_near(gaze_direction(c, 0, 0).vec(), normalize(c.position), 1e-9);
  }
}

TEST(GazeDirection, QuarterYawIsCameraRight) {
  const CameraPose c = place_camera(0, 0, 100, 120, 80, 0.5);
  expect_vec_near(gaze_direction(c, 0, 90).vec(), c.right(), 1e-9);
}

TEST(GazeDirection, ComposedAngleOracle) {
  const CameraPose c = place_camera(0, 0, 100, 120, 80, 0.5);
  EXPECT_NEAR(angle_between_deg(gaze_direction(c, 10, 10).vec(), gaze_direction(c, 0, 0).vec()), 14.10604426056639, 1e-6);
}

TEST(GazeDirection, AngleFollowsCompositionForAnyCamera) {
  Rng rng(22);
  for (int i = 0; i < 500; ++i) {
    const CameraPose c = place_camera(rng.uniform(-40, 40), rng.uniform(-40, 40), 100, 120, 80, 0.5);
    const double a = rng.uniform(-45, 45), b = rng.uniform(-45, 45);
    const double expected = rad2deg(std::acos(std::cos(deg2rad(a)) * std::cos(deg2rad(b))));
    EXPECT_NEAR(angle_between_deg(gaze_direction(c, a, b).vec(), gaze_direction(c, 0, 0).vec()), expected, 1e-6);
  }
}

TEST(GazeDirection, PositiveAlphaLooksUp) {
  const CameraPose c = place_camera(0, 0, 100, 120, 80, 0.5);
  EXPECT_GT(gaze_direction(c, 10, 0).y(), 0.0);
  EXPECT_GT(gaze_direction(c, 0, 10).x(), 0.0);
}

TEST(ValidatePose, ConstraintBoundary) {
  EXPECT_TRUE(validate_pose({25, 35}));
  EXPECT_TRUE(validate_pose({-25, -35}));
  EXPECT_FALSE(validate_pose({26, 0}));
  EXPECT_FALSE(validate_pose({0, 35.5}));
  EXPECT_TRUE(validate_pose({0, 0}));
}

TEST(EyeRotation, InverseOfOrientation) {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    const EyeRotation r{rng.uniform(-60, 60), rng.uniform(-80, 80)};
    const auto back = eye_rotation_in_head(eyeball_orientation(r)(UnitVec3::assume_unit({0, 0, 1})));
    EXPECT_NEAR(back.pitch_deg, r.pitch_deg, 1e-9);
    EXPECT_NEAR(back.yaw_deg, r.yaw_deg, 1e-9);
  }
}

std::array<Vec2, 12> projected_lids(const CameraPose& cam, const EyeRegionModel& m, const TriMesh& face) {
  std::array<Vec2, 12> out{};
  const auto lm = eyelid_landmarks_3d(m, face);
  for (int k = 0; k < 12; ++k) out[k] = project(cam, lm[k]);
  return out;
}

TEST(PupilVisible, FrontalEyeContact) {
  const CameraPose cam = place_camera(0, 0, 100, 120, 80, 0.5);
  const auto region = build_eye_region(EyeRegionParams{});
  const auto eyeball = build_eyeball(EyeballParams{}, 4, 256, 0);
  const auto pe = pose_eyeball(eyeball, Rotation::identity(), 0.2, 1.0);
  const auto lids = pose_eye_region(region, 0.5, pe.outer);
  const auto poly = projected_lids(cam, region, lids.face);
  EXPECT_TRUE(pupil_visible(cam, pe.pupil_center, poly));
}

TEST(PupilVisible, PupilHiddenBehindLoweredUpperLid) {
  const CameraPose cam = place_camera(0, 0, 100, 120, 80, 0.5);
  const auto region = build_eye_region(EyeRegionParams{});
  const auto eyeball = build_eyeball(EyeballParams{}, 4, 256, 0);
  const auto pe = pose_eyeball(eyeball, eyeball_orientation({25, 0}), 0.2, 1.0);
  const auto lids = pose_eye_region(region, 0.0, pe.outer);
  const auto poly = projected_lids(cam, region, lids.face);
  const Vec2 pc = project(cam, pe.pupil_center);
  // Independent check: the pupil sits above the upper mid-margin landmark.
  EXPECT_LT(pc.v, poly[3].v);
  EXPECT_FALSE(pupil_visible(cam, pe.pupil_center, poly));
}

TEST(PupilVisible, DegeneratePolygonIsFalse) {
  const CameraPose cam = place_camera(0, 0, 100, 120, 80, 0.5);
  std::array<Vec2, 12> line{};
  for (int k = 0; k < 12; ++k) line[k] = {50.0 + k, 40.0};
  EXPECT_FALSE(pupil_visible(cam, {0, 0, 0}, line));
  std::array<Vec2, 12> same{};
  EXPECT_FALSE(pupil_visible(cam, {0, 0, 0}, same));
}

std::vector<double> tens() {
  std::vector<double> v;
  for (int a = -45; a <= 45; a += 10) v.push_back(a);
  return v;
}

TEST(EnumeratePoses, FrontalGridSurvivors) {
  const std::vector<std::pair<double, double>> cams{{0, 0}};
  const auto g = tens();
  const auto poses = enumerate_poses(cams, g, g, PoseConstraints{25, 35});
  ASSERT_EQ(poses.size(), 48u);
  for (const auto& s : poses) {
    EXPECT_LE(std::abs(s.gaze.alpha_deg), 25.0);
    EXPECT_LE(std::abs(s.gaze.beta_deg), 35.0);
    EXPECT_TRUE(validate_pose(s.eye_rotation()));
  }
}

TEST(EnumeratePoses, NoConstraintsKeepsEverything) {
  const std::vector<std::pair<double, double>> cams{{0, 0}};
  const auto g = tens();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(enumerate_poses(cams, g, g, PoseConstraints{inf, inf}).size(), 100u);
}

TEST(EnumeratePoses, ZeroConstraintsEmpty) {
  const std::vector<std::pair<double, double>> cams{{0, 0}};
  const auto g = tens();
  try {
    enumerate_poses(cams, g, g, PoseConstraints{0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyEnumeration);
  }
}

TEST(EnumeratePoses, FixedRowMajorOrder) {
  const std::vector<std::pair<double, double>> cams{{-10, 0}, {10, 0}};
  const auto g = tens();
  const auto a = enumerate_poses(cams, g, g, PoseConstraints{});
  const auto b = enumerate_poses(cams, g, g, PoseConstraints{});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto key = [](const SceneConfig& s) { return std::tuple(s.camera_index, s.gaze_index); };
    EXPECT_LT(key(a[i - 1]), key(a[i]));
    EXPECT_EQ(a[i].gaze.vector.vec(), b[i].gaze.vector.vec());
  }
}

TEST(EnumeratePoses, OffsetCameraConstrainsHeadRotation) {
  // With the camera 20 degrees to the side, eyeball-in-head yaw is the sum
  // of camera azimuth and gaze yaw, so fewer yaw values survive.
  const std::vector<std::pair<double, double>> cams{{20, 0}};
  const auto g = tens();
  const auto poses = enumerate_poses(cams, g, g, PoseConstraints{});
  EXPECT_LT(poses.size(), 48u);
  for (const auto& s : poses) EXPECT_TRUE(validate_pose(s.eye_rotation()));
}

TEST(SampleRandomness, DeterministicForSeed) {
  const std::vector<std::string> envs{"a", "b", "c"};
  Rng r1(7), r2(7);
  const auto a = sample_scene_randomness({}, r1, envs), b = sample_scene_randomness({}, r2, envs);
  EXPECT_EQ(a.eye.iris_color, b.eye.iris_color);
  EXPECT_EQ(a.eye.pupil_dilation, b.eye.pupil_dilation);
  EXPECT_EQ(a.lighting.env_id, b.lighting.env_id);
  EXPECT_EQ(a.lighting.rotation_deg, b.lighting.rotation_deg);
  EXPECT_EQ(a.lighting.intensity, b.lighting.intensity);
}

TEST(SampleRandomness, IrisColorsUniform) {
  const std::vector<std::string> envs{"a"};
  Rng rng(8);
  std::map<IrisColor, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[sample_scene_randomness({}, rng, envs).eye.iris_color];
  ASSERT_EQ(counts.size(), kIrisColors.size());
  for (const auto& [c, k] : counts) EXPECT_NEAR(k / static_cast<double>(n), 1.0 / kIrisColors.size(), 0.02);
}

TEST(SampleRandomness, RotationUniformKs) {
  const std::vector<std::string> envs{"a"};
  Rng rng(9);
  std::vector<double> rot;
  for (int i = 0; i < 10000; ++i) rot.push_back(sample_scene_randomness({}, rng, envs).lighting.rotation_deg);
  std::sort(rot.begin(), rot.end());
  double ks = 0;
  for (std::size_t i = 0; i < rot.size(); ++i) {
    const double cdf = rot[i] / 360.0;
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / rot.size()), std::abs(cdf - (i + 1.0) / rot.size())});
  }
  EXPECT_LT(ks, 0.02);
  EXPECT_GE(rot.front(), 0.0);
  EXPECT_LT(rot.back(), 360.0);
}

TEST(SampleRandomness, IntensityInRange) {
  const std::vector<std::string> envs{"a"};
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const double k = sample_scene_randomness({}, rng, envs).lighting.intensity;
    EXPECT_GE(k, 0.5 - 1e-12);
    EXPECT_LE(k, 2.0 + 1e-12);
  }
}

TEST(SampleRandomness, TogglesDoNotShiftOtherDraws) {
  const std::vector<std::string> envs{"a", "b"};
  RandomizationToggles off;
  off.iris_color = false;
  Rng r1(11), r2(11);
  const auto a = sample_scene_randomness({}, r1, envs), b = sample_scene_randomness({}, r2, envs, off);
  EXPECT_EQ(b.eye.iris_color, IrisColor::brown);
  EXPECT_EQ(a.eye.pupil_dilation, b.eye.pupil_dilation);
  EXPECT_EQ(a.lighting.rotation_deg, b.lighting.rotation_deg);
}

TEST(SampleRandomness, NoEnvironments) {
  Rng rng(1);
  EXPECT_THROW(sample_scene_randomness({}, rng, std::vector<std::string>{}), Error);
}

}  // namespace
}  // namespace oculogen
