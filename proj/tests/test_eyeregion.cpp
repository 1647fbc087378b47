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

#include "test_support.hpp"

namespace oculogen {
namespace {

const EyeRegionModel& default_region() {
  static const EyeRegionModel m = build_eye_region(EyeRegionParams{});
  return m;
}

const EyeballModel& default_eyeball() {
  static const EyeballModel m = build_eyeball(EyeballParams{}, 4, 256, 0);
  return m;
}

double mean_y(const TriMesh& face, const std::vector<std::uint32_t>& ids) {
  double s = 0;
  for (auto id : ids) s += face.vertices[id].y;
  return s / static_cast<double>(ids.size());
}

TEST(EyeRegion, FissureBoundaryOnCommandedEllipse) {
  const auto& m = default_region();
  const double a = 10.0, b = 5.0;
  for (auto id : m.boundary_ids) {
    const Vec3& v = m.face.vertices[id];
    // Radial distance in the image plane from the ellipse along the center ray.
    const double q = std::hypot(v.x / a, v.y / b);
    const double r = std::hypot(v.x, v.y);
    EXPECT_LT(std::abs(r - r / q), 0.5);
  }
}

TEST(EyeRegion, ZeroLashCountGrowsNothing) {
  EyeRegionParams p;
  p.lash_count = 0;
  const auto m = build_eye_region(p);
  EXPECT_TRUE(grow_eyelashes(m, -1).empty());
  EXPECT_TRUE(grow_eyelashes(m, +1).empty());
}

TEST(EyeRegion, DeterministicBuild) {
  EyeRegionParams p;
  p.seed = 42;
  const auto a = build_eye_region(p), b = build_eye_region(p);
  EXPECT_EQ(a.face.vertices, b.face.vertices);
  EXPECT_EQ(a.wrinkle_field_neutral.values(), b.wrinkle_field_neutral.values());
}

TEST(EyeRegion, InvalidParams) {
  EyeRegionParams p;
  p.fissure_height = 30;
  EXPECT_THROW(build_eye_region(p), Error);
}

TEST(EyelidWeight, EndpointsAndMidpoint) {
  EXPECT_DOUBLE_EQ(eyelid_weight(25), 1.0);
  EXPECT_DOUBLE_EQ(eyelid_weight(-25), 0.0);
  EXPECT_DOUBLE_EQ(eyelid_weight(0), 0.5);
  EXPECT_THROW(eyelid_weight(26), Error);
}

TEST(PoseEyelids, LidsMoveBetweenEndpoints) {
  const auto& m = default_region();
  const double up = mean_y(pose_eyelids(m, 1.0), m.upper_margin_ids);
  const double down = mean_y(pose_eyelids(m, 0.0), m.upper_margin_ids);
  EXPECT_GE(up - down, 2.0);
}

TEST(PoseEyelids, AffineInWeight) {
  const auto& m = default_region();
  const TriMesh p0 = pose_eyelids(m, 0.0), p1 = pose_eyelids(m, 1.0);
  for (double w : {0.25, 0.5, 0.8}) {
    const TriMesh pw = pose_eyelids(m, w);
    for (std::size_t v = 0; v < pw.vertices.size(); ++v)
      ASSERT_LT(distance(pw.vertices[v], (1 - w) * p0.vertices[v] + w * p1.vertices[v]), 1e-9);
  }
}

TEST(PoseEyelids, DownwardGazeSmoothsWrinkles) {
  const auto& m = default_region();
  const auto lo = ScalarField2D::mix(m.wrinkle_field_down, m.wrinkle_field_neutral, 0.0);
  const auto hi = ScalarField2D::mix(m.wrinkle_field_down, m.wrinkle_field_neutral, 1.0);
  for (std::size_t i = 0; i < lo.values().size(); ++i) ASSERT_LE(std::abs(lo.values()[i]), std::abs(hi.values()[i]));
  EXPECT_GT(hi.max_abs(), 0.0);
}

TEST(PoseEyelids, RejectsWeightOutsideUnitInterval) {
  EXPECT_THROW(pose_eyelids(default_region(), -0.1), Error);
}

TEST(SnapEyelids, AlreadyTouchingIsIdentity) {
  const auto& m = default_region();
  const TriMesh snapped = snap_eyelids(pose_eyelids(m, 0.5), m.boundary_ids, default_eyeball().outer, 3.0);
  const TriMesh again = snap_eyelids(snapped, m.boundary_ids, default_eyeball().outer, 3.0);
  for (std::size_t v = 0; v < snapped.vertices.size(); ++v) ASSERT_LT(distance(snapped.vertices[v], again.vertices[v]), 1e-9);
}

TEST(SnapEyelids, SmallOffsetClosesGap) {
  const auto& m = default_region();
  const TriMesh& outer = default_eyeball().outer;
  TriMesh face = snap_eyelids(pose_eyelids(m, 0.5), m.boundary_ids, outer, 3.0);
  for (auto id : m.boundary_ids) face.vertices[id] += 0.3 * normalize(face.vertices[id]);
  const TriMesh fixed = snap_eyelids(face, m.boundary_ids, outer, 1.0);
  for (auto id : m.boundary_ids)
    EXPECT_LE(distance(fixed.vertices[id], closest_point_on_mesh(outer, fixed.vertices[id])), 0.05);
}

TEST(SnapEyelids, LargeOffsetFails) {
  const auto& m = default_region();
  const TriMesh& outer = default_eyeball().outer;
  TriMesh face = snap_eyelids(pose_eyelids(m, 0.5), m.boundary_ids, outer, 3.0);
  for (auto id : m.boundary_ids) face.vertices[id] += 5.0 * normalize(face.vertices[id]);
  try {
    snap_eyelids(face, m.boundary_ids, outer, 1.0);
    FAIL() << "expected SnapFailed";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SnapFailed);
  }
}

TEST(SnapEyelids, MarginNeverPenetratesEyeball) {
  const auto& m = default_region();
  for (double pitch : {-25.0, -10.0, 0.0, 10.0, 25.0}) {
    const PosedEyeball pe = pose_eyeball(default_eyeball(), eyeball_orientation({pitch, 0}), 0.2, 1.0);
    const double w = eyelid_weight(pitch);
    const TriMesh face = snap_eyelids(pose_eyelids(m, w), m.boundary_ids, pe.outer, 3.0);
    for (auto id : m.boundary_ids) EXPECT_GE(length(face.vertices[id]), 12.0 - 0.05);
  }
}

TEST(Eyelashes, StraightWithoutGravity) {
  const auto& m = default_region();
  for (const auto& s : grow_eyelashes(m, m.face, -1, 0.0)) {
    const Vec3 d0 = normalize(s.points[1] - s.points[0]);
    for (std::size_t k = 2; k < s.points.size(); ++k)
      EXPECT_LT(length(cross(normalize(s.points[k] - s.points[0]), d0)), 1e-9);
  }
}

TEST(Eyelashes, UpperCurlUpLowerDroop) {
  const auto& m = default_region();
  auto check = [&](int sign) {
    const auto strands = grow_eyelashes(m, sign);
    ASSERT_EQ(static_cast<int>(strands.size()), m.params.lash_count);
    for (const auto& s : strands) {
      const Vec3 d0 = s.points[1] - s.points[0];
      const Vec3 straight = s.points[0] + d0 * static_cast<double>(s.points.size() - 1);
      if (sign < 0) {
        EXPECT_GT(s.points.back().y, straight.y);
      } else {
        EXPECT_LT(s.points.back().y, straight.y);
      }
    }
  };
  check(-1);
  check(+1);
}

TEST(Eyelashes, RejectsBadGravitySign) {
  EXPECT_THROW(grow_eyelashes(default_region(), 0), Error);
}

TEST(EyelidLandmarks, NeutralLandmarksOnFissure) {
  const auto& m = default_region();
  const auto lm = eyelid_landmarks_3d(m, m.face);
  ASSERT_EQ(lm.size(), 12u);
  for (const auto& p : lm) {
    double best = kInf;
    for (auto id : m.boundary_ids) best = std::min(best, distance(p, m.face.vertices[id]));
    EXPECT_LT(best, 0.5);
  }
}

TEST(EyelidLandmarks, CornersStayMidMarginMoves) {
  const auto& m = default_region();
  const auto a = eyelid_landmarks_3d(m, pose_eyelids(m, 0.0));
  const auto b = eyelid_landmarks_3d(m, pose_eyelids(m, 1.0));
  EXPECT_LT(distance(a[0], b[0]), 1.0);
  EXPECT_LT(distance(a[6], b[6]), 1.0);
  EXPECT_GE(distance(a[3], b[3]), 2.0);
  EXPECT_GE(distance(a[9], b[9]), 2.0);
}

TEST(EyelidLandmarks, TemporalCornerFirstCounterClockwise) {
  const auto& m = default_region();
  const auto lm = eyelid_landmarks_3d(m, m.face);
  EXPECT_GT(lm[0].x, 0.0);
  EXPECT_NEAR(lm[0].y, 0.0, 1e-9);
  EXPECT_GT(lm[3].y, 0.0);
  EXPECT_LT(lm[6].x, 0.0);
  EXPECT_LT(lm[9].y, 0.0);
}

TEST(EyelidLandmarks, IdsInvariantAcrossPoses) {
  const auto& m = default_region();
  for (double w : {0.0, 0.3, 1.0}) {
    const TriMesh f = pose_eyelids(m, w);
    const auto lm = eyelid_landmarks_3d(m, f);
    for (int k = 0; k < 12; ++k) EXPECT_EQ(lm[k], f.vertices[m.eyelid_landmark_vertex_ids[k]]);
  }
}

TEST(PoseEyeRegion, LashesFollowSnappedMargin) {
  const auto& m = default_region();
  const PosedEyeRegion r = pose_eye_region(m, 0.5, default_eyeball().outer);
  EXPECT_EQ(r.upper_lashes.size(), static_cast<std::size_t>(m.params.lash_count));
  EXPECT_EQ(r.lower_lashes.size(), static_cast<std::size_t>(m.params.lash_count));
  for (const auto& s : r.upper_lashes) EXPECT_LT(distance(s.points[0], r.face.vertices[s.root_vertex]), 1.5);
}

}  // namespace
}  // namespace oculogen
