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

#include <map>
#include <set>

#include "test_support.hpp"

namespace oculogen {
namespace {

using testing::expect_vec_near;
using testing::random_in_box;
using testing::random_unit;

TEST(Spherical, AxisAlignedCases) {
  expect_vec_near(spherical_to_cartesian({0, 0, 100}), {0, 0, 100}, 1e-12);
  expect_vec_near(spherical_to_cartesian({90, 0, 100}), {100, 0, 0}, 1e-12);
}

TEST(Spherical, GeneralCaseMatchesScalarOracle) {
  expect_vec_near(spherical_to_cartesian({20, 10, 100}), {33.68240888334651, 17.364817766693033, 92.54165783983234},
                  1e-12);
}

TEST(Spherical, OffsetCenter) {
  expect_vec_near(spherical_to_cartesian({0, 0, 10}, {1, 2, 3}), {1, 2, 13}, 1e-12);
}

TEST(Spherical, RoundTripRecoversCoordinates) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const SphericalCoord s{rng.uniform(-179, 179), rng.uniform(-89.9, 89.9), rng.uniform(0.1, 500)};
    const Vec3 c = random_in_box(rng, 10);
    const auto back = cartesian_to_spherical(spherical_to_cartesian(s, c), c);
    EXPECT_NEAR(back.theta_deg, s.theta_deg, 1e-6);
    EXPECT_NEAR(back.phi_deg, s.phi_deg, 1e-6);
    EXPECT_NEAR(back.radius, s.radius, 1e-6);
  }
}

TEST(Spherical, RejectsElevationBeyondPole) {
  EXPECT_THROW(SphericalCoord::make(0, 91, 1), Error);
  EXPECT_THROW(SphericalCoord::make(0, 0, 0), Error);
}

TEST(Rotation, RoundTripIsIdentity) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Rotation q = Rotation::axis_angle(random_unit(rng), rng.uniform(-360, 360));
    const Vec3 v = random_in_box(rng, 50);
    expect_vec_near(q(q.inverse()(v)), v, 1e-9);
    expect_vec_near(q.inverse()(q(v)), v, 1e-9);
  }
}

TEST(Rotation, CompositionOrder) {
  const Rotation a = Rotation::axis_angle({0, 1, 0}, 90), b = Rotation::axis_angle({1, 0, 0}, 90);
  const Vec3 v{0, 0, 1};
  expect_vec_near((a * b)(v), a(b(v)), 1e-12);
}

TEST(LookAt, FrontalIsIdentity) {
  const Rotation r = look_at({0, 0, 100}, {}, UnitVec3::assume_unit({0, 1, 0}));
  expect_vec_near(r({1, 0, 0}), {1, 0, 0}, 1e-12);
  expect_vec_near(r({0, 1, 0}), {0, 1, 0}, 1e-12);
  expect_vec_near(r({0, 0, -1}), {0, 0, -1}, 1e-12);
}

TEST(LookAt, SideViewIsQuarterTurnAboutY) {
  const Rotation r = look_at({100, 0, 0}, {}, UnitVec3::assume_unit({0, 1, 0}));
  const Rotation expected = Rotation::axis_angle({0, 1, 0}, 90);
  for (const Vec3& v : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}) expect_vec_near(r(v), expected(v), 1e-12);
}

TEST(LookAt, ViewDirectionProperty) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 eye = random_in_box(rng, 100), target = random_in_box(rng, 100);
    const Vec3 d = normalize(target - eye);
    if (std::abs(d.y) > 0.999) continue;
    const Rotation r = look_at(eye, target, UnitVec3::assume_unit({0, 1, 0}));
    expect_vec_near(r({0, 0, -1}), d, 1e-9);
  }
}

TEST(LookAt, DegenerateFrames) {
  EXPECT_THROW(look_at({0, 100, 0}, {}, UnitVec3::assume_unit({0, 1, 0})), Error);
  EXPECT_THROW(look_at({1, 1, 1}, {1, 1, 1}, UnitVec3::assume_unit({0, 1, 0})), Error);
}

TEST(TriangleIntersection, CentroidHit) {
  const Vec3 a{-1, -1, 0}, b{1, -1, 0}, c{0, 1, 0};
  const Vec3 centroid = (a + b + c) / 3.0;
  const auto hit = intersect_triangle(Ray{centroid + Vec3{0, 0, 5}, UnitVec3::assume_unit({0, 0, -1})}, a, b, c);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->t, 5.0, 1e-12);
  for (double w : hit->bary) EXPECT_NEAR(w, 1.0 / 3.0, 1e-12);
  expect_vec_near(hit->geometric_normal, {0, 0, 1}, 1e-12);
}

TEST(TriangleIntersection, ParallelRayMisses) {
  const auto hit = intersect_triangle(Ray{{0, 0, 1}, UnitVec3::assume_unit({1, 0, 0})}, {-1, -1, 0}, {1, -1, 0},
                                      {0, 1, 0});
  EXPECT_FALSE(hit);
}

// Independent plane-then-inside oracle.
std::optional<double> plane_inside(const Ray& r, const Vec3& a, const Vec3& b, const Vec3& c, double& margin) {
  const Vec3 n = cross(b - a, c - a);
  const double denom = dot(r.direction.vec(), n);
  margin = 0;
  if (denom == 0) return std::nullopt;
  const double t = dot(a - r.origin, n) / denom;
  if (t < 0) return std::nullopt;
  const Vec3 p = r.at(t);
  const double nn = dot(n, n);
  const double e0 = dot(cross(b - a, p - a), n) / nn, e1 = dot(cross(c - b, p - b), n) / nn,
               e2 = dot(cross(a - c, p - c), n) / nn;
  margin = std::min({std::abs(e0), std::abs(e1), std::abs(e2)});
  if (e0 >= 0 && e1 >= 0 && e2 >= 0) return t;
  return std::nullopt;
}

TEST(TriangleIntersection, AgreesWithPlaneInsideOracle) {
  Rng rng(4);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = random_in_box(rng, 1), b = random_in_box(rng, 1), c = random_in_box(rng, 1);
    const Vec3 o = random_in_box(rng, 3);
    const Vec3 target = (a + b + c) / 3.0 + random_in_box(rng, 0.7);
    const Ray r{o, UnitVec3(target - o)};
    double margin = 0;
    const auto oracle = plane_inside(r, a, b, c, margin);
    const auto hit = intersect_triangle(r, a, b, c);
    if (margin < 1e-9) continue;
    ASSERT_EQ(oracle.has_value(), hit.has_value()) << "case " << i;
    if (hit) {
      EXPECT_NEAR(hit->t, *oracle, 1e-7);
      ++hits;
    }
  }
  EXPECT_GT(hits, 100);
}

TEST(TriangleIntersection, ClosedSphereDoesNotLeak) {
  const TriMesh s = make_icosphere(3, 1.0);
  Rng rng(5);
  int leaks = 0;
  for (int i = 0; i < 10000; ++i) {
    const Ray r{{0, 0, 0}, UnitVec3::assume_unit(random_unit(rng))};
    bool any = false;
    for (const auto& f : s.faces)
      if (intersect_triangle(r, s.vertices[f[0]], s.vertices[f[1]], s.vertices[f[2]])) {
        any = true;
        break;
      }
    leaks += !any;
  }
  EXPECT_EQ(leaks, 0);
}

TEST(TriangleIntersection, RaysThroughSharedVerticesHit) {
  const TriMesh s = make_icosphere(2, 1.0);
  int leaks = 0;
  for (const auto& v : s.vertices) {
    const Ray r{{0, 0, 0}, UnitVec3(v)};
    bool any = false;
    for (const auto& f : s.faces)
      any = any || intersect_triangle(r, s.vertices[f[0]], s.vertices[f[1]], s.vertices[f[2]]).has_value();
    leaks += !any;
  }
  EXPECT_EQ(leaks, 0);
}

TEST(VertexNormals, IcosphereNormalsFollowPosition) {
  const TriMesh s = compute_vertex_normals(make_icosphere(3, 1.0));
  for (std::size_t i = 0; i < s.vertices.size(); ++i) EXPECT_LT(angle_between_deg(s.normals[i], s.vertices[i]), 2.0);
}

TEST(VertexNormals, FlatQuad) {
  TriMesh q;
  q.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  q.faces = {{0, 1, 2}, {0, 2, 3}};
  q = compute_vertex_normals(q);
  for (const auto& n : q.normals) expect_vec_near(n, {0, 0, 1}, 1e-12);
}

TEST(VertexNormals, IsolatedVertexIsDegenerate) {
  TriMesh q;
  q.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {5, 5, 5}};
  q.faces = {{0, 1, 2}};
  EXPECT_THROW(compute_vertex_normals(q), Error);
}

TEST(VertexNormals, EyeballOuterNormalsPointOutward) {
  const TriMesh outer = compute_vertex_normals(build_outer_mesh(EyeballParams{}, 4));
  for (std::size_t i = 0; i < outer.vertices.size(); ++i) EXPECT_GT(dot(outer.normals[i], outer.vertices[i]), 0.0);
}

TEST(Mesh, IcosphereIsClosedManifold) {
  const TriMesh s = make_icosphere(2, 1.0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& f : s.faces)
    for (int k = 0; k < 3; ++k) {
      const auto a = f[k], b = f[(k + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  for (const auto& [e, n] : edges) EXPECT_EQ(n, 2);
  EXPECT_EQ(s.vertices.size() + s.faces.size() - edges.size(), 2u);
}

TEST(Mesh, ValidateRejectsBadIndices) {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 3}};
  EXPECT_THROW(m.validate(), Error);
}

}  // namespace
}  // namespace oculogen
