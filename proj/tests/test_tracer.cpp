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

#include <chrono>

#include "test_support.hpp"

namespace oculogen {
namespace {

using testing::expect_vec_near;
using testing::random_in_box;
using testing::random_unit;

std::vector<Triangle> random_triangles(Rng& rng, int n) {
  std::vector<Triangle> tris;
  for (int i = 0; i < n; ++i) {
    const Vec3 c = random_in_box(rng, 10.0);
    tris.push_back({c + random_in_box(rng, 1.5), c + random_in_box(rng, 1.5), c + random_in_box(rng, 1.5)});
  }
  return tris;
}

TEST(Bvh, SingleTriangleIsOneLeaf) {
  const Bvh bvh({Triangle{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}}});
  EXPECT_EQ(bvh.leaf_count(), 1u);
  EXPECT_EQ(bvh.depth(), 0);
  const auto h = bvh.intersect(Ray{{0.2, 0.2, 1}, UnitVec3({0, 0, -1})});
  ASSERT_TRUE(h.has_value());
  EXPECT_NEAR(h->hit.t, 1.0, 1e-12);
}

TEST(Bvh, EmptyRejected) {
  try {
    Bvh bvh(std::vector<Triangle>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyScene);
  }
}

TEST(Bvh, MatchesBruteForceOnRandomSoup) {
  Rng rng(1);
  const auto tris = random_triangles(rng, 1000);
  const Bvh bvh(tris);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) {
    const Ray r{random_in_box(rng, 15.0), UnitVec3(random_unit(rng))};
    const auto a = bvh.intersect(r);
    const auto b = intersect_brute_force(tris, r);
    ASSERT_EQ(a.has_value(), b.has_value()) << i;
    if (a) {
      ++hits;
      EXPECT_NEAR(a->hit.t, b->hit.t, 1e-7);
    }
    EXPECT_EQ(bvh.occluded(r), b.has_value());
  }
  EXPECT_GT(hits, 1000);
}

TEST(Bvh, CoincidentTrianglesTerminate) {
  std::vector<Triangle> tris(500, Triangle{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}});
  const Bvh bvh(tris);
  EXPECT_LT(bvh.depth(), 64);
  const auto h = bvh.intersect(Ray{{0.25, 0.25, -2}, UnitVec3({0, 0, 1})});
  ASSERT_TRUE(h.has_value());
  EXPECT_NEAR(h->hit.t, 2.0, 1e-12);
}

TEST(Bvh, RespectsRayInterval) {
  const Bvh bvh({Triangle{Vec3{-1, -1, 0}, Vec3{1, -1, 0}, Vec3{0, 1, 0}}});
  Ray r{{0, 0, 5}, UnitVec3({0, 0, -1})};
  r.t_max = 4.0;
  EXPECT_FALSE(bvh.intersect(r).has_value());
  EXPECT_FALSE(bvh.occluded(r));
  r.t_max = 6.0;
  EXPECT_TRUE(bvh.occluded(r));
}

TEST(Fresnel, NormalIncidenceOracle) {
  EXPECT_NEAR(fresnel_dielectric(1.0, kCorneaIor), 0.02504279608656712, 1e-12);
  EXPECT_NEAR(fresnel_dielectric(1.0, kCorneaIor), 0.02504, 1e-4);
}

TEST(Fresnel, GrazingIsTotal) { EXPECT_NEAR(fresnel_dielectric(1e-9, kCorneaIor), 1.0, 1e-6); }

TEST(Fresnel, NoInterfaceNoReflection) {
  for (double c = 0.01; c <= 1.0; c += 0.01) EXPECT_NEAR(fresnel_dielectric(c, 1.0), 0.0, 1e-15);
}

TEST(Fresnel, EnergyConservedBelowTir) {
  for (double eta : {kCorneaIor, 1.0 / kCorneaIor, 1.5, 1.0 / 1.5}) {
    for (int i = 1; i <= 1000; ++i) {
      const double c = i / 1000.0;
      const double r = fresnel_dielectric(c, eta);
      if (r >= 1.0) {
        EXPECT_EQ(fresnel_transmittance(c, eta), 0.0);
        continue;
      }
      EXPECT_NEAR(r + fresnel_transmittance(c, eta), 1.0, 1e-12) << eta << " " << c;
    }
  }
}

TEST(Fresnel, TirOnset) {
  const double crit = rad2deg(std::asin(1.0 / kCorneaIor));
  EXPECT_NEAR(crit, 46.61413759620998, 1e-9);
  const double eta = 1.0 / kCorneaIor;
  EXPECT_LT(fresnel_dielectric(std::cos(deg2rad(crit - 0.05)), eta), 1.0);
  EXPECT_EQ(fresnel_dielectric(std::cos(deg2rad(crit + 0.05)), eta), 1.0);
}

TEST(Refract, NormalIncidenceUnchanged) {
  const UnitVec3 d({0, 0, -1}), n({0, 0, 1});
  const auto t = refract(d, n, 1.0 / kCorneaIor);
  ASSERT_TRUE(t.has_value());
  expect_vec_near(t->vec(), d.vec(), 1e-15);
}

TEST(Refract, InteriorBeyondCriticalAngle) {
  const double crit = rad2deg(std::asin(1.0 / kCorneaIor));
  const UnitVec3 n({0, 0, 1});
  auto at = [&](double deg) {
    return UnitVec3({std::sin(deg2rad(deg)), 0, -std::cos(deg2rad(deg))});
  };
  EXPECT_TRUE(refract(at(crit - 0.1), n, kCorneaIor).has_value());
  EXPECT_FALSE(refract(at(crit + 0.1), n, kCorneaIor).has_value());
}

TEST(Refract, SnellLaw) {
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 n = random_unit(rng);
    Vec3 d = random_unit(rng);
    if (dot(d, n) > 0) d = -d;
    const double eta = rng.uniform() < 0.5 ? 1.0 / kCorneaIor : kCorneaIor;
    const auto t = refract(UnitVec3(d), UnitVec3(n), eta);
    const double sin_i = length(cross(d, n));
    if (!t) {
      EXPECT_GE(eta * sin_i, 1.0 - 1e-12);
      continue;
    }
    EXPECT_NEAR(eta * sin_i, length(cross(t->vec(), n)), 1e-9);
    EXPECT_LT(dot(t->vec(), n), 0.0);
    EXPECT_NEAR(dot(cross(d, n), t->vec()), 0.0, 1e-9);
  }
}

TEST(Bsdf, SampledPdfMatchesEval) {
  const std::vector<Material> mats{TexturedDiffuse{}, Skin{}, LashFiber{}};
  Rng rng(3);
  for (const auto& m : mats) {
    for (int i = 0; i < 500; ++i) {
      const Vec3 n = random_unit(rng);
      Vec3 wo = random_unit(rng);
      if (dot(wo, n) < 0) wo = -wo;
      const auto s = sample_bsdf(m, wo, n, {}, rng.uniform(), rng.uniform(), rng.uniform());
      if (!s) continue;
      EXPECT_GE(dot(s->wi, n), 0.0);
      const BsdfEval e = eval_bsdf(m, wo, s->wi, n, {});
      EXPECT_NEAR(e.pdf, s->pdf, 1e-9 * std::max(1.0, s->pdf));
    }
  }
}

TEST(Bsdf, SkinLobesIntegrateToAlbedo) {
  Skin skin;
  skin.diffuse = {1, 1, 1};
  const Material m = skin;
  const Vec3 n{0, 0, 1};
  Rng rng(4);
  for (double deg : {0.0, 45.0, 85.0}) {
    const Vec3 wo{std::sin(deg2rad(deg)), 0, std::cos(deg2rad(deg))};
    double sum = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
      const auto s = sample_bsdf(m, wo, n, {}, rng.uniform(), rng.uniform(), rng.uniform());
      if (s) sum += s->weight.x;
    }
    EXPECT_NEAR(sum / count, 1.0, 1e-9) << deg;
  }
}

TEST(Materials, Validation) {
  EXPECT_THROW(validate_material(Dielectric{0.9}), Error);
  EXPECT_THROW(validate_material(TexturedDiffuse{nullptr, {1.2, 0, 0}}), Error);
  Skin s;
  s.wrap = 2;
  EXPECT_THROW(validate_material(s), Error);
  EXPECT_NO_THROW(validate_material(Skin{}));
}

CameraPose small_camera(int w = 30, int h = 20) { return place_camera(0, 0, 100, w, h, 30.0 / w); }

Scene furnace_scene(const Material& m, double l0) {
  Scene scene(EnvironmentMap::constant({l0, l0, l0}));
  const auto id = scene.add_material(m);
  scene.add_mesh(make_icosphere(4, 8.0), id);
  scene.commit();
  return scene;
}

RenderSettings settings(const CameraPose& cam, int spp, std::uint64_t seed = 1) {
  RenderSettings s;
  s.image_width = cam.image_width;
  s.image_height = cam.image_height;
  s.samples_per_pixel = spp;
  s.seed = seed;
  return s;
}

TEST(Trace, EmptySceneReturnsEnvironment) {
  Scene scene(generate_procedural_env(EnvKind::bright_indoor, 1, 64));
  scene.commit();
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const UnitVec3 d(random_unit(rng));
    const Rgb l = trace_path(scene, Ray{random_in_box(rng, 5), d}, rng);
    EXPECT_EQ(l, scene.environment().eval(d.vec()));
  }
  const CameraPose cam = small_camera();
  const Image img = render(scene, cam, settings(cam, 3));
  const Rgb expected = scene.environment().eval(cam.forward());
  for (const auto& p : img.pixels) expect_vec_near(p, expected, 1e-12);
}

TEST(Trace, FurnaceDiffuse) {
  const CameraPose cam = small_camera();
  const Scene scene = furnace_scene(TexturedDiffuse{nullptr, {1, 1, 1}}, 0.7);
  const Image img = render(scene, cam, settings(cam, 150));
  EXPECT_NEAR(img.mean().x, 0.7, 0.02 * 0.7);
  const Rgb center = img.at(15, 10);
  EXPECT_NEAR(center.x, 0.7, 0.05 * 0.7);
}

TEST(Trace, FurnaceSkin) {
  Skin skin;
  skin.diffuse = {1, 1, 1};
  const CameraPose cam = small_camera();
  const Scene scene = furnace_scene(skin, 0.7);
  const Image img = render(scene, cam, settings(cam, 150));
  EXPECT_NEAR(img.mean().x, 0.7, 0.02 * 0.7);
}

TEST(Trace, FurnaceGlassSphereIsTransparent) {
  const CameraPose cam = small_camera();
  const Scene scene = furnace_scene(Dielectric{kCorneaIor}, 0.7);
  const Image img = render(scene, cam, settings(cam, 32));
  EXPECT_NEAR(img.mean().x, 0.7, 0.02 * 0.7);
}

TEST(Trace, BlackEnvironmentIsBlack) {
  const CameraPose cam = small_camera();
  Scene scene(EnvironmentMap::constant({0, 0, 0}));
  const auto id = scene.add_material(TexturedDiffuse{});
  scene.add_mesh(make_icosphere(3, 8.0), id);
  scene.commit();
  const Image img = render(scene, cam, settings(cam, 8));
  for (const auto& p : img.pixels) EXPECT_EQ(p, (Rgb{0, 0, 0}));
}

TEST(Render, DeterministicAcrossJobs) {
  const CameraPose cam = small_camera();
  Scene scene(generate_procedural_env(EnvKind::bright_outdoor, 2, 64));
  const auto id = scene.add_material(Skin{});
  scene.add_mesh(make_icosphere(3, 8.0), id);
  scene.commit();
  const Image a = render(scene, cam, settings(cam, 8), 1);
  const Image b = render(scene, cam, settings(cam, 8), 4);
  const Image c = render(scene, cam, settings(cam, 8), 1);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a == c);
  const Image d = render(scene, cam, settings(cam, 8, 2), 1);
  EXPECT_FALSE(a == d);
}

TEST(Render, StandardErrorScalesWithSamples) {
  const CameraPose cam = small_camera();
  Scene scene(generate_procedural_env(EnvKind::cloudy_outdoor, 3, 64));
  const auto id = scene.add_material(TexturedDiffuse{nullptr, {0.8, 0.8, 0.8}});
  scene.add_mesh(make_icosphere(4, 8.0), id);
  scene.commit();
  RenderReport r1, r2;
  render(scene, cam, settings(cam, 64), 1, &r1);
  render(scene, cam, settings(cam, 128), 1, &r2);
  double s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < r1.standard_error.size(); ++i) {
    s1 += r1.standard_error[i];
    s2 += r2.standard_error[i];
  }
  ASSERT_GT(s2, 0.0);
  EXPECT_NEAR(s1 / s2, std::sqrt(2.0), 0.1 * std::sqrt(2.0));
  EXPECT_EQ(r1.nonfinite_samples, 0u);
}

TEST(Render, RejectsMismatchedSettings) {
  const CameraPose cam = small_camera();
  Scene scene;
  scene.commit();
  EXPECT_THROW(render(scene, cam, settings(small_camera(40, 20), 1)), Error);
  Scene uncommitted;
  uncommitted.add_mesh(make_icosphere(1), uncommitted.add_material(TexturedDiffuse{}));
  EXPECT_THROW(render(uncommitted, cam, settings(cam, 1)), Error);
}

TEST(ToneMap, SrgbOracles) {
  EXPECT_EQ(linear_to_srgb8(0.0), 0);
  EXPECT_EQ(linear_to_srgb8(0.5), 188);
  EXPECT_EQ(linear_to_srgb8(1.0), 255);
  EXPECT_EQ(linear_to_srgb8(3.0), 255);
  EXPECT_EQ(linear_to_srgb8(-1.0), 0);
}

TEST(ToneMap, PngRoundTrip) {
  testing::ScratchDir dir("png");
  Image img(4, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 4; ++x) img.at(x, y) = {x / 3.0, y / 2.0, 0.5};
  const std::string path = (dir.path() / "a.png").string();
  tone_map_export(img, path);
  const Image8 back = read_png(path);
  EXPECT_EQ(back.data, to_srgb8(img).data);
  EXPECT_THROW(write_png((dir.path() / "nodir" / "b.png").string(), back), Error);
  const std::string dump = (dir.path() / "a.flt").string();
  write_float_dump(dump, img);
  const Image back_f = read_float_dump(dump);
  ASSERT_EQ(back_f.pixels.size(), img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) expect_vec_near(back_f.pixels[i], img.pixels[i], 1e-7);
}

}  // namespace
}  // namespace oculogen
