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

// Monte Carlo path tracer: environment next-event estimation combined with
// BSDF sampling by the balance heuristic, Fresnel-weighted dielectric
// branching, Russian roulette, and orthographic per-pixel rendering with
// counter-based RNG streams.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

#include "oculogen/bvh.hpp"
#include "oculogen/error.hpp"
#include "oculogen/geom.hpp"
#include "oculogen/image.hpp"
#include "oculogen/lighting.hpp"
#include "oculogen/material.hpp"
#include "oculogen/random.hpp"
#include "oculogen/staging.hpp"

namespace oculogen {

/// Triangle soup with per-corner normals and UVs and a material per face.
class Scene {
 public:
  struct Corner {
    Vec3 normal;
    Vec2 uv;
  };

  explicit Scene(EnvironmentMap env = EnvironmentMap::constant({0, 0, 0})) { set_environment(std::move(env)); }

  std::uint32_t add_material(Material m) {
    validate_material(m);
    materials_.push_back(std::move(m));
    return static_cast<std::uint32_t>(materials_.size() - 1);
  }

  void add_mesh(const TriMesh& mesh, std::uint32_t material) {
    if (material >= materials_.size()) throw Error(Errc::InvalidParams, "unknown material id");
    mesh.validate();
    for (const auto& f : mesh.faces) {
      tris_.push_back({mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]});
      std::array<Corner, 3> c{};
      for (int k = 0; k < 3; ++k) {
        c[k].normal = mesh.normals.empty() ? Vec3{} : mesh.normals[f[k]];
        c[k].uv = mesh.uvs.empty() ? Vec2{} : mesh.uvs[f[k]];
      }
      corners_.push_back(c);
      material_ids_.push_back(material);
    }
    bvh_.reset();
  }

  void set_environment(EnvironmentMap env) {
    env_ = std::move(env);
    try {
      sampler_.emplace(env_);
    } catch (const Error& e) {
      if (e.code() != Errc::BlackEnvironment) throw;
      sampler_.reset();
    }
  }

  /// Builds the BVH; call after the last add_mesh. An empty scene has no BVH
  /// and every ray escapes.
  void commit() {
    if (!tris_.empty()) bvh_.emplace(tris_);
  }

  std::size_t triangle_count() const noexcept { return tris_.size(); }
  const std::vector<Triangle>& triangles() const noexcept { return tris_; }
  const EnvironmentMap& environment() const noexcept { return env_; }
  const EnvSampler* sampler() const noexcept { return sampler_ ? &*sampler_ : nullptr; }
  const Material& material(std::uint32_t tri) const { return materials_[material_ids_[tri]]; }
  const Bvh* bvh() const noexcept { return bvh_ ? &*bvh_ : nullptr; }
  bool committed() const noexcept { return tris_.empty() || bvh_.has_value(); }

  std::optional<SoupHit> intersect(const Ray& r) const { return bvh_ ? bvh_->intersect(r) : std::nullopt; }
  bool occluded(const Ray& r) const { return bvh_ && bvh_->occluded(r); }

  /// Interpolated shading normal (falls back to the geometric normal).
  Vec3 shading_normal(const SoupHit& h) const {
    const auto& c = corners_[h.triangle];
    const Vec3 n = h.hit.bary[0] * c[0].normal + h.hit.bary[1] * c[1].normal + h.hit.bary[2] * c[2].normal;
    const double len = length(n);
    return len > 1e-12 ? n / len : h.hit.geometric_normal;
  }

  Vec2 uv(const SoupHit& h) const {
    const auto& c = corners_[h.triangle];
    return {h.hit.bary[0] * c[0].uv.u + h.hit.bary[1] * c[1].uv.u + h.hit.bary[2] * c[2].uv.u,
            h.hit.bary[0] * c[0].uv.v + h.hit.bary[1] * c[1].uv.v + h.hit.bary[2] * c[2].uv.v};
  }

 private:
  std::vector<Triangle> tris_;
  std::vector<std::array<Corner, 3>> corners_;
  std::vector<std::uint32_t> material_ids_;
  std::vector<Material> materials_;
  std::optional<Bvh> bvh_;
  EnvironmentMap env_;
  std::optional<EnvSampler> sampler_;
};

struct RenderSettings {
  int image_width = 120;
  int image_height = 80;
  int samples_per_pixel = 150;
  int max_depth = 8;
  int roulette_depth = 4;
  std::uint64_t seed = 0;

  void validate() const {
    if (image_width <= 0 || image_height <= 0) throw Error(Errc::InvalidParams, "image dimensions must be > 0");
    if (samples_per_pixel < 1) throw Error(Errc::InvalidParams, "spp must be >= 1");
    if (max_depth < 1) throw Error(Errc::InvalidParams, "max_depth must be >= 1");
  }
};

struct RenderReport {
  std::uint64_t nonfinite_samples = 0;
  /// Per-pixel standard error of the pixel mean (luminance), row-major.
  std::vector<double> standard_error;
};

namespace detail {

inline constexpr double kRayEpsilon = 1e-4;  // mm

inline Vec3 offset_origin(const Vec3& p, const Vec3& ng, const Vec3& dir) {
  return p + (dot(dir, ng) > 0 ? kRayEpsilon : -kRayEpsilon) * ng;
}

}  // namespace detail

/// One path sample. `depth` counts path segments already traced.
inline Rgb trace_path(const Scene& scene, Ray ray, Rng& rng, int max_depth = 8, int roulette_depth = 4,
                      int depth = 0) {
  const EnvironmentMap& env = scene.environment();
  const EnvSampler* sampler = scene.sampler();
  Rgb radiance, throughput{1, 1, 1};
  bool specular = true;  // camera rays count as specular for MIS purposes
  double bsdf_pdf = 0.0;

  for (; depth < max_depth; ++depth) {
    const auto hit = scene.intersect(ray);
    if (!hit) {
      const Rgb le = env.eval(ray.direction.vec());
      double w = 1.0;
      if (!specular && sampler) {
        const double lp = sampler->pdf(env, ray.direction.vec());
        w = bsdf_pdf / (bsdf_pdf + lp);
      }
      radiance += hadamard(throughput, le) * w;
      break;
    }

    const Vec3 p = ray.at(hit->hit.t);
    const Vec3 wo = -ray.direction.vec();
    const Material& mat = scene.material(hit->triangle);
    const Vec3 ng = hit->hit.geometric_normal;
    Vec3 ns = scene.shading_normal(*hit);
    if (dot(ns, ng) < 0) ns = -ns;

    if (const auto* die = std::get_if<Dielectric>(&mat)) {
      const bool entering = dot(wo, ng) > 0;
      const Vec3 n = entering ? ns : -ns;
      const double eta = entering ? die->ior : 1.0 / die->ior;
      const double cos_i = std::clamp(dot(wo, n), 0.0, 1.0);
      const double fr = fresnel_dielectric(cos_i, eta);
      Vec3 dir;
      if (rng.uniform() < fr) {
        dir = reflect(ray.direction.vec(), n);
      } else {
        const auto t = refract(ray.direction, UnitVec3::assume_unit(n), 1.0 / eta);
        dir = t ? t->vec() : reflect(ray.direction.vec(), n);
      }
      ray = Ray{detail::offset_origin(p, ng, dir), UnitVec3(dir)};
      specular = true;
    } else {
      // Two-sided: orient both normals toward the viewer.
      const Vec3 ngf = dot(wo, ng) >= 0 ? ng : -ng;
      if (dot(ns, ngf) < 0) ns = -ns;
      const Vec2 uv = scene.uv(*hit);

      if (sampler) {
        const double u1 = rng.uniform(), u2 = rng.uniform();
        const DirectionSample ls = sampler->sample(env, u1, u2);
        const Vec3& wi = ls.direction.vec();
        if (ls.pdf > 0 && dot(wi, ngf) > 0) {
          const BsdfEval e = eval_bsdf(mat, wo, wi, ns, uv);
          if (e.pdf > 0 && !scene.occluded(Ray{detail::offset_origin(p, ngf, wi), ls.direction, 0.0, kInf})) {
            const double w = ls.pdf / (ls.pdf + e.pdf);
            radiance += hadamard(throughput, hadamard(e.f_cos, env.eval(wi))) * (w / ls.pdf);
          }
        }
      }

      const double u0 = rng.uniform(), u1 = rng.uniform(), u2 = rng.uniform();
      const auto s = sample_bsdf(mat, wo, ns, uv, u0, u1, u2);
      if (!s || dot(s->wi, ngf) <= 0) break;
      throughput = hadamard(throughput, s->weight);
      bsdf_pdf = s->pdf;
      specular = false;
      ray = Ray{detail::offset_origin(p, ngf, s->wi), UnitVec3::assume_unit(s->wi)};
    }

    if (depth + 1 >= roulette_depth) {
      const double q = std::min(0.95, std::max({throughput.x, throughput.y, throughput.z}));
      if (rng.uniform() >= q) break;
      throughput = throughput / q;
    }
  }
  return radiance;
}

namespace detail {

inline Rgb render_pixel(const Scene& scene, const CameraPose& cam, const RenderSettings& s, int x, int y,
                        std::uint64_t& nonfinite, double* std_err) {
  const int n = s.samples_per_pixel;
  Rng rng(hash_seed({s.seed, static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(s.image_width) + x}));
  // Latin-hypercube jitter over the pixel footprint.
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(static_cast<std::size_t>(i) + 1)]);

  const Vec3 fwd = cam.forward();
  Rgb sum;
  double lum_sum = 0.0, lum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double sx = (k + rng.uniform()) / n;
    const double sy = (perm[k] + rng.uniform()) / n;
    const Vec3 origin = unproject(cam, {x + sx, y + sy}, 0.0);
    Rgb l = trace_path(scene, Ray{origin, UnitVec3::assume_unit(fwd)}, rng, s.max_depth, s.roulette_depth);
    if (!(std::isfinite(l.x) && std::isfinite(l.y) && std::isfinite(l.z))) {
      l = {};
      ++nonfinite;
    }
    sum += l;
    const double lum = luminance(l);
    lum_sum += lum;
    lum_sq += lum * lum;
  }
  if (std_err) {
    const double mean = lum_sum / n;
    const double var = n > 1 ? std::max(0.0, (lum_sq - n * mean * mean) / (n - 1)) : 0.0;
    *std_err = std::sqrt(var / n);
  }
  return sum / static_cast<double>(n);
}

}  // namespace detail

inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Renders the orthographic view of `cam`. Rows are distributed over `jobs`
/// workers (0 = hardware concurrency); the result does not depend on it.
inline Image render(const Scene& scene, const CameraPose& cam, const RenderSettings& s, int jobs = 1,
                    RenderReport* report = nullptr) {
  s.validate();
  if (!scene.committed()) throw Error(Errc::InvalidParams, "scene not committed");
  if (cam.image_width != s.image_width || cam.image_height != s.image_height)
    throw Error(Errc::InvalidParams, "camera and render settings disagree on image size");

  Image img(s.image_width, s.image_height);
  std::vector<double> std_err(report ? img.pixels.size() : 0);
  std::vector<std::uint64_t> nonfinite(static_cast<std::size_t>(s.image_height), 0);
  std::atomic<int> next_row{0};
  auto worker = [&] {
    for (int y = next_row++; y < s.image_height; y = next_row++) {
      for (int x = 0; x < s.image_width; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * s.image_width + x;
        img.pixels[i] = detail::render_pixel(scene, cam, s, x, y, nonfinite[y], report ? &std_err[i] : nullptr);
      }
    }
  };
  const int n = std::min(resolve_jobs(jobs), s.image_height);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (report) {
    report->nonfinite_samples = std::accumulate(nonfinite.begin(), nonfinite.end(), std::uint64_t{0});
    report->standard_error = std::move(std_err);
  }
  return img;
}

}  // namespace oculogen
