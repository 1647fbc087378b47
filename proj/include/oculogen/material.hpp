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

// Materials and their scattering functions. Directions are world space; the
// shading normal passed in always faces the outgoing direction.

#include <cmath>
#include <memory>
#include <optional>
#include <variant>

#include "oculogen/error.hpp"
#include "oculogen/eye_texture.hpp"
#include "oculogen/geom.hpp"

namespace oculogen {

/// Unpolarized Fresnel reflectance for light arriving at cos_theta_i from a
/// medium of index 1 into relative index `eta` (n_t / n_i). eta < 1 is an
/// interior-to-exterior crossing; beyond the critical angle it returns 1.
inline double fresnel_dielectric(double cos_theta_i, double eta) {
  cos_theta_i = std::clamp(cos_theta_i, 0.0, 1.0);
  const double sin2_t = (1.0 - cos_theta_i * cos_theta_i) / (eta * eta);
  if (sin2_t >= 1.0) return 1.0;
  const double cos_t = std::sqrt(1.0 - sin2_t);
  const double rs = (cos_theta_i - eta * cos_t) / (cos_theta_i + eta * cos_t);
  const double rp = (eta * cos_theta_i - cos_t) / (eta * cos_theta_i + cos_t);
  return 0.5 * (rs * rs + rp * rp);
}

/// Fresnel transmittance from the amplitude transmission coefficients,
/// independent of `fresnel_dielectric`; 0 under total internal reflection.
inline double fresnel_transmittance(double cos_theta_i, double eta) {
  cos_theta_i = std::clamp(cos_theta_i, 0.0, 1.0);
  const double sin2_t = (1.0 - cos_theta_i * cos_theta_i) / (eta * eta);
  if (sin2_t >= 1.0) return 0.0;
  if (cos_theta_i == 0.0) return 0.0;
  const double cos_t = std::sqrt(1.0 - sin2_t);
  const double ts = 2.0 * cos_theta_i / (cos_theta_i + eta * cos_t);
  const double tp = 2.0 * cos_theta_i / (eta * cos_theta_i + cos_t);
  return 0.5 * (eta * cos_t / cos_theta_i) * (ts * ts + tp * tp);
}

inline Vec3 reflect(const Vec3& d, const Vec3& n) { return d - 2.0 * dot(d, n) * n; }

/// Snell refraction of incident direction `dir` through a surface whose
/// normal `normal` faces against `dir`; eta_ratio = n_i / n_t.
inline std::optional<UnitVec3> refract(const UnitVec3& dir, const UnitVec3& normal, double eta_ratio) {
  const double cos_i = -dot(dir.vec(), normal.vec());
  const double sin2_t = eta_ratio * eta_ratio * std::max(0.0, 1.0 - cos_i * cos_i);
  if (sin2_t >= 1.0) return std::nullopt;
  const double cos_t = std::sqrt(1.0 - sin2_t);
  return UnitVec3(eta_ratio * dir.vec() + (eta_ratio * cos_i - cos_t) * normal.vec());
}

struct Dielectric {
  double ior = 1.376;
};

/// Lambertian with an optional UV texture.
struct TexturedDiffuse {
  std::shared_ptr<const EyeTexture> texture;
  Rgb albedo{0.8, 0.8, 0.8};  ///< used when there is no texture

  Rgb eval_albedo(const Vec2& uv) const { return texture ? texture->sample(uv) : albedo; }
};

/// Wrap-diffuse lobe for the soft subsurface look plus a normalized Phong
/// gloss lobe, mixed as (1 - gloss_strength) : gloss_strength.
struct Skin {
  Rgb diffuse{0.60, 0.40, 0.32};
  double wrap = 0.3;
  double gloss_strength = 0.06;
  double gloss_exponent = 40.0;
};

struct LashFiber {
  Rgb albedo{0.03, 0.025, 0.02};
};

using Material = std::variant<Dielectric, TexturedDiffuse, Skin, LashFiber>;

inline void validate_material(const Material& m) {
  auto unit = [](const Rgb& c) { return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x <= 1 && c.y <= 1 && c.z <= 1; };
  std::visit(
      [&](const auto& mat) {
        using T = std::decay_t<decltype(mat)>;
        if constexpr (std::is_same_v<T, Dielectric>) {
          if (!(mat.ior > 1.0)) throw Error(Errc::InvalidParams, "dielectric ior must be > 1");
        } else if constexpr (std::is_same_v<T, TexturedDiffuse>) {
          if (!unit(mat.albedo)) throw Error(Errc::InvalidParams, "albedo outside [0,1]");
        } else if constexpr (std::is_same_v<T, Skin>) {
          if (!unit(mat.diffuse)) throw Error(Errc::InvalidParams, "albedo outside [0,1]");
          if (!(mat.wrap >= 0 && mat.wrap <= 1)) throw Error(Errc::InvalidParams, "wrap outside [0,1]");
          if (!(mat.gloss_strength >= 0 && mat.gloss_strength <= 1 && mat.gloss_exponent >= 0))
            throw Error(Errc::InvalidParams, "bad gloss parameters");
        } else {
          if (!unit(mat.albedo)) throw Error(Errc::InvalidParams, "albedo outside [0,1]");
        }
      },
      m);
}

/// Orthonormal frame around a unit normal (Duff et al. branchless basis).
struct Frame {
  Vec3 t, b, n;

  explicit Frame(const Vec3& normal) : n(normal) {
    const double s = std::copysign(1.0, n.z);
    const double a = -1.0 / (s + n.z);
    const double c = n.x * n.y * a;
    t = {1.0 + s * n.x * n.x * a, s * c, -s * n.x};
    b = {c, s + n.y * n.y * a, -n.y};
  }
  Vec3 to_world(const Vec3& l) const { return l.x * t + l.y * b + l.z * n; }
};

inline Vec3 sample_cosine_hemisphere(double u1, double u2) {
  const double r = std::sqrt(u1), phi = 2.0 * kPi * u2;
  return {r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u1))};
}

inline Vec3 sample_uniform_hemisphere(double u1, double u2) {
  const double z = u1, r = std::sqrt(std::max(0.0, 1.0 - z * z)), phi = 2.0 * kPi * u2;
  return {r * std::cos(phi), r * std::sin(phi), z};
}

/// Result of sampling a non-specular lobe: `weight` = f * cos / pdf.
struct BsdfSample {
  Vec3 wi;
  Rgb weight;
  double pdf = 0.0;
};

/// Evaluation of a non-specular lobe: `f_cos` = f * |cos theta_i|.
struct BsdfEval {
  Rgb f_cos;
  double pdf = 0.0;
};

namespace detail {

// Phong lobe about the mirror direction r, folded back into the upper
// hemisphere by mirroring through the tangent plane so it integrates to one
// over the hemisphere of n (lossless at grazing angles).
inline double folded_phong_pdf(const Vec3& wi, const Vec3& r, const Vec3& n, double e) {
  auto lobe = [&](const Vec3& w) {
    const double c = dot(w, r);
    return c > 0 ? (e + 1.0) / (2.0 * kPi) * std::pow(c, e) : 0.0;
  };
  return lobe(wi) + lobe(wi - 2.0 * dot(wi, n) * n);
}

inline double wrap_pdf(double cos_i, double w) { return (cos_i + w) / (kPi * (1.0 + 2.0 * w)); }

}  // namespace detail

/// Diffuse-type lobes (everything except Dielectric). `n` faces `wo`.
inline BsdfEval eval_bsdf(const Material& m, const Vec3& wo, const Vec3& wi, const Vec3& n, const Vec2& uv) {
  const double cos_i = dot(wi, n);
  if (cos_i <= 0.0) return {};
  if (const auto* d = std::get_if<TexturedDiffuse>(&m)) return {d->eval_albedo(uv) * (cos_i / kPi), cos_i / kPi};
  if (const auto* l = std::get_if<LashFiber>(&m)) return {l->albedo * (cos_i / kPi), cos_i / kPi};
  const auto& s = std::get<Skin>(m);
  const double g = s.gloss_strength;
  const double pd = detail::wrap_pdf(cos_i, s.wrap);
  const double pg = detail::folded_phong_pdf(wi, reflect(-wo, n), n, s.gloss_exponent);
  return {(1.0 - g) * pd * s.diffuse + Rgb{g, g, g} * pg, (1.0 - g) * pd + g * pg};
}

inline std::optional<BsdfSample> sample_bsdf(const Material& m, const Vec3& wo, const Vec3& n, const Vec2& uv,
                                             double u0, double u1, double u2) {
  const Frame f(n);
  Vec3 wi;
  if (std::holds_alternative<TexturedDiffuse>(m) || std::holds_alternative<LashFiber>(m)) {
    wi = f.to_world(sample_cosine_hemisphere(u1, u2));
  } else {
    const auto& s = std::get<Skin>(m);
    if (u0 < s.gloss_strength) {
      // Phong lobe around the mirror direction, folded if below the horizon.
      const Vec3 r = reflect(-wo, n);
      const double cos_a = std::pow(u1, 1.0 / (s.gloss_exponent + 1.0));
      const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
      const double phi = 2.0 * kPi * u2;
      wi = Frame(r).to_world({sin_a * std::cos(phi), sin_a * std::sin(phi), cos_a});
      if (dot(wi, n) < 0) wi = wi - 2.0 * dot(wi, n) * n;
    } else {
      // The wrap lobe's density is a cosine/uniform mixture with weights 1 : 2w.
      const double pc = 1.0 / (1.0 + 2.0 * s.wrap);
      const double v = (u0 - s.gloss_strength) / (1.0 - s.gloss_strength);
      wi = f.to_world(v < pc ? sample_cosine_hemisphere(u1, u2) : sample_uniform_hemisphere(u1, u2));
    }
  }
  wi = normalize(wi);
  const BsdfEval e = eval_bsdf(m, wo, wi, n, uv);
  if (!(e.pdf > 0.0)) return std::nullopt;
  return BsdfSample{wi, e.f_cos / e.pdf, e.pdf};
}

}  // namespace oculogen
