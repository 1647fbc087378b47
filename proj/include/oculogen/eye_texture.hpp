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

// Three-layer procedural eye albedo: sclera tint, radial-fiber iris, veins.
// The texture lives in the eyeball's polar UV chart: uv = 0.5 + 0.5 * s *
// (cos a, sin a), where a is the azimuth about +Z and s grows from 0 at the
// pupil center to 1 at the back pole (see EyeballGeometry::polar_uv).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oculogen/error.hpp"
#include "oculogen/geom.hpp"
#include "oculogen/random.hpp"

namespace oculogen {

enum class IrisColor { amber, blue, brown, grey };
enum class ScleraTint { white, pink, yellow };

inline constexpr std::array<IrisColor, 4> kIrisColors{IrisColor::amber, IrisColor::blue, IrisColor::brown,
                                                      IrisColor::grey};
inline constexpr std::array<ScleraTint, 3> kScleraTints{ScleraTint::white, ScleraTint::pink, ScleraTint::yellow};

inline std::string_view to_string(IrisColor c) {
  switch (c) {
    case IrisColor::amber: return "amber";
    case IrisColor::blue: return "blue";
    case IrisColor::brown: return "brown";
    case IrisColor::grey: return "grey";
  }
  return "?";
}

inline std::string_view to_string(ScleraTint t) {
  switch (t) {
    case ScleraTint::white: return "white";
    case ScleraTint::pink: return "pink";
    case ScleraTint::yellow: return "yellow";
  }
  return "?";
}

inline IrisColor iris_color_from_string(std::string_view s) {
  for (auto c : kIrisColors)
    if (to_string(c) == s) return c;
  throw Error(Errc::InvalidParams, "unknown iris color '" + std::string(s) + "'");
}

inline ScleraTint sclera_tint_from_string(std::string_view s) {
  for (auto t : kScleraTints)
    if (to_string(t) == s) return t;
  throw Error(Errc::InvalidParams, "unknown sclera tint '" + std::string(s) + "'");
}

using Rgb = Vec3;

struct Rgba {
  Rgb rgb;
  double a = 0.0;
};

/// Porter-Duff "over" for straight (non-premultiplied) alpha onto an opaque base.
inline Rgb over(const Rgba& top, const Rgb& base) { return top.rgb * top.a + base * (1.0 - top.a); }

inline Rgb sclera_tint_rgb(ScleraTint t) {
  switch (t) {
    case ScleraTint::white: return {0.80, 0.80, 0.80};
    case ScleraTint::pink: return {0.84, 0.66, 0.64};
    case ScleraTint::yellow: return {0.82, 0.76, 0.56};
  }
  return {0.8, 0.8, 0.8};
}

/// Dark and light ends of each iris color family (linear RGB).
inline std::array<Rgb, 2> iris_palette(IrisColor c) {
  switch (c) {
    case IrisColor::amber: return {Rgb{0.32, 0.16, 0.03}, Rgb{0.74, 0.46, 0.10}};
    case IrisColor::blue: return {Rgb{0.08, 0.17, 0.32}, Rgb{0.38, 0.56, 0.78}};
    case IrisColor::brown: return {Rgb{0.07, 0.035, 0.012}, Rgb{0.30, 0.15, 0.055}};
    case IrisColor::grey: return {Rgb{0.20, 0.22, 0.23}, Rgb{0.52, 0.55, 0.57}};
  }
  return {Rgb{}, Rgb{}};
}

/// Radii of the texture regions in the polar UV chart (s units).
struct IrisLayout {
  double pupil_s = 0.05;
  double iris_s = 0.15;
};

struct EyeTextureParams {
  IrisColor iris_color = IrisColor::brown;
  ScleraTint sclera_tint = ScleraTint::white;
  double vein_density = 0.3;
  IrisLayout layout;
};

/// Square RGB(A) image grid in UV space.
template <typename Pixel>
struct UvGrid {
  int resolution = 0;
  std::vector<Pixel> pixels;

  Pixel& at(int i, int j) { return pixels[static_cast<std::size_t>(j) * resolution + i]; }
  const Pixel& at(int i, int j) const { return pixels[static_cast<std::size_t>(j) * resolution + i]; }
};

class EyeTexture {
 public:
  EyeTexture(Rgb tint, UvGrid<Rgba> iris, UvGrid<Rgba> veins, UvGrid<Rgb> albedo)
      : tint_(tint), iris_(std::move(iris)), veins_(std::move(veins)), albedo_(std::move(albedo)) {}

  int resolution() const noexcept { return albedo_.resolution; }
  const Rgb& tint() const noexcept { return tint_; }
  const UvGrid<Rgba>& iris_layer() const noexcept { return iris_; }
  const UvGrid<Rgba>& vein_layer() const noexcept { return veins_; }
  const UvGrid<Rgb>& albedo() const noexcept { return albedo_; }

  /// Bilinear lookup of the composite albedo.
  Rgb sample(const Vec2& uv) const {
    const int n = albedo_.resolution;
    const double x = std::clamp(uv.u * n - 0.5, 0.0, n - 1.0);
    const double y = std::clamp(uv.v * n - 0.5, 0.0, n - 1.0);
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, n - 1), y1 = std::min(y0 + 1, n - 1);
    const double tx = x - x0, ty = y - y0;
    return lerp(lerp(albedo_.at(x0, y0), albedo_.at(x1, y0), tx), lerp(albedo_.at(x0, y1), albedo_.at(x1, y1), tx),
                ty);
  }

 private:
  Rgb tint_;
  UvGrid<Rgba> iris_;
  UvGrid<Rgba> veins_;
  UvGrid<Rgb> albedo_;
};

namespace detail {

// Periodic 1D value noise over [0, period) lattice cells.
class PeriodicNoise {
 public:
  PeriodicNoise(int period, Rng& rng) : values_(period) {
    for (auto& v : values_) v = rng.uniform();
  }
  double operator()(double x) const {
    const int n = static_cast<int>(values_.size());
    const double fx = std::floor(x);
    const double t = x - fx;
    const int i0 = ((static_cast<int>(fx) % n) + n) % n;
    const int i1 = (i0 + 1) % n;
    const double s = t * t * (3.0 - 2.0 * t);
    return std::lerp(values_[i0], values_[i1], s);
  }

 private:
  std::vector<double> values_;
};

inline double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

inline Rgba iris_pixel(double s, double azimuth, const EyeTextureParams& p, const std::array<Rgb, 2>& pal,
                       const PeriodicNoise& fibers, const PeriodicNoise& fine, const PeriodicNoise& crypts) {
  const double edge = p.layout.iris_s;
  const double feather = 0.01 * edge + 0.5 / 256.0;
  const double alpha = 1.0 - smoothstep(edge, edge + feather, s);
  if (alpha <= 0.0) return {};
  if (s < p.layout.pupil_s) return {Rgb{0.012, 0.012, 0.012}, 1.0};

  const double t = (s - p.layout.pupil_s) / (edge - p.layout.pupil_s);  // 0 at pupil, 1 at limbus
  const double turns = azimuth / (2.0 * kPi);
  double f = 0.55 * fibers(turns * 96.0 + 3.0 * t) + 0.30 * fine(turns * 240.0 - 5.0 * t) + 0.15 * crypts(turns * 24.0);
  f *= 1.0 - 0.35 * std::exp(-std::pow((t - 0.35) / 0.08, 2.0));  // collarette
  f *= 1.0 - 0.6 * smoothstep(0.82, 1.0, t);                       // limbal ring
  f *= 1.0 - 0.4 * smoothstep(0.12, 0.0, t);                       // pupillary ruff
  return {lerp(pal[0], pal[1], std::clamp(f, 0.0, 1.0)), alpha};
}

}  // namespace detail

/// Composites veins over iris over sclera tint. Deterministic for a fixed
/// seed; with vein_density == 0 the vein layer is fully transparent and the
/// result equals the two-layer composite.
inline EyeTexture composite_eye_texture(const EyeTextureParams& p, int resolution, std::uint64_t seed) {
  if (resolution < 256) throw Error(Errc::InvalidParams, "texture resolution must be >= 256");
  if (!(p.vein_density >= 0.0 && p.vein_density <= 1.0)) throw Error(Errc::OutOfRange, "vein density outside [0,1]");

  const Rgb tint = sclera_tint_rgb(p.sclera_tint);
  const auto pal = iris_palette(p.iris_color);
  const std::size_t count = static_cast<std::size_t>(resolution) * resolution;

  // Separate substreams so iris color never perturbs the vein pattern.
  Rng iris_rng(hash_seed({seed, 1}));
  const detail::PeriodicNoise fibers(96, iris_rng), fine(240, iris_rng), crypts(24, iris_rng);

  UvGrid<Rgba> iris{resolution, std::vector<Rgba>(count)};
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const double du = (i + 0.5) / resolution - 0.5, dv = (j + 0.5) / resolution - 0.5;
      const double s = 2.0 * std::hypot(du, dv);
      iris.at(i, j) = detail::iris_pixel(s, std::atan2(dv, du) + kPi, p, pal, fibers, fine, crypts);
    }
  }

  UvGrid<Rgba> veins{resolution, std::vector<Rgba>(count)};
  const Rgb vein_rgb{0.50, 0.06, 0.05};
  const int vein_count = static_cast<int>(std::lround(p.vein_density * 48.0));
  Rng vein_rng(hash_seed({seed, 2}));
  const double px = 1.0 / resolution;
  for (int v = 0; v < vein_count; ++v) {
    // Random walk from the visible sclera toward the limbus.
    double a = vein_rng.uniform(0.0, 2.0 * kPi);
    double s = vein_rng.uniform(0.22, 0.45);
    const double stop = p.layout.iris_s * vein_rng.uniform(1.05, 1.6);
    const double width = px * vein_rng.uniform(0.6, 1.4);
    const double strength = vein_rng.uniform(0.25, 0.7);
    double heading = vein_rng.uniform(-0.4, 0.4);
    while (s > stop) {
      const double u = 0.5 + 0.5 * s * std::cos(a), w = 0.5 + 0.5 * s * std::sin(a);
      const int ci = static_cast<int>(u * resolution), cj = static_cast<int>(w * resolution);
      for (int dj = -2; dj <= 2; ++dj) {
        for (int di = -2; di <= 2; ++di) {
          const int ii = ci + di, jj = cj + dj;
          if (ii < 0 || jj < 0 || ii >= resolution || jj >= resolution) continue;
          const double d = std::hypot((ii + 0.5) * px - u, (jj + 0.5) * px - w);
          const double cover = strength * std::exp(-0.5 * (d / width) * (d / width));
          auto& dst = veins.at(ii, jj);
          dst.a = std::max(dst.a, cover);
          dst.rgb = vein_rgb;
        }
      }
      heading = std::clamp(heading + vein_rng.uniform(-0.25, 0.25), -0.8, 0.8);
      a += heading * 0.5 * px / std::max(s, 1e-3);
      s -= 0.5 * px;
    }
  }
  // Veins stop at the limbus.
  for (std::size_t k = 0; k < count; ++k) veins.pixels[k].a *= 1.0 - iris.pixels[k].a;

  UvGrid<Rgb> albedo{resolution, std::vector<Rgb>(count)};
  for (std::size_t k = 0; k < count; ++k) albedo.pixels[k] = over(veins.pixels[k], over(iris.pixels[k], tint));
  return EyeTexture(tint, std::move(iris), std::move(veins), std::move(albedo));
}

}  // namespace oculogen
