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

// Image-based lighting from equirectangular HDR panoramas.
//
// Mapping (map-local frame): azimuth phi = atan2(x, z) in [0, 2 pi) and
// inclination theta = acos(y) from +Y; u = phi / (2 pi), v = theta / pi.
// Texel (i, j) covers u in [i, i+1) / W and v in [j, j+1) / H. Rotation is
// about the vertical (+Y) axis and only shifts azimuth; intensity is a
// scalar multiplier. Both are metadata and never resample the grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oculogen/error.hpp"
#include "oculogen/geom.hpp"
#include "oculogen/random.hpp"

namespace oculogen {

using Rgb = Vec3;

inline double luminance(const Rgb& c) { return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z; }

class EnvironmentMap {
 public:
  EnvironmentMap() = default;
  EnvironmentMap(int width, int height, std::vector<Rgb> texels, std::string id = {})
      : width_(width), height_(height), texels_(std::move(texels)), id_(std::move(id)) {
    if (width <= 0 || height <= 0 || width != 2 * height)
      throw Error(Errc::InvalidParams, "equirectangular map must be 2:1");
    if (texels_.size() != static_cast<std::size_t>(width) * height) throw Error(Errc::InvalidParams, "texel count");
    for (const auto& t : texels_)
      if (!(std::isfinite(t.x) && std::isfinite(t.y) && std::isfinite(t.z)) || t.x < 0 || t.y < 0 || t.z < 0)
        throw Error(Errc::InvalidParams, "radiance must be finite and non-negative");
  }

  static EnvironmentMap constant(const Rgb& value, int width = 16, int height = 8, std::string id = "constant") {
    return EnvironmentMap(width, height, std::vector<Rgb>(static_cast<std::size_t>(width) * height, value), std::move(id));
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::string& id() const noexcept { return id_; }
  double rotation_deg() const noexcept { return rotation_deg_; }
  double intensity() const noexcept { return intensity_; }
  const std::vector<Rgb>& texels() const noexcept { return texels_; }
  const Rgb& texel(int i, int j) const { return texels_[static_cast<std::size_t>(j) * width_ + i]; }

  /// Rotation about +Y; composes additively.
  EnvironmentMap rotated(double angle_deg) const {
    EnvironmentMap m = *this;
    m.rotation_deg_ = std::fmod(rotation_deg_ + angle_deg, 360.0);
    if (m.rotation_deg_ < 0) m.rotation_deg_ += 360.0;
    return m;
  }

  /// Intensity scaling; composes multiplicatively.
  EnvironmentMap scaled(double k) const {
    if (!(k > 0.0) || !std::isfinite(k)) throw Error(Errc::NonPositiveScale, "intensity scale must be > 0");
    EnvironmentMap m = *this;
    m.intensity_ *= k;
    return m;
  }

  EnvironmentMap with_id(std::string id) const {
    EnvironmentMap m = *this;
    m.id_ = std::move(id);
    return m;
  }

  /// World direction to the map-local frame (undoes the rotation).
  Vec3 to_local(const Vec3& d) const { return Rotation::axis_angle({0, 1, 0}, -rotation_deg_)(d); }
  Vec3 to_world(const Vec3& d) const { return Rotation::axis_angle({0, 1, 0}, rotation_deg_)(d); }

  static Vec2 direction_to_uv(const Vec3& d) {
    double phi = std::atan2(d.x, d.z);
    if (phi < 0) phi += 2.0 * kPi;
    double u = phi / (2.0 * kPi);
    if (u >= 1.0) u -= 1.0;
    return {u, std::acos(std::clamp(d.y, -1.0, 1.0)) / kPi};
  }

  static Vec3 uv_to_direction(const Vec2& uv) {
    const double phi = 2.0 * kPi * uv.u, theta = kPi * uv.v;
    return {std::sin(theta) * std::sin(phi), std::cos(theta), std::sin(theta) * std::cos(phi)};
  }

  /// Bilinear lookup in map-local UV, wrapping in u and clamping in v.
  Rgb lookup_uv(const Vec2& uv) const {
    const double x = uv.u * width_ - 0.5;
    const double y = std::clamp(uv.v * height_ - 0.5, 0.0, height_ - 1.0);
    const double fx = std::floor(x);
    const int x0 = ((static_cast<int>(fx) % width_) + width_) % width_;
    const int x1 = (x0 + 1) % width_;
    const int y0 = static_cast<int>(y);
    const int y1 = std::min(y0 + 1, height_ - 1);
    const double tx = x - fx, ty = y - y0;
    return lerp(lerp(texel(x0, y0), texel(x1, y0), tx), lerp(texel(x0, y1), texel(x1, y1), tx), ty);
  }

  /// Radiance arriving from world direction `dir`.
  Rgb eval(const Vec3& dir) const { return intensity_ * lookup_uv(direction_to_uv(to_local(dir))); }

  /// Solid angle of texel row j.
  double texel_solid_angle(int j) const {
    const double c0 = std::cos(kPi * j / height_), c1 = std::cos(kPi * (j + 1) / height_);
    return (2.0 * kPi / width_) * (c0 - c1);
  }

  /// Sum of texel radiance times texel solid angle (rotation-invariant).
  Rgb total_power() const {
    Rgb sum;
    for (int j = 0; j < height_; ++j) {
      Rgb row;
      for (int i = 0; i < width_; ++i) row += texel(i, j);
      sum += row * texel_solid_angle(j);
    }
    return intensity_ * sum;
  }

  double mean_luminance() const {
    double s = 0.0;
    for (const auto& t : texels_) s += luminance(t);
    return intensity_ * s / static_cast<double>(texels_.size());
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> texels_;
  double rotation_deg_ = 0.0;
  double intensity_ = 1.0;
  std::string id_;
};

inline EnvironmentMap rotate_env(const EnvironmentMap& env, double angle_deg) { return env.rotated(angle_deg); }
inline EnvironmentMap scale_intensity(const EnvironmentMap& env, double k) { return env.scaled(k); }
inline Rgb eval_radiance(const EnvironmentMap& env, const Vec3& dir) { return env.eval(dir); }

struct DirectionSample {
  UnitVec3 direction;
  double pdf = 0.0;  ///< per steradian
};

/// Luminance-proportional sampling over texels. Row weights use the exact
/// texel solid angle (the integral of sin(theta) over the row), and within a
/// texel directions are uniform in solid angle, so the density is constant
/// per texel and equals luminance / sum(luminance * solid angle).
class EnvSampler {
 public:
  explicit EnvSampler(const EnvironmentMap& env) : width_(env.width()), height_(env.height()) {
    conditional_.resize(static_cast<std::size_t>(width_) * height_);
    marginal_.resize(height_);
    lum_.resize(static_cast<std::size_t>(width_) * height_);
    double total = 0.0;
    for (int j = 0; j < height_; ++j) {
      double row = 0.0;
      for (int i = 0; i < width_; ++i) {
        const double l = luminance(env.texel(i, j));
        lum_[index(i, j)] = l;
        row += l;
        conditional_[index(i, j)] = row;
      }
      for (int i = 0; i < width_; ++i) conditional_[index(i, j)] = row > 0 ? conditional_[index(i, j)] / row : (i + 1.0) / width_;
      conditional_[index(width_ - 1, j)] = 1.0;
      total += row * env.texel_solid_angle(j);
      marginal_[j] = total;
    }
    if (!(total > 0.0)) throw Error(Errc::BlackEnvironment, "environment has zero total luminance");
    for (auto& m : marginal_) m /= total;
    marginal_.back() = 1.0;
    normalizer_ = total;
  }

  /// Density (per steradian, map-local frame) of drawing map-local direction d.
  double pdf_local(const Vec3& d) const {
    const Vec2 uv = EnvironmentMap::direction_to_uv(d);
    const int i = std::min(static_cast<int>(uv.u * width_), width_ - 1);
    const int j = std::min(static_cast<int>(uv.v * height_), height_ - 1);
    return lum_[index(i, j)] / normalizer_;
  }

  double pdf(const EnvironmentMap& env, const Vec3& world_dir) const { return pdf_local(env.to_local(world_dir)); }

  /// Draws a world-space direction from two uniforms in [0, 1).
  DirectionSample sample(const EnvironmentMap& env, double u1, double u2) const {
    const int j = pick(marginal_.begin(), marginal_.end(), u1);
    const double lo_j = j == 0 ? 0.0 : marginal_[j - 1];
    const double fj = (u1 - lo_j) / std::max(marginal_[j] - lo_j, 1e-300);
    const auto row_begin = conditional_.begin() + static_cast<std::ptrdiff_t>(index(0, j));
    const int i = pick(row_begin, row_begin + width_, u2);
    const double lo_i = i == 0 ? 0.0 : conditional_[index(i - 1, j)];
    const double fi = (u2 - lo_i) / std::max(conditional_[index(i, j)] - lo_i, 1e-300);

    // Uniform in cos(theta) within the row, uniform in phi within the column.
    const double c0 = std::cos(kPi * j / height_), c1 = std::cos(kPi * (j + 1) / height_);
    const double cos_t = std::clamp(c0 + (c1 - c0) * std::clamp(fj, 0.0, 1.0), -1.0, 1.0);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = 2.0 * kPi * (i + std::clamp(fi, 0.0, 1.0 - 1e-12)) / width_;
    const Vec3 local{sin_t * std::sin(phi), cos_t, sin_t * std::cos(phi)};
    return {UnitVec3::assume_unit(env.to_world(local)), lum_[index(i, j)] / normalizer_};
  }

 private:
  template <typename It>
  static int pick(It begin, It end, double u) {
    const auto it = std::upper_bound(begin, end, u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - begin, (end - begin) - 1));
  }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * width_ + i; }

  int width_, height_;
  std::vector<double> conditional_;
  std::vector<double> marginal_;
  std::vector<double> lum_;
  double normalizer_ = 0.0;
};

inline DirectionSample sample_direction(const EnvironmentMap& env, const EnvSampler& sampler, double u1, double u2) {
  return sampler.sample(env, u1, u2);
}

enum class EnvKind { bright_outdoor, cloudy_outdoor, bright_indoor, dark_indoor };

inline constexpr std::array<EnvKind, 4> kEnvKinds{EnvKind::bright_outdoor, EnvKind::cloudy_outdoor,
                                                  EnvKind::bright_indoor, EnvKind::dark_indoor};

inline std::string_view to_string(EnvKind k) {
  switch (k) {
    case EnvKind::bright_outdoor: return "bright_outdoor";
    case EnvKind::cloudy_outdoor: return "cloudy_outdoor";
    case EnvKind::bright_indoor: return "bright_indoor";
    case EnvKind::dark_indoor: return "dark_indoor";
  }
  return "?";
}

inline std::optional<EnvKind> env_kind_from_string(std::string_view s) {
  for (auto k : kEnvKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

namespace detail {

// Smooth, azimuth-periodic variation in [-1, 1].
struct PeriodicWobble {
  std::array<double, 4> phase{};
  std::array<double, 4> tilt{};
  explicit PeriodicWobble(Rng& rng) {
    for (int k = 0; k < 4; ++k) {
      phase[k] = rng.uniform(0.0, 2 * kPi);
      tilt[k] = rng.uniform(1.0, 4.0);
    }
  }
  double operator()(double phi, double theta) const {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += std::sin((k + 2) * phi + phase[k] + tilt[k] * theta) / (k + 1);
    return s / 2.08;
  }
};

struct RectLight {
  double phi0, phi1, theta0, theta1;  // radians
  Rgb radiance;
  bool contains(double phi, double theta) const {
    double p = phi;
    if (phi1 > 2 * kPi && p < phi0) p += 2 * kPi;
    return p >= phi0 && p < phi1 && theta >= theta0 && theta < theta1;
  }
};

}  // namespace detail

/// Synthetic panoramas standing in for the four lighting archetypes.
inline EnvironmentMap generate_procedural_env(EnvKind kind, std::uint64_t seed, int width = 256) {
  const int height = width / 2;
  Rng rng(hash_seed({seed, static_cast<std::uint64_t>(kind), 0xE17}));
  const detail::PeriodicWobble wobble(rng);
  std::vector<Rgb> px(static_cast<std::size_t>(width) * height);

  // Archetype-specific features drawn up front.
  const double sun_phi = rng.uniform(0.0, 2 * kPi);
  const double sun_theta = deg2rad(90.0 - rng.uniform(25.0, 60.0));
  const Vec3 sun_dir = EnvironmentMap::uv_to_direction({sun_phi / (2 * kPi), sun_theta / kPi});
  std::vector<detail::RectLight> rects;
  if (kind == EnvKind::bright_indoor) {
    const int panels = 3 + static_cast<int>(rng.index(2));
    for (int k = 0; k < panels; ++k) {
      const double p0 = rng.uniform(0.0, 2 * kPi), t0 = deg2rad(rng.uniform(8.0, 45.0));
      rects.push_back({p0, p0 + deg2rad(rng.uniform(18.0, 30.0)), t0, t0 + deg2rad(rng.uniform(8.0, 14.0)),
                       Rgb{11.0, 10.5, 9.5}});
    }
    const double w0 = rng.uniform(0.0, 2 * kPi);
    rects.push_back({w0, w0 + deg2rad(45.0), deg2rad(62.0), deg2rad(95.0), Rgb{4.5, 5.0, 6.0}});
  } else if (kind == EnvKind::dark_indoor) {
    const double p0 = rng.uniform(0.0, 2 * kPi), t0 = deg2rad(rng.uniform(50.0, 75.0));
    rects.push_back({p0, p0 + deg2rad(9.0), t0, t0 + deg2rad(9.0), Rgb{1.6, 1.2, 0.7}});
  }

  for (int j = 0; j < height; ++j) {
    const double theta = kPi * (j + 0.5) / height;
    const double elevation = 0.5 * kPi - theta;
    for (int i = 0; i < width; ++i) {
      const double phi = 2 * kPi * (i + 0.5) / width;
      const double n = wobble(phi, theta);
      Rgb c;
      switch (kind) {
        case EnvKind::bright_outdoor: {
          if (elevation > 0) {
            const double h = std::sqrt(std::sin(elevation));
            c = lerp(Rgb{1.25, 1.30, 1.40}, Rgb{0.35, 0.55, 1.05}, h) * (1.0 + 0.05 * n);
          } else {
            c = Rgb{0.30, 0.26, 0.20} * (0.85 + 0.15 * n);
          }
          const Vec3 d = EnvironmentMap::uv_to_direction({phi / (2 * kPi), theta / kPi});
          const double ang = rad2deg(std::acos(std::clamp(dot(d, sun_dir), -1.0, 1.0)));
          const double disc = std::clamp(3.5 - ang, 0.0, 1.0);
          c += Rgb{420.0, 400.0, 360.0} * disc;
          break;
        }
        case EnvKind::cloudy_outdoor: {
          if (elevation > 0) {
            const double overcast = (1.0 + 2.0 * std::sin(elevation)) / 3.0;
            c = Rgb{0.85, 0.87, 0.90} * overcast * (0.8 + 0.2 * n) * 1.4;
          } else {
            c = Rgb{0.20, 0.19, 0.17} * (0.85 + 0.15 * n);
          }
          break;
        }
        case EnvKind::bright_indoor:
          c = Rgb{0.16, 0.15, 0.13} * (0.8 + 0.2 * n);
          break;
        case EnvKind::dark_indoor:
          c = Rgb{0.012, 0.011, 0.010} * (0.8 + 0.2 * n);
          break;
      }
      for (const auto& r : rects)
        if (r.contains(phi, theta)) c = r.radiance;
      px[static_cast<std::size_t>(j) * width + i] = c;
    }
  }
  return EnvironmentMap(width, height, std::move(px), std::string(to_string(kind)));
}

}  // namespace oculogen
