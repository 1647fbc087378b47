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

// Procedural eye-region skin: a lofted patch around an elliptical palpebral
// fissure, draped over the eyeball near the lid margins and relaxing into a
// gently curved face surface further out. The model is a left eye seen from
// the front, so the temporal corner is at +X.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oculogen/error.hpp"
#include "oculogen/field.hpp"
#include "oculogen/geom.hpp"
#include "oculogen/random.hpp"

namespace oculogen {

inline constexpr double kEyelidPitchLimitDeg = 25.0;

struct EyeRegionParams {
  double fissure_width = 20.0;   ///< mm, corner to corner at neutral gaze
  double fissure_height = 10.0;  ///< mm, lid to lid at neutral gaze
  Vec3 skin_albedo{0.60, 0.40, 0.32};
  double wrinkle_amplitude = 0.15;  ///< mm
  double lash_length = 7.0;         ///< mm
  int lash_count = 40;              ///< per lid
  std::uint64_t seed = 0;
  double eyeball_radius = 12.0;     ///< sclera radius the lids drape over

  // Lid travel of the mid-margin between neutral and each blend endpoint.
  double upper_lid_travel = 2.5;
  double lower_lid_travel = 1.2;

  void validate() const {
    if (!(fissure_width > 0 && fissure_height > 0)) throw Error(Errc::InvalidParams, "fissure dimensions must be > 0");
    if (!(fissure_width < 2 * eyeball_radius && fissure_height < 2 * eyeball_radius))
      throw Error(Errc::InvalidParams, "fissure larger than the eyeball");
    if (!(fissure_height < fissure_width)) throw Error(Errc::InvalidParams, "fissure must be wider than tall");
    if (lash_count < 0) throw Error(Errc::InvalidParams, "lash count must be >= 0");
    if (!(lash_length >= 0 && wrinkle_amplitude >= 0)) throw Error(Errc::InvalidParams, "negative lash/wrinkle size");
  }
};

/// Grid bookkeeping for the skin patch: ring 0 is the fissure boundary,
/// ring `rings - 1` the outer patch border.
struct RegionLayout {
  static constexpr int kAround = 48;
  static constexpr int kRings = 16;
  static constexpr double kPatchHalfWidth = 32.0;
  static constexpr double kPatchHalfHeight = 22.0;

  static std::uint32_t vertex(int ring, int j) {
    return static_cast<std::uint32_t>(ring * kAround + ((j % kAround) + kAround) % kAround);
  }
  static double margin_angle(int j) { return 2.0 * kPi * j / kAround; }
  static double ring_t(int ring) { return std::pow(static_cast<double>(ring) / (kRings - 1), 1.5); }
};

struct LashStrand {
  std::vector<Vec3> points;
  std::uint32_t root_vertex = 0;  ///< nearest margin vertex
  double thickness = 0.08;        ///< mm
};

struct EyeRegionModel {
  EyeRegionParams params;
  TriMesh face;  ///< neutral pose
  std::vector<Vec3> blend_up;
  std::vector<Vec3> blend_down;
  ScalarField2D wrinkle_field_neutral;
  ScalarField2D wrinkle_field_down;
  /// eyelid_0 = temporal corner, then counter-clockwise seen from the front:
  /// 5 upper-margin points, nasal corner, 5 lower-margin points.
  std::array<std::uint32_t, 12> eyelid_landmark_vertex_ids{};
  std::vector<std::uint32_t> boundary_ids;  ///< every fissure vertex, ring 0
  std::vector<std::uint32_t> upper_margin_ids;
  std::vector<std::uint32_t> lower_margin_ids;
};

namespace detail {

inline double smoothstep01(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Polynomial smooth maximum; exact max once |a - b| >= k.
inline double smooth_max(double a, double b, double k) {
  const double h = std::max(k - std::abs(a - b), 0.0) / k;
  return std::max(a, b) + h * h * k * 0.25;
}

inline double skin_height(const EyeRegionParams& p, double x, double y, double t) {
  const double r2 = p.eyeball_radius * p.eyeball_radius - x * x - y * y;
  const double sphere = std::sqrt(std::max(r2, 0.0));
  const double lid = 1.6 * smoothstep01(0.0, 0.12, t);
  const double face = 4.5 - 0.006 * x * x - 0.004 * y * y + 1.2 * std::exp(-std::pow((y - 15.0) / 4.0, 2.0));
  return smooth_max(sphere + lid, face, 2.0);
}

inline Vec3 skin_point(const EyeRegionParams& p, int ring, double margin_angle, double lid_shift_y) {
  const double a = 0.5 * p.fissure_width, b = 0.5 * p.fissure_height;
  const double ex = a * std::cos(margin_angle), ey = b * std::sin(margin_angle);
  const double psi = std::atan2(ey, ex);
  const double cx = std::abs(std::cos(psi)), sy = std::abs(std::sin(psi));
  const double reach = std::min(cx > 1e-12 ? RegionLayout::kPatchHalfWidth / cx : kInf,
                                sy > 1e-12 ? RegionLayout::kPatchHalfHeight / sy : kInf);
  const double t = RegionLayout::ring_t(ring);
  const double x = std::lerp(ex, reach * std::cos(psi), t);
  double y = std::lerp(ey, reach * std::sin(psi), t);
  y += lid_shift_y * (1.0 - smoothstep01(0.0, 0.7, t));
  return {x, y, skin_height(p, x, y, t)};
}

// Vertical lid shift at a margin angle for a blend endpoint (+1 up, -1 down).
inline double lid_shift(const EyeRegionParams& p, double margin_angle, double direction) {
  const double s = std::sin(margin_angle);
  const double travel = s >= 0 ? p.upper_lid_travel : p.lower_lid_travel;
  return direction * travel * std::abs(s);
}

inline Vec2 skin_uv(const Vec3& v) {
  return {0.5 + v.x / (2 * RegionLayout::kPatchHalfWidth), 0.5 + v.y / (2 * RegionLayout::kPatchHalfHeight)};
}

// Upper-lid crease pattern over the skin UV chart.
inline ScalarField2D wrinkle_field(const EyeRegionParams& p, int resolution) {
  ScalarField2D f(resolution, resolution);
  Rng rng(hash_seed({p.seed, 7}));
  const double phase = rng.uniform(0.0, 2 * kPi);
  const double spacing = rng.uniform(0.9, 1.4);
  const double a = 0.5 * p.fissure_width, b = 0.5 * p.fissure_height;
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const double x = ((i + 0.5) / resolution - 0.5) * 2 * RegionLayout::kPatchHalfWidth;
      const double y = ((j + 0.5) / resolution - 0.5) * 2 * RegionLayout::kPatchHalfHeight;
      if (y <= 0) continue;
      const double q = std::hypot(x / a, y / b);  // 1 on the fissure
      const double band = smoothstep01(1.25, 1.45, q) * (1.0 - smoothstep01(2.0, 2.4, q));
      const double lateral = 1.0 - smoothstep01(0.7, 1.3, std::abs(x) / a);
      f.at(i, j) = p.wrinkle_amplitude * band * lateral * std::sin(2 * kPi * (q - 1.25) * b / spacing + phase);
    }
  }
  return f;
}

}  // namespace detail

/// Builds the neutral skin patch, lid blend shapes, wrinkle fields and
/// landmark/margin bookkeeping. Deterministic for a fixed seed.
inline EyeRegionModel build_eye_region(const EyeRegionParams& p) {
  p.validate();
  using L = RegionLayout;
  EyeRegionModel m;
  m.params = p;
  auto& mesh = m.face;
  for (int ring = 0; ring < L::kRings; ++ring) {
    for (int j = 0; j < L::kAround; ++j) {
      const double ang = L::margin_angle(j);
      const Vec3 base = detail::skin_point(p, ring, ang, 0.0);
      mesh.vertices.push_back(base);
      m.blend_up.push_back(detail::skin_point(p, ring, ang, detail::lid_shift(p, ang, +1.0)) - base);
      m.blend_down.push_back(detail::skin_point(p, ring, ang, detail::lid_shift(p, ang, -1.0)) - base);
    }
  }
  // Faces oriented so normals face away from the eyeball (+Z-ish).
  for (int ring = 0; ring + 1 < L::kRings; ++ring) {
    for (int j = 0; j < L::kAround; ++j) {
      const auto a = L::vertex(ring, j), b = L::vertex(ring, j + 1);
      const auto c = L::vertex(ring + 1, j), d = L::vertex(ring + 1, j + 1);
      mesh.faces.push_back({a, c, b});
      mesh.faces.push_back({b, c, d});
    }
  }
  mesh = compute_vertex_normals(std::move(mesh));
  for (const auto& v : mesh.vertices) mesh.uvs.push_back(detail::skin_uv(v));

  m.wrinkle_field_neutral = detail::wrinkle_field(p, 256);
  m.wrinkle_field_down = m.wrinkle_field_neutral.scaled(0.25);

  for (int k = 0; k < 12; ++k) m.eyelid_landmark_vertex_ids[k] = L::vertex(0, k * L::kAround / 12);
  for (int j = 0; j < L::kAround; ++j) m.boundary_ids.push_back(L::vertex(0, j));
  for (int j = 0; j <= L::kAround / 2; ++j) m.upper_margin_ids.push_back(L::vertex(0, j));
  for (int j = L::kAround / 2; j <= L::kAround; ++j) m.lower_margin_ids.push_back(L::vertex(0, j));
  return m;
}

/// Linear map from global eyeball pitch to eyelid blend weight:
/// -25 degrees (full down) -> 0, +25 degrees (full up) -> 1.
inline double eyelid_weight(double gaze_pitch_deg) {
  if (!(std::abs(gaze_pitch_deg) <= kEyelidPitchLimitDeg)) throw Error(Errc::OutOfRange, "pitch outside [-25, 25]");
  return (gaze_pitch_deg + kEyelidPitchLimitDeg) / (2.0 * kEyelidPitchLimitDeg);
}

/// Posed skin: neutral + w * up + (1 - w) * down, plus the wrinkle field
/// mix(down, neutral, w) applied along the neutral normals. Affine in w.
inline TriMesh pose_eyelids(const EyeRegionModel& m, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw Error(Errc::OutOfRange, "eyelid weight outside [0,1]");
  TriMesh out = m.face;
  const auto wrinkles = ScalarField2D::mix(m.wrinkle_field_down, m.wrinkle_field_neutral, w);
  for (std::size_t v = 0; v < out.vertices.size(); ++v) {
    out.vertices[v] += w * m.blend_up[v] + (1.0 - w) * m.blend_down[v] + wrinkles.sample(m.face.uvs[v]) * m.face.normals[v];
  }
  return compute_vertex_normals(std::move(out));
}

/// Closest point on a triangle mesh (brute force; the eyeball is small).
inline Vec3 closest_point_on_mesh(const TriMesh& mesh, const Vec3& p) {
  Vec3 best;
  double best_d2 = kInf;
  for (const auto& f : mesh.faces) {
    const Vec3 c = closest_point_on_triangle(p, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
    const Vec3 d = c - p;
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

/// Moves each fissure-boundary vertex onto its closest point on the eyeball
/// surface. Throws SnapFailed if any required move exceeds `max_snap`.
inline TriMesh snap_eyelids(TriMesh face, std::span<const std::uint32_t> boundary_ids, const TriMesh& eyeball_outer,
                            double max_snap) {
  std::vector<Vec3> targets;
  targets.reserve(boundary_ids.size());
  for (auto id : boundary_ids) {
    const Vec3 target = closest_point_on_mesh(eyeball_outer, face.vertices[id]);
    const double dist = distance(target, face.vertices[id]);
    if (dist > max_snap)
      throw Error(Errc::SnapFailed, "vertex " + std::to_string(id) + " is " + std::to_string(dist) + " mm from the eyeball");
    targets.push_back(target);
  }
  for (std::size_t i = 0; i < boundary_ids.size(); ++i) face.vertices[boundary_ids[i]] = targets[i];
  return compute_vertex_normals(std::move(face));
}

/// Current positions of the 12 eyelid landmarks in fixed anatomical order.
inline std::array<Vec3, 12> eyelid_landmarks_3d(const EyeRegionModel& m, const TriMesh& posed_face) {
  std::array<Vec3, 12> out{};
  for (int k = 0; k < 12; ++k) out[k] = posed_face.vertices.at(m.eyelid_landmark_vertex_ids[k]);
  return out;
}

/// Grows `lash_count` strands along one lid margin of `face`. Each step
/// advances along the current direction, then bends the direction vertically
/// by -gravity_sign * g_step and renormalizes: +1 (lower lid) droops, -1
/// (upper lid, negative gravity) curls upward. g_step is 0.15 per unit of
/// segment length.
inline std::vector<LashStrand> grow_eyelashes(const EyeRegionModel& m, const TriMesh& face, int gravity_sign,
                                              double g_step_per_segment = 0.15, int segments = 6) {
  if (gravity_sign != 1 && gravity_sign != -1) throw Error(Errc::InvalidParams, "gravity sign must be +1 or -1");
  std::vector<LashStrand> strands;
  const int count = m.params.lash_count;
  if (count == 0 || m.params.lash_length <= 0) return strands;
  const bool upper = gravity_sign < 0;
  const auto& margin = upper ? m.upper_margin_ids : m.lower_margin_ids;
  Rng rng(hash_seed({m.params.seed, upper ? 11u : 13u}));
  const double vertical = upper ? 1.0 : -1.0;
  const double base_len = m.params.lash_length * (upper ? 1.0 : 0.6);

  for (int s = 0; s < count; ++s) {
    // Position along the margin, avoiding the corners.
    const double f = 0.12 + 0.76 * (s + rng.uniform()) / count;
    const double pos = f * (static_cast<double>(margin.size()) - 1.0);
    const auto i0 = static_cast<std::size_t>(pos);
    const auto i1 = std::min(i0 + 1, margin.size() - 1);
    const double tt = pos - static_cast<double>(i0);
    const Vec3 root = lerp(face.vertices[margin[i0]], face.vertices[margin[i1]], tt);
    const Vec3 normal = normalize(lerp(face.normals[margin[i0]], face.normals[margin[i1]], tt));

    Vec3 dir = normalize(0.75 * normal + Vec3{rng.uniform(-0.15, 0.15), vertical * rng.uniform(0.45, 0.7), 0.0});
    const double len = base_len * rng.uniform(0.75, 1.1);
    const double seg = len / segments;
    const double g_step = g_step_per_segment * seg;

    LashStrand strand;
    strand.root_vertex = margin[tt < 0.5 ? i0 : i1];
    strand.points.push_back(root);
    Vec3 p = root;
    for (int k = 0; k < segments; ++k) {
      p += dir * seg;
      strand.points.push_back(p);
      Vec3 step = dir * seg;
      step.y -= gravity_sign * g_step;
      dir = normalize(step);
    }
    strands.push_back(std::move(strand));
  }
  return strands;
}

inline std::vector<LashStrand> grow_eyelashes(const EyeRegionModel& m, int gravity_sign) {
  return grow_eyelashes(m, m.face, gravity_sign);
}

/// Skin posed for one gaze: lid blend at `eyelid_weight`, fissure snapped
/// onto the posed eyeball, lashes grown from the snapped margins.
struct PosedEyeRegion {
  TriMesh face;
  double eyelid_weight = 0.5;
  std::vector<LashStrand> upper_lashes;
  std::vector<LashStrand> lower_lashes;
};

inline PosedEyeRegion pose_eye_region(const EyeRegionModel& m, double eyelid_w, const TriMesh& eyeball_outer,
                                      double max_snap = 3.0) {
  PosedEyeRegion out;
  out.eyelid_weight = eyelid_w;
  out.face = snap_eyelids(pose_eyelids(m, eyelid_w), m.boundary_ids, eyeball_outer, max_snap);
  out.upper_lashes = grow_eyelashes(m, out.face, -1);
  out.lower_lashes = grow_eyelashes(m, out.face, +1);
  return out;
}

/// OBJ polyline export of lash strands (`v` and `l` records).
inline void write_strands_obj(std::ostream& os, const std::vector<LashStrand>& strands) {
  os.precision(9);
  std::size_t base = 1;
  for (const auto& s : strands) {
    for (const auto& p : s.points) os << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
    os << 'l';
    for (std::size_t i = 0; i < s.points.size(); ++i) os << ' ' << base + i;
    os << '\n';
    base += s.points.size();
  }
}

}  // namespace oculogen
