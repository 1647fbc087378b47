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

// Two-part parametric eyeball.
//
// The outer part is a closed transparent shell: a sclera sphere of radius r1
// at the origin joined to a corneal sphere of radius r2 centered at
// (0, 0, d) along their circle of intersection (the limbus). The inner part
// is a sphere of radius r1 - gap whose front cap is cut flat by the plane
// z = seam_z - gap; the flat disc carries the iris and pupil. Keeping the
// inner sphere concentric and one gap smaller keeps the shell-to-interior
// distance equal to the gap everywhere on the disc rim and the sclera.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oculogen/error.hpp"
#include "oculogen/eye_texture.hpp"
#include "oculogen/field.hpp"
#include "oculogen/geom.hpp"

namespace oculogen {

inline constexpr double kCorneaIor = 1.376;
inline constexpr double kPupilRadiusMin = 1.5;
inline constexpr double kPupilRadiusMax = 4.0;
inline constexpr double kPupilRadiusBase = 2.0;
inline constexpr double kIrisScaleMin = 0.95;
inline constexpr double kIrisScaleMax = 1.05;
inline constexpr double kSeamDihedralLimitDeg = 15.0;

struct EyeballParams {
  double r1 = 12.0;            ///< sclera sphere radius (mm)
  double r2 = 8.0;             ///< corneal sphere radius (mm)
  double cornea_offset = 5.0;  ///< corneal sphere center along +Z (mm)
  double corneal_gap = 0.5;    ///< shell-to-interior gap (mm)
  double pupil_dilation = 0.2; ///< 0 = constricted (1.5 mm), 1 = dilated (4 mm)
  double iris_scale = 1.0;
  IrisColor iris_color = IrisColor::brown;
  ScleraTint sclera_tint = ScleraTint::white;
  double vein_density = 0.3;

  void validate() const {
    const double d = cornea_offset;
    if (!(r1 > 0 && r2 > 0 && r2 < r1)) throw Error(Errc::InvalidParams, "need 0 < r2 < r1");
    if (!(d > 0 && d < r1)) throw Error(Errc::InvalidParams, "corneal offset must lie in (0, r1)");
    if (!(d > r1 - r2 && d < r1 + r2)) throw Error(Errc::InvalidParams, "sclera and corneal spheres do not intersect");
    if (!(corneal_gap >= 0 && corneal_gap < r1 - r2)) throw Error(Errc::InvalidParams, "corneal gap out of range");
    if (!(pupil_dilation >= 0 && pupil_dilation <= 1)) throw Error(Errc::OutOfRange, "pupil dilation outside [0,1]");
    if (!(iris_scale >= kIrisScaleMin && iris_scale <= kIrisScaleMax))
      throw Error(Errc::OutOfRange, "iris scale outside [0.95,1.05]");
    if (!(vein_density >= 0 && vein_density <= 1)) throw Error(Errc::OutOfRange, "vein density outside [0,1]");
  }
};

inline double pupil_radius_for_dilation(double dilation) {
  return kPupilRadiusMin + (kPupilRadiusMax - kPupilRadiusMin) * dilation;
}

/// Derived dimensions of the two-part model (all in mm, model frame).
struct EyeballGeometry {
  double seam_z = 0;         ///< plane of the limbus circle
  double limbus_radius = 0;  ///< radius of the limbus circle
  double apex_z = 0;         ///< corneal apex
  double inner_radius = 0;   ///< radius of the interior sphere
  double disc_z = 0;         ///< iris plane
  double disc_radius = 0;    ///< rim of the flat disc
  double iris_radius = 0;    ///< neutral iris ring radius
  double pupil_radius = kPupilRadiusBase;

  static EyeballGeometry from(const EyeballParams& p) {
    p.validate();
    EyeballGeometry g;
    const double d = p.cornea_offset;
    g.seam_z = (d * d + p.r1 * p.r1 - p.r2 * p.r2) / (2.0 * d);
    g.limbus_radius = std::sqrt(p.r1 * p.r1 - g.seam_z * g.seam_z);
    g.apex_z = d + p.r2;
    g.inner_radius = p.r1 - p.corneal_gap;
    g.disc_z = g.seam_z - p.corneal_gap;
    g.disc_radius = std::sqrt(g.inner_radius * g.inner_radius - g.disc_z * g.disc_z);
    // The iris ring must stay on the disc at the largest iris scale.
    g.iris_radius = std::min(g.limbus_radius, g.disc_radius / (kIrisScaleMax * 1.01));
    return g;
  }

  /// Polar angle (from +Z) of the disc rim on the interior sphere.
  double rim_polar() const { return std::atan2(disc_radius, disc_z); }

  /// Polar-chart radius of a point on the disc at radial distance r.
  double disc_chart_radius(double r) const { return (r / disc_radius) * rim_polar() / kPi; }

  IrisLayout iris_layout() const { return {disc_chart_radius(pupil_radius), disc_chart_radius(iris_radius)}; }

  /// Polar UV chart used by the eye texture and the sclera displacement map.
  static Vec2 polar_uv(double chart_radius, double azimuth) {
    return {0.5 + 0.5 * chart_radius * std::cos(azimuth), 0.5 + 0.5 * chart_radius * std::sin(azimuth)};
  }
};

/// Ring structure shared by both meshes: a top pole, `rings` rings of
/// `around` vertices, and a bottom pole, in that vertex order.
struct LatheLayout {
  int around = 0;
  int rings = 0;

  std::uint32_t ring_vertex(int ring, int j) const {
    return static_cast<std::uint32_t>(1 + ring * around + ((j % around) + around) % around);
  }
  std::uint32_t top_pole() const { return 0; }
  std::uint32_t bottom_pole() const { return static_cast<std::uint32_t>(1 + rings * around); }
};

namespace detail {

struct RingSpec {
  double radius;
  double z;
};

inline TriMesh lathe(double top_z, const std::vector<RingSpec>& rings, double bottom_z, int around) {
  TriMesh m;
  const LatheLayout lay{around, static_cast<int>(rings.size())};
  m.vertices.push_back({0, 0, top_z});
  for (const auto& r : rings)
    for (int j = 0; j < around; ++j) {
      const double a = 2.0 * kPi * j / around;
      m.vertices.push_back({r.radius * std::cos(a), r.radius * std::sin(a), r.z});
    }
  m.vertices.push_back({0, 0, bottom_z});

  for (int j = 0; j < around; ++j) m.faces.push_back({lay.top_pole(), lay.ring_vertex(0, j), lay.ring_vertex(0, j + 1)});
  for (int k = 0; k + 1 < lay.rings; ++k) {
    for (int j = 0; j < around; ++j) {
      const auto a = lay.ring_vertex(k, j), b = lay.ring_vertex(k, j + 1);
      const auto c = lay.ring_vertex(k + 1, j), d = lay.ring_vertex(k + 1, j + 1);
      m.faces.push_back({a, c, b});
      m.faces.push_back({b, c, d});
    }
  }
  const int last = lay.rings - 1;
  for (int j = 0; j < around; ++j)
    m.faces.push_back({lay.ring_vertex(last, j), lay.bottom_pole(), lay.ring_vertex(last, j + 1)});
  return m;
}

inline double polar_of(const Vec3& p) { return std::atan2(std::hypot(p.x, p.y), p.z); }

}  // namespace detail

/// Ring bookkeeping for the outer shell built with a given subdivision level.
struct OuterLayout {
  LatheLayout lathe;
  int cornea_rings = 0;  ///< rings strictly above the seam
  int seam_ring = 0;     ///< ring index of the limbus

  static OuterLayout for_subdivisions(int subdivisions) {
    if (subdivisions < 3) throw Error(Errc::InvalidParams, "subdivisions must be >= 3");
    OuterLayout o;
    o.cornea_rings = 2 * subdivisions;
    o.seam_ring = o.cornea_rings;
    const int sclera_rings = 6 * subdivisions;
    o.lathe = {16 * subdivisions, o.cornea_rings + 1 + sclera_rings};
    return o;
  }

  std::vector<std::uint32_t> seam_ids() const {
    std::vector<std::uint32_t> ids;
    for (int j = 0; j < lathe.around; ++j) ids.push_back(lathe.ring_vertex(seam_ring, j));
    return ids;
  }
};

/// Largest dihedral angle (degrees) between the two faces sharing each edge
/// of the seam ring.
inline double max_seam_dihedral_deg(const TriMesh& outer, const OuterLayout& lay) {
  const auto& L = lay.lathe;
  double worst = 0.0;
  auto face_normal = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    return normalize(cross(outer.vertices[b] - outer.vertices[a], outer.vertices[c] - outer.vertices[a]));
  };
  for (int j = 0; j < L.around; ++j) {
    const auto s0 = L.ring_vertex(lay.seam_ring, j), s1 = L.ring_vertex(lay.seam_ring, j + 1);
    // Cornea side: face {b, c, d} of the strip above, where c, d are seam vertices.
    const auto above = L.ring_vertex(lay.seam_ring - 1, j + 1);
    const auto below = L.ring_vertex(lay.seam_ring + 1, j);
    const Vec3 n_up = face_normal(above, s0, s1);
    const Vec3 n_down = face_normal(s0, below, s1);
    worst = std::max(worst, angle_between_deg(n_up, n_down));
  }
  return worst;
}

/// Closed shell of sclera sphere plus corneal cap joined at the limbus, with
/// the rings next to the seam Laplacian-smoothed until every seam dihedral is
/// below 15 degrees (at most 50 iterations).
inline TriMesh build_outer_mesh(const EyeballParams& p, int subdivisions) {
  const auto g = EyeballGeometry::from(p);
  const auto lay = OuterLayout::for_subdivisions(subdivisions);
  const double d = p.cornea_offset;
  const double cornea_polar = std::acos((g.seam_z - d) / p.r2);
  const double sclera_polar = std::acos(g.seam_z / p.r1);

  std::vector<detail::RingSpec> rings;
  for (int k = 1; k <= lay.cornea_rings; ++k) {
    const double a = cornea_polar * k / (lay.cornea_rings + 1);
    rings.push_back({p.r2 * std::sin(a), d + p.r2 * std::cos(a)});
  }
  rings.push_back({g.limbus_radius, g.seam_z});
  const int sclera_rings = lay.lathe.rings - lay.cornea_rings - 1;
  for (int k = 1; k <= sclera_rings; ++k) {
    const double a = sclera_polar + (kPi - sclera_polar) * k / (sclera_rings + 1);
    rings.push_back({p.r1 * std::sin(a), p.r1 * std::cos(a)});
  }
  TriMesh m = detail::lathe(g.apex_z, rings, -p.r1, lay.lathe.around);

  // Vertex adjacency for the smoothed rings.
  std::vector<std::vector<std::uint32_t>> nbrs(m.vertices.size());
  for (const auto& f : m.faces)
    for (int e = 0; e < 3; ++e) {
      nbrs[f[e]].push_back(f[(e + 1) % 3]);
      nbrs[f[(e + 1) % 3]].push_back(f[e]);
    }
  for (auto& n : nbrs) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  std::vector<std::uint32_t> smoothed;
  for (int ring : {lay.seam_ring - 1, lay.seam_ring + 1})
    for (int j = 0; j < lay.lathe.around; ++j) smoothed.push_back(lay.lathe.ring_vertex(ring, j));

  for (int iter = 0; iter < 50 && max_seam_dihedral_deg(m, lay) >= kSeamDihedralLimitDeg; ++iter) {
    std::vector<Vec3> next;
    next.reserve(smoothed.size());
    for (auto v : smoothed) {
      Vec3 avg;
      for (auto n : nbrs[v]) avg += m.vertices[n];
      avg = avg / static_cast<double>(nbrs[v].size());
      next.push_back(lerp(m.vertices[v], avg, 0.5));
    }
    for (std::size_t i = 0; i < smoothed.size(); ++i) m.vertices[smoothed[i]] = next[i];
  }

  m = compute_vertex_normals(std::move(m));
  m.uvs.reserve(m.vertices.size());
  for (const auto& v : m.vertices)
    m.uvs.push_back(EyeballGeometry::polar_uv(detail::polar_of(v) / kPi, std::atan2(v.y, v.x)));
  return m;
}

/// Ring bookkeeping for the interior mesh.
struct InnerLayout {
  LatheLayout lathe;
  int pupil_ring = 0;  ///< disc ring at the neutral pupil radius
  int iris_ring = 0;   ///< disc ring at the neutral iris radius
  int rim_ring = 0;    ///< last disc ring, shared with the sphere

  static InnerLayout for_subdivisions(int subdivisions) {
    if (subdivisions < 3) throw Error(Errc::InvalidParams, "subdivisions must be >= 3");
    InnerLayout o;
    o.pupil_ring = subdivisions - 1;
    o.iris_ring = o.pupil_ring + 2 * subdivisions;
    o.rim_ring = o.iris_ring + 1;
    o.lathe = {16 * subdivisions, o.rim_ring + 1 + 6 * subdivisions};
    return o;
  }

  bool on_disc(std::uint32_t v) const { return v == lathe.top_pole() || v < lathe.ring_vertex(rim_ring + 1, 0); }

  /// Eight evenly spaced vertices of `ring`.
  std::array<std::uint32_t, 8> eight_on(int ring) const {
    std::array<std::uint32_t, 8> ids{};
    for (int k = 0; k < 8; ++k) ids[k] = lathe.ring_vertex(ring, k * lathe.around / 8);
    return ids;
  }
};

/// Sphere of radius r1 - gap whose +Z cap is flattened into the iris disc.
/// Built at neutral pupil and iris size; variation comes from blend shapes.
inline TriMesh build_inner_mesh(const EyeballParams& p, int subdivisions) {
  const auto g = EyeballGeometry::from(p);
  const auto lay = InnerLayout::for_subdivisions(subdivisions);
  const double rim_polar = g.rim_polar();

  std::vector<detail::RingSpec> rings;
  for (int k = 1; k <= lay.pupil_ring + 1; ++k)
    rings.push_back({g.pupil_radius * k / (lay.pupil_ring + 1), g.disc_z});
  const int iris_steps = lay.iris_ring - lay.pupil_ring;
  for (int k = 1; k <= iris_steps; ++k)
    rings.push_back({g.pupil_radius + (g.iris_radius - g.pupil_radius) * k / iris_steps, g.disc_z});
  rings.push_back({g.disc_radius, g.disc_z});
  const int sphere_rings = lay.lathe.rings - lay.rim_ring - 1;
  for (int k = 1; k <= sphere_rings; ++k) {
    const double a = rim_polar + (kPi - rim_polar) * k / (sphere_rings + 1);
    rings.push_back({g.inner_radius * std::sin(a), g.inner_radius * std::cos(a)});
  }
  TriMesh m = detail::lathe(g.disc_z, rings, -g.inner_radius, lay.lathe.around);
  m = compute_vertex_normals(std::move(m));

  m.uvs.reserve(m.vertices.size());
  for (std::uint32_t v = 0; v < m.vertices.size(); ++v) {
    const Vec3& pos = m.vertices[v];
    const double az = std::atan2(pos.y, pos.x);
    if (lay.on_disc(v) && v < lay.lathe.ring_vertex(lay.rim_ring, 0)) {
      m.normals[v] = {0, 0, 1};
      m.uvs.push_back(EyeballGeometry::polar_uv(g.disc_chart_radius(std::hypot(pos.x, pos.y)), az));
    } else {
      if (v > lay.lathe.ring_vertex(lay.rim_ring, lay.lathe.around - 1)) m.normals[v] = normalize(pos);
      m.uvs.push_back(EyeballGeometry::polar_uv(detail::polar_of(pos) / kPi, az));
    }
  }
  return m;
}

/// Named per-vertex displacement set over the interior mesh.
struct BlendShape {
  std::string name;
  std::vector<Vec3> deltas;
};

struct EyeballModel {
  EyeballParams params;
  EyeballGeometry geometry;
  int subdivisions = 4;
  TriMesh outer;
  TriMesh inner;
  BlendShape pupil_dilate, pupil_constrict, iris_large, iris_small;
  std::shared_ptr<const EyeTexture> texture;
  std::array<std::uint32_t, 8> iris_landmark_vertex_ids{};
  std::array<std::uint32_t, 8> pupil_landmark_vertex_ids{};

  Vec3 pupil_center() const { return {0, 0, geometry.disc_z}; }
  InnerLayout inner_layout() const { return InnerLayout::for_subdivisions(subdivisions); }
  OuterLayout outer_layout() const { return OuterLayout::for_subdivisions(subdivisions); }
};

namespace detail {

// Radial remap of the disc as a blend delta: the piecewise-linear map that
// sends `from` to `to` while pinning the center and `fixed`.
inline BlendShape radial_blend(std::string name, const TriMesh& inner, const InnerLayout& lay, double lo, double from,
                               double to, double hi) {
  BlendShape b{std::move(name), std::vector<Vec3>(inner.vertices.size())};
  for (std::uint32_t v = 0; v < inner.vertices.size(); ++v) {
    if (!lay.on_disc(v)) continue;
    const Vec3& p = inner.vertices[v];
    const double r = std::hypot(p.x, p.y);
    if (r <= lo || r >= hi || r == 0.0) continue;
    const double mapped = r <= from ? lo + (r - lo) * (to - lo) / (from - lo) : to + (r - from) * (hi - to) / (hi - from);
    b.deltas[v] = Vec3{p.x / r, p.y / r, 0.0} * (mapped - r);
  }
  return b;
}

}  // namespace detail

/// Builds meshes, blend shapes and the texture for one eyeball.
inline EyeballModel build_eyeball(const EyeballParams& p, int subdivisions = 4, int texture_resolution = 256,
                                  std::uint64_t texture_seed = 0) {
  EyeballModel m;
  m.params = p;
  m.geometry = EyeballGeometry::from(p);
  m.subdivisions = subdivisions;
  m.outer = build_outer_mesh(p, subdivisions);
  m.inner = build_inner_mesh(p, subdivisions);
  const auto lay = m.inner_layout();
  const auto& g = m.geometry;
  m.pupil_dilate = detail::radial_blend("pupil_dilate", m.inner, lay, 0.0, g.pupil_radius, kPupilRadiusMax, g.iris_radius);
  m.pupil_constrict =
      detail::radial_blend("pupil_constrict", m.inner, lay, 0.0, g.pupil_radius, kPupilRadiusMin, g.iris_radius);
  m.iris_large =
      detail::radial_blend("iris_large", m.inner, lay, g.pupil_radius, g.iris_radius, g.iris_radius * kIrisScaleMax, g.disc_radius);
  m.iris_small =
      detail::radial_blend("iris_small", m.inner, lay, g.pupil_radius, g.iris_radius, g.iris_radius * kIrisScaleMin, g.disc_radius);
  m.iris_landmark_vertex_ids = lay.eight_on(lay.iris_ring);
  m.pupil_landmark_vertex_ids = lay.eight_on(lay.pupil_ring);
  const EyeTextureParams tp{p.iris_color, p.sclera_tint, p.vein_density, g.iris_layout()};
  m.texture = std::make_shared<const EyeTexture>(composite_eye_texture(tp, texture_resolution, texture_seed));
  return m;
}

/// Interior mesh with pupil and iris blend shapes applied. The pupil radius
/// is linear in `pupil_dilation` over [1.5, 4] mm; the iris ring radius is
/// `iris_scale` times its neutral value. Landmark vertices move with it.
inline TriMesh apply_blend_shapes(const EyeballModel& m, double pupil_dilation, double iris_scale) {
  if (!(pupil_dilation >= 0.0 && pupil_dilation <= 1.0)) throw Error(Errc::OutOfRange, "pupil dilation outside [0,1]");
  if (!(iris_scale >= kIrisScaleMin && iris_scale <= kIrisScaleMax))
    throw Error(Errc::OutOfRange, "iris scale outside [0.95,1.05]");
  const double base = m.geometry.pupil_radius;
  const double target = pupil_radius_for_dilation(pupil_dilation);
  const double w_dilate = target >= base ? (target - base) / (kPupilRadiusMax - base) : 0.0;
  const double w_constrict = target < base ? (base - target) / (base - kPupilRadiusMin) : 0.0;
  const double w_large = iris_scale >= 1.0 ? (iris_scale - 1.0) / (kIrisScaleMax - 1.0) : 0.0;
  const double w_small = iris_scale < 1.0 ? (1.0 - iris_scale) / (1.0 - kIrisScaleMin) : 0.0;

  TriMesh out = m.inner;
  for (std::size_t v = 0; v < out.vertices.size(); ++v) {
    out.vertices[v] += w_dilate * m.pupil_dilate.deltas[v] + w_constrict * m.pupil_constrict.deltas[v] +
                       w_large * m.iris_large.deltas[v] + w_small * m.iris_small.deltas[v];
  }
  return out;
}

/// Moves every vertex below `limbus_z` along its normal by the field value
/// at its UV. Vertices at or above the limbus plane (the cornea) are left
/// untouched. Normals are kept as-is.
inline TriMesh apply_sclera_displacement(TriMesh mesh, const ScalarField2D& field, double limbus_z = kInf) {
  if (mesh.normals.size() != mesh.vertices.size() || mesh.uvs.size() != mesh.vertices.size())
    throw Error(Errc::InvalidParams, "displacement needs per-vertex normals and UVs");
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (mesh.vertices[v].z >= limbus_z - 1e-9) continue;
    mesh.vertices[v] += field.sample(mesh.uvs[v]) * mesh.normals[v];
  }
  return mesh;
}

/// Default sclera bump field: 4 octaves of smoothed value noise, 0.05 mm.
inline ScalarField2D sclera_bump_field(std::uint64_t seed, int resolution = 128, double amplitude = 0.05) {
  return ScalarField2D::value_noise(resolution, 4, amplitude, seed);
}

/// Eyeball geometry rotated into a gaze direction.
struct PosedEyeball {
  TriMesh outer;
  TriMesh inner;
  Rotation orientation;
  Vec3 pupil_center;
  UnitVec3 optical_axis;
};

inline PosedEyeball pose_eyeball(const EyeballModel& m, const Rotation& orientation, double pupil_dilation,
                                 double iris_scale, const ScalarField2D* sclera_bumps = nullptr) {
  TriMesh outer = m.outer;
  if (sclera_bumps) outer = apply_sclera_displacement(std::move(outer), *sclera_bumps, m.geometry.seam_z);
  PosedEyeball pe;
  pe.outer = outer.transformed(orientation);
  pe.inner = apply_blend_shapes(m, pupil_dilation, iris_scale).transformed(orientation);
  pe.orientation = orientation;
  pe.pupil_center = orientation(m.pupil_center());
  pe.optical_axis = orientation(UnitVec3::assume_unit({0, 0, 1}));
  return pe;
}

}  // namespace oculogen
