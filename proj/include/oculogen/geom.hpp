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

// Core math and mesh types. Head frame: +Z forward (toward the eye-contact
// camera), +Y up, millimetres, eyeball center at the origin. Angles are
// degrees at every public boundary and radians internally.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oculogen/error.hpp"

namespace oculogen {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr double deg2rad(double deg) noexcept { return deg * (kPi / 180.0); }
constexpr double rad2deg(double rad) noexcept { return rad * (180.0 / kPi); }

struct Vec2 {
  double u = 0, v = 0;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr double operator[](int i) const noexcept { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) noexcept { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator-() const noexcept { return {-x, -y, -z}; }
  constexpr Vec3& operator+=(const Vec3& o) noexcept {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) noexcept {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) noexcept {
    x *= s; y *= s; z *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) noexcept { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) noexcept { return a -= b; }
constexpr Vec3 operator*(Vec3 a, double s) noexcept { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) noexcept { return a *= (1.0 / s); }
constexpr Vec3 hadamard(const Vec3& a, const Vec3& b) noexcept { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

constexpr double dot(const Vec3& a, const Vec3& b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) noexcept { return length(a - b); }
inline Vec3 normalize(const Vec3& a) noexcept { return a / length(a); }
constexpr Vec3 lerp(const Vec3& a, const Vec3& b, double t) noexcept { return a + (b - a) * t; }

inline double angle_between_deg(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate near 0 and 180 degrees.
  return rad2deg(std::atan2(length(cross(a, b)), dot(a, b)));
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

/// A direction with unit Euclidean norm.
class UnitVec3 {
 public:
  UnitVec3() = default;

  /// Normalizes `v`; throws on a zero or non-finite vector.
  explicit UnitVec3(const Vec3& v) {
    const double n = length(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(Errc::InvalidParams, "cannot normalize zero vector");
    v_ = v / n;
  }

  /// Wraps a vector the caller already knows to be unit length.
  static UnitVec3 assume_unit(const Vec3& v) noexcept {
    UnitVec3 u;
    u.v_ = v;
    return u;
  }

  const Vec3& vec() const noexcept { return v_; }
  operator const Vec3&() const noexcept { return v_; }  // NOLINT(google-explicit-constructor)
  double x() const noexcept { return v_.x; }
  double y() const noexcept { return v_.y; }
  double z() const noexcept { return v_.z; }
  UnitVec3 operator-() const noexcept { return assume_unit(-v_); }

 private:
  Vec3 v_{0, 0, 1};
};

/// Camera/orbit position about a center. theta is azimuth about +Y measured
/// from +Z toward +X, phi is elevation toward +Y.
struct SphericalCoord {
  double theta_deg = 0;
  double phi_deg = 0;
  double radius = 1;

  static SphericalCoord make(double theta_deg, double phi_deg, double radius) {
    if (!(phi_deg >= -90.0 && phi_deg <= 90.0)) throw Error(Errc::OutOfRange, "elevation outside [-90, 90]");
    if (!(radius > 0.0)) throw Error(Errc::InvalidParams, "radius must be positive");
    return {theta_deg, phi_deg, radius};
  }
};

inline Vec3 spherical_to_cartesian(const SphericalCoord& s, const Vec3& center = {}) {
  const double t = deg2rad(s.theta_deg);
  const double p = deg2rad(s.phi_deg);
  return center + s.radius * Vec3{std::cos(p) * std::sin(t), std::sin(p), std::cos(p) * std::cos(t)};
}

inline SphericalCoord cartesian_to_spherical(const Vec3& p, const Vec3& center = {}) {
  const Vec3 d = p - center;
  const double r = length(d);
  return {rad2deg(std::atan2(d.x, d.z)), rad2deg(std::asin(std::clamp(d.y / r, -1.0, 1.0))), r};
}

/// Unit quaternion rotation.
class Rotation {
 public:
  Rotation() = default;

  static Rotation identity() { return {}; }

  static Rotation axis_angle(const Vec3& axis, double angle_deg) {
    const Vec3 a = normalize(axis);
    const double h = 0.5 * deg2rad(angle_deg);
    const double s = std::sin(h);
    return Rotation(std::cos(h), a.x * s, a.y * s, a.z * s);
  }

  /// From an orthonormal basis given as the images of local x, y, z.
  static Rotation from_basis(const Vec3& bx, const Vec3& by, const Vec3& bz) {
    const double m00 = bx.x, m10 = bx.y, m20 = bx.z;
    const double m01 = by.x, m11 = by.y, m21 = by.z;
    const double m02 = bz.x, m12 = bz.y, m22 = bz.z;
    const double tr = m00 + m11 + m22;
    double w, x, y, z;
    if (tr > 0) {
      const double s = 2.0 * std::sqrt(tr + 1.0);
      w = 0.25 * s; x = (m21 - m12) / s; y = (m02 - m20) / s; z = (m10 - m01) / s;
    } else if (m00 > m11 && m00 > m22) {
      const double s = 2.0 * std::sqrt(1.0 + m00 - m11 - m22);
      w = (m21 - m12) / s; x = 0.25 * s; y = (m01 + m10) / s; z = (m02 + m20) / s;
    } else if (m11 > m22) {
      const double s = 2.0 * std::sqrt(1.0 + m11 - m00 - m22);
      w = (m02 - m20) / s; x = (m01 + m10) / s; y = 0.25 * s; z = (m12 + m21) / s;
    } else {
      const double s = 2.0 * std::sqrt(1.0 + m22 - m00 - m11);
      w = (m10 - m01) / s; x = (m02 + m20) / s; y = (m12 + m21) / s; z = 0.25 * s;
    }
    return Rotation(w, x, y, z);
  }

  Vec3 rotate(const Vec3& v) const noexcept {
    const Vec3 q{x_, y_, z_};
    const Vec3 t = 2.0 * cross(q, v);
    return v + w_ * t + cross(q, t);
  }
  Vec3 operator()(const Vec3& v) const noexcept { return rotate(v); }
  UnitVec3 operator()(const UnitVec3& v) const noexcept { return UnitVec3::assume_unit(rotate(v.vec())); }

  Rotation inverse() const noexcept { return Rotation(w_, -x_, -y_, -z_, Unchecked{}); }

  /// (a * b)(v) == a(b(v)).
  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return Rotation(a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_,
                    a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_,
                    a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_,
                    a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_);
  }

  double w() const noexcept { return w_; }
  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }
  double norm() const noexcept { return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_); }

 private:
  struct Unchecked {};
  Rotation(double w, double x, double y, double z, Unchecked) : w_(w), x_(x), y_(y), z_(z) {}
  Rotation(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w_ = w / n; x_ = x / n; y_ = y / n; z_ = z / n;
  }

  double w_ = 1, x_ = 0, y_ = 0, z_ = 0;
};

/// Rotation whose local -Z maps to the viewing direction and local +Y lies
/// in the plane spanned by `up` and the viewing direction.
inline Rotation look_at(const Vec3& eye, const Vec3& target, const UnitVec3& up) {
  const Vec3 d = target - eye;
  const double len = length(d);
  if (!(len > 0.0)) throw Error(Errc::DegenerateFrame, "eye coincides with target");
  const Vec3 f = d / len;
  const Vec3 r = cross(f, up.vec());
  const double rl = length(r);
  if (rl < 1e-9) throw Error(Errc::DegenerateFrame, "up vector parallel to view direction");
  const Vec3 right = r / rl;
  const Vec3 u = cross(right, f);
  return Rotation::from_basis(right, u, -f);
}

struct Ray {
  Vec3 origin;
  UnitVec3 direction;
  double t_min = 0.0;
  double t_max = kInf;

  Vec3 at(double t) const noexcept { return origin + t * direction.vec(); }
};

struct TriangleHit {
  double t = kInf;
  std::array<double, 3> bary{};  ///< weights of v0, v1, v2
  Vec3 geometric_normal;         ///< normalized (v1 - v0) x (v2 - v0)
};

namespace detail {
// Edge functions of the sheared triangle, promoted to long double when the
// double result is exactly zero (the watertight algorithm's fallback).
inline double edge_fn(double ax, double ay, double bx, double by) {
  const double r = ax * by - ay * bx;
  if (r != 0.0) return r;
  return static_cast<double>(static_cast<long double>(ax) * by - static_cast<long double>(ay) * bx);
}
}  // namespace detail

/// Watertight ray/triangle test: rays through a shared edge or vertex hit at
/// least one of the adjacent triangles.
inline std::optional<TriangleHit> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1,
                                                     const Vec3& v2) {
  const Vec3& dir = ray.direction.vec();
  int kz = 0;
  if (std::abs(dir.y) > std::abs(dir[kz])) kz = 1;
  if (std::abs(dir.z) > std::abs(dir[kz])) kz = 2;
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (dir[kz] < 0) std::swap(kx, ky);

  const double sx = dir[kx] / dir[kz];
  const double sy = dir[ky] / dir[kz];
  const double sz = 1.0 / dir[kz];

  const Vec3 a = v0 - ray.origin;
  const Vec3 b = v1 - ray.origin;
  const Vec3 c = v2 - ray.origin;
  const double ax = a[kx] - sx * a[kz], ay = a[ky] - sy * a[kz];
  const double bx = b[kx] - sx * b[kz], by = b[ky] - sy * b[kz];
  const double cx = c[kx] - sx * c[kz], cy = c[ky] - sy * c[kz];

  const double u = detail::edge_fn(cx, cy, bx, by);
  const double v = detail::edge_fn(ax, ay, cx, cy);
  const double w = detail::edge_fn(bx, by, ax, ay);
  if ((u < 0 || v < 0 || w < 0) && (u > 0 || v > 0 || w > 0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double t_scaled = u * (sz * a[kz]) + v * (sz * b[kz]) + w * (sz * c[kz]);
  const double t = t_scaled / det;
  if (!(t >= ray.t_min && t <= ray.t_max)) return std::nullopt;

  TriangleHit hit;
  hit.t = t;
  hit.bary = {u / det, v / det, w / det};
  hit.geometric_normal = normalize(cross(v1 - v0, v2 - v0));
  return hit;
}

/// Closest point on triangle (v0, v1, v2) to p (Ericson's region walk).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

using Face = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh with per-vertex normals and UVs.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> normals;
  std::vector<Vec2> uvs;

  std::size_t vertex_count() const noexcept { return vertices.size(); }
  std::size_t face_count() const noexcept { return faces.size(); }

  double face_area(std::size_t f) const {
    const auto& [i, j, k] = faces[f];
    return 0.5 * length(cross(vertices[j] - vertices[i], vertices[k] - vertices[i]));
  }

  /// Checks index ranges, attribute sizes and the minimum face area.
  void validate() const {
    const auto n = vertices.size();
    for (std::size_t f = 0; f < faces.size(); ++f) {
      for (auto idx : faces[f])
        if (idx >= n) throw Error(Errc::DegenerateMesh, "face index out of range");
      if (!(face_area(f) > 1e-12)) throw Error(Errc::DegenerateMesh, "degenerate face " + std::to_string(f));
    }
    if (!normals.empty() && normals.size() != n) throw Error(Errc::DegenerateMesh, "normal count mismatch");
    if (!uvs.empty() && uvs.size() != n) throw Error(Errc::DegenerateMesh, "uv count mismatch");
  }

  TriMesh transformed(const Rotation& r, const Vec3& translation = {}) const {
    TriMesh out = *this;
    for (auto& v : out.vertices) v = r(v) + translation;
    for (auto& nrm : out.normals) nrm = r(nrm);
    return out;
  }
};

/// Area-weighted vertex normals.
inline TriMesh compute_vertex_normals(TriMesh mesh) {
  std::vector<Vec3> acc(mesh.vertices.size());
  for (const auto& f : mesh.faces) {
    // Unnormalized cross product: length is twice the face area.
    const Vec3 n = cross(mesh.vertices[f[1]] - mesh.vertices[f[0]], mesh.vertices[f[2]] - mesh.vertices[f[0]]);
    for (auto idx : f) acc[idx] += n;
  }
  mesh.normals.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double len = length(acc[i]);
    if (!(len > 0.0)) throw Error(Errc::DegenerateMesh, "vertex " + std::to_string(i) + " has no incident area");
    mesh.normals[i] = acc[i] / len;
  }
  return mesh;
}

/// Geodesic sphere from a subdivided icosahedron.
inline TriMesh make_icosphere(int subdivisions, double radius = 1.0) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  m.faces = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
             {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (auto& v : m.vertices) v = normalize(v);
  for (int s = 0; s < subdivisions; ++s) {
    std::vector<Face> next;
    next.reserve(m.faces.size() * 4);
    std::unordered_map<std::uint64_t, std::uint32_t> cache;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
      m.vertices.push_back(normalize(0.5 * (m.vertices[a] + m.vertices[b])));
      const auto idx = static_cast<std::uint32_t>(m.vertices.size() - 1);
      cache.emplace(key, idx);
      return idx;
    };
    for (const auto& f : m.faces) {
      const auto a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    m.faces = std::move(next);
  }
  for (auto& v : m.vertices) {
    m.normals.push_back(v);
    m.uvs.push_back({0.5 + std::atan2(v.x, v.z) / (2 * kPi), std::acos(std::clamp(v.y, -1.0, 1.0)) / kPi});
    v *= radius;
  }
  return m;
}

/// Wavefront OBJ text (v/vt/vn/f records, 1-based indices).
inline void write_obj(std::ostream& os, const TriMesh& mesh) {
  os.precision(9);
  for (const auto& v : mesh.vertices) os << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& t : mesh.uvs) os << "vt " << t.u << ' ' << t.v << '\n';
  for (const auto& n : mesh.normals) os << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
  const bool has_uv = !mesh.uvs.empty(), has_n = !mesh.normals.empty();
  for (const auto& f : mesh.faces) {
    os << 'f';
    for (auto idx : f) {
      const auto i = idx + 1;
      os << ' ' << i;
      if (has_uv || has_n) os << '/' << (has_uv ? std::to_string(i) : std::string{});
      if (has_n) os << '/' << i;
    }
    os << '\n';
  }
}

inline void write_obj(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot open " + path);
  write_obj(out, mesh);
  if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

}  // namespace oculogen
