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

// Bounding-volume hierarchy over a triangle soup (binned SAH build).

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "oculogen/error.hpp"
#include "oculogen/geom.hpp"

namespace oculogen {

using Triangle = std::array<Vec3, 3>;

struct Aabb {
  Vec3 lo{kInf, kInf, kInf};
  Vec3 hi{-kInf, -kInf, -kInf};

  void grow(const Vec3& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  void grow(const Aabb& b) {
    grow(b.lo);
    grow(b.hi);
  }
  bool empty() const { return lo.x > hi.x; }
  Vec3 centroid() const { return 0.5 * (lo + hi); }
  double surface_area() const {
    if (empty()) return 0.0;
    const Vec3 d = hi - lo;
    return 2.0 * (d.x * d.y + d.y * d.z + d.z * d.x);
  }

  /// Slab test with the far bound padded for rounding (Ize's robust bound).
  bool hit(const Vec3& origin, const Vec3& inv_dir, double t_min, double t_max) const {
    constexpr double pad = 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
    for (int a = 0; a < 3; ++a) {
      double t0 = (lo[a] - origin[a]) * inv_dir[a];
      double t1 = (hi[a] - origin[a]) * inv_dir[a];
      if (t0 > t1) std::swap(t0, t1);
      if (std::isnan(t0)) t0 = -kInf;  // 0 * inf on a slab face
      if (std::isnan(t1)) t1 = kInf;
      t1 *= pad;
      t_min = std::max(t_min, t0);
      t_max = std::min(t_max, t1);
      if (t_min > t_max) return false;
    }
    return true;
  }
};

inline Aabb bounds_of(const Triangle& t) {
  Aabb b;
  for (const auto& p : t) b.grow(p);
  return b;
}

/// Nearest hit with the index of the triangle that produced it.
struct SoupHit {
  TriangleHit hit;
  std::uint32_t triangle = 0;
};

/// Brute-force nearest hit. Ties in t go to the lowest triangle index.
inline std::optional<SoupHit> intersect_brute_force(std::span<const Triangle> tris, const Ray& ray) {
  std::optional<SoupHit> best;
  Ray r = ray;
  for (std::uint32_t i = 0; i < tris.size(); ++i) {
    if (auto h = intersect_triangle(r, tris[i][0], tris[i][1], tris[i][2])) {
      if (!best || h->t < best->hit.t) {
        best = SoupHit{*h, i};
        r.t_max = h->t;
      }
    }
  }
  return best;
}

class Bvh {
 public:
  struct Node {
    Aabb box;
    std::uint32_t first = 0;  ///< leaf: first index into order(); inner: right child
    std::uint32_t count = 0;  ///< > 0 for leaves
    int axis = 0;             ///< split axis; the left child holds the lower centroids
  };

  static constexpr std::uint32_t kLeafSize = 4;
  static constexpr int kBins = 16;

  Bvh() = default;

  explicit Bvh(std::vector<Triangle> tris) : tris_(std::move(tris)) {
    if (tris_.empty()) throw Error(Errc::EmptyScene, "cannot build a BVH over zero triangles");
    order_.resize(tris_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    std::vector<Aabb> boxes(tris_.size());
    std::vector<Vec3> centers(tris_.size());
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      boxes[i] = bounds_of(tris_[i]);
      centers[i] = boxes[i].centroid();
    }
    nodes_.reserve(2 * tris_.size());
    nodes_.push_back({});
    build(0, 0, static_cast<std::uint32_t>(tris_.size()), boxes, centers, 0);
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<std::uint32_t>& order() const noexcept { return order_; }
  const std::vector<Triangle>& triangles() const noexcept { return tris_; }
  int depth() const noexcept { return max_depth_; }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.count > 0; }));
  }

  /// Nearest hit; results match `intersect_brute_force` exactly, including
  /// the lowest-index tie break.
  std::optional<SoupHit> intersect(const Ray& ray) const {
    std::optional<SoupHit> best;
    Ray r = ray;
    traverse(r, [&](std::uint32_t tri) {
      if (auto h = intersect_triangle(r, tris_[tri][0], tris_[tri][1], tris_[tri][2])) {
        if (!best || h->t < best->hit.t || (h->t == best->hit.t && tri < best->triangle)) {
          best = SoupHit{*h, tri};
          r.t_max = h->t;
        }
      }
      return false;
    });
    return best;
  }

  /// True if anything lies within [t_min, t_max].
  bool occluded(const Ray& ray) const {
    bool any = false;
    traverse(ray, [&](std::uint32_t tri) {
      any = intersect_triangle(ray, tris_[tri][0], tris_[tri][1], tris_[tri][2]).has_value();
      return any;
    });
    return any;
  }

 private:
  template <typename Visit>
  void traverse(const Ray& ray, Visit&& visit) const {
    const Vec3& d = ray.direction.vec();
    const Vec3 inv{1.0 / d.x, 1.0 / d.y, 1.0 / d.z};
    std::uint32_t stack[128];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
      const Node& n = nodes_[stack[--sp]];
      if (!n.box.hit(ray.origin, inv, ray.t_min, ray.t_max)) continue;
      if (n.count > 0) {
        for (std::uint32_t k = 0; k < n.count; ++k)
          if (visit(order_[n.first + k])) return;
        continue;
      }
      const auto self = static_cast<std::uint32_t>(&n - nodes_.data());
      const std::uint32_t left = self + 1, right = n.first;
      if (d[n.axis] > 0) {
        stack[sp++] = right;
        stack[sp++] = left;
      } else {
        stack[sp++] = left;
        stack[sp++] = right;
      }
    }
  }

  void build(std::uint32_t node, std::uint32_t begin, std::uint32_t end, const std::vector<Aabb>& boxes,
             const std::vector<Vec3>& centers, int depth) {
    max_depth_ = std::max(max_depth_, depth);
    Aabb box, cbox;
    for (std::uint32_t i = begin; i < end; ++i) {
      box.grow(boxes[order_[i]]);
      cbox.grow(centers[order_[i]]);
    }
    nodes_[node].box = box;
    const std::uint32_t n = end - begin;
    if (n <= kLeafSize || depth >= 100) {
      nodes_[node].first = begin;
      nodes_[node].count = n;
      return;
    }

    std::uint32_t mid = begin;
    const Vec3 extent = cbox.hi - cbox.lo;
    const int axis = extent.x > extent.y ? (extent.x > extent.z ? 0 : 2) : (extent.y > extent.z ? 1 : 2);
    if (!(extent[axis] > 0.0)) {
      // Coincident centroids: split by index so the recursion still halves.
      mid = begin + n / 2;
    } else {
      mid = sah_split(begin, end, axis, cbox, boxes, centers);
      if (mid == begin || mid == end) {
        mid = begin + n / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) { return centers[a][axis] < centers[b][axis]; });
      }
    }

    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    build(left, begin, mid, boxes, centers, depth + 1);
    const auto right = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    build(right, mid, end, boxes, centers, depth + 1);
    nodes_[node].first = right;
    nodes_[node].count = 0;
    nodes_[node].axis = axis;
  }

  std::uint32_t sah_split(std::uint32_t begin, std::uint32_t end, int axis, const Aabb& cbox,
                          const std::vector<Aabb>& boxes, const std::vector<Vec3>& centers) {
    const double lo = cbox.lo[axis], scale = kBins / (cbox.hi[axis] - cbox.lo[axis]);
    auto bin_of = [&](std::uint32_t t) { return std::min(kBins - 1, static_cast<int>((centers[t][axis] - lo) * scale)); };
    std::array<Aabb, kBins> bin_box;
    std::array<std::uint32_t, kBins> bin_count{};
    for (std::uint32_t i = begin; i < end; ++i) {
      const int b = bin_of(order_[i]);
      bin_box[b].grow(boxes[order_[i]]);
      ++bin_count[b];
    }
    std::array<double, kBins - 1> cost{};
    Aabb acc;
    std::uint32_t cnt = 0;
    for (int b = 0; b < kBins - 1; ++b) {
      acc.grow(bin_box[b]);
      cnt += bin_count[b];
      cost[b] = acc.surface_area() * cnt;
    }
    acc = Aabb{};
    cnt = 0;
    for (int b = kBins - 1; b > 0; --b) {
      acc.grow(bin_box[b]);
      cnt += bin_count[b];
      cost[b - 1] += acc.surface_area() * cnt;
    }
    const int best = static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    const auto it = std::partition(order_.begin() + begin, order_.begin() + end,
                                   [&](std::uint32_t t) { return bin_of(t) <= best; });
    return static_cast<std::uint32_t>(it - order_.begin());
  }

  std::vector<Triangle> tris_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  int max_depth_ = 0;
};

inline Bvh build_bvh(std::vector<Triangle> tris) { return Bvh(std::move(tris)); }

}  // namespace oculogen
