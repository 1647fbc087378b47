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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "oculogen/error.hpp"
#include "oculogen/geom.hpp"
#include "oculogen/random.hpp"

namespace oculogen {

/// Grid of scalar displacements (mm) over UV space, bilinearly sampled with
/// clamped borders. Sample (i, j) sits at uv = ((i + 0.5) / w, (j + 0.5) / h).
class ScalarField2D {
 public:
  ScalarField2D() = default;
  ScalarField2D(int width, int height, double fill = 0.0)
      : width_(width), height_(height), values_(static_cast<std::size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0) throw Error(Errc::InvalidParams, "field dimensions must be positive");
  }

  static ScalarField2D constant(double value) { return ScalarField2D(1, 1, value); }

  /// Smoothed multi-octave value noise rescaled so that max |value| equals
  /// `amplitude` exactly.
  static ScalarField2D value_noise(int resolution, int octaves, double amplitude, std::uint64_t seed) {
    ScalarField2D f(resolution, resolution);
    Rng rng(seed);
    double weight = 1.0;
    for (int o = 0; o < octaves; ++o) {
      const int cells = 4 << o;
      std::vector<double> lattice(static_cast<std::size_t>(cells + 1) * (cells + 1));
      for (auto& l : lattice) l = rng.uniform(-1.0, 1.0);
      for (int j = 0; j < resolution; ++j) {
        for (int i = 0; i < resolution; ++i) {
          const double x = (i + 0.5) / resolution * cells;
          const double y = (j + 0.5) / resolution * cells;
          const int xi = std::min(static_cast<int>(x), cells - 1);
          const int yi = std::min(static_cast<int>(y), cells - 1);
          auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
          const double tx = smooth(x - xi), ty = smooth(y - yi);
          auto at = [&](int a, int b) { return lattice[static_cast<std::size_t>(b) * (cells + 1) + a]; };
          const double top = std::lerp(at(xi, yi), at(xi + 1, yi), tx);
          const double bot = std::lerp(at(xi, yi + 1), at(xi + 1, yi + 1), tx);
          f.at(i, j) += weight * std::lerp(top, bot, ty);
        }
      }
      weight *= 0.5;
    }
    double peak = 0.0;
    for (double v : f.values_) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
      for (double& v : f.values_) v *= amplitude / peak;
    return f;
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double& at(int i, int j) { return values_[static_cast<std::size_t>(j) * width_ + i]; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * width_ + i]; }
  const std::vector<double>& values() const noexcept { return values_; }

  double sample(const Vec2& uv) const {
    const double x = std::clamp(uv.u * width_ - 0.5, 0.0, width_ - 1.0);
    const double y = std::clamp(uv.v * height_ - 0.5, 0.0, height_ - 1.0);
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, width_ - 1), y1 = std::min(y0 + 1, height_ - 1);
    const double tx = x - x0, ty = y - y0;
    return std::lerp(std::lerp(at(x0, y0), at(x1, y0), tx), std::lerp(at(x0, y1), at(x1, y1), tx), ty);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  ScalarField2D scaled(double k) const {
    ScalarField2D out = *this;
    for (double& v : out.values_) v *= k;
    return out;
  }

  /// Pointwise mix: (1 - t) * a + t * b. Both fields must share dimensions.
  static ScalarField2D mix(const ScalarField2D& a, const ScalarField2D& b, double t) {
    if (a.width_ != b.width_ || a.height_ != b.height_) throw Error(Errc::InvalidParams, "field size mismatch");
    ScalarField2D out = a;
    for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] = (1.0 - t) * a.values_[i] + t * b.values_[i];
    return out;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

}  // namespace oculogen
