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

// Monte Carlo irradiance estimators shared by the unit and acceptance tests.

#include <cmath>

#include "oculogen.hpp"

namespace oculogen::testing {

/// Luminance irradiance at normal n from stratified uniform hemisphere
/// samples, `strata` x `strata` cells with one jittered sample each.
inline double irradiance_uniform(const EnvironmentMap& env, const Vec3& n, int strata, std::uint64_t seed) {
  Rng rng(seed);
  const Vec3 a = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 t = normalize(cross(a, n)), b = cross(n, t);
  double sum = 0.0;
  for (int i = 0; i < strata; ++i) {
    for (int j = 0; j < strata; ++j) {
      const double z = (i + rng.uniform()) / strata, phi = 2.0 * kPi * (j + rng.uniform()) / strata;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Vec3 d = r * std::cos(phi) * t + r * std::sin(phi) * b + z * n;
      sum += luminance(env.eval(d)) * z;
    }
  }
  return sum * 2.0 * kPi / (static_cast<double>(strata) * strata);
}

/// Same quantity from luminance-importance samples of the map.
inline double irradiance_importance(const EnvironmentMap& env, const EnvSampler& s, const Vec3& n, int samples,
                                    std::uint64_t seed) {
  Rng rng(seed);
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double u1 = rng.uniform(), u2 = rng.uniform();
    const DirectionSample ds = s.sample(env, u1, u2);
    const double c = dot(ds.direction.vec(), n);
    if (c > 0 && ds.pdf > 0) sum += luminance(env.eval(ds.direction.vec())) * c / ds.pdf;
  }
  return sum / samples;
}

}  // namespace oculogen::testing
