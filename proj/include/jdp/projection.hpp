// Copyright 2026 The jdpopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef JDP_PROJECTION_HPP_
#define JDP_PROJECTION_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "jdp/error.hpp"
#include "jdp/problem.hpp"

namespace jdp {

// Coordinatewise clamp onto [lower, upper].
inline Vector project_box(const Vector& x, const Vector& lower, const Vector& upper) {
  internal::require_dimension("project_box", x.size(), lower.size());
  internal::require_dimension("project_box bounds", upper.size(), lower.size());
  return x.cwiseMax(lower).cwiseMin(upper);
}

inline Vector project_box(const Vector& x_i, const AgentSpec& agent) {
  return project_box(x_i, agent.lower(), agent.upper());
}

// M = { mu >= 0 : ||mu||_1 <= radius }.
class DualBall {
 public:
  DualBall(double radius, std::size_t dimension)
      : radius_(radius), dimension_(dimension) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw ConfigError("dual ball radius must be positive and finite");
    }
  }

  double radius() const { return radius_; }
  std::size_t dimension() const { return dimension_; }

  bool contains(const Vector& mu, double slack = 0.0) const {
    return static_cast<std::size_t>(mu.size()) == dimension_ &&
           (mu.array() >= -slack).all() && mu.sum() <= radius_ + slack;
  }

 private:
  double radius_;
  std::size_t dimension_;
};

// Euclidean projection onto M. Negative entries are clipped first; if the
// result is too long it is soft-thresholded, max(mu - tau, 0), with tau the
// unique level giving ||.||_1 = radius (sort and scan).
inline Vector project_dual(const Vector& mu, const DualBall& ball) {
  internal::require_dimension("project_dual", mu.size(), ball.dimension());
  if (!mu.allFinite()) throw NumericError("project_dual: non-finite dual vector");

  Vector clipped = mu.cwiseMax(0.0);
  if (clipped.sum() <= ball.radius()) return clipped;

  std::vector<double> sorted(clipped.data(), clipped.data() + clipped.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    prefix += sorted[r];
    const double candidate = (prefix - ball.radius()) / static_cast<double>(r + 1);
    if (sorted[r] - candidate > 0.0) tau = candidate;
  }
  return (clipped.array() - tau).cwiseMax(0.0).matrix();
}

}  // namespace jdp

#endif  // JDP_PROJECTION_HPP_
