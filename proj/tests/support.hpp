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

// Test fixtures and independent reference computations. Nothing here calls
// into the library's own constant derivation, projection or sampler code; the
// oracles are written from the defining formulas.
#ifndef JDP_TESTS_SUPPORT_HPP_
#define JDP_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "jdp/problem.hpp"

namespace jdp::testing {

inline std::filesystem::path config_dir() { return JDP_CONFIG_DIR; }

// Eight planar agents, boxes [-10, 10]^2, f_i = 1/2 ||x_i - t_i||^2.
inline const std::array<std::array<double, 2>, 8> kTargets = {{
    {6, -4}, {2, 2}, {-7, 7}, {8, -9}, {3, -7}, {10, 10}, {-10, -10}, {6, -6}}};

// Each constraint: sum over pairs of ||x_a - x_b||^2 + constant <= 0 (0-based).
struct PairConstraint {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double constant;
};
inline const std::vector<PairConstraint> kCoupling = {
    {{{0, 1}, {0, 2}}, -5.0},
    {{{3, 4}, {3, 5}}, -3.0},
    {{{6, 7}, {6, 5}}, -3.0},
    {{{4, 2}, {4, 6}}, -5.0}};

inline ProblemSpec eight_agents() {
  std::vector<AgentSpec> agents;
  for (const auto& t : kTargets) {
    agents.push_back(AgentSpec::with_target(Vector::Constant(2, -10.0), Vector::Constant(2, 10.0),
                                            Vector{{t[0], t[1]}}));
  }
  std::vector<QuadraticConstraint> g;
  for (const auto& c : kCoupling) {
    g.push_back(QuadraticConstraint::sum_squared_differences(c.pairs, 2, c.constant));
  }
  return ProblemSpec(std::move(agents), std::move(g), Vector::Zero(16));
}

// min 1/2 (x1 - 1)^2 + 1/2 (x2 - 1)^2  s.t. x1 + x2 <= 1, x in [-2, 2]^2.
inline ProblemSpec toy_kkt() {
  std::vector<AgentSpec> agents;
  for (int i = 0; i < 2; ++i) {
    agents.push_back(AgentSpec::with_target(Vector::Constant(1, -2.0), Vector::Constant(1, 2.0),
                                            Vector::Constant(1, 1.0)));
  }
  QuadraticConstraint g(-1.0);
  g.add_linear(0, Vector::Ones(1)).add_linear(1, Vector::Ones(1));
  return ProblemSpec(std::move(agents), std::vector<QuadraticConstraint>{g}, Vector::Zero(2));
}

// Saddle point of the eight-agent problem from an interior-point solver
// (cvxpy/Clarabel, tolerances 1e-12), frozen here as an external check.
inline const std::vector<double> kExternalXHat = {
    2.5866884734, -1.3035768369, 2.367664077,  -0.0702753189, 0.7723399124, -0.9305688233,
    3.1415761234, -3.2057106843, 1.9664943853, -2.7759626624, 2.9632552495, -2.0213538061,
    1.8338316481, -3.1644433826, 2.368150131,  -3.5281084854};
inline const std::vector<double> kExternalMuHat = {0.8393224704, 1.794892354, 3.3985820689,
                                                   1.9790954798};

// --- reference formulas for the pair constraints --------------------------

inline Vector pair_constraints(const Vector& x) {
  Vector g(static_cast<Eigen::Index>(kCoupling.size()));
  for (std::size_t j = 0; j < kCoupling.size(); ++j) {
    double s = kCoupling[j].constant;
    for (auto [a, b] : kCoupling[j].pairs) s += (x.segment(2 * a, 2) - x.segment(2 * b, 2)).squaredNorm();
    g[static_cast<Eigen::Index>(j)] = s;
  }
  return g;
}

// d g_j / d x_i: 2 (x_i - x_other) for every pair containing i.
inline Matrix pair_jacobian_block(const Vector& x, std::size_t i) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(kCoupling.size()), 2);
  for (std::size_t j = 0; j < kCoupling.size(); ++j) {
    for (auto [a, b] : kCoupling[j].pairs) {
      if (a == i) out.row(static_cast<Eigen::Index>(j)) += 2.0 * (x.segment(2 * a, 2) - x.segment(2 * b, 2)).transpose();
      if (b == i) out.row(static_cast<Eigen::Index>(j)) += 2.0 * (x.segment(2 * b, 2) - x.segment(2 * a, 2)).transpose();
    }
  }
  return out;
}

// K_g by vertex enumeration: each column sum of |J| is convex in x, so its
// maximum over the box sits on one of the 2^16 corners.
inline double pair_constraint_lipschitz_by_corners() {
  double best = 0.0;
  Vector x(16);
  for (std::uint32_t mask = 0; mask < (1u << 16); ++mask) {
    for (int k = 0; k < 16; ++k) x[k] = (mask >> k) & 1u ? 10.0 : -10.0;
    Matrix jac(4, 16);
    for (std::size_t i = 0; i < 8; ++i) jac.middleCols(2 * static_cast<Eigen::Index>(i), 2) = pair_jacobian_block(x, i);
    best = std::max(best, jac.cwiseAbs().colwise().sum().maxCoeff());
  }
  return best;
}

// L_{g,i} from unit perturbations of the (affine) Jacobian block map.
inline double pair_jacobian_lipschitz(std::size_t i) {
  const Vector zero = Vector::Zero(16);
  const Matrix base = pair_jacobian_block(zero, i);
  double best = 0.0;
  for (Eigen::Index k = 0; k < 16; ++k) {
    Vector e = Vector::Zero(16);
    e[k] = 1.0;
    best = std::max(best, (pair_jacobian_block(e, i) - base).cwiseAbs().sum());
  }
  return best;
}

// --- projection onto {y >= 0, sum y <= R} by support enumeration ----------
//
// The minimizer has some support S; on S either the sum constraint is slack
// (y_S = mu_S) or tight (y_S = mu_S - tau, tau shared). Try every S and both
// cases, keep the nearest feasible candidate.
inline Vector brute_force_dual_projection(const Vector& mu, double radius) {
  const auto m = mu.size();
  Vector best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    for (int tight = 0; tight < 2; ++tight) {
      Vector y = Vector::Zero(m);
      int size = 0;
      double sum = 0.0;
      for (Eigen::Index k = 0; k < m; ++k) {
        if ((mask >> k) & 1u) {
          ++size;
          sum += mu[k];
        }
      }
      if (tight && size == 0) continue;
      const double tau = tight ? (sum - radius) / size : 0.0;
      for (Eigen::Index k = 0; k < m; ++k) {
        if ((mask >> k) & 1u) y[k] = mu[k] - tau;
      }
      if ((y.array() < -1e-12).any() || y.sum() > radius + 1e-9) continue;
      const double d = (y - mu).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = y;
      }
    }
  }
  return best;
}

inline Vector uniform_in_box(std::mt19937_64& rng, const Vector& lo, const Vector& hi) {
  Vector x(lo.size());
  for (Eigen::Index k = 0; k < lo.size(); ++k) {
    x[k] = std::uniform_real_distribution<double>(lo[k], hi[k])(rng);
  }
  return x;
}

}  // namespace jdp::testing

#endif  // JDP_TESTS_SUPPORT_HPP_
