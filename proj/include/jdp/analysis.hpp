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
#ifndef JDP_ANALYSIS_HPP_
#define JDP_ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "jdp/engine.hpp"
#include "jdp/error.hpp"
#include "jdp/problem.hpp"
#include "jdp/projection.hpp"

namespace jdp {

// L(x, mu) = f(x) + mu^T g(x).
inline double lagrangian(const ProblemSpec& problem, const Vector& x, const Vector& mu) {
  return eval_ensemble_objective(problem, x) + mu.dot(eval_constraints(problem, x));
}

struct SaddlePoint {
  Vector x;
  Vector mu;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
};

struct OracleOptions {
  double step = 0.01;
  std::size_t max_iterations = 2'000'000;
};

// Reference saddle point. Iterates the primal-dual update with zero
// regularization and constant step `step` (truthful, noise-free), so a zero
// residual ||(x, mu)(k+1) - (x, mu)(k)||_2 / step is exactly the fixed-point
// (KKT) condition. Stops below `tolerance`; otherwise returns the iterate
// with the smallest residual, flagged non-converged.
inline SaddlePoint solve_saddle_point(const ProblemSpec& problem,
                                      const DerivedConstants& consts, double tolerance,
                                      const OracleOptions& options = {}) {
  if (!(options.step > 0.0)) throw ConfigError("oracle step must be > 0");
  const DualBall ball(consts.dual_radius, problem.num_constraints());
  Vector x = problem.center();
  Vector mu = Vector::Zero(static_cast<Eigen::Index>(problem.num_constraints()));
  SaddlePoint best;
  best.x = x;
  best.mu = mu;
  const double gamma = options.step;
  Vector next(x.size());
  for (std::size_t k = 0; k < options.max_iterations; ++k) {
    for (std::size_t i = 0; i < problem.num_agents(); ++i) {
      const Vector q = eval_jacobian_block(problem, x, i).transpose() * mu;
      problem.block(next, i) =
          agent_primal_update(problem.agent(i), problem.block(x, i), q, 0.0, gamma);
    }
    Vector mu_next = cloud_dual_update(problem, next, mu, nullptr, nullptr, 0.0, gamma, ball);
    const double moved =
        std::sqrt((next - x).squaredNorm() + (mu_next - mu).squaredNorm()) / gamma;
    if (!std::isfinite(moved)) throw NumericError("oracle diverged", k);
    x = next;
    mu = std::move(mu_next);
    if (moved < best.residual) {
      best.x = x;
      best.mu = mu;
      best.residual = moved;
      best.iterations = k + 1;
    }
    if (moved < tolerance) {
      best.converged = true;
      return best;
    }
  }
  return best;
}

// lambda_i = f_i(x_bar_i) + K_i D_i, an upper bound on f_i over X_i.
inline double lambda_bound(double f_at_slater, double lipschitz, double diameter) {
  return f_at_slater + lipschitz * diameter;
}

inline double lambda_bound(const ProblemSpec& problem, const DerivedConstants& consts,
                           std::size_t i) {
  const double f_bar = problem.agent(i).value(problem.block(problem.slater_point(), i));
  return lambda_bound(f_bar, consts.objective_lipschitz.at(i), consts.diameter.at(i));
}

// rho_i = min{K_i D_i, 2 lambda_i}, bounds |f_i(a) - f_i(b)| over X_i.
inline double rho_bound(double lipschitz, double diameter, double lambda) {
  return std::min(lipschitz * diameter, 2.0 * lambda);
}

struct BetaBound {
  double epsilon = 0.0;
  std::vector<double> lambda;
  std::vector<double> rho;
  double max_rho = 0.0;
  std::vector<double> beta;  // 2 max_j rho_j + eps lambda_i
  std::vector<std::string> warnings;
};

inline BetaBound beta_bound(const ProblemSpec& problem, const DerivedConstants& consts,
                            double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  BetaBound out;
  out.epsilon = epsilon;
  if (!(epsilon < 1.0)) {
    out.warnings.push_back("epsilon = " + std::to_string(epsilon) +
                           " lies outside (0, 1), where the misreport bound is stated");
  }
  const std::size_t n = problem.num_agents();
  for (std::size_t i = 0; i < n; ++i) {
    const double l = lambda_bound(problem, consts, i);
    out.lambda.push_back(l);
    out.rho.push_back(rho_bound(consts.objective_lipschitz[i], consts.diameter[i], l));
  }
  out.max_rho = *std::max_element(out.rho.begin(), out.rho.end());
  for (std::size_t i = 0; i < n; ++i) {
    out.beta.push_back(2.0 * out.max_rho + epsilon * out.lambda[i]);
  }
  return out;
}

// Per-agent cost sampled at the logged steps.
struct CostCurve {
  std::vector<std::size_t> steps;
  std::vector<double> values;
};

inline CostCurve cost_curve(const Trajectory& traj, std::size_t agent) {
  CostCurve out;
  out.steps.reserve(traj.steps.size());
  out.values.reserve(traj.steps.size());
  for (const auto& s : traj.steps) {
    if (agent >= static_cast<std::size_t>(s.costs.size())) {
      throw InputError("cost_curve: agent index out of range");
    }
    out.steps.push_back(s.k);
    out.values.push_back(s.costs[static_cast<Eigen::Index>(agent)]);
  }
  return out;
}

// Seed average of an agent's cost; approximates E[f_i(x_i(k))].
inline CostCurve average_cost_curve(std::span<const Trajectory> ensemble, std::size_t agent) {
  if (ensemble.empty()) throw InputError("average_cost_curve: empty ensemble");
  CostCurve out = cost_curve(ensemble.front(), agent);
  for (std::size_t r = 1; r < ensemble.size(); ++r) {
    const CostCurve c = cost_curve(ensemble[r], agent);
    if (c.steps != out.steps) throw InputError("average_cost_curve: horizon mismatch");
    for (std::size_t k = 0; k < c.values.size(); ++k) out.values[k] += c.values[k];
  }
  for (double& v : out.values) v /= static_cast<double>(ensemble.size());
  return out;
}

// truthful - misreport, per logged step. Positive entries are gains from lying.
inline CostCurve misreport_gain(const CostCurve& truthful, const CostCurve& misreport) {
  if (truthful.steps != misreport.steps) {
    throw InputError("misreport_gain: horizon mismatch");
  }
  CostCurve out;
  out.steps = truthful.steps;
  out.values.resize(truthful.values.size());
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = truthful.values[k] - misreport.values[k];
  }
  return out;
}

inline CostCurve misreport_gain(const Trajectory& truthful, const Trajectory& misreport,
                                std::size_t agent) {
  return misreport_gain(cost_curve(truthful, agent), cost_curve(misreport, agent));
}

struct ErrorCurves {
  std::vector<std::size_t> steps;
  std::vector<double> primal;  // ||x(k) - x_hat||_2
  std::vector<double> dual;    // ||mu(k) - mu_hat||_2
};

inline ErrorCurves error_curves(const Trajectory& traj, const SaddlePoint& sp) {
  ErrorCurves out;
  for (const auto& s : traj.steps) {
    internal::require_dimension("error_curves primal", s.x.size(), sp.x.size());
    internal::require_dimension("error_curves dual", s.mu.size(), sp.mu.size());
    out.steps.push_back(s.k);
    out.primal.push_back((s.x - sp.x).norm());
    out.dual.push_back((s.mu - sp.mu).norm());
  }
  return out;
}

}  // namespace jdp

#endif  // JDP_ANALYSIS_HPP_
