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
//
// The cloud/agent communication cycle. Each iteration k:
//   1. agents report x'_i(k) (possibly untruthfully) and the cloud sends
//      q_i(k) = (g_{x_i}(x'(k)) + w_i(k))^T mu(k) to agent i;
//   2. each agent moves its true state with a projected, Tikhonov-damped
//      gradient step and reports x'_i(k+1);
//   3. the cloud takes a projected dual step on g(x'(k+1)) + w_g(k).
// Without a NoisePlan the noise terms are zero (deterministic mode).
#ifndef JDP_ENGINE_HPP_
#define JDP_ENGINE_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jdp/error.hpp"
#include "jdp/mechanism.hpp"
#include "jdp/problem.hpp"
#include "jdp/projection.hpp"

namespace jdp {

// alpha_k = alpha_bar (k+1)^-c1, gamma_k = gamma_bar (k+1)^-c2, with
// 0 < c1 < c2, c1 + c2 < 1 and positive multipliers.
class Schedule {
 public:
  Schedule(double alpha_bar, double alpha_decay, double gamma_bar, double gamma_decay)
      : alpha_bar_(alpha_bar),
        alpha_decay_(alpha_decay),
        gamma_bar_(gamma_bar),
        gamma_decay_(gamma_decay) {
    if (!(alpha_bar > 0.0) || !(gamma_bar > 0.0)) {
      throw ConfigError("schedule needs alpha_bar > 0 and gamma_bar > 0");
    }
    if (!(0.0 < alpha_decay && alpha_decay < gamma_decay)) {
      throw ConfigError("schedule needs 0 < c1 < c2");
    }
    if (!(alpha_decay + gamma_decay < 1.0)) {
      throw ConfigError("schedule needs c1 + c2 < 1");
    }
  }

  double alpha_bar() const { return alpha_bar_; }
  double alpha_decay() const { return alpha_decay_; }
  double gamma_bar() const { return gamma_bar_; }
  double gamma_decay() const { return gamma_decay_; }

 private:
  double alpha_bar_;
  double alpha_decay_;
  double gamma_bar_;
  double gamma_decay_;
};

struct StepSizes {
  double alpha;  // regularization
  double gamma;  // step size
};

// Evaluated at k + 1 so that k = 0 is defined.
inline StepSizes step_sizes(const Schedule& schedule, std::size_t k) {
  const double t = static_cast<double>(k) + 1.0;
  return {schedule.alpha_bar() * std::pow(t, -schedule.alpha_decay()),
          schedule.gamma_bar() * std::pow(t, -schedule.gamma_decay())};
}

// What an agent sends the cloud.
class Behavior {
 public:
  enum class Kind { kTruthful, kConstantTarget, kAdjacentClipped };

  static Behavior truthful() { return Behavior(Kind::kTruthful, Vector(), 0.0); }

  // Report `value` at every step, regardless of the true state.
  static Behavior constant_target(Vector value) {
    return Behavior(Kind::kConstantTarget, std::move(value), 0.0);
  }

  // Move the report toward `desired`, but stop once the cumulative 1-norm
  // deviation from the true states would exceed `budget`.
  static Behavior adjacent_clipped(Vector desired, double budget) {
    if (!(budget >= 0.0)) throw ConfigError("misreport budget must be >= 0");
    return Behavior(Kind::kAdjacentClipped, std::move(desired), budget);
  }

  Kind kind() const { return kind_; }
  const Vector& report() const { return report_; }
  double budget() const { return budget_; }

 private:
  Behavior(Kind kind, Vector report, double budget)
      : kind_(kind), report_(std::move(report)), budget_(budget) {}

  Kind kind_;
  Vector report_;
  double budget_;
};

inline const char* to_string(Behavior::Kind kind) {
  switch (kind) {
    case Behavior::Kind::kTruthful: return "truthful";
    case Behavior::Kind::kConstantTarget: return "constant_target";
    case Behavior::Kind::kAdjacentClipped: return "adjacent_clipped";
  }
  return "unknown";
}

// Per-run reporting state of one agent.
class Reporter {
 public:
  explicit Reporter(const Behavior& behavior) : behavior_(&behavior) {}

  Vector report(const Vector& truth) {
    switch (behavior_->kind()) {
      case Behavior::Kind::kTruthful:
        return truth;
      case Behavior::Kind::kConstantTarget:
        internal::require_dimension("constant report", behavior_->report().size(),
                                    truth.size());
        return behavior_->report();
      case Behavior::Kind::kAdjacentClipped: {
        internal::require_dimension("clipped report", behavior_->report().size(),
                                    truth.size());
        const Vector shift = behavior_->report() - truth;
        const double wanted = shift.lpNorm<1>();
        const double remaining = behavior_->budget() - spent_;
        if (wanted == 0.0 || remaining <= 0.0) return truth;
        double fraction = 1.0;
        if (wanted > remaining) {
          // Rounding margin so the running sum can never pass the budget.
          fraction = remaining / wanted * (1.0 - 1e-12);
        }
        Vector out = truth + fraction * shift;
        spent_ += (out - truth).lpNorm<1>();
        return out;
      }
    }
    return truth;
  }

  double spent() const { return spent_; }

 private:
  const Behavior* behavior_;
  double spent_ = 0.0;
};

struct RunState {
  Vector x;         // true ensemble state
  Vector mu;        // dual variable
  Vector reported;  // ensemble state as received by the cloud
  std::size_t k = 0;
};

struct StepRecord {
  std::size_t k = 0;
  Vector x;
  Vector reported;
  Vector mu;
  std::vector<Vector> messages;  // q_i(k) per agent; empty at the last step
  Vector costs;                  // f_i(x_i(k)), true states
  Vector constraint_values;      // g(x'(k))
};

// Steps k = 0, s, 2s, ... for log stride s, plus the final step K.
struct Trajectory {
  std::size_t horizon = 0;
  std::size_t log_stride = 1;
  std::uint64_t seed = 0;
  bool noisy = false;
  std::vector<StepRecord> steps;

  const StepRecord& last() const { return steps.back(); }
};

// q_i(k) = (g_{x_i}(x') + w_i)^T mu; w_i is an m x n_i matrix of fresh
// Lap(b_i) draws from substream "agent/<i+1>" when a plan is given.
inline Vector cloud_compute_q(const ProblemSpec& problem, const Vector& reported,
                              const Vector& mu, const NoisePlan* plan,
                              NoiseStream* stream, std::size_t i) {
  internal::require_dimension("cloud_compute_q dual", mu.size(), problem.num_constraints());
  Matrix jac = eval_jacobian_block(problem, reported, i);
  if (plan != nullptr) {
    if (stream == nullptr) throw InputError("noisy mode needs a NoiseStream");
    jac += sample_laplace(*stream, agent_substream(i), plan->agent_scales.at(i),
                          jac.rows(), jac.cols());
  }
  return jac.transpose() * mu;
}

inline Vector agent_primal_update(const AgentSpec& agent, const Vector& x_i,
                                  const Vector& q_i, double alpha, double gamma) {
  internal::require_dimension("agent_primal_update", x_i.size(), agent.dimension());
  internal::require_dimension("agent_primal_update message", q_i.size(), agent.dimension());
  const Vector raw = x_i - gamma * (agent.gradient(x_i) + q_i + alpha * x_i);
  if (!raw.allFinite()) throw NumericError("agent_primal_update: non-finite state");
  return project_box(raw, agent);
}

// mu(k+1) = Pi_M[mu + gamma (g(x') + w_g - alpha mu)], x' the latest report.
inline Vector cloud_dual_update(const ProblemSpec& problem, const Vector& reported,
                                const Vector& mu, const NoisePlan* plan,
                                NoiseStream* stream, double alpha, double gamma,
                                const DualBall& ball) {
  Vector ascent = eval_constraints(problem, reported);
  if (plan != nullptr) {
    if (stream == nullptr) throw InputError("noisy mode needs a NoiseStream");
    ascent += sample_laplace(*stream, kConstraintSubstream, plan->constraint_scale,
                             ascent.size());
  }
  return project_dual(mu + gamma * (ascent - alpha * mu), ball);
}

struct RunOptions {
  std::optional<Vector> initial_state;  // default: box centers
  std::optional<Vector> initial_dual;   // default: zero
  std::size_t log_stride = 1;
  bool keep_messages = true;
};

inline Trajectory run(const ProblemSpec& problem, const DerivedConstants& consts,
                      const Schedule& schedule, const std::optional<NoisePlan>& plan,
                      const std::vector<Behavior>& behaviors, std::size_t horizon,
                      std::uint64_t seed, const RunOptions& options = {}) {
  const std::size_t n_agents = problem.num_agents();
  const std::size_t m = problem.num_constraints();
  if (!behaviors.empty() && behaviors.size() != n_agents) {
    throw ConfigError("need one behavior per agent");
  }
  if (options.log_stride == 0) throw ConfigError("log stride must be >= 1");
  if (plan && plan->agent_scales.size() != n_agents) {
    throw ConfigError("noise plan does not match the number of agents");
  }
  const DualBall ball(consts.dual_radius, m);
  const NoisePlan* noise = plan ? &*plan : nullptr;
  NoiseStream stream(seed);

  std::vector<Reporter> reporters;
  const std::vector<Behavior> all_truthful(n_agents, Behavior::truthful());
  const auto& policy = behaviors.empty() ? all_truthful : behaviors;
  reporters.reserve(n_agents);
  for (const auto& b : policy) reporters.emplace_back(b);

  RunState state;
  state.x = options.initial_state.value_or(problem.center());
  state.mu = options.initial_dual.value_or(Vector::Zero(static_cast<Eigen::Index>(m)));
  if (!problem.contains(state.x)) throw ConfigError("initial state must lie in X");
  if (!ball.contains(state.mu)) throw ConfigError("initial dual must lie in M");

  auto report_all = [&](const Vector& truth) {
    Vector out(truth.size());
    for (std::size_t i = 0; i < n_agents; ++i) {
      problem.block(out, i) = reporters[i].report(problem.block(truth, i));
    }
    return out;
  };
  auto record = [&](std::vector<Vector> messages) {
    StepRecord r;
    r.k = state.k;
    r.x = state.x;
    r.reported = state.reported;
    r.mu = state.mu;
    r.messages = std::move(messages);
    r.costs.resize(static_cast<Eigen::Index>(n_agents));
    for (std::size_t i = 0; i < n_agents; ++i) {
      r.costs[static_cast<Eigen::Index>(i)] = problem.agent(i).value(problem.block(state.x, i));
    }
    r.constraint_values = eval_constraints(problem, state.reported);
    return r;
  };

  Trajectory traj;
  traj.horizon = horizon;
  traj.log_stride = options.log_stride;
  traj.seed = seed;
  traj.noisy = noise != nullptr;
  traj.steps.reserve(horizon / options.log_stride + 2);

  state.reported = report_all(state.x);
  std::vector<Vector> messages(n_agents);
  for (; state.k < horizon; ++state.k) {
    const StepSizes h = step_sizes(schedule, state.k);
    for (std::size_t i = 0; i < n_agents; ++i) {
      messages[i] = cloud_compute_q(problem, state.reported, state.mu, noise, &stream, i);
    }
    if (state.k % options.log_stride == 0) {
      traj.steps.push_back(record(options.keep_messages ? messages : std::vector<Vector>{}));
    }
    Vector next = state.x;
    try {
      for (std::size_t i = 0; i < n_agents; ++i) {
        problem.block(next, i) = agent_primal_update(
            problem.agent(i), problem.block(state.x, i), messages[i], h.alpha, h.gamma);
      }
      Vector reported_next = report_all(next);
      state.mu = cloud_dual_update(problem, reported_next, state.mu, noise, &stream,
                                   h.alpha, h.gamma, ball);
      state.reported = std::move(reported_next);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at step " + std::to_string(state.k),
                         state.k);
    }
    state.x = std::move(next);
  }
  traj.steps.push_back(record({}));
  return traj;
}

// Adjacency of the signals the cloud received in two runs (logged steps).
inline bool check_adjacency(const ProblemSpec& problem, const Trajectory& a,
                            const Trajectory& b, std::size_t i, double adjacency) {
  if (a.horizon != b.horizon || a.steps.size() != b.steps.size()) {
    throw InputError("check_adjacency: horizon mismatch");
  }
  std::vector<Vector> u, v;
  u.reserve(a.steps.size());
  v.reserve(b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    u.push_back(a.steps[k].reported);
    v.push_back(b.steps[k].reported);
  }
  return check_adjacency(problem, u, v, i, adjacency);
}

}  // namespace jdp

#endif  // JDP_ENGINE_HPP_
