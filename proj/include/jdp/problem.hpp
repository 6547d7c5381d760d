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
// Multi-agent convex program
//
//   minimize    f(x) = sum_i f_i(x_i)
//   subject to  g(x) <= 0,  x in X = X_1 x ... x X_N,
//
// with box sets X_i, convex objectives f_i and convex quadratic coupling
// constraints g_j(x) = 1/2 x^T Q_j x + c_j^T x + d_j. Besides evaluation, this
// header computes the constants that the privacy calibration and the
// misreporting bounds are built from. All Lipschitz constants are taken with
// respect to the 1-norm on the input and the (entrywise) 1-norm on the output.
#ifndef JDP_PROBLEM_HPP_
#define JDP_PROBLEM_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jdp/error.hpp"

namespace jdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Eigenvalues above this (negated) threshold count as nonnegative.
inline constexpr double kPsdTolerance = 1e-9;

namespace internal {

inline std::string dims(std::size_t got, std::size_t want) {
  return "got " + std::to_string(got) + ", expected " + std::to_string(want);
}

inline void require_dimension(const char* what, std::size_t got,
                              std::size_t want) {
  if (got != want) {
    throw InputError(std::string(what) + ": dimension mismatch (" +
                     dims(got, want) + ")");
  }
}

inline bool is_psd(const Matrix& q) {
  if (q.size() == 0) return true;
  const double scale = 1.0 + q.cwiseAbs().maxCoeff();
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(q, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -kPsdTolerance;
}

// max over the box [lo, hi] of |a^T x + b|; exact since a^T x + b is affine.
inline double max_abs_affine(const Eigen::Ref<const Vector>& a, double b,
                             const Vector& lo, const Vector& hi) {
  double top = b;
  double bottom = b;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double p = a[k] * lo[k];
    const double q = a[k] * hi[k];
    top += std::max(p, q);
    bottom += std::min(p, q);
  }
  return std::max(std::abs(top), std::abs(bottom));
}

}  // namespace internal

// f_i(x) = 1/2 x^T P x + c^T x + d with P positive semidefinite.
struct QuadraticObjective {
  Matrix P;
  Vector c;
  double d = 0.0;
};

// Opaque convex objective. The caller vouches for convexity and supplies the
// 1-norm Lipschitz constant over the agent's box.
struct CallbackObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz = 0.0;
};

class AgentSpec {
 public:
  // f_i(x) = 1/2 ||x - target||^2.
  static AgentSpec with_target(Vector lower, Vector upper, Vector target) {
    const auto n = target.size();
    QuadraticObjective q{Matrix::Identity(n, n), -target,
                         0.5 * target.squaredNorm()};
    AgentSpec agent(std::move(lower), std::move(upper), std::move(q));
    agent.target_ = std::move(target);
    return agent;
  }

  static AgentSpec with_quadratic(Vector lower, Vector upper, Matrix P,
                                  Vector c, double d = 0.0) {
    return AgentSpec(std::move(lower), std::move(upper),
                     QuadraticObjective{std::move(P), std::move(c), d});
  }

  static AgentSpec with_callback(Vector lower, Vector upper,
                                 CallbackObjective objective) {
    if (!objective.value || !objective.gradient) {
      throw ConfigError("callback objective needs value and gradient");
    }
    if (!(objective.lipschitz >= 0.0)) {
      throw ConfigError("callback objective needs a Lipschitz constant >= 0");
    }
    return AgentSpec(std::move(lower), std::move(upper), std::move(objective));
  }

  std::size_t dimension() const { return static_cast<std::size_t>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Vector center() const { return 0.5 * (lower_ + upper_); }

  // Unconstrained minimizer, when the agent was built from one.
  const std::optional<Vector>& target() const { return target_; }

  const QuadraticObjective* quadratic() const {
    return std::get_if<QuadraticObjective>(&objective_);
  }
  const CallbackObjective* callback() const {
    return std::get_if<CallbackObjective>(&objective_);
  }

  // No dimension check; see eval_objective().
  double value(const Vector& x) const {
    if (const auto* q = quadratic()) {
      return 0.5 * x.dot(q->P * x) + q->c.dot(x) + q->d;
    }
    return callback()->value(x);
  }

  Vector gradient(const Vector& x) const {
    if (const auto* q = quadratic()) return q->P * x + q->c;
    return callback()->gradient(x);
  }

  bool contains(const Vector& x, double slack = 0.0) const {
    return x.size() == lower_.size() &&
           ((x - lower_).array() >= -slack).all() &&
           ((upper_ - x).array() >= -slack).all();
  }

 private:
  using Objective = std::variant<QuadraticObjective, CallbackObjective>;

  AgentSpec(Vector lower, Vector upper, Objective objective)
      : lower_(std::move(lower)),
        upper_(std::move(upper)),
        objective_(std::move(objective)) {
    if (lower_.size() < 1) throw ConfigError("agent dimension must be >= 1");
    internal::require_dimension("agent upper bound", upper_.size(), lower_.size());
    for (Eigen::Index k = 0; k < lower_.size(); ++k) {
      if (!(lower_[k] < upper_[k])) {
        throw ConfigError("agent box needs lo < hi in every coordinate");
      }
    }
    if (const auto* q = quadratic()) {
      const auto n = static_cast<std::size_t>(lower_.size());
      internal::require_dimension("objective P rows", q->P.rows(), n);
      internal::require_dimension("objective P cols", q->P.cols(), n);
      internal::require_dimension("objective c", q->c.size(), n);
      if (!internal::is_psd(q->P)) {
        throw ConfigError("objective matrix P must be symmetric PSD");
      }
    }
  }

  Vector lower_;
  Vector upper_;
  Objective objective_;
  std::optional<Vector> target_;
};

// One convex quadratic constraint, stored sparsely by agent block:
// Q_j is assembled from (row agent, column agent) blocks and c_j from
// per-agent linear pieces.
class QuadraticConstraint {
 public:
  using BlockKey = std::pair<std::size_t, std::size_t>;

  explicit QuadraticConstraint(double constant = 0.0) : constant_(constant) {}

  // Q[a, b] += block and, for a != b, Q[b, a] += block^T so Q stays symmetric.
  QuadraticConstraint& add_block(std::size_t row_agent, std::size_t col_agent,
                                 const Matrix& block) {
    accumulate({row_agent, col_agent}, block);
    if (row_agent != col_agent) {
      accumulate({col_agent, row_agent}, block.transpose());
    }
    return *this;
  }

  QuadraticConstraint& add_linear(std::size_t agent, const Vector& coeffs) {
    auto [it, inserted] = linear_.try_emplace(agent, coeffs);
    if (!inserted) {
      internal::require_dimension("linear term", coeffs.size(), it->second.size());
      it->second += coeffs;
    }
    return *this;
  }

  QuadraticConstraint& add_constant(double value) {
    constant_ += value;
    return *this;
  }

  // sum over pairs (a, b) of ||x_a - x_b||^2, plus `constant`. All agents in
  // the pairs must share `dim`.
  static QuadraticConstraint sum_squared_differences(
      const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
      std::size_t dim, double constant) {
    QuadraticConstraint g(constant);
    const Matrix eye = Matrix::Identity(dim, dim);
    for (const auto& [a, b] : pairs) {
      if (a == b) continue;
      g.add_block(a, a, 2.0 * eye);
      g.add_block(b, b, 2.0 * eye);
      g.add_block(a, b, -2.0 * eye);
    }
    return g;
  }

  const std::map<BlockKey, Matrix>& blocks() const { return blocks_; }
  const std::map<std::size_t, Vector>& linear() const { return linear_; }
  double constant() const { return constant_; }

 private:
  void accumulate(BlockKey key, const Matrix& block) {
    auto [it, inserted] = blocks_.try_emplace(key, block);
    if (!inserted) {
      if (it->second.rows() != block.rows() || it->second.cols() != block.cols()) {
        throw InputError("constraint block shape mismatch");
      }
      it->second += block;
    }
  }

  std::map<BlockKey, Matrix> blocks_;
  std::map<std::size_t, Vector> linear_;
  double constant_;
};

// Opaque convex constraints. Accepted only together with caller-supplied
// Lipschitz constants, since they cannot be derived.
struct CallbackConstraints {
  std::size_t count = 0;
  std::function<Vector(const Vector&)> value;
  // (x, agent) -> count x n_agent block of the Jacobian.
  std::function<Matrix(const Vector&, std::size_t)> jacobian_block;
  double lipschitz = 0.0;                  // K_g
  std::vector<double> jacobian_lipschitz;  // L_{g,i}, one per agent
};

using ConstraintSpec =
    std::variant<std::vector<QuadraticConstraint>, CallbackConstraints>;

class ProblemSpec {
 public:
  ProblemSpec(std::vector<AgentSpec> agents, ConstraintSpec constraints,
              Vector slater_point, std::optional<double> f_lower = std::nullopt)
      : agents_(std::move(agents)),
        constraints_(std::move(constraints)),
        slater_point_(std::move(slater_point)),
        f_lower_(f_lower) {
    if (agents_.empty()) throw ConfigError("problem needs at least one agent");
    offsets_.reserve(agents_.size() + 1);
    offsets_.push_back(0);
    for (const auto& a : agents_) offsets_.push_back(offsets_.back() + a.dimension());
    internal::require_dimension("Slater point", slater_point_.size(), dimension());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (!agents_[i].contains(block(slater_point_, i))) {
        throw ConfigError("Slater point lies outside the box of agent " +
                          std::to_string(i + 1));
      }
    }
    if (const auto* quads = quadratic_constraints()) {
      index_quadratics(*quads);
    } else {
      const auto& cb = std::get<CallbackConstraints>(constraints_);
      if (!cb.value || !cb.jacobian_block) {
        throw ConfigError("callback constraints need value and Jacobian callbacks");
      }
      if (cb.jacobian_lipschitz.size() != agents_.size() || !(cb.lipschitz > 0.0)) {
        throw ConfigError(
            "callback constraints need K_g and one L_{g,i} per agent");
      }
    }
    if (num_constraints() == 0) throw ConfigError("problem needs >= 1 constraint");
  }

  std::size_t num_agents() const { return agents_.size(); }
  std::size_t dimension() const { return offsets_.back(); }
  std::size_t num_constraints() const {
    if (const auto* q = quadratic_constraints()) return q->size();
    return std::get<CallbackConstraints>(constraints_).count;
  }

  const AgentSpec& agent(std::size_t i) const { return agents_.at(i); }
  const std::vector<AgentSpec>& agents() const { return agents_; }
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  const ConstraintSpec& constraints() const { return constraints_; }
  const std::vector<QuadraticConstraint>* quadratic_constraints() const {
    return std::get_if<std::vector<QuadraticConstraint>>(&constraints_);
  }
  const Vector& slater_point() const { return slater_point_; }
  const std::optional<double>& f_lower() const { return f_lower_; }

  // Dense Q_j, available for quadratic constraint sets.
  const Matrix& dense_hessian(std::size_t j) const { return dense_q_.at(j); }
  const Vector& dense_linear(std::size_t j) const { return dense_c_.at(j); }

  Eigen::VectorBlock<const Vector> block(const Vector& x, std::size_t i) const {
    return x.segment(static_cast<Eigen::Index>(offsets_[i]),
                     static_cast<Eigen::Index>(agents_[i].dimension()));
  }
  Eigen::VectorBlock<Vector> block(Vector& x, std::size_t i) const {
    return x.segment(static_cast<Eigen::Index>(offsets_[i]),
                     static_cast<Eigen::Index>(agents_[i].dimension()));
  }

  Vector lower() const { return stack([](const AgentSpec& a) { return a.lower(); }); }
  Vector upper() const { return stack([](const AgentSpec& a) { return a.upper(); }); }
  Vector center() const { return stack([](const AgentSpec& a) { return a.center(); }); }

  bool contains(const Vector& x, double slack = 0.0) const {
    if (static_cast<std::size_t>(x.size()) != dimension()) return false;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (!agents_[i].contains(block(x, i), slack)) return false;
    }
    return true;
  }

  // Per-constraint, per-agent list of (column agent, Q block) for fast
  // gradient evaluation: grad_{x_i} g_j = sum_b Q_j[i, b] x_b + c_j[i].
  struct RowBlock {
    std::size_t col_agent;
    Matrix values;
  };
  const std::vector<RowBlock>& row_blocks(std::size_t j, std::size_t i) const {
    return row_blocks_[j * agents_.size() + i];
  }
  const Vector* linear_block(std::size_t j, std::size_t i) const {
    const auto& c = linear_blocks_[j * agents_.size() + i];
    return c ? &*c : nullptr;
  }

 private:
  template <typename F>
  Vector stack(F&& part) const {
    Vector out(static_cast<Eigen::Index>(dimension()));
    for (std::size_t i = 0; i < agents_.size(); ++i) block(out, i) = part(agents_[i]);
    return out;
  }

  void index_quadratics(const std::vector<QuadraticConstraint>& quads) {
    const std::size_t n_agents = agents_.size();
    const auto n = static_cast<Eigen::Index>(dimension());
    row_blocks_.assign(quads.size() * n_agents, {});
    linear_blocks_.assign(quads.size() * n_agents, std::nullopt);
    for (std::size_t j = 0; j < quads.size(); ++j) {
      Matrix q = Matrix::Zero(n, n);
      Vector c = Vector::Zero(n);
      for (const auto& [key, values] : quads[j].blocks()) {
        const auto [a, b] = key;
        if (a >= n_agents || b >= n_agents) {
          throw ConfigError("constraint " + std::to_string(j + 1) +
                            " references an unknown agent");
        }
        if (static_cast<std::size_t>(values.rows()) != agents_[a].dimension() ||
            static_cast<std::size_t>(values.cols()) != agents_[b].dimension()) {
          throw ConfigError("constraint " + std::to_string(j + 1) +
                            " has a block inconsistent with agent dimensions");
        }
        q.block(static_cast<Eigen::Index>(offsets_[a]),
                static_cast<Eigen::Index>(offsets_[b]), values.rows(),
                values.cols()) = values;
        row_blocks_[j * n_agents + a].push_back({b, values});
      }
      for (const auto& [a, coeffs] : quads[j].linear()) {
        if (a >= n_agents ||
            static_cast<std::size_t>(coeffs.size()) != agents_[a].dimension()) {
          throw ConfigError("constraint " + std::to_string(j + 1) +
                            " has an inconsistent linear term");
        }
        c.segment(static_cast<Eigen::Index>(offsets_[a]), coeffs.size()) = coeffs;
        linear_blocks_[j * n_agents + a] = coeffs;
      }
      if (!internal::is_psd(q)) {
        throw ConfigError("constraint " + std::to_string(j + 1) +
                          " is not convex (Q not symmetric PSD)");
      }
      dense_q_.push_back(std::move(q));
      dense_c_.push_back(std::move(c));
    }
  }

  std::vector<AgentSpec> agents_;
  ConstraintSpec constraints_;
  Vector slater_point_;
  std::optional<double> f_lower_;
  std::vector<std::size_t> offsets_;
  std::vector<Matrix> dense_q_;
  std::vector<Vector> dense_c_;
  std::vector<std::vector<RowBlock>> row_blocks_;
  std::vector<std::optional<Vector>> linear_blocks_;
};

struct DerivedConstants {
  std::vector<double> objective_lipschitz;  // K_i
  std::vector<double> diameter;             // D_i
  double constraint_lipschitz = 0.0;        // K_g
  std::vector<double> jacobian_lipschitz;   // L_{g,i}
  double f_lower = 0.0;
  double f_slater = 0.0;       // f(x_bar)
  double slater_margin = 0.0;  // min_j -g_j(x_bar)
  double dual_radius = 0.0;    // (f(x_bar) - f_lower) / slater_margin
};

inline double eval_objective(const AgentSpec& agent, const Vector& x_i) {
  internal::require_dimension("eval_objective", x_i.size(), agent.dimension());
  return agent.value(x_i);
}

inline double eval_ensemble_objective(const ProblemSpec& problem, const Vector& x) {
  internal::require_dimension("eval_ensemble_objective", x.size(), problem.dimension());
  double total = 0.0;
  for (std::size_t i = 0; i < problem.num_agents(); ++i) {
    total += problem.agent(i).value(problem.block(x, i));
  }
  return total;
}

inline Vector eval_constraints(const ProblemSpec& problem, const Vector& x) {
  internal::require_dimension("eval_constraints", x.size(), problem.dimension());
  const auto* quads = problem.quadratic_constraints();
  if (quads == nullptr) {
    Vector out = std::get<CallbackConstraints>(problem.constraints()).value(x);
    internal::require_dimension("callback constraint value", out.size(),
                                problem.num_constraints());
    return out;
  }
  Vector out(static_cast<Eigen::Index>(quads->size()));
  for (std::size_t j = 0; j < quads->size(); ++j) {
    double total = (*quads)[j].constant();
    for (std::size_t i = 0; i < problem.num_agents(); ++i) {
      const auto x_i = problem.block(x, i);
      for (const auto& rb : problem.row_blocks(j, i)) {
        total += 0.5 * x_i.dot(rb.values * problem.block(x, rb.col_agent));
      }
      if (const Vector* c = problem.linear_block(j, i)) total += c->dot(x_i);
    }
    out[static_cast<Eigen::Index>(j)] = total;
  }
  return out;
}

// m x n_i block g_{x_i}(x); row j is the gradient of g_j with respect to x_i.
inline Matrix eval_jacobian_block(const ProblemSpec& problem, const Vector& x,
                                  std::size_t i) {
  internal::require_dimension("eval_jacobian_block", x.size(), problem.dimension());
  if (i >= problem.num_agents()) {
    throw InputError("eval_jacobian_block: agent index out of range");
  }
  const auto n_i = static_cast<Eigen::Index>(problem.agent(i).dimension());
  const auto* quads = problem.quadratic_constraints();
  if (quads == nullptr) {
    Matrix out = std::get<CallbackConstraints>(problem.constraints()).jacobian_block(x, i);
    internal::require_dimension("callback Jacobian rows", out.rows(), problem.num_constraints());
    internal::require_dimension("callback Jacobian cols", out.cols(), problem.agent(i).dimension());
    return out;
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(quads->size()), n_i);
  for (std::size_t j = 0; j < quads->size(); ++j) {
    auto row = out.row(static_cast<Eigen::Index>(j));
    for (const auto& rb : problem.row_blocks(j, i)) {
      row.noalias() += (rb.values * problem.block(x, rb.col_agent)).transpose();
    }
    if (const Vector* c = problem.linear_block(j, i)) row += c->transpose();
  }
  return out;
}

// Lower bound of a quadratic objective over its box. A projected-gradient
// point y is refined into a certificate via convexity:
//   f(x) >= f(y) + grad f(y)^T (x - y) >= f(y) + min_{x in box} grad^T (x - y).
// For P = I (target objectives) y is the clamped target and the bound is exact.
inline double objective_lower_bound(const AgentSpec& agent) {
  const auto* q = agent.quadratic();
  if (q == nullptr) {
    throw ConfigError("f_lower must be supplied for non-quadratic objectives");
  }
  const Vector& lo = agent.lower();
  const Vector& hi = agent.upper();
  Vector y = agent.center();
  const double curvature =
      q->P.size() == 0 ? 0.0
                       : Eigen::SelfAdjointEigenSolver<Matrix>(q->P, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .maxCoeff();
  if (curvature > 0.0) {
    const double step = 1.0 / curvature;
    for (int it = 0; it < 20000; ++it) {
      Vector next = (y - step * agent.gradient(y)).cwiseMax(lo).cwiseMin(hi);
      const double moved = (next - y).lpNorm<Eigen::Infinity>();
      y = std::move(next);
      if (moved == 0.0) break;
    }
  }
  const Vector grad = agent.gradient(y);
  double bound = agent.value(y);
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    bound += std::min(grad[k] * (lo[k] - y[k]), grad[k] * (hi[k] - y[k]));
  }
  return bound;
}

inline DerivedConstants derive_constants(const ProblemSpec& problem) {
  DerivedConstants out;
  const std::size_t n_agents = problem.num_agents();
  out.objective_lipschitz.resize(n_agents);
  out.diameter.resize(n_agents);
  out.jacobian_lipschitz.resize(n_agents);

  for (std::size_t i = 0; i < n_agents; ++i) {
    const AgentSpec& a = problem.agent(i);
    out.diameter[i] = (a.upper() - a.lower()).sum();
    if (const auto* q = a.quadratic()) {
      // Dual norm of the 1-norm is the inf-norm: K_i = max_x ||P x + c||_inf.
      double k = 0.0;
      for (Eigen::Index r = 0; r < q->P.rows(); ++r) {
        k = std::max(k, internal::max_abs_affine(q->P.row(r).transpose(), q->c[r],
                                                 a.lower(), a.upper()));
      }
      out.objective_lipschitz[i] = k;
    } else {
      out.objective_lipschitz[i] = a.callback()->lipschitz;
    }
  }

  if (const auto* quads = problem.quadratic_constraints()) {
    const Vector lo = problem.lower();
    const Vector hi = problem.upper();
    const auto n = static_cast<Eigen::Index>(problem.dimension());
    // K_g: sup over X of the largest column sum of |dg/dx|. Each entry
    // dg_j/dx_k is affine in x; summing the per-entry maxima bounds the sup.
    double k_g = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      double column = 0.0;
      for (std::size_t j = 0; j < quads->size(); ++j) {
        column += internal::max_abs_affine(problem.dense_hessian(j).row(k).transpose(),
                                           problem.dense_linear(j)[k], lo, hi);
      }
      k_g = std::max(k_g, column);
    }
    out.constraint_lipschitz = k_g;
    // L_{g,i}: x -> g_{x_i}(x) is affine; its 1->1 norm (block flattened) is
    // the largest column sum of |Q_j[rows of agent i, k]| over all j.
    for (std::size_t i = 0; i < n_agents; ++i) {
      const auto off = static_cast<Eigen::Index>(problem.offset(i));
      const auto n_i = static_cast<Eigen::Index>(problem.agent(i).dimension());
      double l = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        double column = 0.0;
        for (std::size_t j = 0; j < quads->size(); ++j) {
          column += problem.dense_hessian(j).block(off, k, n_i, 1).cwiseAbs().sum();
        }
        l = std::max(l, column);
      }
      out.jacobian_lipschitz[i] = l;
    }
  } else {
    const auto& cb = std::get<CallbackConstraints>(problem.constraints());
    out.constraint_lipschitz = cb.lipschitz;
    out.jacobian_lipschitz = cb.jacobian_lipschitz;
  }

  if (problem.f_lower()) {
    out.f_lower = *problem.f_lower();
  } else {
    double f_lower = 0.0;
    for (const auto& a : problem.agents()) {
      if (a.quadratic() == nullptr) {
        throw ConfigError("f_lower must be supplied when an objective is not quadratic");
      }
      f_lower += objective_lower_bound(a);
    }
    out.f_lower = f_lower;
  }

  const Vector& x_bar = problem.slater_point();
  const Vector g_bar = eval_constraints(problem, x_bar);
  if (!(g_bar.array() < 0.0).all()) {
    Eigen::Index worst = 0;
    g_bar.maxCoeff(&worst);
    throw SlaterError("Slater condition violated: g_" + std::to_string(worst + 1) +
                      "(x_bar) = " + std::to_string(g_bar[worst]) + " >= 0");
  }
  out.f_slater = eval_ensemble_objective(problem, x_bar);
  out.slater_margin = (-g_bar).minCoeff();
  if (out.f_slater < out.f_lower) {
    throw ConfigError("f_lower exceeds f at the Slater point");
  }
  out.dual_radius = (out.f_slater - out.f_lower) / out.slater_margin;
  return out;
}

}  // namespace jdp

#endif  // JDP_PROBLEM_HPP_
