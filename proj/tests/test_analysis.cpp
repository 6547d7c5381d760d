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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "jdp/analysis.hpp"
#include "jdp/config.hpp"
#include "properties.hpp"
#include "support.hpp"

namespace jdp {
namespace {

const double kLn3 = std::log(3.0);

Vector stdvec(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

TEST(SaddlePoint, HandSolvedTwoAgentProblem) {
  const ProblemSpec p = testing::toy_kkt();
  const DerivedConstants c = derive_constants(p);
  const SaddlePoint sp = solve_saddle_point(p, c, 1e-10, {0.05, 2'000'000});
  ASSERT_TRUE(sp.converged);
  EXPECT_NEAR(sp.x[0], 0.5, 1e-8);
  EXPECT_NEAR(sp.x[1], 0.5, 1e-8);
  EXPECT_NEAR(sp.mu[0], 0.5, 1e-8);
}

TEST(SaddlePoint, InactiveConstraintsGiveTargetsAndZeroDual) {
  std::vector<AgentSpec> agents;
  const std::vector<Vector> targets = {Vector{{1.0, -2.0}}, Vector{{0.5, 0.0}}, Vector{{-1.0, 1.0}}};
  for (const auto& t : targets) {
    agents.push_back(AgentSpec::with_target(Vector::Constant(2, -5), Vector::Constant(2, 5), t));
  }
  // ||x_1 - x_2||^2 <= 100 is slack at the targets.
  std::vector<QuadraticConstraint> g{QuadraticConstraint::sum_squared_differences({{0, 1}}, 2, -100)};
  const ProblemSpec p(std::move(agents), std::move(g), Vector::Zero(6));
  const SaddlePoint sp = solve_saddle_point(p, derive_constants(p), 1e-10, {0.1, 100000});
  ASSERT_TRUE(sp.converged);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LT((Vector(p.block(sp.x, i)) - targets[i]).norm(), 1e-9);
  }
  EXPECT_EQ(sp.mu[0], 0.0);
}

TEST(SaddlePoint, IterationCapReturnsBestIterateUnconverged) {
  const ProblemSpec p = testing::eight_agents();
  const SaddlePoint sp = solve_saddle_point(p, derive_constants(p), 1e-10, {0.01, 50});
  EXPECT_FALSE(sp.converged);
  EXPECT_LE(sp.iterations, 50u);
  EXPECT_TRUE(std::isfinite(sp.residual));
}

class Fixture : public ::testing::Test {
 protected:
  ProblemSpec problem = testing::eight_agents();
  DerivedConstants consts = derive_constants(problem);
  SaddlePoint sp = load_fixture(testing::config_dir() / "eight_agents_saddle.json");
};

TEST_F(Fixture, StoredFixtureIsConvergedAndFeasible) {
  EXPECT_TRUE(sp.converged);
  EXPECT_LT(sp.residual, 1e-8);
  EXPECT_TRUE(problem.contains(sp.x));
  EXPECT_TRUE(DualBall(consts.dual_radius, 4).contains(sp.mu));
  EXPECT_TRUE((eval_constraints(problem, sp.x).array() <= 1e-8).all());
}

TEST_F(Fixture, RegeneratesFromTheOracle) {
  const SaddlePoint fresh = solve_saddle_point(problem, consts, 1e-10, {0.01, 2'000'000});
  ASSERT_TRUE(fresh.converged);
  EXPECT_LT((fresh.x - sp.x).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_LT((fresh.mu - sp.mu).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST_F(Fixture, AgreesWithExternalInteriorPointSolution) {
  EXPECT_LT((sp.x - stdvec(testing::kExternalXHat)).lpNorm<Eigen::Infinity>(), 1e-5);
  EXPECT_LT((sp.mu - stdvec(testing::kExternalMuHat)).lpNorm<Eigen::Infinity>(), 1e-5);
}

TEST_F(Fixture, SaddleInequalityOnRandomPoints) {
  const DualBall ball(consts.dual_radius, 4);
  const double l_hat = lagrangian(problem, sp.x, sp.mu);
  std::mt19937_64 rng(12);
  for (int n = 0; n < 1000; ++n) {
    const Vector x = testing::uniform_in_box(rng, problem.lower(), problem.upper());
    const Vector mu = project_dual(
        testing::uniform_in_box(rng, Vector::Zero(4), Vector::Constant(4, consts.dual_radius)),
        ball);
    EXPECT_LE(lagrangian(problem, sp.x, mu), l_hat + 1e-4);
    EXPECT_LE(l_hat, lagrangian(problem, x, sp.mu) + 1e-4);
  }
}

TEST_F(Fixture, BoundExamples) {
  // f_2(0) = 1/2 (4 + 4) = 4 and K_2 = 12.
  EXPECT_DOUBLE_EQ(lambda_bound(problem, consts, 1), 4.0 + 12.0 * 40.0);
  // f_6(0) = 1/2 (100 + 100) = 100 and K_6 D_6 = 800.
  EXPECT_DOUBLE_EQ(lambda_bound(problem, consts, 5), 900.0);
  EXPECT_DOUBLE_EQ(rho_bound(20.0, 40.0, 900.0), 800.0);
  EXPECT_DOUBLE_EQ(rho_bound(16.0, 40.0, 666.0), 640.0);
  EXPECT_DOUBLE_EQ(lambda_bound(problem, consts, 0), 666.0);
  EXPECT_DOUBLE_EQ(lambda_bound(7.5, 3.0, 0.0), 7.5);
  EXPECT_DOUBLE_EQ(rho_bound(0.0, 40.0, 10.0), 0.0);
}

TEST_F(Fixture, BetaForMisreportingAgent) {
  const BetaBound bb = beta_bound(problem, consts, kLn3);
  EXPECT_DOUBLE_EQ(bb.max_rho, 800.0);
  EXPECT_NEAR(bb.beta[5], 2.0 * 800.0 + kLn3 * 900.0, 1e-9);
  EXPECT_NEAR(bb.beta[5], 2588.751, 1e-3);
  EXPECT_FALSE(bb.warnings.empty());
  EXPECT_TRUE(beta_bound(problem, consts, 0.5).warnings.empty());
  // Agents 6 and 7 share K, D and f(0).
  EXPECT_DOUBLE_EQ(bb.beta[5], bb.beta[6]);
  const BetaBound tiny = beta_bound(problem, consts, 1e-12);
  for (double b : tiny.beta) EXPECT_NEAR(b, 1600.0, 1e-8);
  EXPECT_THROW(beta_bound(problem, consts, 0.0), ConfigError);
}

TEST_F(Fixture, LambdaAndRhoBoundCostsOnRandomPoints) {
  const auto v = testing::cost_bounds_hold(problem, consts, kLn3, 10000);
  EXPECT_TRUE(v.ok) << v.detail;
}

TEST_F(Fixture, ErrorCurvesAtSaddlePointAreZero) {
  Trajectory t;
  for (std::size_t k = 0; k < 3; ++k) {
    StepRecord r;
    r.k = k;
    r.x = sp.x;
    r.mu = sp.mu;
    t.steps.push_back(r);
  }
  const ErrorCurves e = error_curves(t, sp);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(e.primal[k], 0.0);
    EXPECT_EQ(e.dual[k], 0.0);
  }
}

TEST_F(Fixture, FirstErrorIsInitialCondition) {
  const Trajectory t = run(problem, consts, Schedule(0.5, 1.0 / 3, 0.01, 0.6), std::nullopt, {},
                           10, 1);
  const ErrorCurves e = error_curves(t, sp);
  EXPECT_DOUBLE_EQ(e.primal.front(), (problem.center() - sp.x).norm());
  EXPECT_DOUBLE_EQ(e.dual.front(), sp.mu.norm());
}

TEST_F(Fixture, ErrorCurvesRejectWrongFixture) {
  const Trajectory t = run(problem, consts, Schedule(0.5, 1.0 / 3, 0.01, 0.6), std::nullopt, {},
                           2, 1);
  SaddlePoint wrong;
  wrong.x = Vector::Zero(3);
  wrong.mu = Vector::Zero(4);
  EXPECT_THROW(error_curves(t, wrong), InputError);
}

TEST(MisreportGain, IdenticalCurvesGiveZero) {
  CostCurve c{{0, 100, 200}, {5.0, 3.0, 1.0}};
  const CostCurve g = misreport_gain(c, c);
  for (double v : g.values) EXPECT_EQ(v, 0.0);
  CostCurve shorter{{0, 100}, {5.0, 3.0}};
  EXPECT_THROW(misreport_gain(c, shorter), InputError);
}

TEST(MisreportGain, SeedAverageIsArithmeticMean) {
  const ProblemSpec p = testing::eight_agents();
  const DerivedConstants c = derive_constants(p);
  const NoisePlan plan = calibrate(c, kLn3, 3.0);
  const Schedule s(0.5, 1.0 / 3, 0.01, 0.6);
  std::vector<Trajectory> runs;
  for (std::uint64_t seed : {1u, 2u, 3u}) runs.push_back(run(p, c, s, plan, {}, 50, seed));
  const CostCurve avg = average_cost_curve(runs, 5);
  for (std::size_t k = 0; k < avg.values.size(); ++k) {
    const double want =
        (runs[0].steps[k].costs[5] + runs[1].steps[k].costs[5] + runs[2].steps[k].costs[5]) / 3.0;
    EXPECT_DOUBLE_EQ(avg.values[k], want);
  }
  EXPECT_THROW(average_cost_curve(std::span<const Trajectory>(), 0), InputError);
}

// Agent 1 of the toy reports the box corner -2, which makes the shared
// constraint look slack to the cloud; its own cost drops from 1/8 towards 0.
TEST(MisreportGain, LooseningReportHelpsButStaysBelowBeta) {
  const ProblemSpec p = testing::toy_kkt();
  const DerivedConstants c = derive_constants(p);
  const Schedule s(0.01, 0.45, 0.1, 0.5);
  std::vector<Behavior> lie{Behavior::constant_target(Vector::Constant(1, -2.0)),
                            Behavior::truthful()};
  const Trajectory honest = run(p, c, s, std::nullopt, {}, 20000, 1);
  const Trajectory lying = run(p, c, s, std::nullopt, lie, 20000, 1);
  const CostCurve gain = misreport_gain(honest, lying, 0);
  EXPECT_GT(gain.values.back(), 0.1);
  const double beta = beta_bound(p, c, 1.0).beta[0];
  EXPECT_DOUBLE_EQ(beta, 2.0 * 12.0 + (0.5 + 12.0));
  for (double g : gain.values) EXPECT_LE(g, beta);
}

}  // namespace
}  // namespace jdp
