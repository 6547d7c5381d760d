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

#include "jdp/mechanism.hpp"
#include "properties.hpp"
#include "support.hpp"

namespace jdp {
namespace {

const double kLn3 = std::log(3.0);

// Laplace CDF, written from the density 1/(2b) exp(-|x|/b).
double laplace_cdf(double x, double b) {
  return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
}

class EightAgents : public ::testing::Test {
 protected:
  ProblemSpec problem = testing::eight_agents();
  DerivedConstants consts = derive_constants(problem);
};

TEST_F(EightAgents, GradientSensitivityExamples) {
  EXPECT_DOUBLE_EQ(gradient_sensitivity(consts, 0, 3.0), 12.0);
  EXPECT_DOUBLE_EQ(gradient_sensitivity(consts, 1, 3.0), 6.0);
  EXPECT_DOUBLE_EQ(gradient_sensitivity(consts, 4, 3.0), 18.0);
  EXPECT_NEAR(12.0 / kLn3, 10.92, 0.005);
  EXPECT_NEAR(6.0 / kLn3, 5.46, 0.005);
  EXPECT_NEAR(18.0 / kLn3, 16.38, 0.005);
}

TEST_F(EightAgents, ConstraintSensitivityExamples) {
  EXPECT_DOUBLE_EQ(constraint_sensitivity(consts, 3.0), 360.0);
  EXPECT_NEAR(360.0 / kLn3, 327.69, 0.005);
  EXPECT_DOUBLE_EQ(constraint_sensitivity(consts, 0.5), 60.0);
  DerivedConstants unit;
  unit.constraint_lipschitz = 1.0;
  EXPECT_DOUBLE_EQ(constraint_sensitivity(unit, 1.0), 1.0);
}

TEST_F(EightAgents, NonPositiveAdjacencyIsRejected) {
  EXPECT_THROW(gradient_sensitivity(consts, 0, 0.0), ConfigError);
  EXPECT_THROW(constraint_sensitivity(consts, -1.0), ConfigError);
  EXPECT_THROW(calibrate(consts, kLn3, 0.0), ConfigError);
  EXPECT_THROW(calibrate(consts, 0.0, 3.0), ConfigError);
  EXPECT_THROW(calibrate(consts, -1.0, 3.0), ConfigError);
}

// Reference scale column, except agent 3: it enters two constraints, so its
// Jacobian-block constant is 4 and its scale 12 / ln 3.
TEST_F(EightAgents, CalibrationReproducesScaleColumn) {
  const NoisePlan plan = calibrate(consts, kLn3, 3.0);
  const std::vector<double> reference = {10.92, 5.46, 5.46, 10.92, 16.38, 10.92, 16.38, 5.46};
  for (std::size_t i = 0; i < 8; ++i) {
    const double derived = testing::pair_jacobian_lipschitz(i) * 3.0 / kLn3;
    EXPECT_DOUBLE_EQ(plan.agent_scales[i], derived) << "agent " << i + 1;
    if (i != 2) {
      EXPECT_NEAR(plan.agent_scales[i], reference[i], 0.005) << "agent " << i + 1;
    }
  }
  EXPECT_NEAR(plan.agent_scales[2], 10.92, 0.005);
  EXPECT_NEAR(plan.constraint_scale, 327.69, 0.005);
  EXPECT_TRUE(plan.satisfies(consts));
}

TEST_F(EightAgents, ScalesDecreaseInEpsilonAndIncreaseInAdjacency) {
  const NoisePlan base = calibrate(consts, 0.5, 3.0);
  const NoisePlan doubled = calibrate(consts, 1.0, 3.0);
  const NoisePlan wider = calibrate(consts, 0.5, 4.0);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(doubled.agent_scales[i], base.agent_scales[i] / 2.0);
    EXPECT_GT(wider.agent_scales[i], base.agent_scales[i]);
  }
  EXPECT_DOUBLE_EQ(doubled.constraint_scale, base.constraint_scale / 2.0);
  EXPECT_GT(wider.constraint_scale, base.constraint_scale);
}

TEST_F(EightAgents, UndersizedPlanIsDetected) {
  NoisePlan plan = calibrate(consts, kLn3, 3.0);
  plan.agent_scales[4] *= 0.99;
  EXPECT_FALSE(plan.satisfies(consts));
  plan = calibrate(consts, kLn3, 3.0);
  plan.constraint_scale *= 0.99;
  EXPECT_FALSE(plan.satisfies(consts));
}

TEST_F(EightAgents, EmpiricalSensitivityWithinCalibration) {
  const auto v = testing::sensitivity_within_calibration(problem, consts, 3.0, 1000);
  EXPECT_TRUE(v.ok) << v.detail;
}

TEST(Laplace, InverseCdfExamples) {
  EXPECT_EQ(laplace_from_uniform(0.0, 1.0), 0.0);
  EXPECT_NEAR(laplace_from_uniform(0.25, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(laplace_from_uniform(-0.25, 1.0), -std::log(2.0), 1e-15);
  EXPECT_NEAR(laplace_from_uniform(0.25, 3.0), 3.0 * std::log(2.0), 1e-14);
}

TEST(Laplace, InverseCdfInvertsTheCdf) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.4999, 0.4999);
  for (int n = 0; n < 10000; ++n) {
    const double v = u(rng);
    EXPECT_NEAR(laplace_cdf(laplace_from_uniform(v, 2.0), 2.0), v + 0.5, 1e-12);
  }
}

TEST(Laplace, MomentsAtScaleTwo) {
  const auto v = testing::laplace_moments(1'000'000, 2.0, 0.02, 7.8, 8.2);
  EXPECT_TRUE(v.ok) << v.detail;
}

TEST(Laplace, ZeroScaleGivesZeros) {
  NoiseStream s(1);
  EXPECT_TRUE(sample_laplace(s, "constraint", 0.0, 3).isZero());
  EXPECT_THROW(sample_laplace(s, "constraint", -1.0, 3), ConfigError);
}

TEST(Hashing, KnownValues) {
  EXPECT_EQ(internal::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(internal::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(internal::splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(NoiseStream, UniformsStayInsideOpenInterval) {
  Substream s(9, "u");
  for (int n = 0; n < 100000; ++n) {
    const double u = s.uniform_centered();
    ASSERT_GT(u, -0.5);
    ASSERT_LT(u, 0.5);
  }
  EXPECT_EQ(s.draws(), 100000u);
}

TEST(NoiseStream, EqualSeedsGiveBitIdenticalArrays) {
  NoiseStream a(42), b(42);
  for (int round = 0; round < 5; ++round) {
    const Matrix x = sample_laplace(a, agent_substream(3), 10.92, 4, 2);
    const Matrix y = sample_laplace(b, agent_substream(3), 10.92, 4, 2);
    EXPECT_EQ(std::memcmp(x.data(), y.data(), sizeof(double) * 8), 0);
  }
}

TEST(NoiseStream, SubstreamsDoNotInterfere) {
  NoiseStream mixed(42), alone(42);
  // Drawing from "constraint" in between must not change agent 1's sequence.
  const Matrix first = sample_laplace(mixed, agent_substream(0), 1.0, 4, 2);
  (void)sample_laplace(mixed, kConstraintSubstream, 1.0, 100);
  const Matrix second = sample_laplace(mixed, agent_substream(0), 1.0, 4, 2);
  Matrix both(8, 2);
  both << sample_laplace(alone, agent_substream(0), 1.0, 4, 2),
      sample_laplace(alone, agent_substream(0), 1.0, 4, 2);
  EXPECT_EQ(both.topRows(4), first);
  EXPECT_EQ(both.bottomRows(4), second);
}

TEST(NoiseStream, DifferentSeedsAndNamesDiffer) {
  NoiseStream a(1), b(2);
  EXPECT_NE(sample_laplace(a, "x", 1.0, 8), sample_laplace(b, "x", 1.0, 8));
  NoiseStream c(1);
  EXPECT_NE(sample_laplace(c, "x", 1.0, 8), sample_laplace(c, "y", 1.0, 8));
  EXPECT_EQ(agent_substream(0), "agent/1");
  EXPECT_EQ(kConstraintSubstream, "constraint");
}

TEST(NoiseStream, RowMajorFillFromNamedSubstream) {
  NoiseStream s(77);
  const Matrix m = sample_laplace(s, "agent/2", 2.0, 2, 3);
  Substream ref(77, "agent/2");
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) EXPECT_EQ(m(r, c), ref.laplace(2.0));
  }
}

TEST(NoiseStream, SubstreamCorrelationIsSmall) {
  Substream a(5, "agent/1"), b(5, "agent/2");
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (int n = 0; n < 200000; ++n) {
    const double x = a.uniform_centered(), y = b.uniform_centered();
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  // Sample correlation of independent streams: sd ~ 1/sqrt(n) = 0.0022.
  EXPECT_LT(std::abs(sab / std::sqrt(saa * sbb)), 0.015);
}

class Adjacency : public ::testing::Test {
 protected:
  ProblemSpec problem = testing::eight_agents();
  std::vector<Vector> base = std::vector<Vector>(3, Vector::Zero(16));
};

TEST_F(Adjacency, IdenticalTrajectoriesAreAdjacent) {
  EXPECT_TRUE(check_adjacency(problem, base, base, 5, 3.0));
}

TEST_F(Adjacency, SingleStepJustOverBudgetIsNot) {
  auto other = base;
  other[1][10] = 3.001;
  EXPECT_FALSE(check_adjacency(problem, base, other, 5, 3.0));
}

TEST_F(Adjacency, TwoStepsSummingToBudgetAre) {
  auto other = base;
  other[0][10] = 1.0;
  other[2][11] = -2.0;
  EXPECT_TRUE(check_adjacency(problem, base, other, 5, 3.0));
}

TEST_F(Adjacency, AnyChangeInAnotherAgentBreaksIt) {
  auto other = base;
  other[0][0] = 1e-9;
  EXPECT_FALSE(check_adjacency(problem, base, other, 5, 3.0));
}

TEST_F(Adjacency, HorizonMismatchIsAnInputError) {
  auto other = base;
  other.pop_back();
  EXPECT_THROW(check_adjacency(problem, base, other, 5, 3.0), InputError);
}

}  // namespace
}  // namespace jdp
