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
// Laplace mechanism for the cloud's outputs: sensitivities of the Jacobian
// blocks g_{x_i} and of g under B-bounded trajectory adjacency, the resulting
// noise scales, and a reproducible Laplace sampler.
#ifndef JDP_MECHANISM_HPP_
#define JDP_MECHANISM_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "jdp/error.hpp"
#include "jdp/problem.hpp"

namespace jdp {

// Delta_1 g_{x_i} <= L_{g,i} B.
inline double gradient_sensitivity(const DerivedConstants& consts, std::size_t i,
                                   double adjacency) {
  if (!(adjacency > 0.0)) throw ConfigError("adjacency bound B must be > 0");
  if (i >= consts.jacobian_lipschitz.size()) {
    throw InputError("gradient_sensitivity: agent index out of range");
  }
  return consts.jacobian_lipschitz[i] * adjacency;
}

// Delta_1 g <= K_g B.
inline double constraint_sensitivity(const DerivedConstants& consts, double adjacency) {
  if (!(adjacency > 0.0)) throw ConfigError("adjacency bound B must be > 0");
  return consts.constraint_lipschitz * adjacency;
}

struct NoisePlan {
  double epsilon = 0.0;
  double adjacency = 0.0;
  std::vector<double> agent_scales;  // b_i, noise on g_{x_i}
  double constraint_scale = 0.0;     // b_g, noise on g

  // b_i >= L_{g,i} B / eps and b_g >= K_g B / eps, up to rounding.
  bool satisfies(const DerivedConstants& consts) const {
    constexpr double kRel = 1e-12;
    if (agent_scales.size() != consts.jacobian_lipschitz.size()) return false;
    for (std::size_t i = 0; i < agent_scales.size(); ++i) {
      const double need = consts.jacobian_lipschitz[i] * adjacency / epsilon;
      if (agent_scales[i] < need * (1.0 - kRel)) return false;
    }
    const double need_g = consts.constraint_lipschitz * adjacency / epsilon;
    return constraint_scale >= need_g * (1.0 - kRel);
  }
};

// Tight calibration b = Delta / eps.
inline NoisePlan calibrate(const DerivedConstants& consts, double epsilon,
                           double adjacency) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("privacy parameter epsilon must be > 0");
  }
  NoisePlan plan;
  plan.epsilon = epsilon;
  plan.adjacency = adjacency;
  plan.agent_scales.reserve(consts.jacobian_lipschitz.size());
  for (std::size_t i = 0; i < consts.jacobian_lipschitz.size(); ++i) {
    plan.agent_scales.push_back(gradient_sensitivity(consts, i, adjacency) / epsilon);
  }
  plan.constraint_scale = constraint_sensitivity(consts, adjacency) / epsilon;
  return plan;
}

// Inverse CDF of Lap(scale) at u in (-1/2, 1/2):
//   x = -scale * sgn(u) * ln(1 - 2|u|).
// Sign convention: x has the sign of u, so u = 0.25 maps to +scale * ln 2.
inline double laplace_from_uniform(double u, double scale) {
  if (u == 0.0) return 0.0;
  const double sign = u > 0.0 ? 1.0 : -1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(u));
}

namespace internal {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace internal

// One named source of randomness. The engine seed is
// splitmix64(master ^ splitmix64(fnv1a(name))); draws come from
// std::mt19937_64, whose output sequence is fixed by the standard. Uniforms
// use the top 53 bits: u = ((bits >> 11) + 0.5) * 2^-53 - 0.5, which lies
// strictly inside (-1/2, 1/2).
class Substream {
 public:
  Substream(std::uint64_t master_seed, std::string_view name)
      : engine_(internal::splitmix64(master_seed ^
                                     internal::splitmix64(internal::fnv1a(name)))) {}

  double uniform_centered() {
    ++draws_;
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53 - 0.5;
  }

  double laplace(double scale) { return laplace_from_uniform(uniform_centered(), scale); }

  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

inline std::string agent_substream(std::size_t i) {
  return "agent/" + std::to_string(i + 1);
}
inline constexpr std::string_view kConstraintSubstream = "constraint";

// Owns the substreams of one run. Not thread-safe; give each run its own.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t master_seed) : seed_(master_seed) {}

  std::uint64_t seed() const { return seed_; }

  Substream& substream(std::string_view name) {
    auto it = streams_.find(name);
    if (it == streams_.end()) {
      it = streams_.emplace(std::string(name), Substream(seed_, name)).first;
    }
    return it->second;
  }

 private:
  std::uint64_t seed_;
  std::map<std::string, Substream, std::less<>> streams_;
};

// rows x cols i.i.d. Lap(scale) entries drawn from `source` in row-major order.
inline Matrix sample_laplace(NoiseStream& stream, std::string_view source, double scale,
                             Eigen::Index rows, Eigen::Index cols = 1) {
  if (!(scale >= 0.0)) throw ConfigError("Laplace scale must be >= 0");
  Substream& sub = stream.substream(source);
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = sub.laplace(scale);
  }
  return out;
}

// Adj_B^i on ensemble signals u, v (one vector per step): true iff every
// other agent's signal is identical and sum_k ||u_i(k) - v_i(k)||_1 <= B.
inline bool check_adjacency(const ProblemSpec& problem, const std::vector<Vector>& u,
                            const std::vector<Vector>& v, std::size_t i,
                            double adjacency) {
  if (u.size() != v.size()) throw InputError("check_adjacency: horizon mismatch");
  if (i >= problem.num_agents()) throw InputError("check_adjacency: bad agent index");
  double deviation = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    internal::require_dimension("check_adjacency", u[k].size(), problem.dimension());
    internal::require_dimension("check_adjacency", v[k].size(), problem.dimension());
    for (std::size_t j = 0; j < problem.num_agents(); ++j) {
      if (j == i) continue;
      if (problem.block(u[k], j) != problem.block(v[k], j)) return false;
    }
    deviation += (problem.block(u[k], i) - problem.block(v[k], i)).lpNorm<1>();
  }
  return deviation <= adjacency;
}

}  // namespace jdp

#endif  // JDP_MECHANISM_HPP_
