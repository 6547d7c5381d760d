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
// jdpopt: command-line driver.
//
//   jdpopt calibrate --config FILE [--epsilon E] [--adjacency B]
//   jdpopt oracle    --config FILE [--out FIXTURE] [--tolerance T] [--step S]
//   jdpopt run       --config FILE [--seed S] [--seeds N] [--horizon K] ...
//   jdpopt pair      --config FILE [--agent I] [--behavior KIND] ...
//
// Exit codes: 0 success, 2 configuration error, 3 numeric abort.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "jdp/analysis.hpp"
#include "jdp/config.hpp"
#include "jdp/experiment.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> horizon;
  std::optional<std::string> out;
  std::optional<std::size_t> log_stride;
  std::optional<std::string> mode;
  std::optional<std::string> fixture;
  std::size_t threads = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config,-c", f.config, "experiment config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "master seed (first seed of an ensemble)");
  cmd->add_option("--seeds", f.seeds, "ensemble size");
  cmd->add_option("--horizon,-K", f.horizon, "number of iterations");
  cmd->add_option("--out,-o", f.out, "output directory");
  cmd->add_option("--log-stride", f.log_stride, "log every n-th step (1 = full)");
  cmd->add_option("--mode", f.mode, "noisy | deterministic");
  cmd->add_option("--fixture", f.fixture, "saddle-point fixture for error columns");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

jdp::ExperimentConfig load_with_overrides(const RunFlags& f) {
  jdp::ExperimentConfig cfg = jdp::load_config(f.config);
  if (f.horizon) {
    if (*f.horizon < 1) throw jdp::ConfigError("--horizon must be >= 1");
    cfg.horizon = *f.horizon;
  }
  if (f.seed || f.seeds) {
    const std::uint64_t first = f.seed.value_or(cfg.seeds.front());
    const std::size_t n = f.seeds.value_or(f.seed ? 1 : cfg.seeds.size());
    if (n < 1) throw jdp::ConfigError("--seeds must be >= 1");
    cfg.seeds.clear();
    for (std::size_t r = 0; r < n; ++r) cfg.seeds.push_back(first + r);
  }
  if (f.out) cfg.output_dir = *f.out;
  if (f.log_stride) {
    if (*f.log_stride < 1) throw jdp::ConfigError("--log-stride must be >= 1");
    cfg.log_stride = *f.log_stride;
  }
  if (f.mode) {
    if (*f.mode == "noisy") {
      cfg.mode = jdp::Mode::kNoisy;
      cfg.plan = jdp::calibrate(cfg.constants, cfg.epsilon, cfg.adjacency);
    } else if (*f.mode == "deterministic") {
      cfg.mode = jdp::Mode::kDeterministic;
      cfg.plan.reset();
    } else {
      throw jdp::ConfigError("--mode must be noisy or deterministic");
    }
  }
  if (f.fixture) cfg.fixture = *f.fixture;
  return cfg;
}

std::optional<jdp::SaddlePoint> maybe_fixture(const jdp::ExperimentConfig& cfg) {
  if (!cfg.fixture) return std::nullopt;
  if (!std::filesystem::exists(*cfg.fixture)) {
    std::cerr << "warning: fixture " << cfg.fixture->string()
              << " not found; error columns will be nan (run `jdpopt oracle` first)\n";
    return std::nullopt;
  }
  jdp::SaddlePoint sp = jdp::load_fixture(*cfg.fixture);
  if (static_cast<std::size_t>(sp.x.size()) != cfg.problem->dimension() ||
      static_cast<std::size_t>(sp.mu.size()) != cfg.problem->num_constraints()) {
    throw jdp::ConfigError("fixture does not match the problem dimensions");
  }
  return sp;
}

void echo_constants(const jdp::ExperimentConfig& cfg, std::ostream& os) {
  const auto& c = cfg.constants;
  const jdp::NoisePlan plan = jdp::calibrate(c, cfg.epsilon, cfg.adjacency);
  const jdp::BetaBound beta = jdp::beta_bound(*cfg.problem, c, cfg.epsilon);
  char line[256];
  std::snprintf(line, sizeof line, "epsilon = %.6f  B = %g  K_g = %g  f_lower = %g  M = %.6f\n",
                cfg.epsilon, cfg.adjacency, c.constraint_lipschitz, c.f_lower, c.dual_radius);
  os << line;
  os << "agent        K_i        D_i     L_g,i  sensitivity      b_i     lambda_i      beta_i\n";
  for (std::size_t i = 0; i < cfg.problem->num_agents(); ++i) {
    std::snprintf(line, sizeof line, "%5zu %10.4g %10.4g %9.4g %12.4g %8.2f %12.4f %11.4f\n",
                  i + 1, c.objective_lipschitz[i], c.diameter[i], c.jacobian_lipschitz[i],
                  jdp::gradient_sensitivity(c, i, cfg.adjacency), plan.agent_scales[i],
                  beta.lambda[i], beta.beta[i]);
    os << line;
  }
  std::snprintf(line, sizeof line, "constraint noise: sensitivity %.4g  b_g = %.2f\n",
                jdp::constraint_sensitivity(c, cfg.adjacency), plan.constraint_scale);
  os << line;
  for (const auto& w : beta.warnings) os << "warning: " << w << '\n';
}

void print_summary(const std::vector<jdp::SummaryRow>& rows) {
  double primal = 0.0, dual = 0.0;
  for (const auto& r : rows) {
    primal += r.final_primal_error;
    dual += r.final_dual_error;
  }
  const double n = static_cast<double>(rows.size());
  std::printf("runs: %zu  mean final primal error: %.6g  mean final dual error: %.6g\n",
              rows.size(), primal / n, dual / n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cloud-mediated joint-DP primal-dual optimization"};
  app.require_subcommand(1);

  std::string calib_config;
  std::optional<double> calib_epsilon, calib_adjacency;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "print derived constants and noise plan");
  calibrate_cmd->add_option("--config,-c", calib_config, "experiment config")->required();
  calibrate_cmd->add_option("--epsilon", calib_epsilon, "override epsilon");
  calibrate_cmd->add_option("--adjacency", calib_adjacency, "override B");

  std::string oracle_config;
  std::optional<std::string> oracle_out;
  std::optional<double> oracle_tol, oracle_step;
  auto* oracle_cmd = app.add_subcommand("oracle", "compute and store the saddle-point fixture");
  oracle_cmd->add_option("--config,-c", oracle_config, "experiment config")->required();
  oracle_cmd->add_option("--out,-o", oracle_out, "fixture path (default: config's fixture)");
  oracle_cmd->add_option("--tolerance", oracle_tol, "fixed-point residual tolerance");
  oracle_cmd->add_option("--step", oracle_step, "constant oracle step size");

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "run a seed ensemble with the configured behaviors");
  add_run_flags(run_cmd, run_flags);

  RunFlags pair_flags;
  std::optional<std::size_t> pair_agent;
  std::optional<std::string> pair_behavior;
  auto* pair_cmd = app.add_subcommand("pair", "truthful vs. misreporting ensembles");
  add_run_flags(pair_cmd, pair_flags);
  pair_cmd->add_option("--agent", pair_agent, "misreporting agent (1-based)");
  pair_cmd->add_option("--behavior", pair_behavior, "constant_target | adjacent_clipped");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*calibrate_cmd) {
      jdp::ExperimentConfig cfg = jdp::load_config(calib_config);
      if (calib_epsilon) cfg.epsilon = *calib_epsilon;
      if (calib_adjacency) cfg.adjacency = *calib_adjacency;
      echo_constants(cfg, std::cout);
      return 0;
    }

    if (*oracle_cmd) {
      jdp::ExperimentConfig cfg = jdp::load_config(oracle_config);
      if (oracle_tol) cfg.oracle_tolerance = *oracle_tol;
      if (oracle_step) cfg.oracle.step = *oracle_step;
      std::filesystem::path out;
      if (oracle_out) {
        out = *oracle_out;
      } else if (cfg.fixture) {
        out = *cfg.fixture;
      } else {
        throw jdp::ConfigError("no fixture path: pass --out or set \"fixture\"");
      }
      const jdp::SaddlePoint sp =
          jdp::solve_saddle_point(*cfg.problem, cfg.constants, cfg.oracle_tolerance, cfg.oracle);
      std::filesystem::create_directories(std::filesystem::absolute(out).parent_path());
      std::ofstream file(out);
      if (!file) throw jdp::ConfigError("cannot write " + out.string());
      file << jdp::fixture_to_json(sp, jdp::config_hash(cfg.text)).dump(2) << '\n';
      std::printf("x_hat:");
      for (Eigen::Index k = 0; k < sp.x.size(); ++k) std::printf(" %.10f", sp.x[k]);
      std::printf("\nmu_hat:");
      for (Eigen::Index k = 0; k < sp.mu.size(); ++k) std::printf(" %.10f", sp.mu[k]);
      std::printf("\nresidual %.3e after %zu iterations -> %s\n", sp.residual, sp.iterations,
                  out.string().c_str());
      if (!sp.converged) {
        std::cerr << "oracle did not reach the tolerance; fixture flagged non-converged\n";
        return kNumericExit;
      }
      return 0;
    }

    if (*run_cmd) {
      const jdp::ExperimentConfig cfg = load_with_overrides(run_flags);
      echo_constants(cfg, std::cerr);
      const auto fixture = maybe_fixture(cfg);
      const auto result = jdp::run_experiment(cfg, fixture, run_flags.threads);
      print_summary(result.summary);
      std::printf("wrote %s\n", cfg.output_dir.string().c_str());
      return 0;
    }

    if (*pair_cmd) {
      jdp::ExperimentConfig cfg = load_with_overrides(pair_flags);
      if (pair_agent) {
        if (*pair_agent < 1 || *pair_agent > cfg.problem->num_agents()) {
          throw jdp::ConfigError("--agent out of range");
        }
        cfg.misreport_agent = *pair_agent - 1;
      }
      if (pair_behavior || pair_agent) {
        const auto& agent = cfg.problem->agent(cfg.misreport_agent);
        const std::string kind = pair_behavior.value_or(to_string(cfg.misreport.kind()));
        if (!agent.target()) throw jdp::ConfigError("misreporting agent has no target");
        if (kind == "constant_target") {
          cfg.misreport = jdp::Behavior::constant_target(*agent.target());
        } else if (kind == "adjacent_clipped") {
          cfg.misreport = jdp::Behavior::adjacent_clipped(*agent.target(), cfg.adjacency);
        } else {
          throw jdp::ConfigError("--behavior must be constant_target or adjacent_clipped");
        }
      }
      echo_constants(cfg, std::cerr);
      const auto fixture = maybe_fixture(cfg);
      const jdp::PairResult pair = jdp::run_pair(cfg, pair_flags.threads);
      jdp::write_pair_outputs(cfg, pair, fixture);
      double worst = -std::numeric_limits<double>::infinity();
      for (double r : pair.ratio) worst = std::max(worst, r);
      std::printf("agent %zu (%s): beta = %.4f, max seed-averaged gain/beta = %.6f\n",
                  cfg.misreport_agent + 1, to_string(cfg.misreport.kind()), pair.beta, worst);
      std::printf("wrote %s\n", cfg.output_dir.string().c_str());
      return 0;
    }
  } catch (const jdp::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericExit;
  } catch (const jdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const jdp::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigExit;
  }
  return 0;
}
