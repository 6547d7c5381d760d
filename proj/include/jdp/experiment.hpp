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
// Seed ensembles and the files the CLI writes:
//   provenance.json  constants, noise scales, bounds, seeds and config hash
//   summary.csv      seed,arm,mode,horizon,final_primal_error,final_dual_error,
//                    final_max_violation,wall_seconds
//   seed_<s>/trace.csv (run)
//                    k,cost_1..cost_N,primal_error,dual_error,g_1..g_m
//   gain.csv (pair)  k,truthful_cost,misreport_cost,gain,gain_over_beta
// Errors are "nan" when no saddle-point fixture is available. g_j columns are
// evaluated at the state the cloud received.
#ifndef JDP_EXPERIMENT_HPP_
#define JDP_EXPERIMENT_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "jdp/analysis.hpp"
#include "jdp/config.hpp"
#include "jdp/engine.hpp"

namespace jdp {

// Runs body(0..count-1) on up to `threads` workers (0 = hardware concurrency).
// The first exception thrown by any task is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < count; r = next++) {
        try {
          body(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct EnsembleRun {
  std::vector<Trajectory> trajectories;  // one per seed, in seed order
  std::vector<double> wall_seconds;
};

inline EnsembleRun run_ensemble(const ProblemSpec& problem, const DerivedConstants& consts,
                                const Schedule& schedule, const std::optional<NoisePlan>& plan,
                                const std::vector<Behavior>& behaviors, std::size_t horizon,
                                const std::vector<std::uint64_t>& seeds,
                                const RunOptions& options, std::size_t threads = 0) {
  EnsembleRun out;
  out.trajectories.resize(seeds.size());
  out.wall_seconds.resize(seeds.size());
  parallel_for(
      seeds.size(),
      [&](std::size_t r) {
        const auto start = std::chrono::steady_clock::now();
        out.trajectories[r] =
            run(problem, consts, schedule, plan, behaviors, horizon, seeds[r], options);
        out.wall_seconds[r] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      },
      threads);
  return out;
}

inline EnsembleRun run_ensemble(const ExperimentConfig& cfg, const std::vector<Behavior>& behaviors,
                                std::size_t threads = 0) {
  RunOptions options = cfg.run_options;
  options.log_stride = cfg.log_stride;
  options.keep_messages = false;
  return run_ensemble(*cfg.problem, cfg.constants, cfg.schedule, cfg.plan, behaviors,
                      cfg.horizon, cfg.seeds, options, threads);
}

namespace experiment_detail {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

inline Json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace experiment_detail

inline void write_trace_csv(const std::filesystem::path& path, const ProblemSpec& problem,
                            const Trajectory& traj, const std::optional<SaddlePoint>& fixture) {
  using experiment_detail::fmt;
  auto out = experiment_detail::open_out(path);
  out << "k";
  for (std::size_t i = 0; i < problem.num_agents(); ++i) out << ",cost_" << i + 1;
  out << ",primal_error,dual_error";
  for (std::size_t j = 0; j < problem.num_constraints(); ++j) out << ",g_" << j + 1;
  out << '\n';
  for (const auto& s : traj.steps) {
    out << s.k;
    for (Eigen::Index i = 0; i < s.costs.size(); ++i) out << ',' << fmt(s.costs[i]);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << ',' << fmt(fixture ? (s.x - fixture->x).norm() : nan) << ','
        << fmt(fixture ? (s.mu - fixture->mu).norm() : nan);
    for (Eigen::Index j = 0; j < s.constraint_values.size(); ++j) {
      out << ',' << fmt(s.constraint_values[j]);
    }
    out << '\n';
  }
}

struct SummaryRow {
  std::uint64_t seed = 0;
  std::string arm;
  double final_primal_error = std::numeric_limits<double>::quiet_NaN();
  double final_dual_error = std::numeric_limits<double>::quiet_NaN();
  double final_max_violation = 0.0;  // max_j g_j(x(K)), true state
  double wall_seconds = 0.0;
};

inline std::vector<SummaryRow> summarize(const ProblemSpec& problem, const EnsembleRun& runs,
                                         const std::string& arm,
                                         const std::optional<SaddlePoint>& fixture) {
  std::vector<SummaryRow> rows;
  for (std::size_t r = 0; r < runs.trajectories.size(); ++r) {
    const Trajectory& t = runs.trajectories[r];
    SummaryRow row;
    row.seed = t.seed;
    row.arm = arm;
    if (fixture) {
      row.final_primal_error = (t.last().x - fixture->x).norm();
      row.final_dual_error = (t.last().mu - fixture->mu).norm();
    }
    row.final_max_violation = eval_constraints(problem, t.last().x).maxCoeff();
    row.wall_seconds = runs.wall_seconds[r];
    rows.push_back(row);
  }
  return rows;
}

inline void write_summary_csv(const std::filesystem::path& path, const ExperimentConfig& cfg,
                              const std::vector<SummaryRow>& rows) {
  using experiment_detail::fmt;
  auto out = experiment_detail::open_out(path);
  out << "seed,arm,mode,horizon,final_primal_error,final_dual_error,final_max_violation,"
         "wall_seconds\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.arm << ','
        << (cfg.mode == Mode::kNoisy ? "noisy" : "deterministic") << ',' << cfg.horizon << ','
        << fmt(r.final_primal_error) << ',' << fmt(r.final_dual_error) << ','
        << fmt(r.final_max_violation) << ',' << fmt(r.wall_seconds) << '\n';
  }
}

inline Json provenance(const ExperimentConfig& cfg, const std::string& command) {
  using experiment_detail::to_json;
  const ProblemSpec& problem = *cfg.problem;
  const DerivedConstants& c = cfg.constants;
  const NoisePlan plan = calibrate(c, cfg.epsilon, cfg.adjacency);
  const BetaBound beta = beta_bound(problem, c, cfg.epsilon);
  Json doc;
  doc["command"] = command;
  doc["config_path"] = cfg.source.string();
  doc["config_hash"] = experiment_detail::hex(config_hash(cfg.text));
  doc["mode"] = cfg.mode == Mode::kNoisy ? "noisy" : "deterministic";
  doc["horizon"] = cfg.horizon;
  doc["seeds"] = cfg.seeds;
  doc["log_stride"] = cfg.log_stride;
  doc["schedule"] = {{"alpha_bar", cfg.schedule.alpha_bar()},
                     {"alpha_decay", cfg.schedule.alpha_decay()},
                     {"gamma_bar", cfg.schedule.gamma_bar()},
                     {"gamma_decay", cfg.schedule.gamma_decay()}};
  doc["epsilon"] = cfg.epsilon;
  doc["adjacency"] = cfg.adjacency;
  doc["constants"] = {{"K", c.objective_lipschitz},   {"D", c.diameter},
                      {"K_g", c.constraint_lipschitz}, {"L_g", c.jacobian_lipschitz},
                      {"f_lower", c.f_lower},          {"f_slater", c.f_slater},
                      {"slater_margin", c.slater_margin}, {"dual_radius", c.dual_radius}};
  doc["noise_scales"] = {{"agents", plan.agent_scales}, {"constraint", plan.constraint_scale}};
  doc["beta"] = {{"lambda", beta.lambda}, {"rho", beta.rho}, {"max_rho", beta.max_rho},
                 {"beta", beta.beta}, {"warnings", beta.warnings}};
  Json behaviors = Json::array();
  for (const auto& b : cfg.behaviors) behaviors.push_back(to_string(b.kind()));
  doc["behaviors"] = behaviors;
  doc["misreport"] = {{"agent", cfg.misreport_agent + 1},
                      {"behavior", to_string(cfg.misreport.kind())}};
  if (cfg.run_options.initial_state) doc["initial_state"] = to_json(*cfg.run_options.initial_state);
  if (cfg.run_options.initial_dual) doc["initial_dual"] = to_json(*cfg.run_options.initial_dual);
  doc["config_text"] = cfg.text;
  return doc;
}

inline void write_provenance(const std::filesystem::path& path, const ExperimentConfig& cfg,
                             const std::string& command) {
  auto out = experiment_detail::open_out(path);
  out << provenance(cfg, command).dump(2) << '\n';
}

struct ExperimentResult {
  EnsembleRun runs;
  std::vector<SummaryRow> summary;
};

// `run`: one ensemble with the configured behaviors.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::optional<SaddlePoint>& fixture,
                                       std::size_t threads = 0) {
  ExperimentResult result;
  result.runs = run_ensemble(cfg, cfg.behaviors, threads);
  result.summary = summarize(*cfg.problem, result.runs, "configured", fixture);
  write_provenance(cfg.output_dir / "provenance.json", cfg, "run");
  for (const auto& t : result.runs.trajectories) {
    write_trace_csv(cfg.output_dir / ("seed_" + std::to_string(t.seed)) / "trace.csv",
                    *cfg.problem, t, fixture);
  }
  write_summary_csv(cfg.output_dir / "summary.csv", cfg, result.summary);
  return result;
}

struct PairResult {
  EnsembleRun truthful;
  EnsembleRun misreport;
  CostCurve gain;              // seed-averaged
  std::vector<double> ratio;   // gain / beta_i
  double beta = 0.0;
};

// Truthful ensemble vs. the same seeds with the misreporting agent switched
// to its configured behavior.
inline PairResult run_pair(const ExperimentConfig& cfg, std::size_t threads = 0) {
  PairResult out;
  const std::size_t agent = cfg.misreport_agent;
  std::vector<Behavior> truthful(cfg.problem->num_agents(), Behavior::truthful());
  std::vector<Behavior> lying = truthful;
  lying[agent] = cfg.misreport;
  out.truthful = run_ensemble(cfg, truthful, threads);
  out.misreport = run_ensemble(cfg, lying, threads);
  out.gain = misreport_gain(average_cost_curve(out.truthful.trajectories, agent),
                            average_cost_curve(out.misreport.trajectories, agent));
  out.beta = beta_bound(*cfg.problem, cfg.constants, cfg.epsilon).beta[agent];
  for (double g : out.gain.values) out.ratio.push_back(g / out.beta);
  return out;
}

inline void write_pair_outputs(const ExperimentConfig& cfg, const PairResult& pair,
                               const std::optional<SaddlePoint>& fixture) {
  using experiment_detail::fmt;
  write_provenance(cfg.output_dir / "provenance.json", cfg, "pair");
  const std::size_t agent = cfg.misreport_agent;
  const CostCurve t = average_cost_curve(pair.truthful.trajectories, agent);
  const CostCurve m = average_cost_curve(pair.misreport.trajectories, agent);
  auto out = experiment_detail::open_out(cfg.output_dir / "gain.csv");
  out << "k,truthful_cost,misreport_cost,gain,gain_over_beta\n";
  for (std::size_t k = 0; k < pair.gain.steps.size(); ++k) {
    out << pair.gain.steps[k] << ',' << fmt(t.values[k]) << ',' << fmt(m.values[k]) << ','
        << fmt(pair.gain.values[k]) << ',' << fmt(pair.ratio[k]) << '\n';
  }
  auto rows = summarize(*cfg.problem, pair.truthful, "truthful", fixture);
  auto lying = summarize(*cfg.problem, pair.misreport, to_string(cfg.misreport.kind()), fixture);
  rows.insert(rows.end(), lying.begin(), lying.end());
  write_summary_csv(cfg.output_dir / "summary.csv", cfg, rows);
}

}  // namespace jdp

#endif  // JDP_EXPERIMENT_HPP_
