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
// JSON problem and experiment files. Agent and constraint indices in files
// are 1-based; everything in the C++ API is 0-based. Unknown keys are
// rejected everywhere. See README.md for the full schema.
#ifndef JDP_CONFIG_HPP_
#define JDP_CONFIG_HPP_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jdp/analysis.hpp"
#include "jdp/engine.hpp"
#include "jdp/error.hpp"
#include "jdp/mechanism.hpp"
#include "jdp/problem.hpp"

namespace jdp {

using Json = nlohmann::json;

namespace config_detail {

inline void allow_keys(const Json& obj, std::initializer_list<const char*> keys,
                       const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
  }
}

inline const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing key \"" + key + "\"");
  return *it;
}

inline double number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

inline std::size_t count(const Json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(where + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

inline Vector vector(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = number(v[k], where);
  }
  return out;
}

inline Matrix matrix(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected rows of numbers");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < v.size(); ++r) {
    const Vector row = vector(v[r], where);
    if (static_cast<std::size_t>(row.size()) != cols) {
      throw ConfigError(where + ": ragged matrix");
    }
    out.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return out;
}

inline std::size_t agent_index(const Json& v, std::size_t n_agents, const std::string& where) {
  const std::size_t id = count(v, where);
  if (id < 1 || id > n_agents) {
    throw ConfigError(where + ": agent id " + std::to_string(id) + " out of range 1.." +
                      std::to_string(n_agents));
  }
  return id - 1;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Json parse(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace config_detail

// Problem file:
//   agents:       [{lower, upper, target} | {lower, upper, quadratic: {P, c, d}}]
//   constraints:  [{squared_differences: [[a, b], ...], blocks: [{row, col,
//                   values}], linear: [{agent, values}], constant}]
//   slater_point: per-agent arrays or one flat array
//   f_lower:      optional number
inline ProblemSpec parse_problem(const Json& doc) {
  using namespace config_detail;
  allow_keys(doc, {"agents", "constraints", "slater_point", "f_lower", "name"}, "problem");

  const Json& agents_json = require(doc, "agents", "problem");
  if (!agents_json.is_array() || agents_json.empty()) {
    throw ConfigError("problem.agents: expected a non-empty array");
  }
  std::vector<AgentSpec> agents;
  for (std::size_t i = 0; i < agents_json.size(); ++i) {
    const std::string where = "problem.agents[" + std::to_string(i + 1) + "]";
    const Json& a = agents_json[i];
    allow_keys(a, {"lower", "upper", "target", "quadratic"}, where);
    Vector lo = vector(require(a, "lower", where), where + ".lower");
    Vector hi = vector(require(a, "upper", where), where + ".upper");
    const bool has_target = a.contains("target");
    const bool has_quad = a.contains("quadratic");
    if (has_target == has_quad) {
      throw ConfigError(where + ": give exactly one of \"target\" or \"quadratic\"");
    }
    try {
      if (has_target) {
        agents.push_back(AgentSpec::with_target(std::move(lo), std::move(hi),
                                                vector(a["target"], where + ".target")));
      } else {
        const Json& q = a["quadratic"];
        allow_keys(q, {"P", "c", "d"}, where + ".quadratic");
        agents.push_back(AgentSpec::with_quadratic(
            std::move(lo), std::move(hi), matrix(require(q, "P", where), where + ".P"),
            vector(require(q, "c", where), where + ".c"),
            q.contains("d") ? number(q["d"], where + ".d") : 0.0));
      }
    } catch (const InputError& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  const std::size_t n_agents = agents.size();

  const Json& cons_json = require(doc, "constraints", "problem");
  if (!cons_json.is_array() || cons_json.empty()) {
    throw ConfigError("problem.constraints: expected a non-empty array");
  }
  std::vector<QuadraticConstraint> constraints;
  for (std::size_t j = 0; j < cons_json.size(); ++j) {
    const std::string where = "problem.constraints[" + std::to_string(j + 1) + "]";
    const Json& c = cons_json[j];
    allow_keys(c, {"squared_differences", "blocks", "linear", "constant"}, where);
    QuadraticConstraint g(c.contains("constant") ? number(c["constant"], where) : 0.0);
    if (c.contains("squared_differences")) {
      for (const Json& pair : c["squared_differences"]) {
        if (!pair.is_array() || pair.size() != 2) {
          throw ConfigError(where + ".squared_differences: expected [a, b] pairs");
        }
        const std::size_t a = agent_index(pair[0], n_agents, where);
        const std::size_t b = agent_index(pair[1], n_agents, where);
        if (agents[a].dimension() != agents[b].dimension()) {
          throw ConfigError(where + ": paired agents differ in dimension");
        }
        const Matrix eye = Matrix::Identity(static_cast<Eigen::Index>(agents[a].dimension()),
                                            static_cast<Eigen::Index>(agents[a].dimension()));
        if (a != b) {
          g.add_block(a, a, 2.0 * eye);
          g.add_block(b, b, 2.0 * eye);
          g.add_block(a, b, -2.0 * eye);
        }
      }
    }
    if (c.contains("blocks")) {
      for (const Json& b : c["blocks"]) {
        allow_keys(b, {"row", "col", "values"}, where + ".blocks");
        const std::size_t row = agent_index(require(b, "row", where), n_agents, where);
        const std::size_t col = agent_index(require(b, "col", where), n_agents, where);
        g.add_block(row, col, matrix(require(b, "values", where), where + ".values"));
      }
    }
    if (c.contains("linear")) {
      for (const Json& l : c["linear"]) {
        allow_keys(l, {"agent", "values"}, where + ".linear");
        g.add_linear(agent_index(require(l, "agent", where), n_agents, where),
                     vector(require(l, "values", where), where + ".values"));
      }
    }
    constraints.push_back(std::move(g));
  }

  const Json& slater = require(doc, "slater_point", "problem");
  Vector x_bar;
  if (slater.is_array() && !slater.empty() && slater[0].is_array()) {
    if (slater.size() != n_agents) {
      throw ConfigError("problem.slater_point: need one entry per agent");
    }
    std::size_t n = 0;
    for (const auto& a : agents) n += a.dimension();
    x_bar.resize(static_cast<Eigen::Index>(n));
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < n_agents; ++i) {
      const Vector part = vector(slater[i], "problem.slater_point");
      if (static_cast<std::size_t>(part.size()) != agents[i].dimension()) {
        throw ConfigError("problem.slater_point: wrong dimension for agent " +
                          std::to_string(i + 1));
      }
      x_bar.segment(off, part.size()) = part;
      off += part.size();
    }
  } else {
    x_bar = vector(slater, "problem.slater_point");
  }

  std::optional<double> f_lower;
  if (doc.contains("f_lower")) f_lower = number(doc["f_lower"], "problem.f_lower");
  try {
    return ProblemSpec(std::move(agents), std::move(constraints), std::move(x_bar), f_lower);
  } catch (const InputError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

inline ProblemSpec load_problem(const std::filesystem::path& path) {
  try {
    return parse_problem(config_detail::parse(config_detail::read_file(path), path.string()));
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

enum class Mode { kDeterministic, kNoisy };

struct ExperimentConfig {
  std::filesystem::path source;      // config file, empty when parsed from memory
  std::string text;                  // raw config bytes (plus problem file, if separate)
  std::shared_ptr<const ProblemSpec> problem;
  DerivedConstants constants;
  Schedule schedule{0.5, 1.0 / 3.0, 0.01, 0.6};
  Mode mode = Mode::kNoisy;
  double epsilon = 0.0;
  double adjacency = 0.0;
  std::optional<NoisePlan> plan;  // set iff noisy
  std::size_t horizon = 1;
  std::vector<std::uint64_t> seeds{1};
  std::vector<Behavior> behaviors;  // one per agent
  std::size_t misreport_agent = 0;
  Behavior misreport = Behavior::truthful();
  std::size_t log_stride = 100;
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> fixture;
  RunOptions run_options;
  OracleOptions oracle;
  double oracle_tolerance = 1e-10;
};

inline std::uint64_t config_hash(const std::string& text) { return internal::fnv1a(text); }

namespace config_detail {

inline Behavior parse_behavior(const Json& v, const AgentSpec& agent, double adjacency,
                               const std::string& where) {
  std::string kind;
  std::optional<Vector> report;
  std::optional<double> budget;
  if (v.is_string()) {
    kind = v.get<std::string>();
  } else {
    allow_keys(v, {"kind", "report", "budget"}, where);
    const Json& k = require(v, "kind", where);
    if (!k.is_string()) throw ConfigError(where + ".kind: expected a string");
    kind = k.get<std::string>();
    if (v.contains("report")) report = vector(v["report"], where + ".report");
    if (v.contains("budget")) budget = number(v["budget"], where + ".budget");
  }
  if (kind == "truthful") return Behavior::truthful();
  if (!report) {
    if (!agent.target()) {
      throw ConfigError(where + ": agent has no target; give \"report\" explicitly");
    }
    report = *agent.target();
  }
  if (static_cast<std::size_t>(report->size()) != agent.dimension()) {
    throw ConfigError(where + ".report: wrong dimension");
  }
  if (kind == "constant_target") return Behavior::constant_target(*report);
  if (kind == "adjacent_clipped") {
    return Behavior::adjacent_clipped(*report, budget.value_or(adjacency));
  }
  throw ConfigError(where + ": unknown behavior \"" + kind + "\"");
}

}  // namespace config_detail

// Experiment file; see README.md. `base_dir` resolves relative paths.
inline ExperimentConfig parse_config(const Json& doc, const std::filesystem::path& base_dir,
                                     std::string text = {}) {
  using namespace config_detail;
  allow_keys(doc,
             {"name", "problem", "schedule", "mode", "epsilon", "adjacency", "horizon",
              "seed", "seeds", "behaviors", "misreport", "log_stride", "output_dir",
              "fixture", "initial_state", "initial_dual", "oracle"},
             "config");
  ExperimentConfig cfg;
  cfg.text = std::move(text);

  const Json& prob = require(doc, "problem", "config");
  if (prob.is_string()) {
    const auto path = base_dir / prob.get<std::string>();
    const std::string body = read_file(path);
    cfg.text += body;
    cfg.problem = std::make_shared<const ProblemSpec>(parse_problem(parse(body, path.string())));
  } else {
    cfg.problem = std::make_shared<const ProblemSpec>(parse_problem(prob));
  }
  const ProblemSpec& problem = *cfg.problem;
  cfg.constants = derive_constants(problem);

  const Json& sched = require(doc, "schedule", "config");
  allow_keys(sched, {"alpha_bar", "alpha_decay", "gamma_bar", "gamma_decay"}, "config.schedule");
  cfg.schedule = Schedule(number(require(sched, "alpha_bar", "config.schedule"), "alpha_bar"),
                          number(require(sched, "alpha_decay", "config.schedule"), "alpha_decay"),
                          number(require(sched, "gamma_bar", "config.schedule"), "gamma_bar"),
                          number(require(sched, "gamma_decay", "config.schedule"), "gamma_decay"));

  const std::string mode = doc.value("mode", std::string("noisy"));
  if (mode == "noisy") {
    cfg.mode = Mode::kNoisy;
  } else if (mode == "deterministic") {
    cfg.mode = Mode::kDeterministic;
  } else {
    throw ConfigError("config.mode: expected \"noisy\" or \"deterministic\"");
  }
  cfg.epsilon = number(require(doc, "epsilon", "config"), "config.epsilon");
  cfg.adjacency = number(require(doc, "adjacency", "config"), "config.adjacency");
  NoisePlan plan = calibrate(cfg.constants, cfg.epsilon, cfg.adjacency);
  if (cfg.mode == Mode::kNoisy) cfg.plan = plan;

  cfg.horizon = count(require(doc, "horizon", "config"), "config.horizon");
  if (cfg.horizon < 1) throw ConfigError("config.horizon: must be >= 1");

  if (doc.contains("seed") && doc.contains("seeds")) {
    throw ConfigError("config: give either \"seed\" or \"seeds\"");
  }
  if (doc.contains("seed")) {
    cfg.seeds = {doc["seed"].get<std::uint64_t>()};
  } else if (doc.contains("seeds")) {
    const Json& s = doc["seeds"];
    allow_keys(s, {"first", "count"}, "config.seeds");
    const std::uint64_t first = require(s, "first", "config.seeds").get<std::uint64_t>();
    const std::size_t n = count(require(s, "count", "config.seeds"), "config.seeds.count");
    if (n < 1) throw ConfigError("config.seeds.count: must be >= 1");
    cfg.seeds.clear();
    for (std::size_t r = 0; r < n; ++r) cfg.seeds.push_back(first + r);
  }

  cfg.behaviors.assign(problem.num_agents(), Behavior::truthful());
  if (doc.contains("behaviors")) {
    const Json& b = doc["behaviors"];
    if (!b.is_object()) throw ConfigError("config.behaviors: expected {\"<agent id>\": behavior}");
    for (const auto& item : b.items()) {
      std::size_t id = 0;
      try {
        id = std::stoul(item.key());
      } catch (const std::exception&) {
        throw ConfigError("config.behaviors: bad agent id \"" + item.key() + "\"");
      }
      if (id < 1 || id > problem.num_agents()) {
        throw ConfigError("config.behaviors: agent id out of range");
      }
      cfg.behaviors[id - 1] = parse_behavior(item.value(), problem.agent(id - 1), cfg.adjacency,
                                             "config.behaviors." + item.key());
    }
  }
  if (doc.contains("misreport")) {
    const Json& m = doc["misreport"];
    allow_keys(m, {"agent", "behavior"}, "config.misreport");
    cfg.misreport_agent = agent_index(require(m, "agent", "config.misreport"),
                                      problem.num_agents(), "config.misreport.agent");
    cfg.misreport = parse_behavior(require(m, "behavior", "config.misreport"),
                                   problem.agent(cfg.misreport_agent), cfg.adjacency,
                                   "config.misreport.behavior");
  }

  if (doc.contains("log_stride")) {
    cfg.log_stride = count(doc["log_stride"], "config.log_stride");
    if (cfg.log_stride < 1) throw ConfigError("config.log_stride: must be >= 1");
  }
  if (doc.contains("output_dir")) {
    cfg.output_dir = base_dir / doc["output_dir"].get<std::string>();
  }
  if (doc.contains("fixture")) cfg.fixture = base_dir / doc["fixture"].get<std::string>();
  if (doc.contains("initial_state")) {
    cfg.run_options.initial_state = vector(doc["initial_state"], "config.initial_state");
    if (!problem.contains(*cfg.run_options.initial_state)) {
      throw ConfigError("config.initial_state: must lie in X");
    }
  }
  if (doc.contains("initial_dual")) {
    cfg.run_options.initial_dual = vector(doc["initial_dual"], "config.initial_dual");
  }
  if (doc.contains("oracle")) {
    const Json& o = doc["oracle"];
    allow_keys(o, {"step", "tolerance", "max_iterations"}, "config.oracle");
    if (o.contains("step")) cfg.oracle.step = number(o["step"], "config.oracle.step");
    if (o.contains("tolerance")) {
      cfg.oracle_tolerance = number(o["tolerance"], "config.oracle.tolerance");
    }
    if (o.contains("max_iterations")) {
      cfg.oracle.max_iterations = count(o["max_iterations"], "config.oracle.max_iterations");
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = config_detail::read_file(path);
  try {
    ExperimentConfig cfg = parse_config(config_detail::parse(text, path.string()),
                                        path.parent_path(), text);
    cfg.source = path;
    return cfg;
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// Saddle-point fixture: {"x_hat": [...], "mu_hat": [...], "residual", "iterations",
// "converged", "problem_hash"}.
inline Json fixture_to_json(const SaddlePoint& sp, std::uint64_t problem_hash) {
  Json doc;
  doc["x_hat"] = std::vector<double>(sp.x.data(), sp.x.data() + sp.x.size());
  doc["mu_hat"] = std::vector<double>(sp.mu.data(), sp.mu.data() + sp.mu.size());
  doc["residual"] = sp.residual;
  doc["iterations"] = sp.iterations;
  doc["converged"] = sp.converged;
  doc["problem_hash"] = problem_hash;
  return doc;
}

inline SaddlePoint load_fixture(const std::filesystem::path& path) {
  using namespace config_detail;
  const Json doc = parse(read_file(path), path.string());
  allow_keys(doc, {"x_hat", "mu_hat", "residual", "iterations", "converged", "problem_hash"},
             "fixture");
  SaddlePoint sp;
  sp.x = vector(require(doc, "x_hat", "fixture"), "fixture.x_hat");
  sp.mu = vector(require(doc, "mu_hat", "fixture"), "fixture.mu_hat");
  sp.residual = doc.value("residual", 0.0);
  sp.iterations = doc.value("iterations", std::size_t{0});
  sp.converged = doc.value("converged", false);
  return sp;
}

}  // namespace jdp

#endif  // JDP_CONFIG_HPP_
