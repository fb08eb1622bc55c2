#include "codelab/train/evaluate.hpp"

#include "codelab/errors.hpp"
#include "codelab/learner/web_agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace codelab::train {

double EvalTable::mean_rate() const {
  if (cells.empty()) return 0.0;
  double s = 0.0;
  for (const auto& c : cells) s += c.rate();
  return s / static_cast<double>(cells.size());
}

const EvalCell* EvalTable::find(const std::string& env, int level) const {
  for (const auto& c : cells)
    if (c.env == env && c.level == level) return &c;
  return nullptr;
}

nlohmann::json EvalTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : cells)
    rows.push_back({{"env", c.env}, {"level", c.level}, {"episodes", c.episodes}, {"successes", c.successes},
                    {"success_rate", c.rate()}});
  return {{"results", rows}, {"mean_success_rate", mean_rate()}};
}

std::string EvalTable::to_text() const {
  std::vector<std::string> envs;
  std::vector<int> levels;
  for (const auto& c : cells) {
    if (std::find(envs.begin(), envs.end(), c.env) == envs.end()) envs.push_back(c.env);
    if (std::find(levels.begin(), levels.end(), c.level) == levels.end()) levels.push_back(c.level);
  }
  std::sort(levels.begin(), levels.end());
  std::string out = "env";
  out.resize(12, ' ');
  for (int l : levels) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%8s", ("L" + std::to_string(l)).c_str());
    out += buf;
  }
  out += '\n';
  for (const auto& e : envs) {
    std::string row = e;
    row.resize(std::max<std::size_t>(12, e.size() + 1), ' ');
    for (int l : levels) {
      char buf[16];
      if (const EvalCell* c = find(e, l))
        std::snprintf(buf, sizeof buf, "%7.1f%%", 100.0 * c->rate());
      else
        std::snprintf(buf, sizeof buf, "%8s", "-");
      row += buf;
    }
    out += row + '\n';
  }
  return out;
}

namespace {

std::uint64_t name_id(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return h;
}

}  // namespace

EvalTable evaluate_web(const WebPolicy& policy, const web::SuiteDesigns& suite, std::size_t episodes,
                       std::uint64_t seed, const WebEvalOptions& options) {
  EvalTable t;
  const RandomStream base(seed);
  const auto& envs = options.envs.empty() ? web::suite_envs() : options.envs;
  for (const auto& env : envs)
    for (int level : options.levels) {
      auto lit = suite.find(level);
      if (lit == suite.end() || !lit->second.count(env))
        throw ConfigError("suite has no " + env + " level " + std::to_string(level));
      EvalCell cell{env, level, episodes, 0};
      RandomStream cell_rng = base.split(name_id(env) ^ static_cast<std::uint64_t>(level));
      for (std::size_t ep = 0; ep < episodes; ++ep) {
        RandomStream values = cell_rng.split(2 * ep), acting = cell_rng.split(2 * ep + 1);
        const auto site = web::render(lit->second.at(env), values, options.render);
        cell.successes += policy(site, acting);
      }
      t.cells.push_back(cell);
    }
  return t;
}

EvalTable evaluate_grid(const GridPolicy& policy, std::size_t episodes, std::uint64_t seed,
                        const grid::GridConfig& config) {
  EvalTable t;
  const RandomStream base(seed);
  for (const auto& [name, design] : grid::grid_testbed()) {
    EvalCell cell{name, 1, episodes, 0};
    RandomStream cell_rng = base.split(name_id(name));
    for (std::size_t ep = 0; ep < episodes; ++ep) {
      RandomStream layout = cell_rng.split(2 * ep), acting = cell_rng.split(2 * ep + 1);
      cell.successes += policy(grid::build_grid(grid::closure(design), layout, config), acting);
    }
    t.cells.push_back(cell);
  }
  return t;
}

WebPolicy web_learner_policy(learner::WebLearnerParams& params, petri::RewardContract contract) {
  return [&params, contract](const web::RenderedSite& site, RandomStream& rng) {
    return learner::run_web_episode(params, site, contract, rng, learner::ActMode::Greedy).success;
  };
}

WebPolicy web_scripted_policy(petri::RewardContract contract) {
  return [contract](const web::RenderedSite& site, RandomStream&) {
    return learner::run_scripted_episode(site, contract).success;
  };
}

WebPolicy web_random_policy(petri::RewardContract contract) {
  return [contract](const web::RenderedSite& site, RandomStream& rng) {
    return learner::run_random_episode(site, contract, rng).success;
  };
}

GridPolicy grid_learner_policy(learner::GridLearnerParams& params) {
  return [&params](const grid::GridState& s, RandomStream& rng) {
    return learner::run_grid_episode(params, s, rng, learner::ActMode::Greedy).success;
  };
}

GridPolicy grid_scripted_policy() {
  return [](const grid::GridState& s0, RandomStream&) {
    grid::GridState s = s0;
    while (!s.done) grid::grid_step(s, grid::oracle_action(s));
    return s.success;
  };
}

GridPolicy grid_random_policy() {
  return [](const grid::GridState& s0, RandomStream& rng) {
    grid::GridState s = s0;
    while (!s.done) grid::grid_step(s, static_cast<grid::Action>(rng.uniform_index(grid::kNumActions)));
    return s.success;
  };
}

}  // namespace codelab::train
