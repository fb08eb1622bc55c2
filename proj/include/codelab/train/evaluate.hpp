#pragma once

#include "codelab/grid/grid.hpp"
#include "codelab/learner/grid_agent.hpp"
#include "codelab/learner/web_agent.hpp"
#include "codelab/web/suite.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace codelab::train {

struct EvalCell {
  std::string env;
  int level = 0;
  std::size_t episodes = 0;
  std::size_t successes = 0;
  double rate() const { return episodes ? static_cast<double>(successes) / static_cast<double>(episodes) : 0.0; }
};

struct EvalTable {
  std::vector<EvalCell> cells;
  double mean_rate() const;
  const EvalCell* find(const std::string& env, int level) const;
  nlohmann::json to_json() const;
  /// Rows per environment, one percentage column per level.
  std::string to_text() const;
};

/// Runs one episode on a rendered site and reports success.
using WebPolicy = std::function<bool(const web::RenderedSite&, RandomStream&)>;
using GridPolicy = std::function<bool(const grid::GridState&, RandomStream&)>;

struct WebEvalOptions {
  std::vector<std::string> envs;  // empty: all
  std::vector<int> levels{1, 2, 3, 4};
  web::RenderOptions render;
};

/// Each episode renders the design with fresh values.
EvalTable evaluate_web(const WebPolicy& policy, const web::SuiteDesigns& suite, std::size_t episodes,
                       std::uint64_t seed, const WebEvalOptions& options = {});
EvalTable evaluate_grid(const GridPolicy& policy, std::size_t episodes, std::uint64_t seed,
                        const grid::GridConfig& config = {});

/// Greedy learner, scripted oracle and uniform-random policies.
WebPolicy web_learner_policy(learner::WebLearnerParams& params, petri::RewardContract contract = {});
WebPolicy web_scripted_policy(petri::RewardContract contract = {});
WebPolicy web_random_policy(petri::RewardContract contract = {});
GridPolicy grid_learner_policy(learner::GridLearnerParams& params);
GridPolicy grid_scripted_policy();
GridPolicy grid_random_policy();

}  // namespace codelab::train
