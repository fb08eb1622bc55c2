#pragma once

#include "codelab/gen/generator.hpp"
#include "codelab/gen/objectives.hpp"
#include "codelab/nn/optimizer.hpp"
#include "codelab/petri/pomdp.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace codelab::train {

enum class Algo { Code, PopRegretOnly, Paired, Minimax, Dr, Cl, Alp };

std::string to_string(Algo a);
Algo parse_algo(const std::string& name);
/// Algorithms that sample designs from the generator.
bool uses_generator(Algo a);

struct TrainingConfig {
  Algo algo = Algo::Code;
  gen::Domain domain = gen::Domain::Web;
  std::size_t population = 2;
  std::size_t episodes = 2;  // M
  std::size_t budget = 10;   // N
  std::size_t max_pages = 10;  // K
  double gamma = 0.99;
  double alpha = 0.8;
  double beta = 0.0;
  double delta = 0.0;
  std::size_t n_max = 0;  // 0: use the budget
  bool scale_by_best = false;
  bool signed_scale = false;
  bool legacy_budget = false;
  bool b_paired = false;
  double step_penalty = 0.01;
  bool binary_only = false;
  std::size_t base_steps = 4;
  std::size_t steps_per_field = 3;
  std::size_t grid_horizon = 64;
  std::string optimizer = "adam";
  double learner_lr = 1e-3;
  double generator_lr = 3e-5;
  double learner_entropy = 0.01;
  double generator_entropy = 0.01;
  double clip_norm = 5.0;
  double baseline_decay = 0.9;
  std::size_t iterations = 1000;
  std::optional<std::uint64_t> seed;
  std::size_t generator_hidden = 100;
  std::size_t learner_hidden = 100;
  std::size_t learner_embed = 48;
  std::size_t learner_buckets = 128;
  /// Web catalog names or grid subtask names; empty means the whole set.
  std::vector<std::string> primitives;
  double skip_init = 0.9;
  double cl_p0 = 0.1;
  bool freeze_learners = false;
  std::size_t eval_every = 0;
  std::size_t eval_episodes = 10;
  std::vector<std::string> eval_envs;  // web suite env names; empty means all
  std::vector<int> eval_levels{1, 2, 3, 4};
  std::size_t checkpoint_every = 0;
  std::size_t workers = 1;

  /// Throws ConfigError naming the offending key.
  void check() const;

  std::vector<std::string> resolved_primitives() const;
  gen::ObjectiveConfig objective() const;
  gen::GeneratorConfig generator() const;
  nn::OptimizerConfig learner_optimizer() const;
  nn::OptimizerConfig generator_optimizer() const;
  petri::RewardContract contract() const;
};

nlohmann::json to_json(const TrainingConfig& cfg);
/// Flat object; unknown keys and wrongly typed values raise ConfigError.
TrainingConfig config_from_json(const nlohmann::json& doc);
/// Applies "key=value"; the value is read as JSON when it parses, else as a string.
void apply_override(TrainingConfig& cfg, const std::string& assignment);
TrainingConfig load_config(const std::string& path);

}  // namespace codelab::train
