#pragma once

#include "codelab/grid/grid.hpp"
#include "codelab/nn/layers.hpp"
#include "codelab/nn/optimizer.hpp"
#include "codelab/random.hpp"
#include "codelab/web/design.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace codelab::gen {

enum class Domain { Web, Grid };

std::string to_string(Domain d);
Domain parse_domain(const std::string& name);

struct GeneratorConfig {
  Domain domain = Domain::Web;
  /// Web: catalog names; grid: subtask names. SKIP is appended internally.
  std::vector<std::string> primitives;
  std::size_t max_pages = 10;  // K
  std::size_t budget = 10;     // N
  std::size_t hidden = 100;
  /// Initial probability of SKIP at every step (set through the fP output bias); <= 0 leaves it untouched.
  double skip_init = 0.9;

  std::size_t choices() const noexcept { return primitives.size() + 1; }
  std::size_t skip_index() const noexcept { return primitives.size(); }
};

/// Full 40-primitive web config or the five grid subtasks.
GeneratorConfig default_generator_config(Domain domain);

struct GeneratorParams {
  GeneratorConfig config;
  nn::DenseStack f0;  // noise -> h0
  nn::DenseStack fK;  // h0 -> page-count logits (web only)
  nn::RecurrentCell core;
  nn::DenseStack fP;  // -> primitive + SKIP logits
  nn::DenseStack fL;  // -> page logits (web only)
  nn::DenseStack fI;  // chosen (primitive, page, k) -> next input

  GeneratorParams(GeneratorConfig config, RandomStream& rng);
  nn::ParamRefs params();
  std::size_t count();
};

struct DesignRollout {
  std::vector<double> noise;
  std::size_t num_pages = 0;  // k (web)
  std::vector<std::size_t> actions;              // index into primitives, skip_index() for SKIP
  std::vector<std::optional<std::size_t>> pages;  // sampled page per step
  std::vector<double> log_probs;       // per step: primitive + page
  std::vector<double> skip_log_probs;  // per step: log pi(SKIP)
  double page_count_log_prob = 0.0;
  std::vector<double> entropies;  // per step; page-count entropy is entropies_k
  double entropy_k = 0.0;

  web::WebsiteDesign web;
  grid::GridDesign grid;  // closure of the chosen subtasks

  double total_log_prob() const;
  std::size_t non_skip() const;
};

DesignRollout sample_design(GeneratorParams& params, RandomStream& rng);

/// Differentiable re-evaluation of a rollout on a tape.
struct RolloutScore {
  nn::Var log_prob;  // page count + every step
  nn::Var n_hat;     // -sum log pi(SKIP)
  nn::Var entropy;   // page count + every step
};

RolloutScore score_rollout(nn::Tape& tape, GeneratorParams& params, const DesignRollout& rollout);

/// -sum log pi(SKIP).
double skip_mass(const DesignRollout& rollout);

/// How a scalar generator reward is credited. The surrogate maximised is
/// score_reward * log pi(design) + skip_mass_coeff * n_hat + entropy bonus.
struct GeneratorSignal {
  double score_reward = 0.0;
  double skip_mass_coeff = 0.0;
};

/// One step on -(surrogate). Throws TrainingFault on non-finite gradients.
void update_generator(GeneratorParams& params, const DesignRollout& rollout, const GeneratorSignal& signal,
                      nn::Optimizer& optimizer, std::int64_t iteration);

/// Convenience form: the whole reward goes through the score-function term.
void update_generator(GeneratorParams& params, const DesignRollout& rollout, double reward,
                      nn::Optimizer& optimizer, std::int64_t iteration);

/// Debug dump: choices, pages, log-probs, n_hat.
nlohmann::json rollout_to_json(const GeneratorParams& params, const DesignRollout& rollout);

}  // namespace codelab::gen
