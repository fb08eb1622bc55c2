#pragma once

#include "codelab/gen/generator.hpp"
#include "codelab/learner/grid_agent.hpp"
#include "codelab/learner/web_agent.hpp"
#include "codelab/train/config.hpp"
#include "codelab/train/evaluate.hpp"
#include "codelab/train/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>

namespace codelab::train {

/// One population member: a web or grid learner with its optimizer.
struct Agent {
  std::unique_ptr<learner::WebLearnerParams> web;
  std::unique_ptr<learner::GridLearnerParams> grid;
  nn::Optimizer optimizer;

  nn::ParamRefs params();
};

/// What was trained on in one iteration.
struct IterationDesign {
  std::optional<gen::DesignRollout> rollout;
  web::WebsiteDesign web;
  grid::GridDesign grid;
};

class Trainer {
 public:
  explicit Trainer(TrainingConfig config);

  const TrainingConfig& config() const noexcept { return config_; }
  std::size_t iteration() const noexcept { return iteration_; }
  std::size_t population() const noexcept { return agents_.size(); }
  Agent& agent(std::size_t i) { return agents_.at(i); }
  gen::GeneratorParams* generator() { return generator_.get(); }
  const IterationDesign& last_design() const noexcept { return last_design_; }

  /// One full iteration: design, render, collect, update learners, score, update the generator.
  MetricsRecord step();

  /// Greedy evaluation of one agent.
  EvalTable evaluate(std::size_t agent, std::size_t episodes, std::uint64_t seed);

  void save_checkpoint(const std::filesystem::path& dir);
  void load_checkpoint(const std::filesystem::path& dir);

  /// Runs the remaining iterations writing metrics.csv, timing.csv, checkpoints,
  /// eval.json and manifest.json under `out_dir`.
  std::vector<MetricsRecord> run(const std::filesystem::path& out_dir, std::ostream* log = nullptr);

 private:
  IterationDesign make_design(RandomStream& rng);
  std::vector<std::vector<learner::Trajectory>> collect(const IterationDesign& design, RandomStream& env_rng,
                                                        const RandomStream& act_rng);
  std::vector<learner::Trajectory> episodes_for(Agent& a, const web::RenderedSite* site,
                                                const grid::GridState* state, RandomStream rng,
                                                std::size_t count);

  TrainingConfig config_;
  std::uint64_t seed_;
  std::unique_ptr<gen::GeneratorParams> generator_;
  std::optional<nn::Optimizer> generator_opt_;
  std::vector<Agent> agents_;
  std::size_t iteration_ = 0;
  std::optional<double> baseline_;
  IterationDesign last_design_;
};

/// Seed from the config, else CODE_LAB_SEED; throws ConfigError when neither is set.
std::uint64_t resolve_seed(const TrainingConfig& config);

}  // namespace codelab::train
