#pragma once

#include "codelab/grid/grid.hpp"
#include "codelab/learner/web_agent.hpp"

namespace codelab::learner {

struct GridLearnerConfig {
  std::size_t hidden = 100;
  std::size_t width = 8;
  std::size_t height = 8;
};

inline constexpr std::size_t kGridActions = 6;

/// Two-layer tanh trunk over the flattened grid and position features, with
/// policy and value heads.
struct GridLearnerParams {
  GridLearnerConfig config;
  nn::DenseStack trunk;
  nn::DenseLayer policy;
  nn::DenseLayer value;

  GridLearnerParams(GridLearnerConfig config, RandomStream& rng);
  nn::ParamRefs params();
  std::size_t count();
};

struct GridPolicyOutput {
  nn::Var log_probs;
  nn::Var value;
};

GridPolicyOutput grid_policy_forward(nn::Tape& tape, GridLearnerParams& params, const grid::GridObservation& obs);

Trajectory run_grid_episode(GridLearnerParams& params, grid::GridState state, RandomStream& rng,
                            ActMode mode = ActMode::Sample);

}  // namespace codelab::learner
