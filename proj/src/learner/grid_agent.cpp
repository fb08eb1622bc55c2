#include "codelab/learner/grid_agent.hpp"

#include "codelab/errors.hpp"

namespace codelab::learner {

using nn::Tape;
using nn::Var;
using nn::Vector;

GridLearnerParams::GridLearnerParams(GridLearnerConfig cfg, RandomStream& rng) : config(cfg) {
  if (config.hidden == 0 || config.width == 0 || config.height == 0)
    throw ConfigError("learner widths must be positive");
  const std::size_t in = config.width * config.height * grid::kNumChannels + grid::kPositionFeatures;
  trunk = nn::DenseStack("grid/trunk", in, config.hidden, config.hidden, rng, nn::Activation::Tanh);
  policy = nn::DenseLayer("grid/policy", config.hidden, kGridActions, nn::Activation::Identity, rng);
  value = nn::DenseLayer("grid/value", config.hidden, 1, nn::Activation::Identity, rng);
}

nn::ParamRefs GridLearnerParams::params() {
  nn::ParamRefs out;
  trunk.collect(out);
  policy.collect(out);
  value.collect(out);
  return out;
}

std::size_t GridLearnerParams::count() { return nn::count_parameters(params()); }

GridPolicyOutput grid_policy_forward(Tape& tape, GridLearnerParams& params, const grid::GridObservation& obs) {
  if (obs.width != params.config.width || obs.height != params.config.height)
    throw DimensionError("grid observation size does not match the learner");
  Vector x(static_cast<Eigen::Index>(obs.cells.size() + obs.position.size()));
  for (std::size_t i = 0; i < obs.cells.size(); ++i) x[static_cast<Eigen::Index>(i)] = obs.cells[i];
  for (std::size_t i = 0; i < obs.position.size(); ++i)
    x[static_cast<Eigen::Index>(obs.cells.size() + i)] = obs.position[i];
  Var h = nn::stack_forward(tape, params.trunk, tape.constant(x));
  return {tape.log_softmax(nn::dense_forward(tape, params.policy, h)), nn::dense_forward(tape, params.value, h)};
}

Trajectory run_grid_episode(GridLearnerParams& params, grid::GridState state, RandomStream& rng, ActMode mode) {
  Trajectory traj;
  Tape& tape = *traj.tape;
  while (!state.done) {
    GridPolicyOutput out = grid_policy_forward(tape, params, grid::grid_observation(state));
    const auto lp = tape.value(out.log_probs);
    std::size_t idx = 0;
    if (mode == ActMode::Greedy) {
      Eigen::Index best = 0;
      lp.maxCoeff(&best);
      idx = static_cast<std::size_t>(best);
    } else {
      const Vector p = lp.array().exp().matrix();
      idx = rng.categorical({p.data(), static_cast<std::size_t>(p.size())});
    }
    const auto step = grid::grid_step(state, static_cast<grid::Action>(idx));
    traj.log_probs.push_back(tape.element(out.log_probs, idx));
    traj.values.push_back(out.value);
    traj.entropies.push_back(tape.scale(tape.dot(tape.exp(out.log_probs), out.log_probs), -1.0));
    traj.rewards.push_back(step.reward);
    traj.total_return += step.reward;
  }
  traj.success = state.success;
  return traj;
}

}  // namespace codelab::learner
