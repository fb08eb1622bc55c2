#pragma once

#include "codelab/nn/layers.hpp"
#include "codelab/nn/optimizer.hpp"
#include "codelab/petri/pomdp.hpp"
#include "codelab/random.hpp"
#include "codelab/web/episode.hpp"

#include <map>
#include <memory>
#include <optional>

namespace codelab::learner {

struct WebLearnerConfig {
  std::size_t hidden = 100;
  std::size_t embed = 48;
  std::size_t buckets = 128;
};

/// FNV-1a of `salt` + ":" + `text`, reduced to a bucket.
std::size_t hash_bucket(const std::string& salt, const std::string& text, std::size_t buckets);

struct WebLearnerParams {
  WebLearnerConfig config;
  nn::Parameter embedding;  // [embed x buckets]
  nn::RecurrentCell dom;    // over (embedded features, depth, filled, actionable)
  nn::DenseStack field;     // (key embedding, null flag) -> hidden
  nn::Parameter bilinear;   // [hidden x hidden]
  nn::DenseStack value;     // pooled element encoding -> scalar

  WebLearnerParams(WebLearnerConfig config, RandomStream& rng);
  nn::ParamRefs params();
  std::size_t count();
};

/// Per-element encodings: the recurrent hidden state at each actionable node.
std::vector<nn::Var> encode_dom(nn::Tape& tape, WebLearnerParams& params, const web::Observation& obs);

/// Joint log-probabilities over element x (fields + null), row-major by element,
/// and the attention-pooled value.
struct PolicyOutput {
  nn::Var log_probs;
  nn::Var value;
  std::size_t elements = 0;
  std::size_t columns = 0;  // fields + 1; the last column is the null (click) field
};

PolicyOutput policy_forward(nn::Tape& tape, WebLearnerParams& params, const web::Observation& obs);

struct ActionDistribution {
  std::vector<double> joint;     // elements x columns
  std::vector<double> marginal;  // per element
  std::size_t columns = 0;
};

ActionDistribution action_distribution(const nn::Tape& tape, const PolicyOutput& out);

web::NavAction decode_action(const PolicyOutput& out, std::size_t index, const web::Observation& obs);
std::size_t encode_action(const PolicyOutput& out, const web::NavAction& action, const web::Observation& obs);

/// One episode's record on its own tape.
struct Trajectory {
  std::unique_ptr<nn::Tape> tape = std::make_unique<nn::Tape>();
  std::vector<nn::Var> log_probs;
  std::vector<nn::Var> values;
  std::vector<nn::Var> entropies;
  std::vector<double> rewards;
  double total_return = 0.0;  // undiscounted
  bool success = false;
};

enum class ActMode { Sample, Greedy };

/// Acts with the learner on `site` until the episode ends. Encodings are reused
/// while the observation version is unchanged.
Trajectory run_web_episode(WebLearnerParams& params, const web::RenderedSite& site,
                           const petri::RewardContract& contract, RandomStream& rng,
                           ActMode mode = ActMode::Sample);

/// Samples (or, in Greedy mode, takes the argmax of) one action for `obs`.
struct ActResult {
  web::NavAction action;
  nn::Var log_prob;
  nn::Var value;
  nn::Var entropy;
};
ActResult act(nn::Tape& tape, WebLearnerParams& params, const web::Observation& obs, RandomStream& rng,
              ActMode mode = ActMode::Sample);

/// G_t = sum_i gamma^i r_{t+i}.
std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma);

/// A2C over the trajectories (gradients summed), then one optimizer step.
/// Throws TrainingFault on a non-finite loss or gradient.
void update_learner(const nn::ParamRefs& params, std::vector<Trajectory>& trajectories, double gamma,
                    nn::Optimizer& optimizer, std::int64_t iteration, double value_coeff = 0.5);

/// Fixed policies for evaluation baselines.
struct WebEpisodeStats {
  double total_return = 0.0;
  bool success = false;
  std::size_t steps = 0;
};
WebEpisodeStats run_scripted_episode(const web::RenderedSite& site, const petri::RewardContract& contract);
WebEpisodeStats run_random_episode(const web::RenderedSite& site, const petri::RewardContract& contract,
                                   RandomStream& rng);

}  // namespace codelab::learner
