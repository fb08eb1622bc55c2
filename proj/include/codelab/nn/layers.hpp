#pragma once

#include "codelab/nn/tape.hpp"
#include "codelab/random.hpp"

#include <span>
#include <string>
#include <vector>

namespace codelab::nn {

enum class Activation { Tanh, Identity, Relu };

/// y = act(W x + b). Weights initialised uniformly in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
struct DenseLayer {
  Parameter weight;
  Parameter bias;
  Activation activation = Activation::Identity;

  DenseLayer() = default;
  DenseLayer(const std::string& name, std::size_t in, std::size_t out, Activation act,
             RandomStream& rng);

  std::size_t in() const noexcept { return weight.value.cols(); }
  std::size_t out() const noexcept { return weight.value.rows(); }
  void collect(ParamRefs& out);
};

Var dense_forward(Tape& tape, DenseLayer& layer, Var x);

/// Two dense layers; tanh after the first, `final_activation` after the second.
struct DenseStack {
  std::vector<DenseLayer> layers;

  DenseStack() = default;
  DenseStack(const std::string& name, std::size_t in, std::size_t hidden, std::size_t out,
             RandomStream& rng, Activation final_activation = Activation::Identity,
             Activation hidden_activation = Activation::Tanh);

  std::size_t in() const { return layers.front().in(); }
  std::size_t out() const { return layers.back().out(); }
  void collect(ParamRefs& out);
};

Var stack_forward(Tape& tape, DenseStack& stack, Var x);

/// LSTM cell. Gate rows are ordered input, forget, candidate, output.
struct RecurrentCell {
  Parameter w_input;   // [4H x in]
  Parameter w_hidden;  // [4H x H]
  Parameter bias;      // [4H]

  RecurrentCell() = default;
  RecurrentCell(const std::string& name, std::size_t in, std::size_t hidden, RandomStream& rng);

  std::size_t input_size() const noexcept { return w_input.value.cols(); }
  std::size_t hidden_size() const noexcept { return w_hidden.value.cols(); }
  void collect(ParamRefs& out);
};

struct RecurrentState {
  Var h;
  Var c;
};

RecurrentState zero_state(Tape& tape, const RecurrentCell& cell);
RecurrentState recurrent_step(Tape& tape, RecurrentCell& cell, Var x, RecurrentState state);

/// A draw from (or a scoring of) a categorical distribution given logits.
struct CategoricalChoice {
  std::size_t index = 0;
  Var log_probs;  // full log-softmax vector
  Var log_prob;   // log-softmax at index
  Var entropy;
};

CategoricalChoice categorical_head(Tape& tape, Var logits, RandomStream& rng);
CategoricalChoice categorical_score(Tape& tape, Var logits, std::size_t index);
CategoricalChoice categorical_greedy(Tape& tape, Var logits);

/// Numerically stable softmax of a plain vector.
Vector softmax(const Vector& logits);

struct A2CTerms {
  Var policy_loss;
  Var value_loss;
  Var entropy_bonus;
  /// policy_loss + value_coeff * value_loss - entropy_bonus
  Var total;
};

/// policy_loss = -sum (G - v_detached) log_prob; value_loss = sum (G - v)^2;
/// entropy_bonus = entropy_coeff * sum entropies.
A2CTerms a2c_losses(Tape& tape, std::span<const Var> log_probs, std::span<const Var> values,
                    std::span<const double> returns, std::span<const Var> entropies,
                    double entropy_coeff, double value_coeff = 0.5);

}  // namespace codelab::nn
