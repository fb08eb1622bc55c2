#include "codelab/nn/layers.hpp"

#include "codelab/errors.hpp"

#include <cmath>

namespace codelab::nn {

namespace {

Tensor uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, RandomStream& rng) {
  Tensor t = cols == 0 ? Tensor(rows) : Tensor(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& x : t.data()) x = (2.0 * rng.uniform() - 1.0) * bound;
  return t;
}

Var activate(Tape& tape, Var x, Activation act) {
  switch (act) {
    case Activation::Tanh:
      return tape.tanh(x);
    case Activation::Relu:
      return tape.relu(x);
    case Activation::Identity:
      break;
  }
  return x;
}

}  // namespace

DenseLayer::DenseLayer(const std::string& name, std::size_t in, std::size_t out, Activation act,
                       RandomStream& rng)
    : weight(name + "/w", uniform_init(out, in, in, rng)),
      bias(name + "/b", uniform_init(out, 0, in, rng)),
      activation(act) {}

void DenseLayer::collect(ParamRefs& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

Var dense_forward(Tape& tape, DenseLayer& layer, Var x) {
  if (tape.size(x) != layer.in())
    throw DimensionError("dense_forward: " + layer.weight.name + " expects width " +
                         std::to_string(layer.in()) + ", got " + std::to_string(tape.size(x)));
  Var y = tape.add(tape.matvec(tape.param(layer.weight), x), tape.param(layer.bias));
  return activate(tape, y, layer.activation);
}

DenseStack::DenseStack(const std::string& name, std::size_t in, std::size_t hidden,
                       std::size_t out, RandomStream& rng, Activation final_activation,
                       Activation hidden_activation) {
  layers.emplace_back(name + "/0", in, hidden, hidden_activation, rng);
  layers.emplace_back(name + "/1", hidden, out, final_activation, rng);
}

void DenseStack::collect(ParamRefs& out) {
  for (DenseLayer& l : layers) l.collect(out);
}

Var stack_forward(Tape& tape, DenseStack& stack, Var x) {
  for (DenseLayer& l : stack.layers) x = dense_forward(tape, l, x);
  return x;
}

RecurrentCell::RecurrentCell(const std::string& name, std::size_t in, std::size_t hidden,
                             RandomStream& rng)
    : w_input(name + "/wx", uniform_init(4 * hidden, in, hidden, rng)),
      w_hidden(name + "/wh", uniform_init(4 * hidden, hidden, hidden, rng)),
      bias(name + "/b", uniform_init(4 * hidden, 0, hidden, rng)) {}

void RecurrentCell::collect(ParamRefs& out) {
  out.push_back(&w_input);
  out.push_back(&w_hidden);
  out.push_back(&bias);
}

RecurrentState zero_state(Tape& tape, const RecurrentCell& cell) {
  const auto h = static_cast<Eigen::Index>(cell.hidden_size());
  return {tape.constant(Vector::Zero(h)), tape.constant(Vector::Zero(h))};
}

RecurrentState recurrent_step(Tape& tape, RecurrentCell& cell, Var x, RecurrentState state) {
  const std::size_t h = cell.hidden_size();
  if (tape.size(x) != cell.input_size())
    throw DimensionError("recurrent_step: input width " + std::to_string(tape.size(x)) +
                         ", cell expects " + std::to_string(cell.input_size()));
  if (tape.size(state.h) != h || tape.size(state.c) != h)
    throw DimensionError("recurrent_step: state width does not match hidden size");
  Var z = tape.add(tape.add(tape.matvec(tape.param(cell.w_input), x),
                            tape.matvec(tape.param(cell.w_hidden), state.h)),
                   tape.param(cell.bias));
  Var i = tape.sigmoid(tape.slice(z, 0, h));
  Var f = tape.sigmoid(tape.slice(z, h, h));
  Var g = tape.tanh(tape.slice(z, 2 * h, h));
  Var o = tape.sigmoid(tape.slice(z, 3 * h, h));
  Var c = tape.add(tape.mul(f, state.c), tape.mul(i, g));
  Var hn = tape.mul(o, tape.tanh(c));
  return {hn, c};
}

namespace {

CategoricalChoice choose(Tape& tape, Var logits, std::size_t index, Var log_probs) {
  CategoricalChoice out;
  out.index = index;
  out.log_probs = log_probs;
  out.log_prob = tape.element(log_probs, index);
  out.entropy = tape.scale(tape.dot(tape.exp(log_probs), log_probs), -1.0);
  (void)logits;
  return out;
}

Var checked_log_softmax(Tape& tape, Var logits) {
  if (tape.size(logits) == 0) throw DomainError("categorical over empty logits");
  if (!tape.value(logits).allFinite()) throw DomainError("categorical logits must be finite");
  return tape.log_softmax(logits);
}

}  // namespace

CategoricalChoice categorical_head(Tape& tape, Var logits, RandomStream& rng) {
  Var lp = checked_log_softmax(tape, logits);
  const Vector p = tape.value(lp).array().exp().matrix();
  const std::size_t idx = rng.categorical({p.data(), static_cast<std::size_t>(p.size())});
  return choose(tape, logits, idx, lp);
}

CategoricalChoice categorical_score(Tape& tape, Var logits, std::size_t index) {
  Var lp = checked_log_softmax(tape, logits);
  if (index >= tape.size(lp)) throw DomainError("categorical_score: index out of range");
  return choose(tape, logits, index, lp);
}

CategoricalChoice categorical_greedy(Tape& tape, Var logits) {
  Var lp = checked_log_softmax(tape, logits);
  Eigen::Index best = 0;
  tape.value(lp).maxCoeff(&best);
  return choose(tape, logits, static_cast<std::size_t>(best), lp);
}

Vector softmax(const Vector& logits) {
  if (logits.size() == 0) throw DomainError("softmax of empty vector");
  const Vector e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

A2CTerms a2c_losses(Tape& tape, std::span<const Var> log_probs, std::span<const Var> values,
                    std::span<const double> returns, std::span<const Var> entropies,
                    double entropy_coeff, double value_coeff) {
  if (log_probs.size() != values.size() || values.size() != returns.size())
    throw DimensionError("a2c_losses: log_probs, values and returns must have equal lengths");
  if (log_probs.empty()) throw DimensionError("a2c_losses: empty trajectory");
  std::vector<Var> policy_terms;
  std::vector<Var> value_terms;
  policy_terms.reserve(log_probs.size());
  value_terms.reserve(values.size());
  for (std::size_t t = 0; t < log_probs.size(); ++t) {
    if (!std::isfinite(returns[t])) throw DomainError("a2c_losses: non-finite return");
    const double advantage = returns[t] - tape.scalar(values[t]);
    policy_terms.push_back(tape.scale(log_probs[t], -advantage));
    Var diff = tape.sub(tape.constant_scalar(returns[t]), values[t]);
    value_terms.push_back(tape.mul(diff, diff));
  }
  A2CTerms out;
  out.policy_loss = tape.add_n(policy_terms);
  out.value_loss = tape.add_n(value_terms);
  if (entropies.empty())
    out.entropy_bonus = tape.constant_scalar(0.0);
  else
    out.entropy_bonus = tape.scale(tape.add_n(entropies), entropy_coeff);
  out.total = tape.sub(tape.add(out.policy_loss, tape.scale(out.value_loss, value_coeff)),
                       out.entropy_bonus);
  return out;
}

}  // namespace codelab::nn
