#include "codelab/learner/web_agent.hpp"

#include "codelab/errors.hpp"

#include <cmath>

namespace codelab::learner {

using nn::Tape;
using nn::Var;
using nn::Vector;

namespace {

constexpr std::size_t kNodeFlags = 3;  // depth / 8, filled, actionable

nn::Tensor uniform(std::size_t rows, std::size_t cols, double bound, RandomStream& rng) {
  nn::Tensor t(rows, cols);
  for (double& x : t.data()) x = (2.0 * rng.uniform() - 1.0) * bound;
  return t;
}

}  // namespace

std::size_t hash_bucket(const std::string& salt, const std::string& text, std::size_t buckets) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (char c : salt) mix(static_cast<unsigned char>(c));
  mix(':');
  for (char c : text) mix(static_cast<unsigned char>(c));
  return static_cast<std::size_t>(h % buckets);
}

WebLearnerParams::WebLearnerParams(WebLearnerConfig cfg, RandomStream& rng) : config(cfg) {
  if (config.hidden == 0 || config.embed == 0 || config.buckets == 0)
    throw ConfigError("learner widths must be positive");
  const std::size_t H = config.hidden, D = config.embed;
  embedding = nn::Parameter("web/embedding", uniform(D, config.buckets, 1.0, rng));
  dom = nn::RecurrentCell("web/dom", D + kNodeFlags, H, rng);
  field = nn::DenseStack("web/field", D + 1, H, H, rng, nn::Activation::Tanh);
  bilinear = nn::Parameter("web/bilinear", uniform(H, H, 1.0 / std::sqrt(static_cast<double>(H)), rng));
  value = nn::DenseStack("web/value", H, H, 1, rng);
}

nn::ParamRefs WebLearnerParams::params() {
  nn::ParamRefs out{&embedding};
  dom.collect(out);
  field.collect(out);
  out.push_back(&bilinear);
  value.collect(out);
  return out;
}

std::size_t WebLearnerParams::count() { return nn::count_parameters(params()); }

namespace {

Vector multi_hot(const WebLearnerParams& p, std::initializer_list<std::pair<const char*, const std::string*>> items) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(p.config.buckets));
  for (const auto& [salt, text] : items)
    if (!text->empty()) v[static_cast<Eigen::Index>(hash_bucket(salt, *text, p.config.buckets))] += 1.0;
  return v;
}

}  // namespace

std::vector<Var> encode_dom(Tape& tape, WebLearnerParams& params, const web::Observation& obs) {
  if (obs.nodes.empty()) throw DimensionError("encode_dom: empty page");
  Var emb = tape.param(params.embedding);
  nn::RecurrentState state = nn::zero_state(tape, params.dom);
  std::vector<Var> hidden;
  hidden.reserve(obs.nodes.size());
  for (const web::ObsNode& n : obs.nodes) {
    Var feat = tape.matvec(emb, tape.constant(multi_hot(params, {{"tag", &n.tag}, {"key", &n.key}, {"text", &n.text}})));
    Vector flags(static_cast<Eigen::Index>(kNodeFlags));
    flags << static_cast<double>(n.depth) / 8.0, n.value.empty() ? 0.0 : 1.0, n.element ? 1.0 : 0.0;
    const Var parts[2] = {feat, tape.constant(flags)};
    state = nn::recurrent_step(tape, params.dom, tape.concat(parts), state);
    hidden.push_back(state.h);
  }
  std::vector<Var> out;
  out.reserve(obs.element_nodes.size());
  for (std::size_t node : obs.element_nodes) out.push_back(hidden.at(node));
  return out;
}

PolicyOutput policy_forward(Tape& tape, WebLearnerParams& params, const web::Observation& obs) {
  const std::vector<Var> enc = encode_dom(tape, params, obs);
  if (enc.empty()) throw DimensionError("policy_forward: no actionable element");
  const std::size_t D = params.config.embed;
  Var emb = tape.param(params.embedding);
  Var w = tape.param(params.bilinear);

  std::vector<Var> columns;
  for (const auto& [key, value] : obs.fields) {
    Var e = tape.matvec(emb, tape.constant(multi_hot(params, {{"key", &key}})));
    const Var parts[2] = {e, tape.constant_scalar(0.0)};
    columns.push_back(tape.matvec(w, nn::stack_forward(tape, params.field, tape.concat(parts))));
  }
  Vector null_in = Vector::Zero(static_cast<Eigen::Index>(D + 1));
  null_in[static_cast<Eigen::Index>(D)] = 1.0;
  columns.push_back(tape.matvec(w, nn::stack_forward(tape, params.field, tape.constant(null_in))));

  std::vector<Var> logits;
  logits.reserve(enc.size() * columns.size());
  for (Var e : enc)
    for (Var c : columns) logits.push_back(tape.dot(e, c));

  PolicyOutput out;
  out.elements = enc.size();
  out.columns = columns.size();
  out.log_probs = tape.log_softmax(tape.concat(logits));

  Var probs = tape.exp(out.log_probs);
  std::vector<Var> pooled;
  for (std::size_t e = 0; e < enc.size(); ++e) {
    Var m = tape.sum(tape.slice(probs, e * out.columns, out.columns));
    pooled.push_back(tape.scale_by(enc[e], m));
  }
  out.value = nn::stack_forward(tape, params.value, tape.add_n(pooled));
  return out;
}

ActionDistribution action_distribution(const Tape& tape, const PolicyOutput& out) {
  ActionDistribution d;
  d.columns = out.columns;
  const auto lp = tape.value(out.log_probs);
  d.joint.resize(static_cast<std::size_t>(lp.size()));
  d.marginal.assign(out.elements, 0.0);
  for (std::size_t i = 0; i < d.joint.size(); ++i) {
    d.joint[i] = std::exp(lp[static_cast<Eigen::Index>(i)]);
    d.marginal[i / out.columns] += d.joint[i];
  }
  return d;
}

web::NavAction decode_action(const PolicyOutput& out, std::size_t index, const web::Observation& obs) {
  web::NavAction a;
  a.element = obs.elements.at(index / out.columns);
  const std::size_t c = index % out.columns;
  if (c + 1 < out.columns) a.field = c;
  return a;
}

std::size_t encode_action(const PolicyOutput& out, const web::NavAction& action, const web::Observation& obs) {
  for (std::size_t e = 0; e < obs.elements.size(); ++e)
    if (obs.elements[e] == action.element) return e * out.columns + action.field.value_or(out.columns - 1);
  throw ContractViolation("action element is not on the observed page");
}

namespace {

ActResult act_on(Tape& tape, const PolicyOutput& out, const web::Observation& obs, RandomStream& rng, ActMode mode) {
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
  ActResult r;
  r.action = decode_action(out, idx, obs);
  r.log_prob = tape.element(out.log_probs, idx);
  r.value = out.value;
  r.entropy = tape.scale(tape.dot(tape.exp(out.log_probs), out.log_probs), -1.0);
  return r;
}

}  // namespace

ActResult act(Tape& tape, WebLearnerParams& params, const web::Observation& obs, RandomStream& rng, ActMode mode) {
  return act_on(tape, policy_forward(tape, params, obs), obs, rng, mode);
}

Trajectory run_web_episode(WebLearnerParams& params, const web::RenderedSite& site,
                           const petri::RewardContract& contract, RandomStream& rng, ActMode mode) {
  Trajectory traj;
  Tape& tape = *traj.tape;
  web::WebEpisode ep(site, contract);
  std::map<std::uint64_t, PolicyOutput> cache;
  while (!ep.done()) {
    const web::Observation obs = ep.observe();
    auto it = cache.find(obs.version);
    if (it == cache.end()) it = cache.emplace(obs.version, policy_forward(tape, params, obs)).first;
    ActResult r = act_on(tape, it->second, obs, rng, mode);
    const web::WebStep step = ep.step(r.action);
    traj.log_probs.push_back(r.log_prob);
    traj.values.push_back(r.value);
    traj.entropies.push_back(r.entropy);
    traj.rewards.push_back(step.reward());
    traj.total_return += step.reward();
  }
  traj.success = ep.success();
  return traj;
}

std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma) {
  std::vector<double> g(rewards.size());
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    g[i] = acc;
  }
  return g;
}

void update_learner(const nn::ParamRefs& params, std::vector<Trajectory>& trajectories, double gamma,
                    nn::Optimizer& optimizer, std::int64_t iteration, double value_coeff) {
  nn::zero_grad(params);
  for (Trajectory& t : trajectories) {
    if (t.log_probs.empty()) continue;
    Tape& tape = *t.tape;
    const std::vector<double> g = discounted_returns(t.rewards, gamma);
    auto terms = nn::a2c_losses(tape, t.log_probs, t.values, g, t.entropies, optimizer.config().entropy_coeff,
                                value_coeff);
    if (!std::isfinite(tape.scalar(terms.total))) throw TrainingFault("learner loss is not finite", iteration);
    tape.backward(terms.total);
  }
  optimizer.apply_update(params, iteration);
}

WebEpisodeStats run_scripted_episode(const web::RenderedSite& site, const petri::RewardContract& contract) {
  web::WebEpisode ep(site, contract);
  WebEpisodeStats s;
  while (!ep.done()) {
    auto plan = web::optimal_page_actions(ep);
    if (plan.empty()) break;
    for (const web::NavAction& a : plan) {
      s.total_return += ep.step(a).reward();
      ++s.steps;
      if (ep.done()) break;
    }
  }
  s.success = ep.success();
  return s;
}

WebEpisodeStats run_random_episode(const web::RenderedSite& site, const petri::RewardContract& contract,
                                   RandomStream& rng) {
  web::WebEpisode ep(site, contract);
  WebEpisodeStats s;
  while (!ep.done()) {
    const web::Observation obs = ep.observe();
    const std::size_t cols = obs.fields.size() + 1;
    const std::size_t idx = rng.uniform_index(obs.elements.size() * cols);
    web::NavAction a{obs.elements[idx / cols], std::nullopt};
    if (idx % cols + 1 < cols) a.field = idx % cols;
    s.total_return += ep.step(a).reward();
    ++s.steps;
  }
  s.success = ep.success();
  return s;
}

}  // namespace codelab::learner
