#include "codelab/train/config.hpp"

#include "codelab/errors.hpp"
#include "codelab/grid/grid.hpp"
#include "codelab/web/catalog.hpp"
#include "codelab/web/suite.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>

namespace codelab::train {

namespace {

const std::vector<std::pair<Algo, std::string>>& algo_names() {
  static const std::vector<std::pair<Algo, std::string>> names{
      {Algo::Code, "code"}, {Algo::PopRegretOnly, "popregret_only"}, {Algo::Paired, "paired"},
      {Algo::Minimax, "minimax"}, {Algo::Dr, "dr"}, {Algo::Cl, "cl"}, {Algo::Alp, "alp"}};
  return names;
}

}  // namespace

std::string to_string(Algo a) {
  for (const auto& [k, n] : algo_names())
    if (k == a) return n;
  return "code";
}

Algo parse_algo(const std::string& name) {
  for (const auto& [k, n] : algo_names())
    if (n == name) return k;
  throw ConfigError("unknown algo '" + name + "'");
}

bool uses_generator(Algo a) { return a != Algo::Dr && a != Algo::Cl; }

void TrainingConfig::check() const {
  auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
  if (population < 1) fail("population", "must be at least 1");
  const bool needs_two = algo == Algo::Code || algo == Algo::PopRegretOnly || algo == Algo::Paired;
  if (needs_two && population < 2) fail("population", "regret algorithms need at least 2 agents");
  if (algo == Algo::Paired && population != 2) fail("population", "paired uses exactly an antagonist and a protagonist");
  if (episodes < 1) fail("episodes", "must be at least 1");
  if (budget < 1) fail("budget", "must be positive");
  if (max_pages < 1) fail("max_pages", "must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma", "must lie in [0,1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha", "must lie in [0,1]");
  if (delta > beta) fail("delta", "must not exceed beta");
  if (!(learner_lr > 0.0)) fail("learner_lr", "must be positive");
  if (!(generator_lr > 0.0)) fail("generator_lr", "must be positive");
  if (learner_entropy < 0.0) fail("learner_entropy", "must be nonnegative");
  if (generator_entropy < 0.0) fail("generator_entropy", "must be nonnegative");
  if (!(baseline_decay >= 0.0 && baseline_decay < 1.0)) fail("baseline_decay", "must lie in [0,1)");
  if (iterations < 1) fail("iterations", "must be positive");
  if (generator_hidden < 1 || learner_hidden < 1 || learner_embed < 1 || learner_buckets < 1)
    fail("learner_hidden", "network widths must be positive");
  if (skip_init >= 1.0) fail("skip_init", "must be below 1");
  if (!(cl_p0 >= 0.0 && cl_p0 <= 1.0)) fail("cl_p0", "must lie in [0,1]");
  if (workers < 1) fail("workers", "must be at least 1");
  if (grid_horizon < 1) fail("grid_horizon", "must be positive");
  if (eval_episodes < 1) fail("eval_episodes", "must be positive");
  nn::parse_optimizer_kind(optimizer);
  try {
    resolved_primitives();
  } catch (const Error& e) {
    fail("primitives", e.what());
  }
  for (const auto& e : eval_envs)
    if (std::find(web::suite_envs().begin(), web::suite_envs().end(), e) == web::suite_envs().end())
      fail("eval_envs", "unknown environment '" + e + "'");
  for (int l : eval_levels)
    if (l < 1 || l > 4) fail("eval_levels", "levels run from 1 to 4");
}

std::vector<std::string> TrainingConfig::resolved_primitives() const {
  if (domain == gen::Domain::Web) {
    if (primitives.empty()) return web::catalog_names();
    return web::restricted_catalog(primitives);
  }
  if (primitives.empty()) return gen::default_generator_config(gen::Domain::Grid).primitives;
  for (const auto& p : primitives) grid::parse_subtask(p);
  return primitives;
}

gen::ObjectiveConfig TrainingConfig::objective() const {
  gen::ObjectiveConfig o;
  o.alpha = alpha;
  o.beta = beta;
  o.delta = delta;
  o.n_max = n_max == 0 ? budget : n_max;
  o.scale_by_best = scale_by_best;
  o.signed_scale = signed_scale;
  o.legacy_budget = legacy_budget;
  return o;
}

gen::GeneratorConfig TrainingConfig::generator() const {
  gen::GeneratorConfig g;
  g.domain = domain;
  g.primitives = resolved_primitives();
  g.max_pages = domain == gen::Domain::Web ? max_pages : 1;
  g.budget = budget;
  g.hidden = generator_hidden;
  g.skip_init = skip_init;
  return g;
}

nn::OptimizerConfig TrainingConfig::learner_optimizer() const {
  nn::OptimizerConfig o;
  o.kind = nn::parse_optimizer_kind(optimizer);
  o.learning_rate = learner_lr;
  o.entropy_coeff = learner_entropy;
  o.clip_norm = clip_norm;
  return o;
}

nn::OptimizerConfig TrainingConfig::generator_optimizer() const {
  nn::OptimizerConfig o = learner_optimizer();
  o.learning_rate = generator_lr;
  o.entropy_coeff = generator_entropy;
  return o;
}

petri::RewardContract TrainingConfig::contract() const {
  petri::RewardContract c;
  c.step_penalty = step_penalty;
  c.binary_only = binary_only;
  return c;
}

namespace {

using Json = nlohmann::json;

/// Field table: name -> (reader, writer).
struct Field {
  std::function<void(TrainingConfig&, const Json&)> read;
  std::function<Json(const TrainingConfig&)> write;
};

template <class T>
Field plain(T TrainingConfig::*member) {
  return {[member](TrainingConfig& c, const Json& j) { c.*member = j.get<T>(); },
          [member](const TrainingConfig& c) { return Json(c.*member); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table{
      {"algo", {[](TrainingConfig& c, const Json& j) { c.algo = parse_algo(j.get<std::string>()); },
                [](const TrainingConfig& c) { return Json(to_string(c.algo)); }}},
      {"domain", {[](TrainingConfig& c, const Json& j) { c.domain = gen::parse_domain(j.get<std::string>()); },
                  [](const TrainingConfig& c) { return Json(gen::to_string(c.domain)); }}},
      {"population", plain(&TrainingConfig::population)},
      {"episodes", plain(&TrainingConfig::episodes)},
      {"budget", plain(&TrainingConfig::budget)},
      {"max_pages", plain(&TrainingConfig::max_pages)},
      {"gamma", plain(&TrainingConfig::gamma)},
      {"alpha", plain(&TrainingConfig::alpha)},
      {"beta", plain(&TrainingConfig::beta)},
      {"delta", plain(&TrainingConfig::delta)},
      {"n_max", plain(&TrainingConfig::n_max)},
      {"scale_by_best", plain(&TrainingConfig::scale_by_best)},
      {"signed_scale", plain(&TrainingConfig::signed_scale)},
      {"legacy_budget", plain(&TrainingConfig::legacy_budget)},
      {"b_paired", plain(&TrainingConfig::b_paired)},
      {"step_penalty", plain(&TrainingConfig::step_penalty)},
      {"binary_only", plain(&TrainingConfig::binary_only)},
      {"base_steps", plain(&TrainingConfig::base_steps)},
      {"steps_per_field", plain(&TrainingConfig::steps_per_field)},
      {"grid_horizon", plain(&TrainingConfig::grid_horizon)},
      {"optimizer", plain(&TrainingConfig::optimizer)},
      {"learner_lr", plain(&TrainingConfig::learner_lr)},
      {"generator_lr", plain(&TrainingConfig::generator_lr)},
      {"learner_entropy", plain(&TrainingConfig::learner_entropy)},
      {"generator_entropy", plain(&TrainingConfig::generator_entropy)},
      {"clip_norm", plain(&TrainingConfig::clip_norm)},
      {"baseline_decay", plain(&TrainingConfig::baseline_decay)},
      {"iterations", plain(&TrainingConfig::iterations)},
      {"seed", {[](TrainingConfig& c, const Json& j) {
                  if (j.is_null())
                    c.seed.reset();
                  else
                    c.seed = j.get<std::uint64_t>();
                },
                [](const TrainingConfig& c) { return c.seed ? Json(*c.seed) : Json(nullptr); }}},
      {"generator_hidden", plain(&TrainingConfig::generator_hidden)},
      {"learner_hidden", plain(&TrainingConfig::learner_hidden)},
      {"learner_embed", plain(&TrainingConfig::learner_embed)},
      {"learner_buckets", plain(&TrainingConfig::learner_buckets)},
      {"primitives", plain(&TrainingConfig::primitives)},
      {"skip_init", plain(&TrainingConfig::skip_init)},
      {"cl_p0", plain(&TrainingConfig::cl_p0)},
      {"freeze_learners", plain(&TrainingConfig::freeze_learners)},
      {"eval_every", plain(&TrainingConfig::eval_every)},
      {"eval_episodes", plain(&TrainingConfig::eval_episodes)},
      {"eval_envs", plain(&TrainingConfig::eval_envs)},
      {"eval_levels", plain(&TrainingConfig::eval_levels)},
      {"checkpoint_every", plain(&TrainingConfig::checkpoint_every)},
      {"workers", plain(&TrainingConfig::workers)},
  };
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& [name, f] : fields())
    if (name == key) return &f;
  return nullptr;
}

void read_field(TrainingConfig& cfg, const std::string& key, const Json& value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown config key '" + key + "'");
  try {
    f->read(cfg, value);
  } catch (const Json::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const TrainingConfig& cfg) {
  Json j = Json::object();
  for (const auto& [name, f] : fields()) j[name] = f.write(cfg);
  return j;
}

TrainingConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  TrainingConfig cfg;
  for (const auto& [key, value] : doc.items()) read_field(cfg, key, value);
  return cfg;
}

void apply_override(TrainingConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  read_field(cfg, key, value);
}

TrainingConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config " + path + " is not valid JSON");
  return config_from_json(doc);
}

}  // namespace codelab::train
