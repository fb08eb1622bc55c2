#include "codelab/train/trainer.hpp"

#include "codelab/errors.hpp"
#include "codelab/gen/objectives.hpp"
#include "codelab/nn/checkpoint.hpp"
#include "codelab/train/baselines.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numeric>
#include <ostream>
#include <thread>

namespace codelab::train {

nn::ParamRefs Agent::params() { return web ? web->params() : grid->params(); }

std::uint64_t resolve_seed(const TrainingConfig& config) {
  if (config.seed) return *config.seed;
  if (const char* env = std::getenv("CODE_LAB_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && end != env) return v;
    throw ConfigError("CODE_LAB_SEED is not an unsigned integer");
  }
  throw ConfigError("seed: a seed is required (config, --seed or CODE_LAB_SEED)");
}

namespace {

// Stream ids under the iteration stream.
constexpr std::uint64_t kDesignStream = 0;
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kActStream = 2;
constexpr std::uint64_t kProgressStream = 3;

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

Trainer::Trainer(TrainingConfig config) : config_(std::move(config)) {
  config_.check();
  seed_ = resolve_seed(config_);
  const RandomStream root(seed_);
  if (uses_generator(config_.algo)) {
    RandomStream g = root.split(1);
    generator_ = std::make_unique<gen::GeneratorParams>(config_.generator(), g);
    generator_opt_.emplace(config_.generator_optimizer());
  }
  for (std::size_t i = 0; i < config_.population; ++i) {
    RandomStream r = root.split(100 + i);
    Agent a{nullptr, nullptr, nn::Optimizer(config_.learner_optimizer())};
    if (config_.domain == gen::Domain::Web) {
      a.web = std::make_unique<learner::WebLearnerParams>(
          learner::WebLearnerConfig{config_.learner_hidden, config_.learner_embed, config_.learner_buckets}, r);
    } else {
      learner::GridLearnerConfig gc;
      gc.hidden = config_.learner_hidden;
      a.grid = std::make_unique<learner::GridLearnerParams>(gc, r);
    }
    agents_.push_back(std::move(a));
  }
}

IterationDesign Trainer::make_design(RandomStream& rng) {
  IterationDesign d;
  const auto prims = config_.resolved_primitives();
  const bool web = config_.domain == gen::Domain::Web;
  switch (config_.algo) {
    case Algo::Dr:
      if (web)
        d.web = dr_design(rng, prims, config_.max_pages, config_.budget);
      else
        d.grid = dr_grid_design(rng, prims, config_.budget);
      break;
    case Algo::Cl: {
      const double p = cl_probability(iteration_, config_.iterations, config_.cl_p0);
      if (web)
        d.web = cl_design(rng, prims, config_.max_pages, p);
      else
        d.grid = cl_grid_design(rng, prims, p);
      break;
    }
    default:
      d.rollout = gen::sample_design(*generator_, rng);
      d.web = d.rollout->web;
      d.grid = d.rollout->grid;
  }
  return d;
}

std::vector<learner::Trajectory> Trainer::episodes_for(Agent& a, const web::RenderedSite* site,
                                                       const grid::GridState* state, RandomStream rng,
                                                       std::size_t count) {
  std::vector<learner::Trajectory> out;
  const petri::RewardContract contract = config_.contract();
  for (std::size_t m = 0; m < count; ++m) {
    RandomStream ep = rng.split(m);
    if (site)
      out.push_back(learner::run_web_episode(*a.web, *site, contract, ep));
    else
      out.push_back(learner::run_grid_episode(*a.grid, *state, ep));
  }
  return out;
}

std::vector<std::vector<learner::Trajectory>> Trainer::collect(const IterationDesign& design, RandomStream& env_rng,
                                                               const RandomStream& act_rng) {
  std::optional<web::RenderedSite> site;
  std::optional<grid::GridState> state;
  if (config_.domain == gen::Domain::Web) {
    site = web::render(design.web, env_rng, {config_.base_steps, config_.steps_per_field});
  } else {
    grid::GridConfig gc;
    gc.horizon = config_.grid_horizon;
    gc.contract = config_.contract();
    state = grid::build_grid(design.grid, env_rng, gc);
  }
  const web::RenderedSite* sp = site ? &*site : nullptr;
  const grid::GridState* gp = state ? &*state : nullptr;

  std::vector<std::vector<learner::Trajectory>> batches(agents_.size());
  const std::size_t workers = std::min(config_.workers, agents_.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < agents_.size(); ++i)
      batches[i] = episodes_for(agents_[i], sp, gp, act_rng.split(i), config_.episodes);
    return batches;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < agents_.size(); i += workers)
          batches[i] = episodes_for(agents_[i], sp, gp, act_rng.split(i), config_.episodes);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return batches;
}

MetricsRecord Trainer::step() {
  const auto start = std::chrono::steady_clock::now();
  const RandomStream it_rng = RandomStream(seed_).split(1000 + iteration_);
  RandomStream design_rng = it_rng.split(kDesignStream);
  RandomStream env_rng = it_rng.split(kEnvStream);
  const RandomStream act_rng = it_rng.split(kActStream);
  const auto iter = static_cast<std::int64_t>(iteration_);

  IterationDesign design = make_design(design_rng);
  auto batches = collect(design, env_rng, act_rng);

  MetricsRecord rec;
  rec.iteration = iteration_;
  rec.algo = to_string(config_.algo);
  std::vector<std::vector<double>> episode_returns(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    for (const auto& t : batches[i]) episode_returns[i].push_back(t.total_return);
    rec.agent_returns.push_back(mean(episode_returns[i]));
  }

  if (!config_.freeze_learners)
    for (std::size_t i = 0; i < agents_.size(); ++i)
      learner::update_learner(agents_[i].params(), batches[i], config_.gamma, agents_[i].optimizer, iter);
  batches.clear();

  rec.best_agent = gen::best_index(rec.agent_returns);
  rec.best_return = rec.agent_returns[rec.best_agent];
  rec.regret = agents_.size() >= 2 ? gen::pop_regret(rec.agent_returns) : 0.0;

  if (design.rollout) {
    const gen::ObjectiveConfig obj = config_.objective();
    rec.n_hat = gen::skip_mass(*design.rollout);
    const double alpha = config_.algo == Algo::PopRegretOnly ? 0.0 : config_.alpha;
    const bool with_difficulty = config_.algo == Algo::Code || (config_.algo == Algo::Paired && config_.b_paired);
    double score = 0.0;
    switch (config_.algo) {
      case Algo::Code:
      case Algo::PopRegretOnly:
        score = rec.regret;
        break;
      case Algo::Paired:
        rec.regret = gen::paired_regret(episode_returns[0], episode_returns[1]);
        score = rec.regret;
        break;
      case Algo::Minimax:
        score = -rec.agent_returns[0];
        break;
      case Algo::Alp: {
        // Progress of agent 0 on this environment across its update.
        RandomStream env_again = it_rng.split(kEnvStream);
        auto after = collect(design, env_again, it_rng.split(kProgressStream));
        std::vector<double> cur;
        for (const auto& t : after[0]) cur.push_back(t.total_return);
        score = gen::alp_reward(rec.agent_returns[0], mean(cur));
        break;
      }
      default:
        break;
    }
    gen::GeneratorSignal signal;
    const double weight = with_difficulty ? 1.0 - alpha : 1.0;
    if (!baseline_) baseline_ = score;
    signal.score_reward = weight * (score - *baseline_);
    baseline_ = config_.baseline_decay * *baseline_ + (1.0 - config_.baseline_decay) * score;
    if (with_difficulty) {
      rec.difficulty = gen::difficulty_objective(rec.best_return, rec.n_hat, obj);
      rec.generator_reward = gen::generator_reward(score, rec.difficulty, alpha);
      double scale = 1.0;
      if (obj.scale_by_best) scale = obj.signed_scale ? rec.best_return : std::abs(rec.best_return);
      signal.skip_mass_coeff =
          alpha * gen::difficulty_sign(rec.best_return, obj) * scale / static_cast<double>(obj.n_max);
    } else {
      rec.generator_reward = score;
    }
    if (obj.legacy_budget) signal.skip_mass_coeff += rec.best_return;
    gen::update_generator(*generator_, *design.rollout, signal, *generator_opt_, iter);
  }

  if (config_.domain == gen::Domain::Web) {
    rec.non_skip = web::non_skip_count(design.web);
    rec.active_count = web::active_count(design.web);
    rec.passive_count = web::passive_count(design.web);
  } else {
    rec.non_skip = rec.active_count = design.grid.subtasks.size();
  }

  ++iteration_;
  if (config_.eval_every > 0 && iteration_ % config_.eval_every == 0)
    rec.eval_success = evaluate(rec.best_agent, config_.eval_episodes, seed_ ^ 0x5eedull).mean_rate();
  last_design_ = std::move(design);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

EvalTable Trainer::evaluate(std::size_t agent, std::size_t episodes, std::uint64_t seed) {
  Agent& a = agents_.at(agent);
  if (a.web) {
    WebEvalOptions opts;
    opts.envs = config_.eval_envs;
    opts.levels = config_.eval_levels;
    opts.render = {config_.base_steps, config_.steps_per_field};
    return evaluate_web(web_learner_policy(*a.web, config_.contract()), web::test_suite(), episodes, seed, opts);
  }
  grid::GridConfig gc;
  gc.horizon = config_.grid_horizon;
  gc.contract = config_.contract();
  return evaluate_grid(grid_learner_policy(*a.grid), episodes, seed, gc);
}

void Trainer::save_checkpoint(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (generator_) nn::save_checkpoint(dir / "generator.json", generator_->params());
  for (std::size_t i = 0; i < agents_.size(); ++i)
    nn::save_checkpoint(dir / ("agent_" + std::to_string(i) + ".json"), agents_[i].params());
  std::ofstream cfg(dir / "config.json");
  cfg << to_json(config_).dump(2) << '\n';
  std::ofstream state(dir / "state.json");
  state << nlohmann::json{{"iteration", iteration_}, {"baseline", baseline_ ? nlohmann::json(*baseline_) : nlohmann::json(nullptr)}}.dump(2) << '\n';
  if (!cfg || !state) throw IoError("cannot write checkpoint under " + dir.string());
}

void Trainer::load_checkpoint(const std::filesystem::path& dir) {
  if (generator_) nn::load_checkpoint(dir / "generator.json", generator_->params());
  for (std::size_t i = 0; i < agents_.size(); ++i)
    nn::load_checkpoint(dir / ("agent_" + std::to_string(i) + ".json"), agents_[i].params());
  std::ifstream in(dir / "state.json");
  if (in) {
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (!j.is_discarded()) {
      iteration_ = j.value("iteration", std::size_t{0});
      if (j.contains("baseline") && !j["baseline"].is_null()) baseline_ = j["baseline"].get<double>();
    }
  }
}

std::vector<MetricsRecord> Trainer::run(const std::filesystem::path& out_dir, std::ostream* log) {
  std::filesystem::create_directories(out_dir);
  MetricsSink sink(out_dir / "metrics.csv", agents_.size());
  std::ofstream timing(out_dir / "timing.csv");
  timing << "iter,wall_seconds\n";
  std::vector<std::string> files{"metrics.csv", "timing.csv"};
  std::vector<MetricsRecord> records;
  try {
    while (iteration_ < config_.iterations) {
      MetricsRecord r = step();
      sink.emit(r);
      timing << r.iteration << ',' << format_double(r.wall_seconds) << '\n';
      if (log && (r.iteration % 50 == 0 || iteration_ == config_.iterations))
        *log << "iter " << r.iteration << " regret " << r.regret << " best " << r.best_return << " non_skip "
             << r.non_skip << '\n';
      records.push_back(std::move(r));
      if (config_.checkpoint_every > 0 && iteration_ % config_.checkpoint_every == 0) {
        const std::string name = "checkpoints/iter_" + std::to_string(iteration_);
        save_checkpoint(out_dir / name);
        files.push_back(name);
      }
    }
  } catch (const Error& e) {
    std::ofstream fault(out_dir / "fault.txt");
    fault << e.what() << '\n';
    throw;
  }
  save_checkpoint(out_dir / "final");
  files.push_back("final");
  const EvalTable table = evaluate(records.empty() ? 0 : records.back().best_agent, config_.eval_episodes, seed_);
  std::ofstream eval(out_dir / "eval.json");
  eval << table.to_json().dump(2) << '\n';
  files.push_back("eval.json");
  std::ofstream manifest(out_dir / "manifest.json");
  manifest << nlohmann::json{{"format", "codelab-run"},
                             {"metrics_schema", kMetricsSchema},
                             {"seed", seed_},
                             {"iterations", iteration_},
                             {"config", to_json(config_)},
                             {"files", files}}
                  .dump(2)
           << '\n';
  return records;
}

}  // namespace codelab::train
