#include "codelab/gen/generator.hpp"

#include "codelab/errors.hpp"
#include "codelab/web/catalog.hpp"

#include <cmath>

namespace codelab::gen {

using nn::Activation;
using nn::Tape;
using nn::Var;
using nn::Vector;

std::string to_string(Domain d) { return d == Domain::Web ? "web" : "grid"; }

Domain parse_domain(const std::string& name) {
  if (name == "web") return Domain::Web;
  if (name == "grid") return Domain::Grid;
  throw ConfigError("unknown domain '" + name + "'");
}

GeneratorConfig default_generator_config(Domain domain) {
  GeneratorConfig c;
  c.domain = domain;
  if (domain == Domain::Web) {
    c.primitives = web::catalog_names();
  } else {
    for (grid::Subtask s : grid::all_subtasks()) c.primitives.push_back(grid::to_string(s));
    c.max_pages = 1;
  }
  return c;
}

namespace {

std::size_t input_width(const GeneratorConfig& c) {
  if (c.domain == Domain::Grid) return c.choices();
  return c.choices() + c.max_pages + 1;
}

void check_config(const GeneratorConfig& c) {
  if (c.primitives.empty()) throw ConfigError("generator needs at least one primitive");
  if (c.budget == 0) throw ConfigError("design budget must be positive");
  if (c.hidden == 0) throw ConfigError("generator hidden width must be positive");
  if (c.domain == Domain::Web) {
    if (c.max_pages == 0) throw ConfigError("max_pages must be positive");
    web::restricted_catalog(c.primitives);
  } else {
    for (const auto& n : c.primitives) grid::parse_subtask(n);
  }
  if (c.skip_init >= 1.0) throw ConfigError("skip_init must be below 1");
}

}  // namespace

GeneratorParams::GeneratorParams(GeneratorConfig cfg, RandomStream& rng) : config(std::move(cfg)) {
  check_config(config);
  const std::size_t H = config.hidden;
  f0 = nn::DenseStack("gen/f0", H, H, H, rng, Activation::Tanh);
  if (config.domain == Domain::Web) fK = nn::DenseStack("gen/fK", H, H, config.max_pages + 1, rng);
  core = nn::RecurrentCell("gen/core", H, H, rng);
  fP = nn::DenseStack("gen/fP", H, H, config.choices(), rng);
  if (config.domain == Domain::Web) fL = nn::DenseStack("gen/fL", H, H, config.max_pages, rng);
  fI = nn::DenseStack("gen/fI", input_width(config), H, H, rng, Activation::Tanh);
  if (config.skip_init > 0.0) {
    // Zero the output bias, then lift SKIP so that with small logits pi(SKIP) ~= skip_init.
    auto b = fP.layers.back().bias.value.data();
    for (double& x : b) x = 0.0;
    const double others = static_cast<double>(config.primitives.size());
    b[config.skip_index()] = std::log(config.skip_init / (1.0 - config.skip_init) * others);
  }
}

nn::ParamRefs GeneratorParams::params() {
  nn::ParamRefs out;
  f0.collect(out);
  if (config.domain == Domain::Web) fK.collect(out);
  core.collect(out);
  fP.collect(out);
  if (config.domain == Domain::Web) fL.collect(out);
  fI.collect(out);
  return out;
}

std::size_t GeneratorParams::count() { return nn::count_parameters(params()); }

double DesignRollout::total_log_prob() const {
  double s = page_count_log_prob;
  for (double x : log_probs) s += x;
  return s;
}

std::size_t DesignRollout::non_skip() const {
  std::size_t n = 0;
  for (const auto& p : pages) n += p.has_value();
  return n;
}

double skip_mass(const DesignRollout& rollout) {
  double s = 0.0;
  for (double x : rollout.skip_log_probs) s -= x;
  return s;
}

namespace {

struct Trace {
  Var log_prob;
  Var n_hat;
  Var entropy;
};

/// Runs the generator on `tape`. With `rng` it samples and fills `out`; otherwise
/// it scores the choices already in `out`.
Trace run(Tape& tape, GeneratorParams& p, DesignRollout& out, RandomStream* rng) {
  const GeneratorConfig& c = p.config;
  const std::size_t H = c.hidden;
  const bool web = c.domain == Domain::Web;
  if (rng) {
    out.noise.resize(H);
    for (double& x : out.noise) x = rng->normal();
  } else if (out.noise.size() != H || out.actions.size() != c.budget) {
    throw DimensionError("rollout does not match the generator configuration");
  }
  Vector noise = Eigen::Map<const Vector>(out.noise.data(), static_cast<Eigen::Index>(H));
  Var h0 = nn::stack_forward(tape, p.f0, tape.constant(noise));

  std::vector<Var> lp_terms, skip_terms, ent_terms;
  std::size_t k = 1;
  if (web) {
    Var logits = nn::stack_forward(tape, p.fK, h0);
    auto choice = rng ? nn::categorical_head(tape, logits, *rng) : nn::categorical_score(tape, logits, out.num_pages);
    k = choice.index;
    lp_terms.push_back(choice.log_prob);
    ent_terms.push_back(choice.entropy);
    if (rng) {
      out.num_pages = k;
      out.page_count_log_prob = tape.scalar(choice.log_prob);
      out.entropy_k = tape.scalar(choice.entropy);
    }
  }
  if (rng) {
    out.actions.assign(c.budget, c.skip_index());
    out.pages.assign(c.budget, std::nullopt);
    out.log_probs.assign(c.budget, 0.0);
    out.skip_log_probs.assign(c.budget, 0.0);
    out.entropies.assign(c.budget, 0.0);
  }

  if (k > 0) {
    nn::RecurrentState state{h0, tape.constant(Vector::Zero(static_cast<Eigen::Index>(H)))};
    Var x = tape.constant(Vector::Zero(static_cast<Eigen::Index>(H)));
    for (std::size_t i = 0; i < c.budget; ++i) {
      state = nn::recurrent_step(tape, p.core, x, state);
      Var logits = nn::stack_forward(tape, p.fP, state.h);
      auto prim = rng ? nn::categorical_head(tape, logits, *rng) : nn::categorical_score(tape, logits, out.actions[i]);
      Var skip_lp = tape.element(prim.log_probs, c.skip_index());
      Var step_lp = prim.log_prob;
      Var step_ent = prim.entropy;
      std::optional<std::size_t> page;
      if (prim.index != c.skip_index()) {
        if (web) {
          Var page_logits = tape.slice(nn::stack_forward(tape, p.fL, state.h), 0, k);
          auto pg = rng ? nn::categorical_head(tape, page_logits, *rng)
                        : nn::categorical_score(tape, page_logits, out.pages[i].value());
          page = pg.index;
          step_lp = tape.add(step_lp, pg.log_prob);
          step_ent = tape.add(step_ent, pg.entropy);
        } else {
          page = 0;
        }
      } else if (!rng && out.pages[i]) {
        throw DimensionError("rollout has a page for a SKIP step");
      }
      lp_terms.push_back(step_lp);
      skip_terms.push_back(skip_lp);
      ent_terms.push_back(step_ent);
      if (rng) {
        out.actions[i] = prim.index;
        out.pages[i] = page;
        out.log_probs[i] = tape.scalar(step_lp);
        out.skip_log_probs[i] = tape.scalar(skip_lp);
        out.entropies[i] = tape.scalar(step_ent);
      }
      if (i + 1 == c.budget) break;
      Vector in = Vector::Zero(static_cast<Eigen::Index>(input_width(c)));
      in[static_cast<Eigen::Index>(prim.index)] = 1.0;
      if (web) {
        if (page) in[static_cast<Eigen::Index>(c.choices() + *page)] = 1.0;
        in[static_cast<Eigen::Index>(c.choices() + c.max_pages)] =
            static_cast<double>(k) / static_cast<double>(c.max_pages);
      }
      x = nn::stack_forward(tape, p.fI, tape.constant(in));
    }
  }

  Trace t;
  t.log_prob = lp_terms.empty() ? tape.constant_scalar(0.0) : tape.add_n(lp_terms);
  t.n_hat = skip_terms.empty() ? tape.constant_scalar(0.0) : tape.scale(tape.add_n(skip_terms), -1.0);
  t.entropy = ent_terms.empty() ? tape.constant_scalar(0.0) : tape.add_n(ent_terms);

  if (rng) {
    out.web = {};
    out.grid = {};
    if (web) {
      out.web.num_pages = k;
      for (std::size_t i = 0; i < c.budget; ++i) {
        if (out.pages[i])
          out.web.placements.push_back({c.primitives[out.actions[i]], *out.pages[i]});
        else
          out.web.placements.push_back({web::kSkip, 0});
      }
    } else {
      for (std::size_t i = 0; i < c.budget; ++i)
        if (out.pages[i]) out.grid.subtasks.insert(grid::parse_subtask(c.primitives[out.actions[i]]));
      out.grid = grid::closure(out.grid);
    }
  }
  return t;
}

}  // namespace

DesignRollout sample_design(GeneratorParams& params, RandomStream& rng) {
  Tape tape;
  DesignRollout out;
  run(tape, params, out, &rng);
  return out;
}

RolloutScore score_rollout(Tape& tape, GeneratorParams& params, const DesignRollout& rollout) {
  DesignRollout copy = rollout;
  Trace t = run(tape, params, copy, nullptr);
  return {t.log_prob, t.n_hat, t.entropy};
}

void update_generator(GeneratorParams& params, const DesignRollout& rollout, const GeneratorSignal& signal,
                      nn::Optimizer& optimizer, std::int64_t iteration) {
  const nn::ParamRefs refs = params.params();
  nn::zero_grad(refs);
  Tape tape;
  RolloutScore s = score_rollout(tape, params, rollout);
  std::vector<Var> terms{tape.scale(s.log_prob, -signal.score_reward), tape.scale(s.n_hat, -signal.skip_mass_coeff),
                         tape.scale(s.entropy, -optimizer.config().entropy_coeff)};
  Var loss = tape.add_n(terms);
  if (!std::isfinite(tape.scalar(loss))) throw TrainingFault("generator loss is not finite", iteration);
  tape.backward(loss);
  optimizer.apply_update(refs, iteration);
}

void update_generator(GeneratorParams& params, const DesignRollout& rollout, double reward,
                      nn::Optimizer& optimizer, std::int64_t iteration) {
  update_generator(params, rollout, GeneratorSignal{reward, 0.0}, optimizer, iteration);
}

nlohmann::json rollout_to_json(const GeneratorParams& params, const DesignRollout& rollout) {
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t i = 0; i < rollout.actions.size(); ++i) {
    const bool skip = rollout.actions[i] == params.config.skip_index();
    nlohmann::json s{{"primitive", skip ? web::kSkip : params.config.primitives[rollout.actions[i]]},
                     {"log_prob", rollout.log_probs[i]},
                     {"skip_log_prob", rollout.skip_log_probs[i]}};
    if (rollout.pages[i]) s["page"] = *rollout.pages[i];
    steps.push_back(s);
  }
  nlohmann::json j{{"domain", to_string(params.config.domain)},
                   {"steps", steps},
                   {"n_hat", skip_mass(rollout)},
                   {"log_prob", rollout.total_log_prob()}};
  if (params.config.domain == Domain::Web) {
    j["pages"] = rollout.num_pages;
    j["page_count_log_prob"] = rollout.page_count_log_prob;
    j["design"] = web::to_json(rollout.web);
  } else {
    j["design"] = grid::to_json(rollout.grid);
  }
  return j;
}

}  // namespace codelab::gen
