#include "codelab/analysis/chain.hpp"
#include "codelab/errors.hpp"
#include "codelab/gen/generator.hpp"
#include "codelab/nn/checkpoint.hpp"
#include "codelab/train/config.hpp"
#include "codelab/train/trainer.hpp"
#include "codelab/web/html.hpp"
#include "codelab/web/render.hpp"
#include "codelab/web/suite.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace codelab;
namespace fs = std::filesystem;

namespace {

struct UsageError : Error {
  using Error::Error;
};

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void write_manifest(const fs::path& out, const std::string& command, const nlohmann::json& args,
                    const std::vector<std::string>& files) {
  write_file(out / "manifest.json",
             nlohmann::json{{"format", "codelab-" + command}, {"args", args}, {"files", files}}.dump(2) + "\n");
}

struct TrainArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::string> algo, domain;
  std::optional<double> alpha, beta, delta;
  std::optional<std::size_t> m, iterations, population, workers;
  std::optional<std::uint64_t> seed;
  std::string out = "runs/latest";
  bool quiet = false;
};

int run_train(const TrainArgs& a) {
  train::TrainingConfig cfg = a.config.empty() ? train::TrainingConfig{} : train::load_config(a.config);
  auto set = [&](const std::string& key, const std::string& value) { train::apply_override(cfg, key + "=" + value); };
  if (a.algo) set("algo", "\"" + *a.algo + "\"");
  if (a.domain) set("domain", "\"" + *a.domain + "\"");
  if (a.alpha) cfg.alpha = *a.alpha;
  if (a.beta) cfg.beta = *a.beta;
  if (a.delta) cfg.delta = *a.delta;
  if (a.m) cfg.episodes = *a.m;
  if (a.iterations) cfg.iterations = *a.iterations;
  if (a.population) cfg.population = *a.population;
  if (a.workers) cfg.workers = *a.workers;
  for (const auto& o : a.overrides) train::apply_override(cfg, o);
  if (a.seed) cfg.seed = *a.seed;
  cfg.seed = train::resolve_seed(cfg);
  cfg.check();
  train::Trainer trainer(cfg);
  auto recs = trainer.run(a.out, a.quiet ? nullptr : &std::cerr);
  std::cout << "wrote " << recs.size() << " iterations to " << a.out << '\n';
  return 0;
}

struct EvalArgs {
  std::string checkpoint;
  std::string policy = "learner";
  std::string domain = "web";
  std::size_t agent = 0, episodes = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> envs;
  std::vector<int> levels{1, 2, 3, 4};
  std::string out;
};

int run_eval(const EvalArgs& a) {
  train::EvalTable table;
  if (a.policy == "learner") {
    if (a.checkpoint.empty()) throw UsageError("--checkpoint is required for the learner policy");
    fs::path dir = a.checkpoint;
    if (!fs::exists(dir / "config.json")) throw IoError("missing checkpoint: " + (dir / "config.json").string());
    auto cfg = train::load_config((dir / "config.json").string());
    if (!a.envs.empty()) cfg.eval_envs = a.envs;
    cfg.eval_levels = a.levels;
    train::Trainer t(cfg);
    t.load_checkpoint(dir);
    if (a.agent >= t.population()) throw UsageError("--agent out of range");
    table = t.evaluate(a.agent, a.episodes, a.seed);
  } else {
    const bool grid = gen::parse_domain(a.domain) == gen::Domain::Grid;
    if (a.policy == "scripted" || a.policy == "random") {
      const bool scripted = a.policy == "scripted";
      if (grid) {
        table = train::evaluate_grid(scripted ? train::grid_scripted_policy() : train::grid_random_policy(),
                                     a.episodes, a.seed);
      } else {
        train::WebEvalOptions opts;
        opts.envs = a.envs;
        opts.levels = a.levels;
        table = train::evaluate_web(scripted ? train::web_scripted_policy() : train::web_random_policy(),
                                    web::test_suite(), a.episodes, a.seed, opts);
      }
    } else {
      throw UsageError("unknown policy: " + a.policy);
    }
  }
  std::cout << table.to_text();
  const std::string json = table.to_json().dump(2) + "\n";
  if (!a.out.empty()) {
    write_file(fs::path(a.out) / "eval.json", json);
    write_manifest(a.out, "eval",
                   {{"checkpoint", a.checkpoint}, {"policy", a.policy}, {"episodes", a.episodes}, {"seed", a.seed}},
                   {"eval.json"});
  } else {
    std::cout << json;
  }
  return 0;
}

struct ChainArgs {
  std::size_t n_max = 6, l_max = 3;
  std::vector<std::string> ps{"0.3", "0.5", "0.7"};
  std::string rule = "forbidden";
  std::string out;
};

int run_chain(const ChainArgs& a) {
  auto rows = analysis::tabulate(a.n_max, a.l_max, a.ps, analysis::parse_origin_rule(a.rule));
  std::ostringstream os;
  analysis::write_chain_csv(os, rows);
  if (a.out.empty()) {
    std::cout << os.str();
  } else {
    write_file(fs::path(a.out) / "chain.csv", os.str());
    write_manifest(a.out, "analyze-chain", {{"n_max", a.n_max}, {"l_max", a.l_max}, {"p", a.ps}, {"rule", a.rule}},
                   {"chain.csv"});
  }
  return 0;
}

struct HtmlArgs {
  std::string env = "login";
  int level = 1;
  std::string design;
  std::uint64_t seed = 0;
  std::string out;
};

int run_html(const HtmlArgs& a) {
  web::WebsiteDesign design;
  if (!a.design.empty()) {
    std::ifstream in(a.design);
    if (!in) throw IoError("cannot read " + a.design);
    auto doc = nlohmann::json::parse(in);
    design = web::design_from_json(doc.contains("design") ? doc["design"] : doc);
  } else {
    const auto& suite = web::test_suite();
    auto lv = suite.find(a.level);
    if (lv == suite.end() || !lv->second.count(a.env))
      throw UsageError("no suite design for " + a.env + " level " + std::to_string(a.level));
    design = lv->second.at(a.env);
  }
  RandomStream rng(a.seed);
  auto site = web::render(design, rng);
  const std::string html = web::export_html(site);
  if (a.out.empty()) {
    std::cout << html;
  } else {
    write_file(fs::path(a.out) / "site.html", html);
    write_manifest(a.out, "export-html", {{"env", a.env}, {"level", a.level}, {"design", a.design}, {"seed", a.seed}},
                   {"site.html"});
  }
  return 0;
}

struct InspectArgs {
  std::string checkpoint;
  std::string config;
  std::vector<std::string> overrides;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_inspect(const InspectArgs& a) {
  train::TrainingConfig cfg;
  if (!a.checkpoint.empty()) {
    fs::path dir = a.checkpoint;
    if (!fs::exists(dir / "generator.json")) throw IoError("missing checkpoint: " + (dir / "generator.json").string());
    cfg = train::load_config((dir / "config.json").string());
  } else if (!a.config.empty()) {
    cfg = train::load_config(a.config);
  }
  for (const auto& o : a.overrides) train::apply_override(cfg, o);
  cfg.check();
  RandomStream init(a.seed);
  gen::GeneratorParams params(cfg.generator(), init);
  if (!a.checkpoint.empty()) nn::load_checkpoint(fs::path(a.checkpoint) / "generator.json", params.params());
  nlohmann::json designs = nlohmann::json::array();
  RandomStream rng = RandomStream(a.seed).split(7);
  for (std::size_t i = 0; i < a.count; ++i) {
    RandomStream r = rng.split(i);
    designs.push_back(gen::rollout_to_json(params, gen::sample_design(params, r)));
  }
  const std::string text = designs.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(fs::path(a.out) / "designs.json", text);
    write_manifest(a.out, "inspect-design", {{"checkpoint", a.checkpoint}, {"count", a.count}, {"seed", a.seed}},
                   {"designs.json"});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Environment generation and curriculum training lab"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a population against a design source");
  train->add_option("--config", ta.config, "Flat JSON config file")->check(CLI::ExistingFile);
  train->add_option("--set", ta.overrides, "Override key=value (repeatable)");
  train->add_option("--algo", ta.algo, "code, popregret_only, paired, minimax, dr, cl, alp");
  train->add_option("--domain", ta.domain, "web or grid");
  train->add_option("--alpha", ta.alpha);
  train->add_option("--beta", ta.beta);
  train->add_option("--delta", ta.delta);
  train->add_option("--m", ta.m, "Episodes per agent per iteration");
  train->add_option("--iterations", ta.iterations);
  train->add_option("--population", ta.population);
  train->add_option("--workers", ta.workers, "Collection threads");
  train->add_option("--seed", ta.seed, "Falls back to CODE_LAB_SEED");
  train->add_option("--out", ta.out, "Output directory");
  train->add_flag("--quiet", ta.quiet);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate on the held-out suite");
  eval->add_option("--checkpoint", ea.checkpoint, "Checkpoint directory");
  eval->add_option("--policy", ea.policy, "learner, scripted or random")
      ->check(CLI::IsMember({"learner", "scripted", "random"}));
  eval->add_option("--domain", ea.domain, "Domain for reference policies");
  eval->add_option("--agent", ea.agent);
  eval->add_option("--episodes", ea.episodes);
  eval->add_option("--seed", ea.seed);
  eval->add_option("--envs", ea.envs)->delimiter(',');
  eval->add_option("--levels", ea.levels)->delimiter(',');
  eval->add_option("--out", ea.out, "Output directory");

  ChainArgs ca;
  auto* chain = app.add_subcommand("analyze-chain", "Chain reachability table as CSV");
  chain->add_option("--n-max", ca.n_max)->check(CLI::PositiveNumber);
  chain->add_option("--l-max", ca.l_max);
  chain->add_option("--p", ca.ps, "Right-step probabilities")->delimiter(',');
  chain->add_option("--rule", ca.rule, "forbidden or stay")->check(CLI::IsMember({"forbidden", "stay"}));
  chain->add_option("--out", ca.out, "Output directory");

  HtmlArgs ha;
  auto* html = app.add_subcommand("export-html", "Render a suite page or design file to HTML");
  html->add_option("--env", ha.env);
  html->add_option("--level", ha.level);
  html->add_option("--design", ha.design, "Design JSON file")->check(CLI::ExistingFile);
  html->add_option("--seed", ha.seed);
  html->add_option("--out", ha.out, "Output directory");

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect-design", "Sample designs from a generator");
  inspect->add_option("--checkpoint", ia.checkpoint, "Checkpoint directory");
  inspect->add_option("--config", ia.config)->check(CLI::ExistingFile);
  inspect->add_option("--set", ia.overrides);
  inspect->add_option("--count", ia.count);
  inspect->add_option("--seed", ia.seed);
  inspect->add_option("--out", ia.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) return run_train(ta);
    if (*eval) return run_eval(ea);
    if (*chain) return run_chain(ca);
    if (*html) return run_html(ha);
    if (*inspect) return run_inspect(ia);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
