#include "codelab/gen/objectives.hpp"

#include "codelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace codelab::gen {

void ObjectiveConfig::check() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
  if (delta > beta) throw ConfigError("delta must not exceed beta");
  if (n_max == 0) throw ConfigError("n_max must be positive");
}

std::size_t best_index(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

namespace {

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double pop_regret(std::span<const double> mean_returns) {
  if (mean_returns.size() < 2) throw ConfigError("population regret needs at least 2 agents");
  // mean of (max - r_i) summed in sorted order: order-free, nonnegative, and
  // exactly |r1 - r2| / 2 for two agents
  std::vector<double> sorted(mean_returns.begin(), mean_returns.end());
  std::sort(sorted.begin(), sorted.end());
  const double best = sorted.back();
  double acc = 0.0;
  for (double r : sorted) acc += best - r;
  return acc / static_cast<double>(mean_returns.size());
}

double paired_regret(std::span<const double> antagonist, std::span<const double> protagonist) {
  if (antagonist.empty() || protagonist.empty()) throw ConfigError("paired regret needs returns from both agents");
  return antagonist[best_index(antagonist)] - mean(protagonist);
}

int difficulty_sign(double best_return, const ObjectiveConfig& cfg) {
  return (best_return > cfg.beta ? 1 : 0) - (best_return < cfg.delta ? 1 : 0);
}

double difficulty_objective(double best_return, double n_hat, const ObjectiveConfig& cfg) {
  if (cfg.n_max == 0) throw ConfigError("n_max must be positive");
  double value = difficulty_sign(best_return, cfg) * n_hat / static_cast<double>(cfg.n_max);
  if (cfg.scale_by_best) value *= cfg.signed_scale ? best_return : std::abs(best_return);
  return value;
}

double legacy_budget_loss(double sum_log_skip, double best_return) { return best_return * sum_log_skip; }

double generator_reward(double regret, double difficulty, double alpha) {
  return (1.0 - alpha) * regret + alpha * difficulty;
}

double alp_reward(double prev_return, double cur_return) { return std::abs(cur_return - prev_return); }

}  // namespace codelab::gen
