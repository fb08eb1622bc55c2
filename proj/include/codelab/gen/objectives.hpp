#pragma once

#include <cstddef>
#include <span>

namespace codelab::gen {

struct ObjectiveConfig {
  double alpha = 0.8;
  double beta = 0.0;
  double delta = 0.0;
  std::size_t n_max = 10;
  /// Multiply the difficulty term by the best return (|R|, or R when signed_scale).
  bool scale_by_best = false;
  bool signed_scale = false;
  /// Add the older R_best * sum log pi(SKIP) budget loss.
  bool legacy_budget = false;

  /// Throws ConfigError when delta > beta, alpha is outside [0,1] or n_max is 0.
  void check() const;
};

/// max - mean over per-agent mean returns. Throws ConfigError for fewer than 2 agents.
double pop_regret(std::span<const double> mean_returns);

/// max antagonist return - mean protagonist return.
double paired_regret(std::span<const double> antagonist, std::span<const double> protagonist);

/// Sign of the difficulty term: +1 above beta, -1 below delta, else 0.
int difficulty_sign(double best_return, const ObjectiveConfig& cfg);

/// difficulty_sign * n_hat / n_max, optionally scaled by the best return.
double difficulty_objective(double best_return, double n_hat, const ObjectiveConfig& cfg);

/// R_best * sum log pi(SKIP); a quantity to minimise.
double legacy_budget_loss(double sum_log_skip, double best_return);

double generator_reward(double regret, double difficulty, double alpha);

/// |cur - prev|.
double alp_reward(double prev_return, double cur_return);

/// Index of the largest value; ties go to the lowest index.
std::size_t best_index(std::span<const double> values);

}  // namespace codelab::gen
