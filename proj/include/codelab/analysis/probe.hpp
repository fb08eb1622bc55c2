#pragma once

#include "codelab/train/trainer.hpp"

#include <json.hpp>

#include <cstddef>
#include <vector>

namespace codelab::analysis {

struct ProbeReport {
  std::vector<double> non_skip_fraction;  // per iteration, non-SKIP count / budget
  std::vector<double> difficulty;
  std::vector<double> best_return;
  std::size_t window = 100;

  double first_mean() const;
  double last_mean() const;
  double mean_difficulty() const;
  /// Pearson correlation between the non-SKIP fraction and whether the best agent beat beta.
  double success_correlation(double beta = 0.0) const;
  nlohmann::json to_json() const;
};

/// Steps the trainer `iterations` times recording the design-size trajectory.
ProbeReport degenerate_case_probe(train::Trainer& trainer, std::size_t iterations, std::size_t window = 100);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace codelab::analysis
