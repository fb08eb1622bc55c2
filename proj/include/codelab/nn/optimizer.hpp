#pragma once

#include "codelab/nn/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace codelab::nn {

enum class OptimizerKind { Sgd, Adam };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Sgd;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Global gradient-norm clip; <= 0 disables clipping.
  double clip_norm = 5.0;
  double entropy_coeff = 0.01;
};

/// Per-parameter moment accumulators plus the update rule.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {});

  const OptimizerConfig& config() const noexcept { return config_; }
  std::int64_t steps() const noexcept { return steps_; }

  /// Clips, applies one update from the accumulated `grad` tensors, then zeroes them.
  /// Throws TrainingFault when any gradient entry is non-finite.
  void apply_update(const ParamRefs& params, std::int64_t iteration);

 private:
  OptimizerConfig config_;
  std::int64_t steps_ = 0;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
};

}  // namespace codelab::nn
