#include "codelab/nn/optimizer.hpp"

#include "codelab/errors.hpp"

#include <cmath>

namespace codelab::nn {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::Sgd ? "sgd" : "adam"; }

Optimizer::Optimizer(OptimizerConfig config) : config_(config) {
  if (!(config_.learning_rate >= 0.0)) throw ConfigError("learning rate must be nonnegative");
  if (config_.entropy_coeff < 0.0) throw ConfigError("entropy coefficient must be nonnegative");
}

void Optimizer::apply_update(const ParamRefs& params, std::int64_t iteration) {
  for (const Parameter* p : params)
    if (!p->grad.all_finite())
      throw TrainingFault("non-finite gradient in " + p->name, iteration);

  double scale = 1.0;
  if (config_.clip_norm > 0.0) {
    const double norm = global_grad_norm(params);
    if (norm > config_.clip_norm) scale = config_.clip_norm / norm;
  }

  if (config_.kind == OptimizerKind::Adam && first_.empty()) {
    for (const Parameter* p : params) {
      first_.emplace_back(p->value);
      first_.back().set_zero();
      second_.emplace_back(p->value);
      second_.back().set_zero();
    }
  }
  if (config_.kind == OptimizerKind::Adam && first_.size() != params.size())
    throw DimensionError("optimizer state does not mirror the parameter list");

  ++steps_;
  const double lr = config_.learning_rate;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    auto g = p.grad.flat();
    if (config_.kind == OptimizerKind::Sgd) {
      p.value.flat() -= (lr * scale) * g;
    } else {
      if (!first_[i].same_shape(p.value))
        throw DimensionError("optimizer accumulator shape differs for " + p.name);
      auto m = first_[i].flat();
      auto v = second_[i].flat();
      m = config_.beta1 * m + (1.0 - config_.beta1) * scale * g;
      v = config_.beta2 * v + (1.0 - config_.beta2) * (scale * g).cwiseAbs2();
      const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
      const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
      p.value.flat().array() -=
          lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config_.epsilon);
    }
    p.grad.set_zero();
  }
}

}  // namespace codelab::nn
