#include "codelab/petri/pomdp.hpp"

#include "codelab/errors.hpp"

#include <algorithm>

namespace codelab::petri {

NetPomdp::NetPomdp(const PetriTaskNet& net, RewardContract contract, std::size_t horizon,
                   std::map<std::string, std::string> bindings, ObservationFn observe)
    : net_(&net),
      contract_(contract),
      horizon_(horizon),
      bindings_(std::move(bindings)),
      observe_(std::move(observe)) {
  if (horizon_ == 0) throw ConfigError("pomdp horizon must be positive");
  for (const PrimitiveInfo& p : net.primitives)
    if (p.active) ++active_total_;
  reset();
}

void NetPomdp::reset() {
  marking_ = initial_marking(*net_);
  completed_.clear();
  page_ = 0;
  t_ = 0;
  done_ = false;
  success_ = false;
}

std::vector<TransitionId> NetPomdp::actions() const {
  std::vector<TransitionId> out(net_->transitions.size());
  for (TransitionId t = 0; t < out.size(); ++t) out[t] = t;
  return out;
}

std::vector<TransitionId> NetPomdp::available() const {
  if (done_) return {};
  return enabled(*net_, marking_);
}

double NetPomdp::potential() const {
  if (active_total_ == 0) return 0.0;
  return static_cast<double>(completed_.size()) / static_cast<double>(active_total_);
}

StepOutcome NetPomdp::step(TransitionId t, const std::string& value) {
  if (done_) throw ContractViolation("step on a finished episode");
  if (t >= net_->transitions.size()) throw ContractViolation("unknown transition");
  const double before = potential();
  StepOutcome out;
  const Transition& tr = net_->transitions[t];
  bool accept = is_enabled(*net_, marking_, t);
  if (accept && tr.color) {
    auto it = bindings_.find(*tr.color);
    if (it != bindings_.end() && it->second != value) accept = false;
  }
  if (accept) {
    marking_ = fire(*net_, marking_, t, value);
    out.fired = true;
    if (tr.kind == TransitionKind::Gate) {
      ++page_;
    } else {
      const std::size_t prim = net_->primitive_membership.at(t);
      const PrimitiveInfo& info = net_->primitives[prim];
      if (info.active && info.transitions.back() == t) completed_.insert(prim);
    }
  }
  return finish(out, before);
}

StepOutcome NetPomdp::idle() {
  if (done_) throw ContractViolation("step on a finished episode");
  return finish({}, potential());
}

StepOutcome NetPomdp::finish(StepOutcome out, double before) {
  ++t_;
  if (!contract_.binary_only) {
    out.potential = potential() - before;
    out.penalty = -contract_.step_penalty;
  }
  if (is_final(*net_, marking_)) {
    out.done = out.success = true;
    out.terminal = contract_.success_reward;
  } else if (t_ >= horizon_) {
    out.done = true;
    out.terminal = contract_.failure_reward;
  }
  done_ = out.done;
  success_ = out.success;
  out.reward = out.potential + out.penalty + out.terminal;
  return out;
}

nlohmann::json NetPomdp::observe() const {
  if (!observe_) return nlohmann::json::object();
  return observe_(page_, marking_);
}

NetPomdp to_pomdp(const PetriTaskNet& net, RewardContract contract, std::size_t horizon,
                  std::map<std::string, std::string> bindings, ObservationFn observe) {
  const ValidationReport report = validate(net);
  if (!report.ok())
    throw ValidityError("to_pomdp: net fails validation (" + report.violations.front().code + ")");
  return NetPomdp(net, contract, horizon, std::move(bindings), std::move(observe));
}

}  // namespace codelab::petri
