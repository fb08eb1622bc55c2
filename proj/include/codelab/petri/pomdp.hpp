#pragma once

#include "codelab/petri/net.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace codelab::petri {

struct RewardContract {
  double step_penalty = 0.01;
  double success_reward = 1.0;
  double failure_reward = -1.0;
  /// Only the terminal +/-1 is paid; no potential reward and no step penalty.
  bool binary_only = false;
};

struct StepOutcome {
  double potential = 0.0;
  double penalty = 0.0;
  double terminal = 0.0;
  double reward = 0.0;
  bool fired = false;
  bool done = false;
  bool success = false;
};

/// Renders an observation of the current page for a marking.
using ObservationFn = std::function<nlohmann::json(std::size_t page, const Marking&)>;

/// POMDP view of a validated net. Hidden state is the marking, actions are
/// transitions, and the potential is completed active primitives over their total.
class NetPomdp {
 public:
  NetPomdp(const PetriTaskNet& net, RewardContract contract, std::size_t horizon,
           std::map<std::string, std::string> bindings = {}, ObservationFn observe = {});

  void reset();

  const PetriTaskNet& net() const noexcept { return *net_; }
  const Marking& marking() const noexcept { return marking_; }
  std::size_t current_page() const noexcept { return page_; }
  std::size_t steps() const noexcept { return t_; }
  std::size_t horizon() const noexcept { return horizon_; }
  bool is_terminal() const noexcept { return done_; }
  bool succeeded() const noexcept { return success_; }

  std::vector<TransitionId> actions() const;
  std::vector<TransitionId> available() const;

  /// Completed active primitives / total active primitives (0 when there are none).
  double potential() const;
  std::size_t completed_active() const noexcept { return completed_.size(); }
  std::size_t active_total() const noexcept { return active_total_; }

  /// Attempts transition `t` with `value`. A disabled transition or a coloured
  /// transition given the wrong value does not fire; the step still costs the penalty.
  StepOutcome step(TransitionId t, const std::string& value = {});

  /// Spends a step without touching the marking.
  StepOutcome idle();

  nlohmann::json observe() const;

 private:
  StepOutcome finish(StepOutcome out, double before);

  const PetriTaskNet* net_;
  RewardContract contract_;
  std::size_t horizon_;
  std::map<std::string, std::string> bindings_;
  ObservationFn observe_;
  std::size_t active_total_ = 0;

  Marking marking_;
  std::set<std::size_t> completed_;
  std::size_t page_ = 0;
  std::size_t t_ = 0;
  bool done_ = false;
  bool success_ = false;
};

/// Refuses (ValidityError) nets that fail validation.
NetPomdp to_pomdp(const PetriTaskNet& net, RewardContract contract, std::size_t horizon,
                  std::map<std::string, std::string> bindings = {}, ObservationFn observe = {});

}  // namespace codelab::petri
