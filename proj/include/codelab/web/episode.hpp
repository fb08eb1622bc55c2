#pragma once

#include "codelab/petri/pomdp.hpp"
#include "codelab/web/render.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace codelab::web {

struct NavAction {
  std::size_t element = 0;
  /// Index into the instruction; nullopt for a click-only action.
  std::optional<std::size_t> field;
};

/// One DOM node as the learner sees it.
struct ObsNode {
  std::string tag;
  std::string key;    // name attribute, else class, else empty
  std::string text;
  std::string value;  // typed value ("" when untouched)
  std::size_t depth = 0;
  std::optional<std::size_t> element;  // index into Observation::elements
};

struct Observation {
  std::vector<ObsNode> nodes;          // depth-first order over the current page
  std::vector<std::size_t> elements;   // site-wide element ids, in DFS order
  std::vector<std::size_t> element_nodes;  // position in `nodes` for each element
  std::vector<std::pair<std::string, std::string>> fields;
  std::size_t page = 0;
  /// Changes whenever the visible page or any typed value changes.
  std::uint64_t version = 0;
};

struct WebStep {
  petri::StepOutcome outcome;
  bool done() const noexcept { return outcome.done; }
  double reward() const noexcept { return outcome.reward; }
};

/// An episode on a rendered site. The site must outlive the episode.
class WebEpisode {
 public:
  explicit WebEpisode(const RenderedSite& site, petri::RewardContract contract = {},
                      std::optional<std::size_t> horizon = std::nullopt);

  const RenderedSite& site() const noexcept { return *site_; }
  std::size_t current_page() const noexcept { return env_.current_page(); }
  std::size_t steps() const noexcept { return env_.steps(); }
  std::size_t horizon() const noexcept { return env_.horizon(); }
  bool done() const noexcept { return env_.is_terminal(); }
  bool success() const noexcept { return env_.succeeded(); }
  const petri::Marking& marking() const noexcept { return env_.marking(); }
  double potential() const { return env_.potential(); }

  Observation observe() const;

  /// Throws ContractViolation when the element is not on the current page, the
  /// field index is out of range, or the episode is over.
  WebStep step(const NavAction& action);

 private:
  const RenderedSite* site_;
  petri::NetPomdp env_;
  std::vector<std::string> typed_;  // per element
  std::uint64_t version_ = 0;
};

/// Actions that complete the current page in order: each unfilled active element
/// with its own field, then the gate.
std::vector<NavAction> optimal_page_actions(const WebEpisode& episode);

}  // namespace codelab::web
