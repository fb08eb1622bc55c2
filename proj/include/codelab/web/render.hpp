#pragma once

#include "codelab/petri/net.hpp"
#include "codelab/random.hpp"
#include "codelab/web/design.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace codelab::web {

struct DomNode {
  std::string tag;
  std::map<std::string, std::string> attrs;
  std::string text;
  std::vector<std::size_t> children;
  /// Site-wide element id when this node is actionable.
  std::optional<std::size_t> element;
};

/// nodes[0] is the page root; children are listed in document order.
struct DomTree {
  std::vector<DomNode> nodes;

  std::size_t add(DomNode node, std::optional<std::size_t> parent);
  /// Depth-first pre-order over node indices, with depths.
  std::vector<std::pair<std::size_t, std::size_t>> dfs() const;
};

struct Instruction {
  std::vector<std::pair<std::string, std::string>> fields;

  std::size_t size() const noexcept { return fields.size(); }
  std::optional<std::size_t> find(const std::string& key) const;
};

struct Element {
  std::size_t id = 0;
  std::size_t page = 0;
  std::size_t node = 0;
  std::string primitive;  // catalog name, or "gate"
  bool gate = false;
  /// Instruction key the element accepts (active primitives only).
  std::optional<std::string> field_key;
  petri::TransitionId transition = 0;
};

struct Page {
  DomTree dom;
  std::vector<std::size_t> elements;  // site-wide ids in document order
};

struct RenderOptions {
  std::size_t base_steps = 4;
  std::size_t steps_per_field = 3;
};

struct RenderedSite {
  WebsiteDesign design;
  std::vector<Page> pages;
  std::vector<Element> elements;
  Instruction instruction;
  petri::PetriTaskNet net;
  /// field key -> sampled value; guards each active exit into its gate
  std::map<std::string, std::string> bindings;
  std::vector<petri::Finding> warnings;
  std::size_t horizon = 0;
};

/// Renders a design: SKIPs and empty pages dropped, each page closed by an
/// auto-appended gate, one instruction field per distinct active field key.
/// A repeated active key on the same page aliases the first element; on a later
/// page it is rendered as a passive copy. A design with no primitives renders one
/// page holding only the gate.
RenderedSite render(const WebsiteDesign& design, RandomStream& values, RenderOptions options = {});

/// Candidate values for an instruction key.
const std::vector<std::string>& value_vocabulary(const std::string& key);

}  // namespace codelab::web
