#pragma once

#include <json.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace codelab::petri {

using PlaceId = std::uint32_t;
using TransitionId = std::uint32_t;

enum class TransitionKind { Primitive, Gate };

struct Place {
  std::string name;
};

struct Transition {
  std::string name;
  TransitionKind kind = TransitionKind::Primitive;
  /// Colour (field key) carried by tokens this transition emits.
  std::optional<std::string> color;
};

/// Directed edge between a place and a transition.
struct Edge {
  PlaceId place = 0;
  TransitionId transition = 0;
  bool into_transition = true;  // place -> transition when true
  /// For input edges: the token must carry exactly this value.
  std::optional<std::string> required_value;

  auto operator<=>(const Edge&) const = default;
};

/// Serial workflow fragment: entry place, `steps` transitions in a chain, exit place.
struct PrimitiveNet {
  std::string name;
  bool active = false;
  std::optional<std::string> color;
  std::vector<std::string> steps{"act"};
};

struct PrimitiveInfo {
  std::string name;
  bool active = false;
  std::size_t page = 0;
  PlaceId entry = 0;
  PlaceId exit = 0;
  std::vector<TransitionId> transitions;
};

/// Colored, acyclic workflow net whose pages are closed by gate transitions.
class PetriTaskNet {
 public:
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<Edge> edges;
  std::set<std::string> colors;
  std::vector<TransitionId> gates;
  std::vector<PrimitiveInfo> primitives;
  /// transition -> index into `primitives` (gates are absent)
  std::map<TransitionId, std::size_t> primitive_membership;
  std::vector<PlaceId> initial_places;
  std::optional<PlaceId> final_place;

  PlaceId add_place(std::string name);
  TransitionId add_transition(std::string name, TransitionKind kind,
                              std::optional<std::string> color = std::nullopt);
  void connect_input(PlaceId p, TransitionId t, std::optional<std::string> required = std::nullopt);
  void connect_output(TransitionId t, PlaceId p);

  std::vector<const Edge*> inputs(TransitionId t) const;
  std::vector<PlaceId> outputs(TransitionId t) const;
  bool is_gate(TransitionId t) const;
  bool active(std::size_t primitive) const { return primitives.at(primitive).active; }
  std::size_t page_count() const { return gates.size(); }
  std::size_t active_transition_count() const;

  /// Structural equality (names, edges, gates, colours, primitive layout).
  bool same_structure(const PetriTaskNet& other) const;
};

/// Multiset of coloured tokens; kept sorted so equal markings compare equal.
class Marking {
 public:
  using Token = std::pair<PlaceId, std::string>;

  Marking() = default;
  explicit Marking(std::vector<Token> tokens);

  void add(PlaceId place, std::string value = {});
  /// Removes one token from `place` (matching `value` when given). Returns false if none.
  bool remove(PlaceId place, const std::optional<std::string>& value = std::nullopt);
  bool has(PlaceId place, const std::optional<std::string>& value = std::nullopt) const;
  std::size_t count(PlaceId place) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::vector<Token>& tokens() const noexcept { return tokens_; }

  auto operator<=>(const Marking&) const = default;

 private:
  std::vector<Token> tokens_;
};

/// Composes primitives into a net. `page_ends[i]` is the exclusive end index of page i
/// in `primitives`; the last entry must equal primitives.size(). Within a page the
/// primitives run in parallel into the page gate; gates chain pages serially.
/// `bindings` (colour -> value) guards each active exit edge into its gate.
PetriTaskNet compose(const std::vector<PrimitiveNet>& primitives,
                     const std::vector<std::size_t>& page_ends,
                     const std::map<std::string, std::string>& bindings = {});

Marking initial_marking(const PetriTaskNet& net);
bool is_final(const PetriTaskNet& net, const Marking& marking);

std::vector<TransitionId> enabled(const PetriTaskNet& net, const Marking& marking);
bool is_enabled(const PetriTaskNet& net, const Marking& marking, TransitionId t);

/// Consumes one token per input place and emits one per output place. Coloured
/// transitions stamp `value` on the emitted tokens. Throws SemanticsError when disabled.
Marking fire(const PetriTaskNet& net, const Marking& marking, TransitionId t,
             const std::string& value = {});

struct Finding {
  std::string code;
  std::string detail;
};

struct ValidationReport {
  std::vector<Finding> violations;
  std::vector<Finding> warnings;
  bool ok() const noexcept { return violations.empty(); }
  bool has(const std::string& code) const;
};

/// Checks bipartite edges, acyclicity, gate existence, gate reachability of every
/// primitive, and that every active primitive precedes a gate. Dangling places are warnings.
ValidationReport validate(const PetriTaskNet& net);

nlohmann::json to_json(const PetriTaskNet& net);
PetriTaskNet net_from_json(const nlohmann::json& doc);

}  // namespace codelab::petri
