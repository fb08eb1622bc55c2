#include "codelab/petri/net.hpp"

#include "codelab/errors.hpp"

#include <algorithm>
#include <deque>

namespace codelab::petri {

PlaceId PetriTaskNet::add_place(std::string name) {
  places.push_back({std::move(name)});
  return static_cast<PlaceId>(places.size() - 1);
}

TransitionId PetriTaskNet::add_transition(std::string name, TransitionKind kind,
                                          std::optional<std::string> color) {
  transitions.push_back({std::move(name), kind, std::move(color)});
  const auto id = static_cast<TransitionId>(transitions.size() - 1);
  if (kind == TransitionKind::Gate) gates.push_back(id);
  return id;
}

void PetriTaskNet::connect_input(PlaceId p, TransitionId t, std::optional<std::string> required) {
  edges.push_back({p, t, true, std::move(required)});
}

void PetriTaskNet::connect_output(TransitionId t, PlaceId p) {
  edges.push_back({p, t, false, std::nullopt});
}

std::vector<const Edge*> PetriTaskNet::inputs(TransitionId t) const {
  std::vector<const Edge*> out;
  for (const Edge& e : edges)
    if (e.into_transition && e.transition == t) out.push_back(&e);
  return out;
}

std::vector<PlaceId> PetriTaskNet::outputs(TransitionId t) const {
  std::vector<PlaceId> out;
  for (const Edge& e : edges)
    if (!e.into_transition && e.transition == t) out.push_back(e.place);
  return out;
}

bool PetriTaskNet::is_gate(TransitionId t) const {
  return t < transitions.size() && transitions[t].kind == TransitionKind::Gate;
}

std::size_t PetriTaskNet::active_transition_count() const {
  std::size_t n = 0;
  for (const PrimitiveInfo& p : primitives)
    if (p.active) n += p.transitions.size();
  return n;
}

bool PetriTaskNet::same_structure(const PetriTaskNet& o) const {
  auto same_places = std::equal(places.begin(), places.end(), o.places.begin(), o.places.end(),
                                [](const Place& a, const Place& b) { return a.name == b.name; });
  auto same_transitions = std::equal(
      transitions.begin(), transitions.end(), o.transitions.begin(), o.transitions.end(),
      [](const Transition& a, const Transition& b) {
        return a.name == b.name && a.kind == b.kind && a.color == b.color;
      });
  auto same_prims = std::equal(
      primitives.begin(), primitives.end(), o.primitives.begin(), o.primitives.end(),
      [](const PrimitiveInfo& a, const PrimitiveInfo& b) {
        return a.name == b.name && a.active == b.active && a.page == b.page &&
               a.entry == b.entry && a.exit == b.exit && a.transitions == b.transitions;
      });
  return same_places && same_transitions && same_prims && edges == o.edges &&
         colors == o.colors && gates == o.gates && initial_places == o.initial_places &&
         final_place == o.final_place && primitive_membership == o.primitive_membership;
}

// --- Marking ---------------------------------------------------------------

Marking::Marking(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
}

void Marking::add(PlaceId place, std::string value) {
  Token t{place, std::move(value)};
  tokens_.insert(std::upper_bound(tokens_.begin(), tokens_.end(), t), std::move(t));
}

bool Marking::remove(PlaceId place, const std::optional<std::string>& value) {
  auto it = std::find_if(tokens_.begin(), tokens_.end(), [&](const Token& t) {
    return t.first == place && (!value || t.second == *value);
  });
  if (it == tokens_.end()) return false;
  tokens_.erase(it);
  return true;
}

bool Marking::has(PlaceId place, const std::optional<std::string>& value) const {
  return std::any_of(tokens_.begin(), tokens_.end(), [&](const Token& t) {
    return t.first == place && (!value || t.second == *value);
  });
}

std::size_t Marking::count(PlaceId place) const {
  return static_cast<std::size_t>(std::count_if(
      tokens_.begin(), tokens_.end(), [&](const Token& t) { return t.first == place; }));
}

// --- composition -------------------------------------------------------------

PetriTaskNet compose(const std::vector<PrimitiveNet>& primitives,
                     const std::vector<std::size_t>& page_ends,
                     const std::map<std::string, std::string>& bindings) {
  if (page_ends.empty()) throw StructureError("compose: empty page set");
  std::size_t prev = 0;
  for (std::size_t end : page_ends) {
    if (end < prev || end > primitives.size())
      throw StructureError("compose: page boundary " + std::to_string(end) + " is invalid");
    prev = end;
  }
  if (page_ends.back() != primitives.size())
    throw ValidityError("compose: primitive " + std::to_string(page_ends.back()) +
                        " is not covered by any page (orphan primitive)");

  PetriTaskNet net;
  const std::size_t pages = page_ends.size();
  std::vector<PlaceId> ready(pages);
  std::vector<TransitionId> gate(pages);
  for (std::size_t i = 0; i < pages; ++i) ready[i] = net.add_place("page" + std::to_string(i) + ".ready");
  for (std::size_t i = 0; i < pages; ++i)
    gate[i] = net.add_transition("page" + std::to_string(i) + ".gate", TransitionKind::Gate);
  const PlaceId final_place = net.add_place("final");
  net.final_place = final_place;

  std::size_t begin = 0;
  for (std::size_t page = 0; page < pages; ++page) {
    for (std::size_t j = begin; j < page_ends[page]; ++j) {
      const PrimitiveNet& prim = primitives[j];
      if (prim.steps.empty())
        throw StructureError("compose: primitive '" + prim.name + "' has no transitions");
      if (prim.active && !prim.color)
        throw StructureError("compose: active primitive '" + prim.name + "' lacks a colour");
      const std::string base = "page" + std::to_string(page) + "." + prim.name + "#" + std::to_string(j);
      PrimitiveInfo info;
      info.name = prim.name;
      info.active = prim.active;
      info.page = page;
      info.entry = net.add_place(base + ".in");
      PlaceId at = info.entry;
      for (std::size_t s = 0; s < prim.steps.size(); ++s) {
        const auto color = prim.active ? prim.color : std::nullopt;
        TransitionId t = net.add_transition(base + "." + prim.steps[s], TransitionKind::Primitive, color);
        net.connect_input(at, t);
        at = s + 1 == prim.steps.size() ? net.add_place(base + ".out")
                                        : net.add_place(base + ".s" + std::to_string(s + 1));
        net.connect_output(t, at);
        info.transitions.push_back(t);
        net.primitive_membership[t] = net.primitives.size();
      }
      info.exit = at;
      if (prim.active) {
        net.colors.insert(*prim.color);
        std::optional<std::string> required;
        if (auto it = bindings.find(*prim.color); it != bindings.end()) required = it->second;
        net.connect_input(info.exit, gate[page], required);
      }
      if (page == 0) net.initial_places.push_back(info.entry);
      net.primitives.push_back(std::move(info));
    }
    begin = page_ends[page];
  }

  for (std::size_t page = 0; page < pages; ++page) {
    net.connect_input(ready[page], gate[page]);
    if (page + 1 < pages) {
      net.connect_output(gate[page], ready[page + 1]);
      for (const PrimitiveInfo& p : net.primitives)
        if (p.page == page + 1) net.connect_output(gate[page], p.entry);
    } else {
      net.connect_output(gate[page], final_place);
    }
  }
  net.initial_places.insert(net.initial_places.begin(), ready[0]);
  std::sort(net.edges.begin(), net.edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.transition, a.into_transition, a.place) <
           std::tie(b.transition, b.into_transition, b.place);
  });
  return net;
}

Marking initial_marking(const PetriTaskNet& net) {
  Marking m;
  for (PlaceId p : net.initial_places) m.add(p);
  return m;
}

bool is_final(const PetriTaskNet& net, const Marking& marking) {
  return net.final_place && marking.has(*net.final_place);
}

// --- firing ------------------------------------------------------------------

bool is_enabled(const PetriTaskNet& net, const Marking& marking, TransitionId t) {
  if (t >= net.transitions.size()) return false;
  const auto ins = net.inputs(t);
  if (ins.empty()) return false;
  // Several input edges from one place each need their own token.
  std::map<PlaceId, std::size_t> needed;
  for (const Edge* e : ins) {
    if (!marking.has(e->place, e->required_value)) return false;
    ++needed[e->place];
  }
  for (const auto& [place, n] : needed)
    if (marking.count(place) < n) return false;
  return true;
}

std::vector<TransitionId> enabled(const PetriTaskNet& net, const Marking& marking) {
  std::vector<TransitionId> out;
  for (TransitionId t = 0; t < net.transitions.size(); ++t)
    if (is_enabled(net, marking, t)) out.push_back(t);
  return out;
}

Marking fire(const PetriTaskNet& net, const Marking& marking, TransitionId t,
             const std::string& value) {
  if (!is_enabled(net, marking, t))
    throw SemanticsError("fire: transition " +
                         (t < net.transitions.size() ? net.transitions[t].name : std::to_string(t)) +
                         " is not enabled");
  Marking next = marking;
  for (const Edge* e : net.inputs(t)) next.remove(e->place, e->required_value);
  const std::string stamp = net.transitions[t].color ? value : std::string{};
  for (PlaceId p : net.outputs(t)) next.add(p, stamp);
  return next;
}

// --- validation --------------------------------------------------------------

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Finding& f) { return f.code == code; });
}

ValidationReport validate(const PetriTaskNet& net) {
  ValidationReport report;
  const std::size_t np = net.places.size();
  const std::size_t nt = net.transitions.size();

  for (const Edge& e : net.edges)
    if (e.place >= np || e.transition >= nt)
      report.violations.push_back({"non-bipartite edge", "edge references a missing node"});
  if (!report.ok()) return report;

  // Node ids: places [0, np), transitions [np, np + nt).
  std::vector<std::vector<std::size_t>> succ(np + nt);
  std::vector<std::size_t> indegree(np + nt, 0);
  for (const Edge& e : net.edges) {
    const std::size_t p = e.place;
    const std::size_t t = np + e.transition;
    const std::size_t from = e.into_transition ? p : t;
    const std::size_t to = e.into_transition ? t : p;
    succ[from].push_back(to);
    ++indegree[to];
  }

  {
    std::deque<std::size_t> queue;
    std::vector<std::size_t> deg = indegree;
    for (std::size_t v = 0; v < deg.size(); ++v)
      if (deg[v] == 0) queue.push_back(v);
    std::size_t seen = 0;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      ++seen;
      for (std::size_t w : succ[v])
        if (--deg[w] == 0) queue.push_back(w);
    }
    if (seen != deg.size()) report.violations.push_back({"cycle", "underlying graph is not acyclic"});
  }

  if (net.gates.empty()) report.violations.push_back({"no gate", "net has no gate transition"});
  for (TransitionId g : net.gates)
    if (g >= nt || net.transitions[g].kind != TransitionKind::Gate)
      report.violations.push_back({"bad gate", "gate list references a non-gate transition"});

  auto reach_from = [&](const std::vector<std::size_t>& seeds) {
    std::vector<bool> seen(np + nt, false);
    std::deque<std::size_t> queue(seeds.begin(), seeds.end());
    for (std::size_t s : seeds) seen[s] = true;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t w : succ[v])
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
    }
    return seen;
  };

  // Page 0 is entered through the initial marking; later pages through gate outputs.
  std::vector<std::size_t> seeds(net.initial_places.begin(), net.initial_places.end());
  for (TransitionId g : net.gates)
    if (g < nt) seeds.push_back(np + g);
  const auto reachable = reach_from(seeds);

  for (const PrimitiveInfo& prim : net.primitives) {
    if (!reachable[prim.entry])
      report.violations.push_back({"unreachable from gate", prim.name});
    if (prim.active) {
      const auto fwd = reach_from({prim.exit});
      const bool precedes_gate = std::any_of(net.gates.begin(), net.gates.end(), [&](TransitionId g) {
        return g < nt && fwd[np + g];
      });
      if (!precedes_gate)
        report.violations.push_back({"active primitive not a gate predecessor", prim.name});
    }
  }

  if (!net.final_place)
    report.violations.push_back({"no final place", "net has no final place"});
  else if (!reachable[*net.final_place])
    report.violations.push_back({"final unreachable", "final place is unreachable"});

  for (PlaceId p = 0; p < np; ++p) {
    if (net.final_place && p == *net.final_place) continue;
    if (succ[p].empty()) report.warnings.push_back({"dangling", net.places[p].name});
  }
  return report;
}

// --- serialisation -----------------------------------------------------------

nlohmann::json to_json(const PetriTaskNet& net) {
  nlohmann::json doc;
  doc["places"] = nlohmann::json::array();
  for (const Place& p : net.places) doc["places"].push_back(p.name);
  doc["transitions"] = nlohmann::json::array();
  for (const Transition& t : net.transitions) {
    nlohmann::json j{{"name", t.name}, {"gate", t.kind == TransitionKind::Gate}};
    if (t.color) j["color"] = *t.color;
    doc["transitions"].push_back(std::move(j));
  }
  doc["edges"] = nlohmann::json::array();
  for (const Edge& e : net.edges) {
    nlohmann::json j{{"place", e.place}, {"transition", e.transition},
                     {"dir", e.into_transition ? "in" : "out"}};
    if (e.required_value) j["requires"] = *e.required_value;
    doc["edges"].push_back(std::move(j));
  }
  doc["gates"] = net.gates;
  doc["colors"] = std::vector<std::string>(net.colors.begin(), net.colors.end());
  doc["primitives"] = nlohmann::json::array();
  for (const PrimitiveInfo& p : net.primitives)
    doc["primitives"].push_back({{"name", p.name}, {"active", p.active}, {"page", p.page},
                                 {"entry", p.entry}, {"exit", p.exit},
                                 {"transitions", p.transitions}});
  doc["initial"] = net.initial_places;
  if (net.final_place) doc["final"] = *net.final_place;
  return doc;
}

PetriTaskNet net_from_json(const nlohmann::json& doc) {
  PetriTaskNet net;
  for (const auto& p : doc.at("places")) net.places.push_back({p.get<std::string>()});
  for (const auto& t : doc.at("transitions")) {
    Transition tr;
    tr.name = t.at("name").get<std::string>();
    tr.kind = t.at("gate").get<bool>() ? TransitionKind::Gate : TransitionKind::Primitive;
    if (t.contains("color")) tr.color = t.at("color").get<std::string>();
    net.transitions.push_back(std::move(tr));
  }
  for (const auto& e : doc.at("edges")) {
    Edge edge;
    edge.place = e.at("place").get<PlaceId>();
    edge.transition = e.at("transition").get<TransitionId>();
    edge.into_transition = e.at("dir").get<std::string>() == "in";
    if (e.contains("requires")) edge.required_value = e.at("requires").get<std::string>();
    net.edges.push_back(std::move(edge));
  }
  net.gates = doc.at("gates").get<std::vector<TransitionId>>();
  for (const auto& c : doc.at("colors")) net.colors.insert(c.get<std::string>());
  for (const auto& p : doc.at("primitives")) {
    PrimitiveInfo info;
    info.name = p.at("name").get<std::string>();
    info.active = p.at("active").get<bool>();
    info.page = p.at("page").get<std::size_t>();
    info.entry = p.at("entry").get<PlaceId>();
    info.exit = p.at("exit").get<PlaceId>();
    info.transitions = p.at("transitions").get<std::vector<TransitionId>>();
    for (TransitionId t : info.transitions) net.primitive_membership[t] = net.primitives.size();
    net.primitives.push_back(std::move(info));
  }
  net.initial_places = doc.at("initial").get<std::vector<PlaceId>>();
  if (doc.contains("final")) net.final_place = doc.at("final").get<PlaceId>();
  return net;
}

}  // namespace codelab::petri
