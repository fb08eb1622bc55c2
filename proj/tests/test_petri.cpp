#include "codelab/errors.hpp"
#include "codelab/petri/net.hpp"
#include "codelab/petri/pomdp.hpp"
#include "codelab/random.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <deque>
#include <set>

using namespace codelab;
using namespace codelab::petri;

namespace {

PrimitiveNet active(const std::string& name, const std::string& key) {
  return {name, true, key, {"act"}};
}
PrimitiveNet passive(const std::string& name) { return {name, false, std::nullopt, {"act"}}; }

/// Every marking reachable from the initial marking by firing (values ignored).
std::set<Marking> reachable(const PetriTaskNet& net) {
  std::set<Marking> seen{initial_marking(net)};
  std::deque<Marking> queue{initial_marking(net)};
  while (!queue.empty()) {
    Marking m = queue.front();
    queue.pop_front();
    for (TransitionId t : enabled(net, m)) {
      Marking n = fire(net, m, t);
      if (seen.insert(n).second) queue.push_back(n);
    }
  }
  return seen;
}

}  // namespace

TEST_CASE("minimal net: one active primitive, one page") {
  auto net = compose({active("username", "username")}, {1});
  CHECK(net.gates.size() == 1);
  CHECK(validate(net).ok());
  const Marking m0 = initial_marking(net);
  const TransitionId gate = net.gates[0];
  const TransitionId prim = net.primitives[0].transitions[0];
  CHECK(enabled(net, m0) == std::vector<TransitionId>{prim});
  CHECK_FALSE(is_enabled(net, m0, gate));
  const Marking m1 = fire(net, m0, prim, "alice");
  CHECK(m1.has(net.primitives[0].exit, std::string("alice")));
  CHECK(enabled(net, m1) == std::vector<TransitionId>{gate});
  const Marking m2 = fire(net, m1, gate);
  CHECK(is_final(net, m2));
  CHECK(enabled(net, m2).empty());
}

TEST_CASE("gate enabling over all markings of a 2 active + 1 passive page") {
  auto net = compose({active("a", "ka"), active("b", "kb"), passive("p")}, {3});
  REQUIRE(validate(net).ok());
  const PlaceId ready = net.initial_places[0];
  const PlaceId ea = net.primitives[0].exit, eb = net.primitives[1].exit, ep = net.primitives[2].exit;
  const TransitionId gate = net.gates[0];
  // Enumerate every 0/1 marking over {ready, exit a, exit b, exit p}.
  for (int mask = 0; mask < 16; ++mask) {
    Marking m;
    if (mask & 1) m.add(ready);
    if (mask & 2) m.add(ea);
    if (mask & 4) m.add(eb);
    if (mask & 8) m.add(ep);
    const bool expect = (mask & 1) && (mask & 2) && (mask & 4);
    CHECK(is_enabled(net, m, gate) == expect);
  }
}

TEST_CASE("two pages chain through both gates in order") {
  auto net = compose({active("a", "ka"), active("b", "kb")}, {1, 2});
  REQUIRE(validate(net).ok());
  REQUIRE(net.gates.size() == 2);
  // Reachability search: every marking holding the final token came through gate 0 then gate 1.
  std::set<Marking> seen{initial_marking(net)};
  std::deque<std::pair<Marking, std::vector<TransitionId>>> queue{{initial_marking(net), {}}};
  bool reached = false;
  while (!queue.empty()) {
    auto [m, path] = queue.front();
    queue.pop_front();
    if (is_final(net, m)) {
      reached = true;
      std::vector<TransitionId> gates;
      for (TransitionId t : path)
        if (net.is_gate(t)) gates.push_back(t);
      CHECK(gates == net.gates);
    }
    for (TransitionId t : enabled(net, m)) {
      Marking n = fire(net, m, t);
      auto p = path;
      p.push_back(t);
      if (seen.insert(n).second) queue.push_back({n, p});
    }
  }
  CHECK(reached);
}

TEST_CASE("compose errors") {
  CHECK_THROWS_AS(compose({active("a", "ka")}, {}), StructureError);
  CHECK_THROWS_AS(compose({active("a", "ka")}, {2}), StructureError);
  CHECK_THROWS_AS(compose({active("a", "ka"), active("b", "kb")}, {1}), ValidityError);
}

TEST_CASE("compose is deterministic") {
  std::vector<PrimitiveNet> prims{active("a", "ka"), passive("p"), active("b", "kb")};
  auto n1 = compose(prims, {2, 3});
  auto n2 = compose(prims, {2, 3});
  CHECK(n1.same_structure(n2));
  CHECK(to_json(n1).dump() == to_json(n2).dump());
  CHECK(net_from_json(to_json(n1)).same_structure(n1));
}

TEST_CASE("enabled and fire semantics") {
  auto net = compose({active("a", "ka"), passive("p")}, {2});
  CHECK(enabled(net, Marking{}).empty());
  CHECK_THROWS_AS(fire(net, initial_marking(net), net.gates[0]), SemanticsError);

  SECTION("linear chain moves one token") {
    const TransitionId t = net.primitives[0].transitions[0];
    const Marking m = initial_marking(net);
    const Marking n = fire(net, m, t, "v");
    CHECK(n.size() == m.size());
    CHECK_FALSE(n.has(net.primitives[0].entry));
    CHECK(n.has(net.primitives[0].exit));
  }
  SECTION("token count changes by outputs - inputs") {
    for (const Marking& m : reachable(net))
      for (TransitionId t : enabled(net, m)) {
        const Marking n = fire(net, m, t);
        const long delta = static_cast<long>(net.outputs(t).size()) - static_cast<long>(net.inputs(t).size());
        CHECK(static_cast<long>(n.size()) - static_cast<long>(m.size()) == delta);
      }
  }
}

TEST_CASE("brute-force firing never leaves the net's places") {
  RandomStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PrimitiveNet> prims;
    const std::size_t n = 1 + rng.uniform_index(4);
    for (std::size_t i = 0; i < n; ++i) {
      PrimitiveNet p = rng.bernoulli(0.5) ? active("a" + std::to_string(i), "k" + std::to_string(i))
                                          : passive("p" + std::to_string(i));
      p.steps.resize(1 + rng.uniform_index(2), "s");
      prims.push_back(p);
    }
    std::vector<std::size_t> ends;
    for (std::size_t i = 1; i < n; ++i)
      if (rng.bernoulli(0.4)) ends.push_back(i);
    ends.push_back(n);
    auto net = compose(prims, ends);
    REQUIRE(validate(net).ok());
    REQUIRE(net.transitions.size() <= 12);
    bool final_seen = false;
    for (const Marking& m : reachable(net)) {
      for (const auto& [place, value] : m.tokens()) CHECK(place < net.places.size());
      final_seen = final_seen || is_final(net, m);
    }
    // A valid net reaches its final marking, and only by completing every active primitive and gate.
    CHECK(final_seen);
  }
}

TEST_CASE("final marking requires every active primitive and every gate") {
  auto net = compose({active("a", "ka"), passive("p"), active("b", "kb"), passive("q")}, {2, 4});
  REQUIRE(net.transitions.size() <= 12);
  std::set<std::vector<TransitionId>> seen;
  std::deque<std::pair<Marking, std::set<TransitionId>>> queue{{initial_marking(net), {}}};
  std::size_t finals = 0;
  while (!queue.empty()) {
    auto [m, fired] = queue.front();
    queue.pop_front();
    if (is_final(net, m)) {
      ++finals;
      for (const PrimitiveInfo& p : net.primitives)
        if (p.active)
          for (TransitionId t : p.transitions) CHECK(fired.count(t));
      for (TransitionId g : net.gates) CHECK(fired.count(g));
    }
    for (TransitionId t : enabled(net, m)) {
      auto f = fired;
      f.insert(t);
      queue.push_back({fire(net, m, t), f});
    }
  }
  CHECK(finals > 0);
}

TEST_CASE("validate findings") {
  SECTION("gate-free net") {
    PetriTaskNet net;
    PlaceId a = net.add_place("a"), b = net.add_place("b");
    TransitionId t = net.add_transition("t", TransitionKind::Primitive);
    net.connect_input(a, t);
    net.connect_output(t, b);
    net.initial_places = {a};
    CHECK(validate(net).has("no gate"));
  }
  SECTION("valid login net has no violations") {
    auto net = compose({active("username", "username"), active("password", "password"), passive("forgotpassword")}, {3});
    auto rep = validate(net);
    CHECK(rep.ok());
    CHECK(rep.violations.empty());
    // The passive exit dangles, which is only a warning.
    CHECK(rep.warnings.size() == 1);
  }
  SECTION("primitive with no path from a gate or the initial marking") {
    auto net = compose({active("a", "ka")}, {1});
    PrimitiveInfo orphan;
    orphan.name = "orphan";
    orphan.active = false;
    orphan.entry = net.add_place("orphan.in");
    TransitionId t = net.add_transition("orphan.act", TransitionKind::Primitive);
    orphan.exit = net.add_place("orphan.out");
    net.connect_input(orphan.entry, t);
    net.connect_output(t, orphan.exit);
    orphan.transitions = {t};
    net.primitives.push_back(orphan);
    CHECK(validate(net).has("unreachable from gate"));
  }
  SECTION("active primitive that feeds no gate") {
    auto net = compose({active("a", "ka")}, {1});
    net.edges.erase(std::remove_if(net.edges.begin(), net.edges.end(),
                                   [&](const Edge& e) { return e.place == net.primitives[0].exit; }),
                    net.edges.end());
    CHECK(validate(net).has("active primitive not a gate predecessor"));
  }
  SECTION("cycle") {
    auto net = compose({active("a", "ka")}, {1});
    net.connect_output(net.gates[0], net.primitives[0].entry);
    CHECK(validate(net).has("cycle"));
  }
}

TEST_CASE("to_pomdp") {
  RewardContract contract;
  SECTION("one-primitive net exposes its transitions") {
    auto net = compose({active("a", "ka")}, {1});
    auto env = to_pomdp(net, contract, 10, {{"ka", "x"}});
    CHECK(env.actions().size() == 2);
    CHECK(env.available() == std::vector<TransitionId>{net.primitives[0].transitions[0]});
    auto wrong = env.step(net.primitives[0].transitions[0], "y");
    CHECK_FALSE(wrong.fired);
    CHECK(wrong.potential == 0.0);
    CHECK(wrong.reward == -0.01);
    auto right = env.step(net.primitives[0].transitions[0], "x");
    CHECK(right.potential == 1.0);
    auto done = env.step(net.gates[0]);
    CHECK(done.done);
    CHECK(done.success);
    CHECK(done.terminal == 1.0);
    CHECK(env.is_terminal());
  }
  SECTION("optimal episode potentials total exactly 1") {
    for (std::size_t f = 1; f <= 12; ++f) {
      std::vector<PrimitiveNet> prims;
      std::map<std::string, std::string> bind;
      for (std::size_t i = 0; i < f; ++i) {
        prims.push_back(active("f" + std::to_string(i), "k" + std::to_string(i)));
        bind["k" + std::to_string(i)] = "v";
      }
      auto net = compose(prims, {f});
      auto env = to_pomdp(net, contract, 100, bind);
      double total = 0.0;
      for (const PrimitiveInfo& p : net.primitives) total += env.step(p.transitions[0], "v").potential;
      auto last = env.step(net.gates[0]);
      total += last.potential;
      CHECK(total == 1.0);
      CHECK(last.success);
    }
  }
  SECTION("timeout pays the failure reward") {
    auto net = compose({active("a", "ka")}, {1});
    auto env = to_pomdp(net, contract, 2);
    env.idle();
    auto out = env.idle();
    CHECK(out.done);
    CHECK_FALSE(out.success);
    CHECK(out.terminal == -1.0);
    CHECK_THROWS_AS(env.idle(), ContractViolation);
  }
  SECTION("unvalidated net is refused") {
    PetriTaskNet net;
    net.add_place("a");
    CHECK_THROWS_AS(to_pomdp(net, contract, 5), ValidityError);
  }
}
