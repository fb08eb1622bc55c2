#include "codelab/grid/grid.hpp"

#include "codelab/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace codelab::grid {

std::string to_string(Subtask s) {
  switch (s) {
    case Subtask::PickupKey: return "PickupKey";
    case Subtask::OpenDoor: return "OpenDoor";
    case Subtask::PickupBall: return "PickupBall";
    case Subtask::OpenBox: return "OpenBox";
    case Subtask::DropBall: return "DropBall";
  }
  return "PickupKey";
}

Subtask parse_subtask(const std::string& name) {
  for (Subtask s : all_subtasks())
    if (to_string(s) == name) return s;
  throw ConfigError("unknown subtask '" + name + "'");
}

std::vector<Subtask> all_subtasks() {
  return {Subtask::PickupKey, Subtask::OpenDoor, Subtask::PickupBall, Subtask::OpenBox, Subtask::DropBall};
}

std::vector<Subtask> prerequisites(Subtask s) {
  switch (s) {
    case Subtask::OpenDoor: return {Subtask::PickupKey};
    case Subtask::DropBall: return {Subtask::PickupBall, Subtask::OpenBox};
    default: return {};
  }
}

GridDesign closure(const GridDesign& design) {
  GridDesign out = design;
  for (Subtask s : design.subtasks)
    for (Subtask p : prerequisites(s)) out.subtasks.insert(p);
  return out;
}

bool is_closed(const GridDesign& design) { return closure(design) == design; }

nlohmann::json to_json(const GridDesign& design) {
  std::vector<std::string> names;
  for (Subtask s : design.subtasks) names.push_back(to_string(s));
  std::sort(names.begin(), names.end());
  return {{"subtasks", names}};
}

GridDesign grid_design_from_json(const nlohmann::json& doc) {
  GridDesign d;
  try {
    for (const auto& n : doc.at("subtasks")) d.subtasks.insert(parse_subtask(n.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed grid design: ") + e.what());
  }
  return d;
}

namespace {

const Pos kDirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

bool passable(const Cell& c) {
  if (c.wall) return false;
  switch (c.object) {
    case Object::None:
    case Object::Goal:
      return true;
    case Object::Door:
      return c.open;
    default:
      return false;
  }
}

bool has(const GridState& s, Subtask t) { return s.design.subtasks.count(t) > 0; }
bool done_task(const GridState& s, Subtask t) { return s.completed.count(t) > 0; }

bool ready(const GridState& s, Subtask t) {
  for (Subtask p : prerequisites(t))
    if (has(s, p) && !done_task(s, p)) return false;
  return true;
}

/// Passable cells connected to `from`, treating `blocked` as filled.
std::vector<bool> reachable_cells(const GridState& s, Pos from, const Pos* blocked) {
  std::vector<bool> seen(static_cast<std::size_t>(s.width * s.height), false);
  auto idx = [&](Pos p) { return static_cast<std::size_t>(p.y * s.width + p.x); };
  std::deque<Pos> queue{from};
  seen[idx(from)] = true;
  while (!queue.empty()) {
    const Pos p = queue.front();
    queue.pop_front();
    for (const Pos& d : kDirs) {
      const Pos q{p.x + d.x, p.y + d.y};
      if (!s.inside(q) || seen[idx(q)] || !passable(s.at(q))) continue;
      if (blocked && q == *blocked) continue;
      seen[idx(q)] = true;
      queue.push_back(q);
    }
  }
  return seen;
}

bool all_faceable(const GridState& s) {
  const auto seen = reachable_cells(s, s.agent, nullptr);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const Cell& c = s.at({x, y});
      if (c.wall || c.object == Object::None) continue;
      bool ok = seen[static_cast<std::size_t>(y * s.width + x)];
      for (const Pos& d : kDirs) {
        const Pos q{x + d.x, y + d.y};
        if (s.inside(q) && seen[static_cast<std::size_t>(q.y * s.width + q.x)]) ok = true;
      }
      if (!ok) return false;
    }
  return true;
}

}  // namespace

Pos GridState::front() const { return {agent.x + kDirs[dir].x, agent.y + kDirs[dir].y}; }

double GridState::potential() const {
  if (design.subtasks.empty()) return 0.0;
  return static_cast<double>(completed.size()) / static_cast<double>(design.subtasks.size());
}

GridState build_grid(const GridDesign& design, RandomStream& rng, const GridConfig& config) {
  if (!is_closed(design)) throw ValidityError("grid design is not closed under the subtask workflow");
  if (config.horizon == 0) throw ConfigError("grid horizon must be positive");
  GridState s;
  s.design = design;
  s.width = config.width;
  s.height = config.height;
  s.horizon = config.horizon;
  s.contract = config.contract;
  s.cells.assign(static_cast<std::size_t>(std::max(0, config.width * config.height)), Cell{});

  std::vector<Object> objects{Object::Goal};
  if (has(s, Subtask::PickupKey)) objects.push_back(Object::Key);
  if (has(s, Subtask::OpenDoor)) objects.push_back(Object::Door);
  if (has(s, Subtask::PickupBall)) objects.push_back(Object::Ball);
  if (has(s, Subtask::OpenBox)) objects.push_back(Object::Box);

  const int interior = std::max(0, config.width - 2) * std::max(0, config.height - 2);
  if (static_cast<std::size_t>(interior) < objects.size() + 1)
    throw CapacityError("a " + std::to_string(config.width) + "x" + std::to_string(config.height) +
                        " room cannot hold " + std::to_string(objects.size() + 1) + " items");

  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      if (x == 0 || y == 0 || x == s.width - 1 || y == s.height - 1) s.at({x, y}).wall = true;

  std::vector<Pos> free;
  for (int y = 1; y < s.height - 1; ++y)
    for (int x = 1; x < s.width - 1; ++x) free.push_back({x, y});
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (const Pos& p : free) s.at(p) = Cell{};
    std::shuffle(free.begin(), free.end(), rng.engine());
    std::size_t next = 0;
    for (Object o : objects) s.at(free[next++]).object = o;
    s.agent = free[next];
    s.dir = static_cast<int>(rng.uniform_index(4));
    if (all_faceable(s)) return s;
  }
  throw CapacityError("no layout leaves every object within reach");
}

petri::StepOutcome grid_step(GridState& s, Action action) {
  if (s.done) throw ContractViolation("step on a finished grid episode");
  const double before = s.potential();
  petri::StepOutcome out;
  const Pos f = s.front();
  switch (action) {
    case Action::Left:
      s.dir = (s.dir + 3) % 4;
      break;
    case Action::Right:
      s.dir = (s.dir + 1) % 4;
      break;
    case Action::Forward:
      if (s.inside(f) && passable(s.at(f))) {
        s.agent = f;
        out.fired = true;
      }
      break;
    case Action::Pickup: {
      if (!s.inside(f) || s.carried != Object::None) break;
      Cell& c = s.at(f);
      if (c.object != Object::Key && c.object != Object::Ball) break;
      s.carried = c.object;
      c.object = Object::None;
      out.fired = true;
      const Subtask t = s.carried == Object::Key ? Subtask::PickupKey : Subtask::PickupBall;
      if (has(s, t) && ready(s, t)) s.completed.insert(t);
      break;
    }
    case Action::Drop: {
      if (!s.inside(f) || s.carried == Object::None) break;
      Cell& c = s.at(f);
      if (c.wall) break;
      if (s.carried == Object::Ball && c.object == Object::Box && c.open) {
        s.carried = Object::None;
        out.fired = true;
        if (has(s, Subtask::DropBall) && ready(s, Subtask::DropBall)) s.completed.insert(Subtask::DropBall);
      } else if (c.object == Object::None) {
        c.object = s.carried;
        s.carried = Object::None;
        out.fired = true;
      }
      break;
    }
    case Action::Toggle: {
      if (!s.inside(f)) break;
      Cell& c = s.at(f);
      if (c.object == Object::Door && !c.open && s.carried == Object::Key) {
        c.open = true;
        out.fired = true;
        if (ready(s, Subtask::OpenDoor)) s.completed.insert(Subtask::OpenDoor);
      } else if (c.object == Object::Box && !c.open) {
        c.open = true;
        out.fired = true;
        if (ready(s, Subtask::OpenBox)) s.completed.insert(Subtask::OpenBox);
      }
      break;
    }
  }
  ++s.steps;
  if (!s.contract.binary_only) {
    out.potential = s.potential() - before;
    out.penalty = -s.contract.step_penalty;
  }
  const bool all_done = s.completed.size() == s.design.subtasks.size();
  if (all_done && s.at(s.agent).object == Object::Goal) {
    out.done = out.success = true;
    out.terminal = s.contract.success_reward;
  } else if (s.steps >= s.horizon) {
    out.done = true;
    out.terminal = s.contract.failure_reward;
  }
  s.done = out.done;
  s.success = out.success;
  out.reward = out.potential + out.penalty + out.terminal;
  return out;
}

GridObservation grid_observation(const GridState& s) {
  GridObservation o;
  o.width = static_cast<std::size_t>(s.width);
  o.height = static_cast<std::size_t>(s.height);
  o.cells.assign(o.width * o.height * kNumChannels, 0.0);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const Cell& c = s.at({x, y});
      double* v = &o.cells[(static_cast<std::size_t>(y) * o.width + static_cast<std::size_t>(x)) * kNumChannels];
      if (c.wall) v[kWall] = 1.0;
      switch (c.object) {
        case Object::Key: v[kKey] = 1.0; break;
        case Object::Door: v[c.open ? kDoorOpen : kDoorClosed] = 1.0; break;
        case Object::Ball: v[kBall] = 1.0; break;
        case Object::Box: v[c.open ? kBoxOpen : kBoxClosed] = 1.0; break;
        case Object::Goal: v[kGoal] = 1.0; break;
        case Object::None: break;
      }
      if (s.agent == Pos{x, y}) v[kAgent] = 1.0;
    }
  o.position.assign(kPositionFeatures, 0.0);
  o.position[0] = static_cast<double>(s.agent.x) / std::max(1, s.width - 1);
  o.position[1] = static_cast<double>(s.agent.y) / std::max(1, s.height - 1);
  o.position[2 + static_cast<std::size_t>(s.dir)] = 1.0;
  o.position[6 + (s.carried == Object::Key ? 1 : s.carried == Object::Ball ? 2 : 0)] = 1.0;
  return o;
}

namespace {

std::optional<Pos> find(const GridState& s, Object o, std::optional<bool> open = std::nullopt) {
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const Cell& c = s.at({x, y});
      if (c.object == o && (!open || c.open == *open)) return Pos{x, y};
    }
  return std::nullopt;
}

/// First action of a shortest left/right/forward path to a pose satisfying `target`.
template <class Pred>
std::optional<Action> plan(const GridState& s, Pred target) {
  auto key = [&](Pos p, int d) { return (p.y * s.width + p.x) * 4 + d; };
  std::map<int, Action> first;
  std::deque<std::pair<Pos, int>> queue{{s.agent, s.dir}};
  std::vector<bool> seen(static_cast<std::size_t>(s.width * s.height * 4), false);
  seen[static_cast<std::size_t>(key(s.agent, s.dir))] = true;
  while (!queue.empty()) {
    auto [p, d] = queue.front();
    queue.pop_front();
    if (target(p, d)) {
      auto it = first.find(key(p, d));
      return it == first.end() ? std::nullopt : std::optional<Action>(it->second);
    }
    const std::pair<Action, std::pair<Pos, int>> moves[3] = {
        {Action::Left, {p, (d + 3) % 4}},
        {Action::Right, {p, (d + 1) % 4}},
        {Action::Forward, {Pos{p.x + kDirs[d].x, p.y + kDirs[d].y}, d}},
    };
    for (const auto& [a, next] : moves) {
      const auto [np, nd] = next;
      if (!s.inside(np) || !passable(s.at(np))) continue;
      const auto k = static_cast<std::size_t>(key(np, nd));
      if (seen[k]) continue;
      seen[k] = true;
      auto parent = first.find(key(p, d));
      first[key(np, nd)] = parent == first.end() ? a : parent->second;
      queue.push_back({np, nd});
    }
  }
  return std::nullopt;
}

/// Whether filling `cell` keeps every free cell reachable and every object faceable.
bool harmless_drop(const GridState& s, Pos from, Pos cell) {
  const auto before = reachable_cells(s, from, nullptr);
  const auto after = reachable_cells(s, from, &cell);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const Pos p{x, y};
      if (p == cell) continue;
      const auto i = static_cast<std::size_t>(y * s.width + x);
      if (before[i] && !after[i]) return false;
      if (s.at(p).wall || passable(s.at(p))) continue;
      bool faceable = false;
      for (const Pos& d : kDirs) {
        const Pos q{x + d.x, y + d.y};
        if (s.inside(q) && after[static_cast<std::size_t>(q.y * s.width + q.x)]) faceable = true;
      }
      if (!faceable) return false;
    }
  return true;
}

}  // namespace

Action oracle_action(const GridState& s) {
  auto pending = [&](Subtask t) { return has(s, t) && !done_task(s, t); };
  auto facing = [&](Pos target) {
    return [&s, target](Pos p, int d) { return Pos{p.x + kDirs[d].x, p.y + kDirs[d].y} == target; };
  };
  auto go_interact = [&](Pos target, Action a) -> Action {
    if (s.front() == target) return a;
    return plan(s, facing(target)).value_or(Action::Left);
  };
  auto droppable = [&](Pos p, int d) {
    const Pos f{p.x + kDirs[d].x, p.y + kDirs[d].y};
    if (!s.inside(f) || s.at(f).wall || s.at(f).object != Object::None) return false;
    return harmless_drop(s, p, f);
  };
  auto free_hands = [&]() -> Action {
    if (droppable(s.agent, s.dir)) return Action::Drop;
    return plan(s, droppable).value_or(Action::Left);
  };

  if (pending(Subtask::PickupKey)) {
    if (s.carried != Object::None) return free_hands();
    if (auto k = find(s, Object::Key)) return go_interact(*k, Action::Pickup);
  }
  if (pending(Subtask::OpenDoor)) {
    if (s.carried == Object::Key) {
      if (auto d = find(s, Object::Door, false)) return go_interact(*d, Action::Toggle);
    } else if (s.carried != Object::None) {
      return free_hands();
    } else if (auto k = find(s, Object::Key)) {
      return go_interact(*k, Action::Pickup);
    }
  }
  if (pending(Subtask::OpenBox)) {
    if (auto b = find(s, Object::Box, false)) return go_interact(*b, Action::Toggle);
  }
  if (pending(Subtask::PickupBall)) {
    if (s.carried != Object::None) return free_hands();
    if (auto b = find(s, Object::Ball)) return go_interact(*b, Action::Pickup);
  }
  if (pending(Subtask::DropBall)) {
    if (s.carried == Object::Ball) {
      if (auto b = find(s, Object::Box, true)) return go_interact(*b, Action::Drop);
    } else if (s.carried != Object::None) {
      return free_hands();
    } else if (auto b = find(s, Object::Ball)) {
      return go_interact(*b, Action::Pickup);
    }
  }
  if (auto g = find(s, Object::Goal)) {
    auto a = plan(s, [&](Pos p, int) { return p == *g; });
    if (a) return *a;
  }
  return Action::Left;
}

std::vector<std::pair<std::string, GridDesign>> grid_testbed() {
  using S = Subtask;
  return {
      {"goal", GridDesign{}},
      {"key", GridDesign{{S::PickupKey}}},
      {"door", GridDesign{{S::PickupKey, S::OpenDoor}}},
      {"ball_box", GridDesign{{S::PickupBall, S::OpenBox, S::DropBall}}},
      {"all", GridDesign{{S::PickupKey, S::OpenDoor, S::PickupBall, S::OpenBox, S::DropBall}}},
  };
}

}  // namespace codelab::grid
