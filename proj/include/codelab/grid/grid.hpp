#pragma once

#include "codelab/petri/pomdp.hpp"
#include "codelab/random.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace codelab::grid {

enum class Subtask { PickupKey, OpenDoor, PickupBall, OpenBox, DropBall };
inline constexpr std::size_t kNumSubtasks = 5;

std::string to_string(Subtask s);
Subtask parse_subtask(const std::string& name);
std::vector<Subtask> all_subtasks();

/// Direct prerequisites in the global workflow (Key -> Door, Ball -> DropBall, Box -> DropBall).
std::vector<Subtask> prerequisites(Subtask s);

/// Subtask set; the goal is implicit and always present.
struct GridDesign {
  std::set<Subtask> subtasks;
  bool operator==(const GridDesign&) const = default;
};

GridDesign closure(const GridDesign& design);
bool is_closed(const GridDesign& design);

nlohmann::json to_json(const GridDesign& design);
GridDesign grid_design_from_json(const nlohmann::json& doc);

enum class Action { Left, Right, Forward, Pickup, Drop, Toggle };
inline constexpr std::size_t kNumActions = 6;

enum class Object { None, Key, Door, Ball, Box, Goal };

struct Cell {
  bool wall = false;
  Object object = Object::None;
  bool open = false;  // doors and boxes
};

struct Pos {
  int x = 0;
  int y = 0;
  bool operator==(const Pos&) const = default;
};

struct GridConfig {
  int width = 8;
  int height = 8;
  std::size_t horizon = 64;
  petri::RewardContract contract;
};

struct GridState {
  GridDesign design;
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;  // row-major, y * width + x
  Pos agent;
  int dir = 0;  // 0 east, 1 south, 2 west, 3 north
  Object carried = Object::None;
  std::set<Subtask> completed;
  std::size_t steps = 0;
  std::size_t horizon = 64;
  petri::RewardContract contract;
  bool done = false;
  bool success = false;

  Cell& at(Pos p) { return cells[static_cast<std::size_t>(p.y * width + p.x)]; }
  const Cell& at(Pos p) const { return cells[static_cast<std::size_t>(p.y * width + p.x)]; }
  bool inside(Pos p) const { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; }
  Pos front() const;
  double potential() const;
};

/// One walled room with the design's objects and the agent on distinct empty
/// cells. Rejects designs that are not dependency-closed (ValidityError) and
/// rooms too small for the objects (CapacityError).
GridState build_grid(const GridDesign& design, RandomStream& rng, const GridConfig& config = {});

petri::StepOutcome grid_step(GridState& state, Action action);

enum Channel { kWall, kKey, kDoorClosed, kDoorOpen, kBall, kBoxClosed, kBoxOpen, kGoal, kAgent };
inline constexpr std::size_t kNumChannels = 9;

struct GridObservation {
  std::vector<double> cells;     // width * height * kNumChannels, cell-major
  std::vector<double> position;  // x, y scaled to [0,1], one-hot direction, one-hot carried
  std::size_t width = 0;
  std::size_t height = 0;
};

inline constexpr std::size_t kPositionFeatures = 2 + 4 + 3;

GridObservation grid_observation(const GridState& state);

/// Scripted planner: next action along a shortest plan that completes pending
/// subtasks in workflow order and then walks to the goal.
Action oracle_action(const GridState& state);

/// Fixed evaluation designs for the grid domain.
std::vector<std::pair<std::string, GridDesign>> grid_testbed();

}  // namespace codelab::grid
