#pragma once

#include <array>
#include <cstddef>

#include "pdcv/mdp.hpp"

namespace pdcv {

/// Grid directions. North decreases the row index.
enum class Direction : ActionId { North = 0, East = 1, South = 2, West = 3 };

struct Cell {
  int col;
  int row;
  bool operator==(const Cell&) const = default;
};

/// Deterministic grid with terminal cells in the top-left and bottom-right
/// corners, start in the centre, reward -1 per transition and no discounting.
/// Bumping into a wall leaves the agent where it was.
class GridWorld {
 public:
  using Observation = StateId;
  static constexpr std::size_t kActions = 4;
  static constexpr std::size_t kDefaultStepCap = 100000;

  explicit GridWorld(int width = 5, int height = 5);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t state_count() const { return static_cast<std::size_t>(width_ * height_); }
  std::size_t action_count() const { return kActions; }

  StateId state_of(Cell c) const { return static_cast<StateId>(c.row * width_ + c.col); }
  Cell cell_of(StateId s) const {
    return {static_cast<int>(s) % width_, static_cast<int>(s) / width_};
  }
  bool is_terminal(StateId s) const;
  StateId start_state() const { return state_of({width_ / 2, height_ / 2}); }

  /// Throws std::logic_error when called from a terminal cell.
  StepOutcome<StateId> step(StateId s, ActionId a) const;

  // Environment concept.
  StateId reset(Rng&) { return start_state(); }
  StepOutcome<StateId> step(StateId s, ActionId a, Rng&) const { return step(s, a); }

  /// Image of a state under the half-turn that swaps the two terminal corners.
  StateId rotate_state(StateId s) const;
  static ActionId rotate_action(ActionId a) { return (a + 2) % kActions; }

 private:
  int width_;
  int height_;
};

/// Explicit model equivalent to GridWorld::step, for the exact oracles.
/// Starts deterministically in the centre cell.
TabularMdp gridworld_model(const GridWorld& grid = GridWorld{});

/// Target policy of the off-policy study: move north with probability
/// 1 - epsilon, otherwise pick uniformly among the four directions.
DiscretePolicy gridworld_north_policy(const GridWorld& grid, double epsilon);

struct MountainCarState {
  double position;
  double velocity;
};

/// Classic mountain car with throttle actions {reverse, coast, forward}
/// encoded as action indices 0, 1, 2.
class MountainCar {
 public:
  using Observation = MountainCarState;
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.5;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoal = 0.5;
  static constexpr std::size_t kActions = 3;
  static constexpr std::size_t kDefaultStepCap = 20000;

  static double throttle(ActionId a) { return static_cast<double>(a) - 1.0; }

  /// Throttle is given as -1, 0 or +1.
  static StepOutcome<MountainCarState> step_throttle(MountainCarState s, double throttle);

  std::size_t action_count() const { return kActions; }
  MountainCarState reset(Rng& rng) const;
  StepOutcome<MountainCarState> step(const MountainCarState& s, ActionId a, Rng&) const {
    return step_throttle(s, throttle(a));
  }
};

/// Start position uniform in [-0.6, -0.4), at rest.
MountainCarState mountain_car_start(Rng& rng);

}  // namespace pdcv
