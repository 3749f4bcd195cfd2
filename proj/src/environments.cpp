#include "pdcv/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdcv {

GridWorld::GridWorld(int width, int height) : width_(width), height_(height) {
  if (width < 2 || height < 2) throw std::invalid_argument("GridWorld: grid must be at least 2x2");
}

bool GridWorld::is_terminal(StateId s) const {
  return s == 0 || s == state_count() - 1;
}

StepOutcome<StateId> GridWorld::step(StateId s, ActionId a) const {
  if (s >= state_count()) throw std::out_of_range("GridWorld: state out of range");
  if (is_terminal(s)) throw std::logic_error("GridWorld: step from terminal cell");
  Cell c = cell_of(s);
  switch (static_cast<Direction>(a)) {
    case Direction::North: c.row = std::max(c.row - 1, 0); break;
    case Direction::East: c.col = std::min(c.col + 1, width_ - 1); break;
    case Direction::South: c.row = std::min(c.row + 1, height_ - 1); break;
    case Direction::West: c.col = std::max(c.col - 1, 0); break;
    default: throw std::out_of_range("GridWorld: action out of range");
  }
  const StateId next = state_of(c);
  return {-1.0, next, is_terminal(next)};
}

StateId GridWorld::rotate_state(StateId s) const {
  const Cell c = cell_of(s);
  return state_of({width_ - 1 - c.col, height_ - 1 - c.row});
}

TabularMdp gridworld_model(const GridWorld& grid) {
  const std::size_t n = grid.state_count();
  std::vector<std::size_t> action_counts(n, GridWorld::kActions);
  std::vector<std::vector<Outcome>> dynamics;
  std::vector<bool> terminal(n);
  for (StateId s = 0; s < n; ++s) {
    terminal[s] = grid.is_terminal(s);
    for (ActionId a = 0; a < GridWorld::kActions; ++a) {
      if (terminal[s]) {
        dynamics.emplace_back();
        continue;
      }
      const auto out = grid.step(s, a);
      dynamics.push_back({Outcome{1.0, out.reward, out.next}});
    }
  }
  std::vector<double> start(n, 0.0);
  start[grid.start_state()] = 1.0;
  return TabularMdp(std::move(action_counts), std::move(dynamics), std::move(terminal), 1.0,
                    std::move(start));
}

DiscretePolicy gridworld_north_policy(const GridWorld& grid, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("gridworld_north_policy: epsilon outside [0,1]");
  }
  std::vector<double> row(GridWorld::kActions, epsilon / GridWorld::kActions);
  row[static_cast<ActionId>(Direction::North)] += 1.0 - epsilon;
  return DiscretePolicy(std::vector<std::vector<double>>(grid.state_count(), row));
}

StepOutcome<MountainCarState> MountainCar::step_throttle(MountainCarState s, double throttle) {
  double v = s.velocity + 0.001 * throttle - 0.0025 * std::cos(3.0 * s.position);
  v = std::clamp(v, -kMaxSpeed, kMaxSpeed);
  double x = std::clamp(s.position + v, kMinPosition, kMaxPosition);
  if (x == kMinPosition) v = 0.0;
  return {-1.0, {x, v}, x >= kGoal};
}

MountainCarState MountainCar::reset(Rng& rng) const { return mountain_car_start(rng); }

MountainCarState mountain_car_start(Rng& rng) { return {rng.uniform(-0.6, -0.4), 0.0}; }

}  // namespace pdcv
