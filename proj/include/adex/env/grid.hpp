#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace adex::env {

/// Cell coordinates, origin top-left, y grows downward.
struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

using AgentPose = Cell;

enum class Action : int { Forward = 0, Backward = 1, Left = 2, Right = 3, Hover = 4 };

inline constexpr std::size_t kActionCount = 5;
inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::Forward, Action::Backward, Action::Left, Action::Right, Action::Hover};

inline constexpr std::size_t index_of(Action a) { return static_cast<std::size_t>(a); }
inline constexpr Action action_at(std::size_t i) { return kAllActions.at(i); }

std::string_view to_string(Action a);

/// Displacement of an action: Forward is y - 1, Backward y + 1.
Cell delta(Action a);

inline bool in_bounds(Cell c, int width, int height) {
  return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height;
}

/// Moves one cell or hovers. A move that would leave the map leaves that
/// coordinate unchanged.
AgentPose step(AgentPose pose, Action a, int width, int height);

}  // namespace adex::env
