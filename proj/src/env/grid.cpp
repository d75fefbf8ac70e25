#include "adex/env/grid.hpp"

namespace adex::env {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Forward: return "forward";
    case Action::Backward: return "backward";
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::Hover: return "hover";
  }
  return "?";
}

Cell delta(Action a) {
  switch (a) {
    case Action::Forward: return {0, -1};
    case Action::Backward: return {0, 1};
    case Action::Left: return {-1, 0};
    case Action::Right: return {1, 0};
    case Action::Hover: return {0, 0};
  }
  return {0, 0};
}

AgentPose step(AgentPose pose, Action a, int width, int height) {
  const Cell d = delta(a);
  AgentPose next = pose;
  if (pose.x + d.x >= 0 && pose.x + d.x < width) next.x += d.x;
  if (pose.y + d.y >= 0 && pose.y + d.y < height) next.y += d.y;
  return next;
}

}  // namespace adex::env
