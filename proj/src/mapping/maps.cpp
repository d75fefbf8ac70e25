#include "adex/mapping/maps.hpp"

#include <algorithm>

#include "adex/error.hpp"

namespace adex::mapping {

AllocentricMap::AllocentricMap(int width, int height, double prior)
    : width_(width),
      height_(height),
      prior_(prior),
      belief_(static_cast<std::size_t>(width) * height, prior),
      seen_(static_cast<std::size_t>(width) * height, 0) {
  if (width <= 0 || height <= 0) throw ConfigError("allocentric map needs positive dimensions");
  if (!(prior >= 0.0 && prior < 1.0)) throw ConfigError("prior must be in [0,1)");
}

bool AllocentricMap::update(Cell c, double observed, BeliefUpdate rule, double rate) {
  const std::size_t i = index(c);
  const double value = std::clamp(observed, 0.0, 1.0);
  if (!seen_[i]) {
    seen_[i] = 1;
    ++seen_count_;
    belief_[i] = value;
    return true;
  }
  if (rule == BeliefUpdate::overwrite) {
    belief_[i] = value;
  } else {
    belief_[i] = (1.0 - rate) * belief_[i] + rate * value;
  }
  return false;
}

VisitMap::VisitMap(int width, int height)
    : width_(width), height_(height), counts_(static_cast<std::size_t>(width) * height, 0) {
  if (width <= 0 || height <= 0) throw ConfigError("visit map needs positive dimensions");
}

std::vector<NewlySeen> integrate_observation(AllocentricMap& belief, VisitMap& visits,
                                             const env::Observation& o, AgentPose pose,
                                             BeliefUpdate rule) {
  std::vector<NewlySeen> fresh;
  const int r = o.side / 2;
  std::size_t k = 0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx, ++k) {
      const double v = o.values[k];
      if (v == env::kOutside) continue;
      const Cell c{pose.x + dx, pose.y + dy};
      if (!env::in_bounds(c, belief.width(), belief.height())) continue;
      if (belief.update(c, v, rule)) fresh.push_back({c, v});
    }
  }
  visits.record(pose);
  return fresh;
}

double EgocentricMap::at(int dx, int dy) const {
  const int r = side / 2;
  return values[static_cast<std::size_t>((dy + r) * side + (dx + r))];
}

void extract_egocentric_into(const AllocentricMap& belief, AgentPose pose, int side, std::span<double> out) {
  const int r = side / 2;
  std::size_t k = 0;
  for (int dy = -r; dy <= r; ++dy) {
    const int y = pose.y + dy;
    for (int dx = -r; dx <= r; ++dx, ++k) {
      const Cell c{pose.x + dx, y};
      out[k] = (env::in_bounds(c, belief.width(), belief.height()) && belief.seen(c)) ? belief.belief(c)
                                                                                     : kUnseen;
    }
  }
}

EgocentricMap extract_egocentric(const AllocentricMap& belief, AgentPose pose, int side) {
  if (side <= 0 || side % 2 == 0) throw ConfigError("egocentric side must be odd and positive");
  EgocentricMap m;
  m.side = side;
  m.anchor = pose;
  m.values.resize(static_cast<std::size_t>(side) * side);
  extract_egocentric_into(belief, pose, side, m.values);
  return m;
}

double visit_value(std::uint32_t count, const VisitEncodingConfig& cfg) {
  if (cfg.encoding == VisitEncoding::binary) return count > 0 ? 1.0 : 0.0;
  const auto c = static_cast<double>(std::min<std::uint32_t>(count, static_cast<std::uint32_t>(cfg.saturation)));
  return c / cfg.saturation;
}

std::array<double, 4> visited_adjacency(const VisitMap& visits, AgentPose pose, const VisitEncodingConfig& cfg) {
  const std::array<Cell, 4> neighbours = {Cell{pose.x - 1, pose.y}, Cell{pose.x + 1, pose.y},
                                          Cell{pose.x, pose.y - 1}, Cell{pose.x, pose.y + 1}};
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = env::in_bounds(neighbours[i], visits.width(), visits.height())
                 ? visit_value(visits.count(neighbours[i]), cfg)
                 : 1.0;
  }
  return out;
}

}  // namespace adex::mapping
