#include "adex/env/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adex/error.hpp"
#include "adex/rng.hpp"

namespace adex::env {

GroundTruthMap::GroundTruthMap(int width, int height, std::vector<double> aoi, std::optional<Cell> victim)
    : width_(width), height_(height), aoi_(std::move(aoi)), victim_(victim) {
  if (width < kMinMapSide || height < kMinMapSide) {
    throw ConfigError("map must be at least " + std::to_string(kMinMapSide) + " cells on each side");
  }
  if (aoi_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ConfigError("map value count does not match its dimensions");
  }
  for (double v : aoi_) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("map value outside [0,1]");
    total_mass_ += v;
  }
  if (victim_ && !in_bounds(*victim_, width, height)) throw ConfigError("victim cell out of bounds");
}

std::string to_string(ScenarioKind kind) {
  return kind == ScenarioKind::aoi_field ? "aoi-field" : "sar-victim";
}

ScenarioKind parse_scenario_kind(const std::string& text) {
  if (text == "aoi-field") return ScenarioKind::aoi_field;
  if (text == "sar-victim") return ScenarioKind::sar_victim;
  throw ConfigError("unknown scenario kind '" + text + "'");
}

void validate(const ScenarioSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) throw ConfigError("scenario has zero area");
  if (spec.width < kMinMapSide || spec.height < kMinMapSide) {
    throw ConfigError("scenario sides must be at least " + std::to_string(kMinMapSide));
  }
  if (spec.blob_count && *spec.blob_count < 0) throw ConfigError("blob count must be >= 0");
  if (!(spec.density >= 0.0 && spec.density < 1.0)) throw ConfigError("density must be in [0,1)");
  if (!(spec.blob_sigma > 0.0)) throw ConfigError("blob sigma must be positive");
  if (!(spec.aspect >= 1.0)) throw ConfigError("blob aspect must be >= 1");
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate <= 1.0)) throw ConfigError("noise rate must be in [0,1]");
  if (!(spec.victim_sigma > 0.0)) throw ConfigError("victim sigma must be positive");
}

namespace {

struct Blob {
  double cx, cy, sx, sy, cos_t, sin_t;
};

Blob draw_blob(Rng& rng, const ScenarioSpec& spec) {
  Blob b{};
  b.cx = rng.uniform(0.0, spec.width);
  b.cy = rng.uniform(0.0, spec.height);
  const double log_aspect = std::log(spec.aspect);
  const double ratio = std::exp(rng.uniform(-log_aspect, log_aspect));
  b.sx = spec.blob_sigma * std::sqrt(ratio);
  b.sy = spec.blob_sigma / std::sqrt(ratio);
  const double theta = rng.uniform(0.0, std::numbers::pi);
  b.cos_t = std::cos(theta);
  b.sin_t = std::sin(theta);
  return b;
}

// Adds a blob to the raw field and returns the change in saturated mass.
double stamp(std::vector<double>& raw, int width, int height, const Blob& b) {
  const double reach = 4.0 * std::max(b.sx, b.sy);
  const int x0 = std::max(0, static_cast<int>(std::floor(b.cx - reach)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(b.cx + reach)));
  const int y0 = std::max(0, static_cast<int>(std::floor(b.cy - reach)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(b.cy + reach)));
  double gained = 0.0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      // Cell centres sit at integer + 0.5.
      const double dx = x + 0.5 - b.cx;
      const double dy = y + 0.5 - b.cy;
      const double u = dx * b.cos_t + dy * b.sin_t;
      const double v = -dx * b.sin_t + dy * b.cos_t;
      const double bump = std::exp(-0.5 * (u * u / (b.sx * b.sx) + v * v / (b.sy * b.sy)));
      double& cell = raw[static_cast<std::size_t>(y) * width + x];
      const double before = std::min(1.0, cell);
      cell += bump;
      gained += std::min(1.0, cell) - before;
    }
  }
  return gained;
}

}  // namespace

GroundTruthMap generate_scenario(const ScenarioSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const int W = spec.width;
  const int H = spec.height;
  const double cells = static_cast<double>(W) * H;
  std::vector<double> raw(static_cast<std::size_t>(W) * H, 0.0);

  if (spec.blob_count) {
    for (int i = 0; i < *spec.blob_count; ++i) stamp(raw, W, H, draw_blob(rng, spec));
  } else if (spec.density > 0.0) {
    const double target = spec.density * cells;
    double mass = 0.0;
    // Stop at whichever side of the target is closer, but never leave the
    // map empty: a blob larger than the whole target still goes in.
    for (int guard = 0; guard < 100000 && mass < target; ++guard) {
      const Blob blob = draw_blob(rng, spec);
      std::vector<double> trial = raw;
      const double gained = stamp(trial, W, H, blob);
      if (mass > 0.0 && mass + gained - target > target - mass) break;
      raw.swap(trial);
      mass += gained;
    }
  }
  for (double& v : raw) v = std::min(1.0, v);

  if (spec.noise_rate > 0.0) {
    for (double& v : raw) {
      if (rng.bernoulli(spec.noise_rate)) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
  }

  std::optional<Cell> victim;
  if (spec.kind == ScenarioKind::sar_victim) {
    const Cell c{static_cast<int>(rng.below(static_cast<std::uint64_t>(W))),
                 static_cast<int>(rng.below(static_cast<std::uint64_t>(H)))};
    victim = c;
    const int reach = static_cast<int>(std::ceil(3.0 * spec.victim_sigma));
    for (int y = std::max(0, c.y - reach); y <= std::min(H - 1, c.y + reach); ++y) {
      for (int x = std::max(0, c.x - reach); x <= std::min(W - 1, c.x + reach); ++x) {
        const double d2 = static_cast<double>((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y));
        const double halo = std::exp(-d2 / (2.0 * spec.victim_sigma * spec.victim_sigma));
        double& cell = raw[static_cast<std::size_t>(y) * W + x];
        cell = std::max(cell, halo);
      }
    }
  }
  return GroundTruthMap(W, H, std::move(raw), victim);
}

double Observation::at(int dx, int dy) const {
  const int r = side / 2;
  return values[static_cast<std::size_t>((dy + r) * side + (dx + r))];
}

Observation observe(const GroundTruthMap& map, AgentPose pose, int side) {
  if (side <= 0 || side % 2 == 0) throw ConfigError("observation side must be odd and positive");
  Observation o;
  o.side = side;
  o.values.resize(static_cast<std::size_t>(side) * side);
  const int r = side / 2;
  std::size_t k = 0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const Cell c{pose.x + dx, pose.y + dy};
      o.values[k++] = in_bounds(c, map.width(), map.height()) ? map.at(c) : kOutside;
    }
  }
  return o;
}

}  // namespace adex::env
