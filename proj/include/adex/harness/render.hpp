#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "adex/env/scenario.hpp"
#include "adex/metrics.hpp"

namespace adex::harness {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
  const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Background shade for an AoI probability: light gray at 0, red at 1.
Rgb background_color(double p);
/// Purple that darkens with the visit count: strictly for the first ten
/// visits, then slowly enough that 8-bit channels may tie.
Rgb path_color(std::size_t visits);
inline constexpr Rgb kTargetColor{255, 200, 0};
inline constexpr Rgb kVictimColor{0, 170, 0};

/// scale x scale pixels per cell: background, visited cells, target
/// centroids, victim.
Image render_image(const env::GroundTruthMap& map, const metrics::EpisodeMetrics& metrics, int scale);

void write_ppm(const std::filesystem::path& path, const Image& image);

void render_trajectory(const env::GroundTruthMap& map, const metrics::EpisodeMetrics& metrics,
                       const std::filesystem::path& path, int scale = 4);

/// Episode rows back from a metrics CSV (targets and victim step are not stored there).
metrics::EpisodeMetrics read_episode_csv(const std::filesystem::path& path);

}  // namespace adex::harness
