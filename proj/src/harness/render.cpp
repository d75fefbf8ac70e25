#include "adex/harness/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "adex/error.hpp"

namespace adex::harness {

namespace {

std::uint8_t channel(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); }

void fill_cell(Image& img, int cx, int cy, int scale, Rgb color) {
  for (int y = cy * scale; y < (cy + 1) * scale; ++y) {
    for (int x = cx * scale; x < (cx + 1) * scale; ++x) img.pixels[static_cast<std::size_t>(y) * img.width + x] = color;
  }
}

}  // namespace

Rgb background_color(double p) {
  p = std::clamp(p, 0.0, 1.0);
  return {channel(200.0 + 55.0 * p), channel(200.0 - 150.0 * p), channel(200.0 - 150.0 * p)};
}

Rgb path_color(std::size_t visits) {
  if (visits == 0) return {};
  // 1 visit gives full brightness, every further visit strictly less.
  const double f = 0.3 + 0.7 / static_cast<double>(visits);
  return {channel(170.0 * f), channel(60.0 * f), channel(200.0 * f)};
}

Image render_image(const env::GroundTruthMap& map, const metrics::EpisodeMetrics& m, int scale) {
  if (scale <= 0) throw ConfigError("render scale must be positive");
  Image img;
  img.width = map.width() * scale;
  img.height = map.height() * scale;
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) fill_cell(img, x, y, scale, background_color(map.at(x, y)));
  }
  std::vector<std::size_t> visits(map.cell_count(), 0);
  for (const auto& row : m.rows) {
    if (!env::in_bounds({row.x, row.y}, map.width(), map.height())) throw ConfigError("trajectory leaves the map");
    ++visits[static_cast<std::size_t>(row.y) * map.width() + row.x];
  }
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const auto n = visits[static_cast<std::size_t>(y) * map.width() + x];
      if (n > 0) fill_cell(img, x, y, scale, path_color(n));
    }
  }
  for (const auto& t : m.targets) {
    if (env::in_bounds(t, map.width(), map.height())) fill_cell(img, t.x, t.y, scale, kTargetColor);
  }
  if (map.victim()) fill_cell(img, map.victim()->x, map.victim()->y, scale, kVictimColor);
  return img;
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  for (const auto& p : image.pixels) {
    const char bytes[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    out.write(bytes, 3);
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void render_trajectory(const env::GroundTruthMap& map, const metrics::EpisodeMetrics& metrics,
                       const std::filesystem::path& path, int scale) {
  write_ppm(path, render_image(map, metrics, scale));
}

metrics::EpisodeMetrics read_episode_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "episode,step,x,y,aoi_cov,total_cov,reward") {
    throw ConfigError(path.string() + ": not a metrics CSV");
  }
  metrics::EpisodeMetrics m;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    long episode = 0;
    metrics::StepRecord r;
    if (!(row >> episode >> r.step >> r.x >> r.y >> r.aoi_coverage >> r.total_coverage >> r.reward)) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": malformed row");
    }
    m.rows.push_back(r);
  }
  return m;
}

}  // namespace adex::harness
