#include "adex/env/map_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "adex/error.hpp"

namespace adex::env {

void write_aoimap(std::ostream& out, int width, int height, std::span<const double> values,
                  const std::optional<Cell>& victim) {
  out << "AOIMAP v1 " << width << ' ' << height;
  if (victim) out << " victim " << victim->x << ' ' << victim->y;
  out << '\n';
  char buf[40];
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::snprintf(buf, sizeof buf, "%.17g", values[static_cast<std::size_t>(y) * width + x]);
      if (x) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

void write_aoimap(std::ostream& out, const GroundTruthMap& map) {
  write_aoimap(out, map.width(), map.height(), map.values(), map.victim());
}

GroundTruthMap read_aoimap(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty map file");
  std::istringstream head(line);
  std::string magic, version;
  int width = 0, height = 0;
  head >> magic >> version >> width >> height;
  if (!head || magic != "AOIMAP" || version != "v1") throw ConfigError("not an AOIMAP v1 file");
  if (width <= 0 || height <= 0) throw ConfigError("map header has non-positive dimensions");
  std::optional<Cell> victim;
  std::string keyword;
  if (head >> keyword) {
    Cell c;
    if (keyword != "victim" || !(head >> c.x >> c.y)) throw ConfigError("bad map header: " + line);
    victim = c;
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    if (!std::getline(in, line)) throw ConfigError("map file has fewer than " + std::to_string(height) + " rows");
    const char* p = line.data();
    const char* end = line.data() + line.size();
    int count = 0;
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw ConfigError("bad number in map row " + std::to_string(y));
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("map value outside [0,1] in row " + std::to_string(y));
      }
      values.push_back(v);
      ++count;
      p = next;
    }
    if (count != width) {
      throw ConfigError("map row " + std::to_string(y) + " has " + std::to_string(count) +
                        " values, expected " + std::to_string(width));
    }
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw ConfigError("map file has extra rows");
  }
  return GroundTruthMap(width, height, std::move(values), victim);
}

void save_map(const std::filesystem::path& path, const GroundTruthMap& map) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_aoimap(out, map);
}

GroundTruthMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open map " + path.string());
  return read_aoimap(in);
}

}  // namespace adex::env
