#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>

#include "adex/env/scenario.hpp"

namespace adex::env {

// "AOIMAP v1" text format:
//
//   AOIMAP v1 <W> <H> [victim <x> <y>]
//   H lines of W space-separated decimals
//
// Probability maps are written with 17 significant digits so they reload
// exactly. The same layout carries belief maps and integer visit counts for
// debugging; only probability maps are range-checked on load.

void write_aoimap(std::ostream& out, int width, int height, std::span<const double> values,
                  const std::optional<Cell>& victim = {});
void write_aoimap(std::ostream& out, const GroundTruthMap& map);
GroundTruthMap read_aoimap(std::istream& in);

void save_map(const std::filesystem::path& path, const GroundTruthMap& map);
GroundTruthMap load_map(const std::filesystem::path& path);

}  // namespace adex::env
