#pragma once

#include <filesystem>
#include <iosfwd>

#include "adex/nn/tensor.hpp"

namespace adex::nn {

// "WEIGHTS v1" text format:
//
//   WEIGHTS v1
//   <name> shape <d0> [<d1> ...]
//   <value>            one per line, row-major, %.17g
//   ...
//
// Blocks appear in ParamList order. Loading requires the same names in the
// same order with identical shapes.

void write_weights(std::ostream& out, const ParamList& params);
void read_weights(std::istream& in, const ParamList& params);

void save_weights(const std::filesystem::path& path, const ParamList& params);
void load_weights(const std::filesystem::path& path, const ParamList& params);

}  // namespace adex::nn
