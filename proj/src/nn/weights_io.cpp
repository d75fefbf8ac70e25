#include "adex/nn/weights_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "adex/error.hpp"

namespace adex::nn {
namespace {

constexpr const char* kHeader = "WEIGHTS v1";

double parse_double(const std::string& line, const std::string& context) {
  double value = 0.0;
  const char* first = line.data();
  const char* last = line.data() + line.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("bad value '" + line + "' in " + context);
  }
  return value;
}

}  // namespace

void write_weights(std::ostream& out, const ParamList& params) {
  out << kHeader << '\n';
  char buf[40];
  for (const auto& p : params) {
    out << p.name << " shape";
    for (std::size_t d : p.value->shape()) out << ' ' << d;
    out << '\n';
    for (double v : p.value->values()) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << '\n';
    }
  }
}

void read_weights(std::istream& in, const ParamList& params) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ConfigError("not a WEIGHTS v1 file");
  std::vector<Tensor> staged;
  staged.reserve(params.size());
  for (const auto& p : params) {
    if (!std::getline(in, line)) throw ConfigError("weights file ends before " + p.name);
    std::istringstream head(line);
    std::string name, keyword;
    head >> name >> keyword;
    if (name != p.name || keyword != "shape") {
      throw ConfigError("expected parameter " + p.name + ", found '" + line + "'");
    }
    std::vector<std::size_t> shape;
    std::size_t d = 0;
    while (head >> d) shape.push_back(d);
    if (shape != p.value->shape()) {
      throw ConfigError("shape mismatch for " + p.name + ": file has " + line);
    }
    std::vector<double> values(p.value->size());
    for (double& v : values) {
      if (!std::getline(in, line)) throw ConfigError("weights file truncated in " + p.name);
      v = parse_double(line, p.name);
    }
    staged.emplace_back(shape, std::move(values));
  }
  if (std::getline(in, line) && !line.empty()) {
    throw ConfigError("unexpected trailing content in weights file: " + line);
  }
  for (std::size_t k = 0; k < params.size(); ++k) *params[k].value = std::move(staged[k]);
}

void save_weights(const std::filesystem::path& path, const ParamList& params) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_weights(out, params);
  if (!out) throw IoError("write failed for " + path.string());
}

void load_weights(const std::filesystem::path& path, const ParamList& params) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weights file " + path.string());
  read_weights(in, params);
}

}  // namespace adex::nn
