#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace adex::nn {

/// Row-major 64-bit tensor. Only the shapes this project needs (1-D and 2-D)
/// show up in practice, but the shape vector is general.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  void fill(double value);
  bool all_finite() const;
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

/// A trainable parameter as seen by optimizers and the weight file writer.
struct ParamRef {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

using ParamList = std::vector<ParamRef>;

bool all_finite(std::span<const double> values);

}  // namespace adex::nn
