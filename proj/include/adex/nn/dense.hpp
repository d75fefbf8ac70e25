#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "adex/nn/tensor.hpp"
#include "adex/rng.hpp"

namespace adex::nn {

enum class Activation { relu, tanh, linear, softmax };

const char* to_string(Activation a);

/// Fully-connected layer y = act(x W + b) with W stored [in, out].
///
/// forward() is const and keeps no state; backward() takes the input and the
/// post-activation output of the matching forward call and accumulates into
/// the gradient tensors. relu, tanh and softmax derivatives are all
/// expressible from the output, so nothing else needs caching.
class DenseLayer {
 public:
  DenseLayer(std::string name, std::size_t in, std::size_t out, Activation act);

  std::size_t in_size() const { return in_; }
  std::size_t out_size() const { return out_; }
  Activation activation() const { return act_; }
  const std::string& name() const { return name_; }

  /// Glorot/Xavier uniform weights, zero bias.
  void init_glorot(Rng& rng);

  void forward(std::span<const double> x, std::span<double> y) const;
  std::vector<double> forward(std::span<const double> x) const;

  /// dx may be empty when the input gradient is not needed; otherwise it is
  /// accumulated into (+=).
  void backward(std::span<const double> x, std::span<const double> y, std::span<const double> dy,
                std::span<double> dx);

  /// Row-wise forward of a [rows, in] batch into [rows, out]. Row r matches
  /// forward() on row r bit for bit.
  void forward_batch(std::span<const double> x, std::size_t rows, std::span<double> y) const;

  /// Batched backward; same contract as backward() with every argument
  /// carrying `rows` rows.
  void backward_batch(std::span<const double> x, std::span<const double> y, std::span<const double> dy,
                      std::size_t rows, std::span<double> dx);

  Tensor& weights() { return w_; }
  const Tensor& weights() const { return w_; }
  Tensor& bias() { return b_; }
  const Tensor& bias() const { return b_; }
  Tensor& weight_grad() { return gw_; }
  Tensor& bias_grad() { return gb_; }

  void append_params(ParamList& out);

 private:
  std::string name_;
  std::size_t in_;
  std::size_t out_;
  Activation act_;
  Tensor w_, b_, gw_, gb_;
};

/// In-place softmax with max subtraction.
void softmax_inplace(std::span<double> z);

}  // namespace adex::nn
