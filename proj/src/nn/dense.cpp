#include "adex/nn/dense.hpp"

#include <algorithm>
#include <cmath>

#include "adex/error.hpp"
#include "adex/kernels.hpp"

namespace adex::nn {

const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
    case Activation::softmax: return "softmax";
  }
  return "?";
}

DenseLayer::DenseLayer(std::string name, std::size_t in, std::size_t out, Activation act)
    : name_(std::move(name)),
      in_(in),
      out_(out),
      act_(act),
      w_({in, out}),
      b_({out}),
      gw_({in, out}),
      gb_({out}) {
  if (in == 0 || out == 0) throw ConfigError("dense layer " + name_ + " has a zero dimension");
}

void DenseLayer::init_glorot(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_ + out_));
  for (double& v : w_.values()) v = rng.uniform(-limit, limit);
  b_.fill(0.0);
}

void softmax_inplace(std::span<double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

namespace {

void activate(Activation act, std::span<double> y) {
  switch (act) {
    case Activation::relu:
      for (double& v : y) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::tanh:
      for (double& v : y) v = std::tanh(v);
      break;
    case Activation::linear:
      break;
    case Activation::softmax:
      softmax_inplace(y);
      break;
  }
}

// Gradient w.r.t. the pre-activation from the output and its gradient.
void activation_grad(Activation act, std::span<const double> y, std::span<const double> dy, std::span<double> dz) {
  const std::size_t n = y.size();
  switch (act) {
    case Activation::relu:
      for (std::size_t j = 0; j < n; ++j) dz[j] = y[j] > 0.0 ? dy[j] : 0.0;
      break;
    case Activation::tanh:
      for (std::size_t j = 0; j < n; ++j) dz[j] = dy[j] * (1.0 - y[j] * y[j]);
      break;
    case Activation::linear:
      std::copy(dy.begin(), dy.end(), dz.begin());
      break;
    case Activation::softmax: {
      double inner = 0.0;
      for (std::size_t j = 0; j < n; ++j) inner += y[j] * dy[j];
      for (std::size_t j = 0; j < n; ++j) dz[j] = y[j] * (dy[j] - inner);
      break;
    }
  }
}

}  // namespace

void DenseLayer::forward(std::span<const double> x, std::span<double> y) const {
  if (x.size() != in_ || y.size() != out_) {
    throw ConfigError("dense layer " + name_ + ": expected input " + std::to_string(in_) + " got " +
                      std::to_string(x.size()));
  }
  std::copy(b_.values().begin(), b_.values().end(), y.begin());
  kernels::accumulate_xw(w_.values(), in_, out_, x, y);
  activate(act_, y);
  if (!all_finite(y)) throw NumericError("non-finite output from dense layer " + name_);
}

void DenseLayer::forward_batch(std::span<const double> x, std::size_t rows, std::span<double> y) const {
  if (x.size() != rows * in_ || y.size() != rows * out_) {
    throw ConfigError("dense layer " + name_ + ": batch shape mismatch");
  }
  for (std::size_t r = 0; r < rows; ++r) std::copy(b_.values().begin(), b_.values().end(), y.begin() + r * out_);
  kernels::gemm(x, w_.values(), y, rows, in_, out_);
  for (std::size_t r = 0; r < rows; ++r) activate(act_, y.subspan(r * out_, out_));
  if (!all_finite(y)) throw NumericError("non-finite output from dense layer " + name_);
}

std::vector<double> DenseLayer::forward(std::span<const double> x) const {
  std::vector<double> y(out_);
  forward(x, y);
  return y;
}

void DenseLayer::backward(std::span<const double> x, std::span<const double> y,
                          std::span<const double> dy, std::span<double> dx) {
  std::vector<double> dz(out_);
  activation_grad(act_, y, dy, dz);
  kernels::accumulate_outer(gw_.values(), in_, out_, x, dz);
  for (std::size_t j = 0; j < out_; ++j) gb_[j] += dz[j];
  if (!dx.empty()) kernels::accumulate_wv(w_.values(), in_, out_, dz, dx);
}

void DenseLayer::backward_batch(std::span<const double> x, std::span<const double> y, std::span<const double> dy,
                                std::size_t rows, std::span<double> dx) {
  if (x.size() != rows * in_ || y.size() != rows * out_ || dy.size() != rows * out_ ||
      (!dx.empty() && dx.size() != rows * in_)) {
    throw ConfigError("dense layer " + name_ + ": batch shape mismatch in backward");
  }
  std::vector<double> dz(rows * out_);
  for (std::size_t r = 0; r < rows; ++r) {
    activation_grad(act_, y.subspan(r * out_, out_), dy.subspan(r * out_, out_),
                    std::span<double>(dz).subspan(r * out_, out_));
  }
  std::vector<double> xt(in_ * rows);
  kernels::transpose(x, rows, in_, xt);
  kernels::gemm(xt, dz, gw_.values(), in_, rows, out_);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < out_; ++j) gb_[j] += dz[r * out_ + j];
  }
  if (!dx.empty()) {
    std::vector<double> wt(out_ * in_);
    kernels::transpose(w_.values(), in_, out_, wt);
    kernels::gemm(dz, wt, dx, rows, out_, in_);
  }
}

void DenseLayer::append_params(ParamList& out) {
  out.push_back({name_ + ".W", &w_, &gw_});
  out.push_back({name_ + ".b", &b_, &gb_});
}

}  // namespace adex::nn
